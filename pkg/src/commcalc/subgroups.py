"""Sifted lattices for subgroups of the free nilpotent group F_m / gamma_q.

A subgroup is given by finitely many generators, usually the values of one
of the generator families below on all words up to a length bound.  It is
closed by sifting: every element is reduced weight by weight against pivot
elements whose leading Hall rows form an echelon basis of the section
(H cap gamma_n) gamma_{n+1} / gamma_{n+1}.  Each reduction multiplies by a
power of a pivot, so the pivots are always genuine elements of the
subgroup and every reported containment is sound.  Equalities between
lattices built from truncated generator sets are only as good as the
truncation, which is why lattices are also built at the previous length
bound and compared (the ``stable`` flag).

Generator families (``name:parameter``):

    gamma:n    left-normed commutators of n generators (normal closure)
    mu:k       [m, m^g] for g in the k-fold iterated normal closure of m
    mu27:k     [m, m^w2, ..., m^w(k+2)]: commutators of k+2 conjugates of m
    mu28:k     basic commutators of weight <= m(k+1) with >= k+2 equal
               entries, plus all basic commutators of larger weight
    delta:k    [g, m, ..., m] with k+2 copies of m
    delta32:k  [m, m^(m^(...^g))] with k+1 nested copies of m
    epsilon:n  [g, h, ..., h] with n copies of h
    nu:n       [h, g^p1, ..., g^pn], plus [c1 c2, g^p2, ..., g^pn] for
               products of two first-stage commutators ci = [hi, g^pi]^+-1
               (hi of length <= 1, g of length <= 2)
    nk:k       [g^-1, g^m] for g in the k-fold closure, together with mu:k
    derived2   [c1, c2] for basic commutators c1, c2 of weight >= 2
    gamma, epsilon, nu, delta, delta32, mu, mu27 and derived2 are closed
    under conjugation; mu28 and nk are closed as plain subgroups.

Here m runs over the generators x1..xm and g, h, u, v, w, z over reduced
words of length <= L.  Words are deduplicated by their image in a
quotient F_m / gamma_p that is provably fine enough for the family, which
keeps the instantiation small without changing the generated subgroup.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import CommCalcError, ResourceLimit, SpanNotStabilized
from .hall import generate_basis
from .intlattice import EchelonBasis, hermite_from_echelon, lattice_index, xgcd
from .magnus import TruncatedSeries, lie_bracket
from .nilpotent import Element, ElementBatch, ExponentVector, NilpotentContext
from .words import Word, commutator

DEFAULT_MAX_INSTANCES = 500_000
SCHEMES = ("gamma", "mu", "mu27", "mu28", "delta", "delta32", "epsilon", "nu", "nk", "derived2")


def default_length(m: int) -> int:
    return 4 if m <= 2 else 2


@dataclass(frozen=True)
class GeneratorScheme:
    name: str
    param: int | None = None
    length: int | None = None
    conj_depth: int | None = None
    powers: tuple = (1, -1, 2, -2)
    factors: int = 2

    def __post_init__(self):
        if self.name not in SCHEMES:
            raise ValueError(f"unknown scheme {self.name!r}; expected one of {', '.join(SCHEMES)}")
        if self.name != "derived2" and self.param is None:
            raise ValueError(f"scheme {self.name} needs a parameter, e.g. {self.name}:1")
        if self.param is not None and self.param < 0:
            raise ValueError(f"scheme parameter must be nonnegative, got {self.param}")
        if self.name in ("gamma", "epsilon", "nu") and self.param < 1:
            raise ValueError(f"{self.name}:n needs n >= 1")
        if self.name in ("mu", "nk") and self.conj_depth not in (None, self.param + 1):
            raise ValueError(f"{self.name}:{self.param} uses conjugation depth {self.param + 1}, got {self.conj_depth}")
        if self.length is not None and self.length < 0:
            raise ValueError("length bound must be nonnegative")

    @classmethod
    def parse(cls, text: str, **bounds) -> GeneratorScheme:
        name, _, param = text.strip().partition(":")
        try:
            value = int(param) if param else None
        except ValueError:
            raise ValueError(f"bad scheme parameter in {text!r}") from None
        return cls(name, value, **bounds)

    @property
    def normal(self) -> bool:
        return self.name not in ("mu28", "nk")

    def with_length(self, L: int) -> GeneratorScheme:
        return GeneratorScheme(self.name, self.param, L, self.conj_depth, self.powers, self.factors)

    def label(self) -> str:
        return self.name if self.param is None else f"{self.name}:{self.param}"


# -- instantiation -------------------------------------------------------------


class _Values:
    """A batch of group elements with (optionally) the words they came from."""

    __slots__ = ("words", "batch")

    def __init__(self, words, batch: ElementBatch):
        self.words = words
        self.batch = batch

    def __len__(self):
        return len(self.batch)

    def take(self, idx):
        words = None if self.words is None else [self.words[i] for i in idx]
        return _Values(words, self.batch.take(list(idx)))


def _pairwise(f, xs, ys):
    if len(xs) == len(ys):
        return [f(x, y) for x, y in zip(xs, ys)]
    if len(xs) == 1:
        return [f(xs[0], y) for y in ys]
    return [f(x, ys[0]) for x in xs]


class _BatchAlgebra:
    """Elementwise group operations on aligned batches (length-1 batches broadcast)."""

    def __init__(self, ctx: NilpotentContext, with_words: bool):
        self.ctx = ctx
        self.with_words = with_words

    def _words(self, f, x, y):
        if not self.with_words:
            return None
        return _pairwise(f, x.words, y.words)

    def gen(self, i) -> _Values:
        words = [Word.generator(i, self.ctx.m)] if self.with_words else None
        return _Values(words, ElementBatch.from_elements(self.ctx, [self.ctx.generator(i)]))

    def identity(self) -> _Values:
        words = [Word.identity(self.ctx.m)] if self.with_words else None
        return _Values(words, ElementBatch.identity(self.ctx))

    def mul(self, x, y):
        return _Values(self._words(lambda u, v: u * v, x, y), x.batch * y.batch)

    def inv(self, x):
        words = [w.inverse() for w in x.words] if self.with_words else None
        return _Values(words, x.batch.inverse())

    def pow(self, x, ks):
        """Row-wise powers; ks is an int or one exponent per row."""
        if self.with_words:
            kl = [ks] * len(x) if isinstance(ks, int) else list(ks)
            words = [w ** int(k) for w, k in zip(x.words, kl)]
        else:
            words = None
        return _Values(words, x.batch.power(ks))

    def conj(self, x, g):
        return _Values(self._words(lambda u, v: u.conjugate(v), x, g), x.batch.conj(g.batch))

    def comm(self, x, y):
        return _Values(self._words(commutator, x, y), x.batch.comm(y.batch))

    def left_normed(self, items):
        out = items[0]
        for y in items[1:]:
            out = self.comm(out, y)
        return out


    def cross(self, x, y):
        """All pairs (x_i, y_j), x-major."""
        nx, ny = len(x), len(y)
        xw = yw = None
        if self.with_words:
            xw = [w for w in x.words for _ in range(ny)]
            yw = [w for _ in range(nx) for w in y.words]
        return _Values(xw, x.batch.repeat(ny)), _Values(yw, y.batch.tile(nx))

    def concat(self, parts):
        parts = list(parts)
        words = [w for p in parts for w in p.words] if self.with_words else None
        return _Values(words, ElementBatch.concat(self.ctx, [p.batch for p in parts]))


def reduced_words(m: int, L: int):
    """All reduced words of length <= L, shortest first, deterministic order."""
    letters = [(g, e) for g in range(1, m + 1) for e in (1, -1)]
    out = [()]
    frontier = [()]
    for _ in range(L):
        nxt = []
        for w in frontier:
            for g, e in letters:
                if w and w[-1] == (g, -e):
                    continue
                nxt.append(w + ((g, e),))
        out.extend(nxt)
        frontier = nxt
    return [Word(m, w) for w in out]


class _Instantiator:
    def __init__(self, scheme: GeneratorScheme, ctx: NilpotentContext, with_words: bool,
                 max_instances: int):
        self.scheme = scheme
        self.ctx = ctx
        self.alg = _BatchAlgebra(ctx, with_words)
        self.max_instances = max_instances
        self.count = 0
        self.L = default_length(ctx.m) if scheme.length is None else scheme.length
        self._words = None
        self._word_list = None

    def bump(self, n=1):
        self.count += n
        if self.count > self.max_instances:
            raise ResourceLimit(
                f"instantiating {self.scheme.label()} exceeded {self.max_instances} candidates"
            )

    def dedupe(self, vals: _Values, prec) -> _Values:
        return vals.take(vals.batch.dedupe(prec))

    def words(self, prec, max_len=None) -> _Values:
        """Reduced words of length <= L (or max_len), one per class mod gamma_prec."""
        if self._words is None:
            ws = reduced_words(self.ctx.m, self.L)
            self.bump(len(ws))
            self._word_list = ws
            batch = ElementBatch.from_elements(self.ctx, [self.ctx.element(w) for w in ws])
            self._words = _Values(ws if self.alg.with_words else None, batch)
        vals = self._words
        if max_len is not None:
            vals = vals.take([i for i, w in enumerate(self._word_list) if len(w) <= max_len])
        return self.dedupe(vals, prec)

    def products(self, vals: _Values, prec) -> _Values:
        """1, the elements of vals and their products of up to ``factors`` of them."""
        alg = self.alg
        out = [alg.identity(), vals]
        layer = vals
        for _ in range(self.scheme.factors - 1):
            self.bump(len(layer) * len(vals))
            layer = self.dedupe(alg.mul(*alg.cross(layer, vals)), prec)
            out.append(layer)
        return self.dedupe(alg.concat(out), prec)

    def closure_level(self, i, k, top=None) -> _Values:
        """Representatives of the k-fold iterated normal closure of x_i.

        Level 0 is all short words; level j consists of products of at most
        ``factors`` conjugates m^x, m^-x with x from level j - 1.  Level j
        only matters modulo gamma_(top - (k - j)), top = q - 2 by default
        (the level-k elements are then used as conjugators of m).
        """
        top = self.ctx.q - 2 if top is None else top
        alg = self.alg
        m_i = alg.gen(i)
        level = self.words(top - k)
        for j in range(1, k + 1):
            prec = top - (k - j)
            c = alg.conj(m_i, level)
            self.bump(2 * len(level))
            conj = self.dedupe(alg.concat([c, alg.inv(c)]), prec)
            level = self.products(conj, prec)
        return level

    def bracket_tower(self, i, n) -> _Values:
        """Representatives of [[G, x_i], ..., x_i] (n brackets) as a plain subgroup.

        Stage j takes products of up to ``factors`` elements of stage j - 1
        and their inverses, then brackets them with x_i.
        """
        q = self.ctx.q
        alg = self.alg
        m_i = alg.gen(i)
        stage = self.words(q - n)
        for j in range(1, n + 1):
            prec = q - (n - j)
            if j > 1:
                stage = self.products(self.dedupe(alg.concat([stage, alg.inv(stage)]), prec - 1), prec - 1)
            self.bump(len(stage))
            stage = self.dedupe(alg.comm(stage, m_i), prec)
        return stage

    def run(self) -> _Values:
        s = self.scheme
        name = s.name
        ctx, alg, q, m = self.ctx, self.alg, self.ctx.q, self.ctx.m
        out = []

        def emit(vals):
            self.bump(len(vals))
            if not alg.with_words:
                # only the distinct nontrivial values matter for the lattice
                deg = vals.batch.degrees()
                vals = vals.take([i for i in vals.batch.dedupe() if deg[i] < q])
            out.append(vals)

        if name == "gamma":
            n = s.param
            for idx in itertools.product(range(1, m + 1), repeat=n):
                emit(alg.left_normed([alg.gen(i) for i in idx]))
        elif name == "mu":
            k = s.param
            for i in range(1, m + 1):
                m_i = alg.gen(i)
                emit(alg.comm(m_i, alg.conj(m_i, self.closure_level(i, k))))
        elif name == "mu27":
            k = s.param
            for i in range(1, m + 1):
                m_i = alg.gen(i)
                conj = self.dedupe(alg.conj(m_i, self.words(q)), q - k - 1)
                tuples = [conj]
                for _ in range(k):
                    self.bump(len(tuples[0]) * len(conj))
                    tuples = list(alg.cross(tuples[0], conj)) if len(tuples) == 1 else \
                        _extend_tuples(alg, tuples, conj)
                emit(alg.left_normed([m_i, *tuples]))
        elif name == "mu28":
            k = s.param
            chosen = [c for c in ctx.basis
                      if (max(c.multidegree) >= k + 2 and c.weight <= m * (k + 1))
                      or c.weight > m * (k + 1)]
            if chosen:
                words = [c.as_word(m) for c in chosen] if alg.with_words else None
                batch = ElementBatch.from_elements(ctx, [ctx.basis_element(c.ordinal) for c in chosen])
                emit(_Values(words, batch))
        elif name in ("delta", "delta32"):
            k = s.param
            for i in range(1, m + 1):
                m_i = alg.gen(i)
                g = self.words(q - k - 2)
                if name == "delta":
                    emit(alg.left_normed([g] + [m_i] * (k + 2)))
                else:
                    x = g
                    for _ in range(k + 1):
                        x = alg.conj(m_i, x)
                    emit(alg.comm(m_i, x))
        elif name == "epsilon":
            n = s.param
            ws = self.words(q - n)
            self.bump(len(ws) ** 2)
            g, h = alg.cross(ws, ws)
            emit(alg.left_normed([g] + [h] * n))
        elif name == "nu":
            self._nu(emit)
        elif name == "nk":
            k = s.param
            for i in range(1, m + 1):
                m_i = alg.gen(i)
                g = self.closure_level(i, k)
                emit(alg.comm(alg.inv(g), alg.conj(g, m_i)))
        elif name == "derived2":
            # F' is generated modulo gamma_(q-2) by basic commutators of weight
            # >= 2, and [xy, z] = [x, z]^y [y, z], so commutators of pairs of
            # them normally generate F'' modulo gamma_q
            comms = [c for c in ctx.basis if 2 <= c.weight <= q - 3]
            pairs = [(u, v) for u in comms for v in comms
                     if u.ordinal > v.ordinal and u.weight + v.weight < q]
            if pairs:
                words = ([commutator(u.as_word(m), v.as_word(m)) for u, v in pairs]
                         if alg.with_words else None)
                batch = ElementBatch.from_elements(
                    ctx, [ctx.basis_element(u.ordinal).comm(ctx.basis_element(v.ordinal))
                          for u, v in pairs])
                emit(_Values(words, batch))
        return alg.concat(out)

    def _nu(self, emit):
        """Values of [[G, <g>], ..., <g>] (n brackets).

        Chains [h, g^p1, ..., g^pn] cover the single-commutator elements of
        each stage.  Products [h1, g^p1]^+-1 [h2, g^p2]^+-1 of two
        first-stage commutators (h1, h2 of length <= 1, g of length <= 2)
        are fed through the remaining brackets as well, since those are the
        elements that set this family apart from the Engel one.
        """
        n = self.scheme.param
        alg, q = self.alg, self.ctx.q
        powers = list(self.scheme.powers)
        ws = self.words(q - n)
        self.bump(len(ws) ** 2)
        N = len(ws)
        gi = [i for i in range(N) for _ in range(N)]
        hi = [j for _ in range(N) for j in range(N)]
        h = (ws.take(hi), alg.inv(ws).take(hi))
        exps = sorted(set(powers) | {-p for p in powers})
        gpow = {p: alg.pow(ws, p).take(gi) for p in exps}

        def chains(x, xi, depth):
            # brackets sharing a prefix are computed once
            for p in powers:
                y, yi = gpow[p], gpow[-p]
                c = alg.mul(alg.mul(alg.mul(xi, yi), x), y)
                if depth == n:
                    emit(c)
                else:
                    ci = alg.mul(alg.mul(alg.mul(yi, xi), y), x)
                    chains(c, ci, depth + 1)

        chains(*h, 1)

        short_g = self.words(q - n, max_len=2)
        short_h = self.words(q - n, max_len=1)
        for gi in range(len(short_g)):
            gv = short_g.take([gi])
            firsts = []
            for p in powers:
                c = alg.comm(short_h, alg.pow(gv, p))
                firsts += [c, alg.inv(c)]
            firsts = self.dedupe(alg.concat(firsts), q)
            if len(firsts) < 2:
                continue
            left, right = zip(*itertools.combinations(range(len(firsts)), 2))
            x = alg.mul(firsts.take(left), firsts.take(right))
            for ps in itertools.product(powers, repeat=n - 1):
                emit(alg.left_normed([x] + [alg.pow(gv, p) for p in ps]))


def _extend_tuples(alg, tuples, extra):
    """Extend aligned tuple columns by one more column ranging over ``extra``."""
    n = len(tuples[0])
    out = []
    for col in tuples:
        out.append(alg.cross(col, extra)[0])
    out.append(alg.cross(tuples[0], extra)[1] if n else extra)
    return out


def cyclic_closure_lattices(ctx: NilpotentContext, i: int, n: int, length: int | None = None,
                            max_instances: int = DEFAULT_MAX_INSTANCES) -> tuple:
    """Plain-subgroup lattices of [x_i, (x_i)_n^G] and [G, x_i, ..., x_i] (n + 1 brackets).

    Here (x_i)_n^G is the n-fold iterated normal closure of x_i in G.  The
    two subgroups coincide; comparing the lattices tests both constructions.
    """
    scheme = GeneratorScheme("mu", n, length)
    inst = _Instantiator(scheme, ctx, False, max_instances)
    m_i = inst.alg.gen(i)
    left = inst.alg.comm(m_i, inst.closure_level(i, n, top=ctx.q - 1))
    right = inst.bracket_tower(i, n + 1)
    out = []
    for label, vals in (("closure", left), ("tower", right)):
        lat = SubgroupLattice(ctx, False, label)
        lat.add_batch(vals.batch)
        out.append(lat)
    return tuple(out)


def instantiate(scheme: GeneratorScheme, ctx: NilpotentContext,
                max_instances: int = DEFAULT_MAX_INSTANCES) -> list:
    """Deterministic list of generator words for the scheme."""
    return _Instantiator(scheme, ctx, True, max_instances).run().words


def instantiate_batch(scheme: GeneratorScheme, ctx: NilpotentContext,
                      max_instances: int = DEFAULT_MAX_INSTANCES) -> ElementBatch:
    """Distinct nontrivial generator values, as a batch of group elements."""
    batch = _Instantiator(scheme, ctx, False, max_instances).run().batch
    deg = batch.degrees()
    keep = [i for i in batch.dedupe() if deg[i] < ctx.q]
    return batch.take(keep)


def instantiate_elements(scheme: GeneratorScheme, ctx: NilpotentContext,
                         max_instances: int = DEFAULT_MAX_INSTANCES) -> list:
    return instantiate_batch(scheme, ctx, max_instances).elements()


# -- sifting ---------------------------------------------------------------------


@dataclass
class _Pivot:
    element: Element
    weight: int
    row: list
    col: int


class SubgroupLattice:
    """Sifted generating system of a subgroup of F_m / gamma_q."""

    def __init__(self, ctx: NilpotentContext, normal: bool = False, label: str = ""):
        self.ctx = ctx
        self.normal = normal
        self.label = label
        self.pivots = {n: {} for n in range(1, ctx.q)}
        self.stable = None
        self.sift_count = 0

    # ---- core sifting
    def _leading(self, x: Element):
        n = x.weight
        if n >= self.ctx.q:
            return n, None
        _, row = self.ctx.leading_row(x, n)
        return n, row

    def sift(self, x: Element):
        """Reduce x by pivot powers; returns (residual, weight, row, column).

        The residual is trivial (weight q) exactly when x lies in the lattice.
        """
        self.sift_count += 1
        while True:
            n, row = self._leading(x)
            if row is None:
                return x, n, None, None
            level = self.pivots[n]
            stuck = None
            for col in range(len(row)):
                a = row[col]
                if not a:
                    continue
                piv = level.get(col)
                if piv is None or a % piv.row[col]:
                    stuck = col
                    break
                f = a // piv.row[col]
                x = (piv.element ** -f) * x
                row = [r - f * p for r, p in zip(row, piv.row)]
            if stuck is not None:
                return x, n, row, stuck

    def sift_batch(self, batch: ElementBatch) -> tuple:
        """Sift every element of a batch at once.

        Returns (residuals, member mask).  A residual differs from its input
        by left factors from the lattice, so it generates the same subgroup
        together with the lattice.
        """
        ctx = self.ctx
        q = ctx.q
        K = len(batch)
        self.sift_count += K
        data = batch.data.copy()
        alive = np.ones(K, dtype=bool)
        for n in range(1, q):
            deg = ElementBatch(ctx, data).degrees()
            act = np.nonzero(alive & (deg == n))[0]
            if not len(act):
                continue
            X = ElementBatch(ctx, data[act])
            rows = ctx.leading_rows(X, n)
            ok = np.ones(len(act), dtype=bool)
            level = self.pivots[n]
            for col in range(rows.shape[1]):
                a = rows[:, col]
                nz = ok & (a != 0)
                if not nz.any():
                    continue
                piv = level.get(col)
                if piv is None:
                    ok &= ~nz
                    continue
                d = piv.row[col]
                rem = np.array([int(x) % d for x in a], dtype=bool) if a.dtype == object else (a % d != 0)
                ok &= ~(nz & rem)
                sel = np.nonzero(nz & ~rem)[0]
                if not len(sel):
                    continue
                f = np.array([int(x) // d for x in a[sel]], dtype=object)
                pw = ElementBatch.from_elements(ctx, [piv.element]).power(-f)
                X = _assign(X, sel, pw * X.take(sel))
                prow = np.array(piv.row, dtype=object)
                upd = rows[sel].astype(object) - f[:, None] * prow[None, :]
                rows = _assign_rows(rows, sel, upd)
            alive[act[~ok]] = False
            data = _assign_data(data, act, X.data)
        mask = alive & (ElementBatch(ctx, data).degrees() >= q)
        return ElementBatch(ctx, data), mask

    def add_batch(self, batch: ElementBatch, normal: bool | None = None) -> None:
        """Add a batch of generators, sifting the pending ones together."""
        saved = self.normal
        if normal is not None:
            self.normal = normal
        try:
            pending = batch
            while len(pending):
                pending, mask = self.sift_batch(pending)
                rest = np.nonzero(~mask)[0]
                if not len(rest):
                    break
                self._process([pending.element(int(rest[0]))])
                pending = pending.take(rest[1:])
        finally:
            self.normal = saved

    def contains(self, w) -> bool:
        x, n, _, _ = self.sift(self.ctx.element(w))
        return n >= self.ctx.q

    def _closure_partners(self, p: Element):
        partners = []
        for level in self.pivots.values():
            for piv in level.values():
                partners.append(piv.element)
        if self.normal:
            partners.extend(self.ctx.generator(i) for i in range(1, self.ctx.m + 1))
        return partners

    def add_generators(self, gens, normal: bool | None = None) -> None:
        """Add elements and re-close; ``normal`` overrides the lattice flag for this call."""
        saved = self.normal
        if normal is not None:
            self.normal = normal
        try:
            stack = [self.ctx.element(g) for g in reversed(list(gens))]
            self._process(stack)
        finally:
            self.normal = saved

    def _process(self, stack):
        q = self.ctx.q
        while stack:
            x = stack.pop()
            x, n, row, col = self.sift(x)
            if row is None:
                continue
            level = self.pivots[n]
            piv = level.get(col)
            if piv is None:
                if row[col] < 0:
                    x, row = x.inverse(), [-r for r in row]
                new = _Pivot(x, n, row, col)
                level[col] = new
            else:
                d, a = piv.row[col], row[col]
                g, s, t = xgcd(d, a)
                element = (piv.element ** s) * (x ** t)
                new = _Pivot(element, n, [s * p + t * r for p, r in zip(piv.row, row)], col)
                level[col] = new
                # the displaced pivot and x both reduce by the new one
                stack.append(piv.element)
                stack.append(x)
            for other in self._closure_partners(new.element):
                if n + other.weight < q and other is not new.element:
                    stack.append(new.element.comm(other))

    def verify_closed(self) -> bool:
        """Check that pivot commutators (and conjugates, if normal) sift to 1."""
        elems = self.elements()
        partners = list(elems)
        if self.normal:
            partners += [self.ctx.generator(i) for i in range(1, self.ctx.m + 1)]
        for p in elems:
            for o in partners:
                if p.weight + o.weight < self.ctx.q and not self.contains(p.comm(o)):
                    return False
        return True

    # ---- queries
    def elements(self) -> list:
        out = []
        for n in sorted(self.pivots):
            for col in sorted(self.pivots[n]):
                out.append(self.pivots[n][col].element)
        return out

    def section(self, n: int) -> list:
        """Hermite basis of the weight-n section, in weight-n Hall coordinates."""
        if not 1 <= n < self.ctx.q:
            raise ValueError(f"section weight must be in 1..{self.ctx.q - 1}")
        rows = {col: piv.row for col, piv in self.pivots[n].items()}
        return hermite_from_echelon(rows, len(self.ctx.stratum(n)))

    def section_index(self, n: int) -> int:
        return lattice_index(self.section(n), len(self.ctx.stratum(n)))

    def __le__(self, other: SubgroupLattice) -> bool:
        _same_ctx(self, other)
        return all(other.contains(e) for e in self.elements())

    def __eq__(self, other):
        if not isinstance(other, SubgroupLattice):
            return NotImplemented
        return self <= other and other <= self

    __hash__ = None

    def pivot_table(self) -> list:
        lines = []
        for n in sorted(self.pivots):
            for col in sorted(self.pivots[n]):
                piv = self.pivots[n][col]
                c = self.ctx.stratum(n)[col]
                lines.append(f"{n} {c} {piv.row[col]} {piv.row}")
        return lines

    def summary(self) -> dict:
        return {
            n: {"rank": len(self.pivots[n]), "index": self.section_index(n),
                "hermite": self.section(n)}
            for n in sorted(self.pivots)
        }


def _assign(X: ElementBatch, sel, Y: ElementBatch) -> ElementBatch:
    return ElementBatch(X.ctx, _assign_data(X.data, sel, Y.data))


def _assign_data(data, sel, new):
    if new.dtype == object and data.dtype != object:
        data = data.astype(object)
    data[sel] = new
    return data


def _assign_rows(rows, sel, upd):
    if rows.dtype != object:
        rows = rows.astype(object)
    rows[sel] = upd
    return rows


def _same_ctx(a, b):
    if a.ctx is not b.ctx:
        raise CommCalcError("lattices live in different contexts")


def close_subgroup(gens, ctx: NilpotentContext, normal: bool, label: str = "") -> SubgroupLattice:
    gens = list(gens)
    if not gens:
        raise ValueError("need at least one generator")
    lat = SubgroupLattice(ctx, normal, label)
    lat.add_generators(gens)
    return lat


def build_lattice(scheme: GeneratorScheme, ctx: NilpotentContext,
                  max_instances: int = DEFAULT_MAX_INSTANCES) -> SubgroupLattice:
    if scheme.name == "nk":
        base = GeneratorScheme("mu", scheme.param, scheme.length, None, scheme.powers, scheme.factors)
        lat = build_lattice(base, ctx, max_instances)
        lat.label = scheme.label()
        lat.normal = False
        lat.add_batch(instantiate_batch(scheme, ctx, max_instances), normal=False)
        return lat
    lat = SubgroupLattice(ctx, scheme.normal, scheme.label())
    lat.add_batch(instantiate_batch(scheme, ctx, max_instances))
    return lat


def build_stable_lattice(scheme: GeneratorScheme, ctx: NilpotentContext,
                         max_instances: int = DEFAULT_MAX_INSTANCES) -> SubgroupLattice:
    """Build at the length bound L and at L - 1; ``stable`` records whether they agree."""
    L = default_length(ctx.m) if scheme.length is None else scheme.length
    lat = build_lattice(scheme.with_length(L), ctx, max_instances)
    if L >= 1:
        prev = build_lattice(scheme.with_length(L - 1), ctx, max_instances)
        lat.stable = prev == lat
    else:
        lat.stable = False
    return lat


def product_lattice(a: SubgroupLattice, b: SubgroupLattice) -> SubgroupLattice:
    """Subgroup generated by two lattices (normal if both are)."""
    _same_ctx(a, b)
    lat = SubgroupLattice(a.ctx, a.normal and b.normal, f"{a.label}*{b.label}")
    lat.add_generators(a.elements() + b.elements())
    lat.stable = None if a.stable is None or b.stable is None else (a.stable and b.stable)
    return lat


def compare_lattices(a: SubgroupLattice, b: SubgroupLattice) -> str:
    sub = a <= b
    sup = b <= a
    if sub and sup:
        return "equal"
    if sub:
        return "strictlyFiner"
    if sup:
        return "strictlyCoarser"
    return "incomparable"


def contains(lat: SubgroupLattice, w) -> bool:
    return lat.contains(w)


def section_lattice(lat: SubgroupLattice, n: int) -> list:
    return lat.section(n)


def reduce_mod_mu_k(e: ExponentVector, k: int) -> ExponentVector:
    """Drop the basic commutators lying in mu_k: the heavy ones and those above weight m(k+1).

    What remains is the unique normal form of the image in F_m / mu_k gamma_q.
    """
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    ctx = e.ctx
    m = ctx.m
    vals = list(e.values)
    for c in ctx.basis:
        if max(c.multidegree) >= k + 2 or c.weight > m * (k + 1):
            vals[c.ordinal] = 0
    return ExponentVector(ctx, vals)


# -- Engel images in a single section --------------------------------------------


def _engel_tensor(m: int, n: int) -> np.ndarray:
    """T[i, j1..jn, :] = Hall coordinates of [X_i, X_j1, ..., X_jn] in weight n + 1."""
    ctx = NilpotentContext(m, n + 2, max_q=n + 2)
    solver = ctx.solver(n + 1)
    N = len(ctx.stratum(n + 1))
    T = np.zeros((m,) * (n + 1) + (N,), dtype=object)
    xs = [TruncatedSeries.variable(i, m, n + 2) for i in range(1, m + 1)]
    for idx in itertools.product(range(m), repeat=n + 1):
        poly = xs[idx[0]]
        for j in idx[1:]:
            poly = lie_bracket(poly, xs[j])
        b = poly.block(n + 1)
        e = solver.solve(b)
        solver.check(e, b)
        T[idx] = e
    return T


def _contract(tensor, w, n):
    t = tensor
    for _ in range(n):
        t = np.tensordot(t, w, axes=([1], [0]))
    return t


def engel_image_span(m: int, n: int, box: int, check_stable: bool = True) -> list:
    """Hermite span of the leading parts of [g, h, ..., h] (n copies of h).

    In gamma_(n+1) / gamma_(n+2) this leading part only depends on the
    abelianized vectors v, w of g, h; all v, w with entries in [-box, box]
    are used.  With ``check_stable`` the span is recomputed with box + 1 and
    SpanNotStabilized is raised if it grew.
    """
    if box < 1:
        raise ValueError("box must be at least 1")
    tensor = _engel_tensor(m, n)
    N = tensor.shape[-1]

    def span(b):
        basis = EchelonBasis(N)
        rng = range(-b, b + 1)
        vecs = [np.array(v, dtype=object) for v in itertools.product(rng, repeat=m)]
        seen = set()
        for w in vecs:
            t = _contract(tensor, w, n)
            for v in vecs:
                row = tuple(int(x) for x in np.dot(v, t))
                if any(row) and row not in seen:
                    seen.add(row)
                    basis.add(row)
        return basis.hermite()

    result = span(box)
    if check_stable:
        bigger = span(box + 1)
        if bigger != result:
            raise SpanNotStabilized(
                f"Engel span for m={m}, n={n} grew between box {box} and {box + 1}; try a larger box"
            )
    return result


def stratum_coordinates(m: int, weight: int) -> list:
    """The weight-`weight` basic commutators of F_m, in coordinate order."""
    return list(generate_basis(m, weight).stratum(weight))
