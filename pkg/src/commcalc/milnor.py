"""Milnor mu-bar invariants computed from longitude words.

A link is described here only by the data the invariants need: the number
of components m, a truncation q and one word l_i in the meridians x1..xm
for each longitude.  mu(i1 ... is i) is the coefficient of X_i1 ... X_is in
the Magnus expansion of l_i, reduced modulo Delta, the gcd of the |mu| of
the order-preserving proper subsequences of (i1, ..., is, i) of length >= 2.
In "milnor" mode those subsequences are also taken from every cyclic
rotation of the index.

The module also converts between mu-bar values and the exponents E(c; l_i)
of basic commutators in the normal form of the longitudes, checks the
product relation prod [x_j, l_j] = 1 (mod gamma_(n+2)) in its coordinate
form and its equivalence with cyclic symmetry, counts independent
invariants, classifies multi-indices under k-quasi-isotopy, and writes out
the finite presentation of the quotient by mu_k.
"""

from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .errors import CommCalcError, Indeterminate, RankError
from .hall import generate_basis, rho, witt_count
from .magnus import TruncatedSeries, binomial, expand
from .nilpotent import context, default_max_q
from .words import Word, commutator, format_word, generator_name, left_normed, parse_word

DELTA_MODES = ("ordered", "milnor")


class PresentationError(CommCalcError, ValueError):
    """Malformed link presentation text."""


class NonvanishingInvariants(CommCalcError):
    """A check that needs all shorter mu-bar invariants to vanish was given a link where some do not."""


class LinkPresentation:
    """Longitude words l_1..l_m of an m-component link, read modulo gamma_q.

    Magnus expansions and raw coefficients are cached, so a presentation
    should be treated as immutable once built.
    """

    def __init__(self, m: int, q: int, longitudes):
        longitudes = list(longitudes)
        if m < 1:
            raise RankError(f"need at least one component, got m={m}")
        if q < 2:
            raise ValueError(f"need q >= 2, got {q}")
        if len(longitudes) != m:
            raise RankError(f"expected {m} longitudes, got {len(longitudes)}")
        for i, w in enumerate(longitudes, 1):
            if w.rank != m:
                raise RankError(f"longitude l{i} has rank {w.rank}, expected {m}")
        self.m = m
        self.q = q
        self.longitudes = tuple(longitudes)
        self._series = {}
        self._raw = {}

    def __repr__(self):
        body = ", ".join(f"l{i}={format_word(w)}" for i, w in enumerate(self.longitudes, 1))
        return f"LinkPresentation(m={self.m}, q={self.q}, {body})"

    @classmethod
    def from_strings(cls, m: int, q: int, texts) -> LinkPresentation:
        return cls(m, q, [parse_word(t, m) for t in texts])

    def series(self, i: int) -> TruncatedSeries:
        """Magnus expansion of l_i below degree q."""
        S = self._series.get(i)
        if S is None:
            S = expand(self.longitude(i), self.q)
            self._series[i] = S
        return S

    def longitude(self, i: int) -> Word:
        if not 1 <= i <= self.m:
            raise RankError(f"component {i} outside 1..{self.m}")
        return self.longitudes[i - 1]

    def raw(self, idx) -> int:
        """Unreduced coefficient mu(i1 ... is i)."""
        idx = tuple(idx)
        hit = self._raw.get(idx)
        if hit is None:
            if len(idx) == 1:
                hit = 0
            else:
                hit = self.series(idx[-1]).coefficient(idx[:-1])
            self._raw[idx] = hit
        return hit

    def text(self) -> str:
        lines = [f"m={self.m}", f"q={self.q}"]
        lines += [f"l{i}={format_word(w)}" for i, w in enumerate(self.longitudes, 1)]
        return "\n".join(lines) + "\n"


_LINE = re.compile(r"^\s*([A-Za-z]\w*)\s*=\s*(.*?)\s*$")


def parse_presentation(text: str) -> LinkPresentation:
    """Read the line format ``m=<int>``, ``q=<int>``, ``l<i>=<word>``.

    Blank lines and ``#`` comments are ignored.  Every longitude must be
    given exactly once.
    """
    values = {}
    longs = {}
    for lineno, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        mt = _LINE.match(line)
        if not mt:
            raise PresentationError(f"line {lineno}: expected key=value, got {raw_line!r}")
        key, val = mt.group(1), mt.group(2)
        if key in ("m", "q"):
            if key in values:
                raise PresentationError(f"line {lineno}: {key} given twice")
            try:
                values[key] = int(val)
            except ValueError:
                raise PresentationError(f"line {lineno}: {key} must be an integer, got {val!r}") from None
        elif re.fullmatch(r"l\d+", key):
            i = int(key[1:])
            if i in longs:
                raise PresentationError(f"line {lineno}: {key} given twice")
            longs[i] = (lineno, val)
        else:
            raise PresentationError(f"line {lineno}: unknown key {key!r}")
    for key in ("m", "q"):
        if key not in values:
            raise PresentationError(f"missing {key}=")
    m, q = values["m"], values["q"]
    if m < 1 or q < 2:
        raise PresentationError(f"need m >= 1 and q >= 2, got m={m}, q={q}")
    bad = sorted(i for i in longs if not 1 <= i <= m)
    if bad:
        raise PresentationError(f"longitude l{bad[0]} but only {m} components")
    missing = [i for i in range(1, m + 1) if i not in longs]
    if missing:
        raise PresentationError(f"missing longitude l{missing[0]}")
    words = []
    for i in range(1, m + 1):
        lineno, val = longs[i]
        try:
            words.append(parse_word(val, m))
        except CommCalcError as exc:
            raise PresentationError(f"line {lineno}: {exc}") from exc
    return LinkPresentation(m, q, words)


def read_presentation(path) -> LinkPresentation:
    with open(path) as fh:
        return parse_presentation(fh.read())


# -- mu-bar values -----------------------------------------------------------


@dataclass(frozen=True)
class MuValue:
    index: tuple
    raw: int
    modulus: int
    residue: int
    mode: str = "ordered"

    def __str__(self):
        idx = format_index(self.index)
        if self.modulus:
            return f"mu({idx}) = {self.residue} mod {self.modulus} (raw {self.raw})"
        return f"mu({idx}) = {self.raw}"


def parse_index(idx) -> tuple:
    """Accept "231", "2,3,1" or a sequence of ints."""
    if isinstance(idx, str):
        text = idx.strip()
        parts = re.split(r"[,\s]+", text) if re.search(r"[,\s]", text) else list(text)
        try:
            return tuple(int(p) for p in parts if p)
        except ValueError:
            raise ValueError(f"bad multi-index {idx!r}") from None
    return tuple(int(i) for i in idx)


def format_index(idx) -> str:
    idx = tuple(idx)
    if all(i < 10 for i in idx):
        return "".join(str(i) for i in idx)
    return ",".join(str(i) for i in idx)


def _check_index(lp: LinkPresentation, idx) -> tuple:
    idx = parse_index(idx)
    if not 2 <= len(idx) <= lp.q - 1:
        raise ValueError(f"multi-index length must be in 2..{lp.q - 1} for q={lp.q}, got {len(idx)}")
    for i in idx:
        if not 1 <= i <= lp.m:
            raise RankError(f"index {i} outside 1..{lp.m}")
    return idx


def _subsequences(idx: tuple, mode: str):
    """Order-preserving subsequences of length 2 .. len-1 (of every rotation in milnor mode)."""
    if mode not in DELTA_MODES:
        raise ValueError(f"delta mode must be one of {DELTA_MODES}, not {mode!r}")
    n = len(idx)
    sources = [idx]
    if mode == "milnor":
        sources = [idx[r:] + idx[:r] for r in range(n)]
    seen = set()
    for src in sources:
        for t in range(2, n):
            for pos in itertools.combinations(range(n), t):
                sub = tuple(src[p] for p in pos)
                if sub not in seen:
                    seen.add(sub)
                    yield sub


def delta(lp: LinkPresentation, idx, mode: str = "ordered") -> int:
    """Indeterminacy Delta of mu(idx): gcd of |mu| over the shorter subsequences."""
    idx = _check_index(lp, idx)
    g = 0
    for sub in _subsequences(idx, mode):
        g = gcd(g, lp.raw(sub))
    return g


def mu(lp: LinkPresentation, idx, mode: str = "ordered") -> MuValue:
    idx = _check_index(lp, idx)
    raw = lp.raw(idx)
    d = delta(lp, idx, mode)
    return MuValue(idx, raw, d, raw % d if d else raw, mode)


def all_mu(lp: LinkPresentation, upto: int, mode: str = "ordered", nonzero_only: bool = False) -> list:
    """mu-bar values of every multi-index of length 2..upto, shortest first."""
    out = []
    for n in range(2, upto + 1):
        for idx in itertools.product(range(1, lp.m + 1), repeat=n):
            v = mu(lp, idx, mode)
            if not nonzero_only or v.residue:
                out.append(v)
    return out


# -- mu-bar versus commutator exponents --------------------------------------


def _orderings(I) -> list:
    return sorted(set(itertools.permutations(I)))


def _multidegree(I, m: int) -> tuple:
    c = Counter(I)
    return tuple(c.get(j, 0) for j in range(1, m + 1))


def _check_multi(lp: LinkPresentation, I, i):
    I = tuple(sorted(parse_index(I)))
    if not I:
        raise ValueError("the multi-index I must be nonempty")
    for j in I + (i,):
        if not 1 <= j <= lp.m:
            raise RankError(f"index {j} outside 1..{lp.m}")
    if len(I) + 1 >= lp.q:
        raise ValueError(f"|I| + 1 = {len(I) + 1} exceeds q - 1 = {lp.q - 1}")
    return I


def _small_context(m: int, n: int, generator_order=None, pair_order="vu"):
    # exponents of weight <= n do not depend on q, so gamma_(n+1) is enough
    return context(m, n + 1, max_q=max(n + 1, default_max_q(m)),
                   generator_order=generator_order, pair_order=pair_order)


def commutator_exponents(lp: LinkPresentation, I, i: int, generator_order=None,
                         pair_order: str = "vu") -> dict:
    """E(c; l_i) for the basic commutators c with multidegree I."""
    I = _check_multi(lp, I, i)
    n = len(I)
    ctx = _small_context(lp.m, n, generator_order, pair_order)
    e = ctx.normal_form(lp.longitude(i))
    md = _multidegree(I, lp.m)
    return {c: e[c.ordinal] for c in ctx.stratum(n) if c.multidegree == md}


def mu_from_e(lp: LinkPresentation, I, i: int, mode: str = "ordered", generator_order=None,
              pair_order: str = "vu") -> dict:
    """mu(I^s i) for every ordering s of I, read off sum_c E(c; l_i) rho(c).

    When I repeats a single index j there is no basic commutator with that
    multidegree; the coefficient of X_j^n is then binomial(E(x_j; l_i), n)
    exactly, because killing the other variables sends M(w) to
    (1 + X_j)^(exponent sum of x_j).
    """
    I = _check_multi(lp, I, i)
    n = len(I)
    if n > 1 and len(set(I)) == 1:
        j = I[0]
        ctx = _small_context(lp.m, 1, generator_order, pair_order)
        e = ctx.normal_form(lp.longitude(i))[ctx.basis.lookup(j).ordinal]
        v = binomial(e, n)
        d = delta(lp, I + (i,), mode)
        return {I: v % d if d else v}
    exps = commutator_exponents(lp, I, i, generator_order, pair_order)
    total = TruncatedSeries(lp.m, n + 1, {})
    for c, k in exps.items():
        if k:
            total = total + rho(c, n + 1) * k
    out = {}
    for sigma in _orderings(I):
        idx = sigma + (i,)
        v = total.coefficient(sigma)
        d = delta(lp, idx, mode)
        out[sigma] = v % d if d else v
    return out


def e_from_mu(lp: LinkPresentation, I, i: int, mode: str = "ordered", generator_order=None,
              pair_order: str = "vu") -> dict:
    """Recover E(c; l_i) for the bracketings c of I from the values mu(I^s i).

    Only possible when every Delta(I^s i) vanishes; otherwise the
    invariants determine the exponents only up to the indeterminacy and
    Indeterminate is raised.
    """
    I = _check_multi(lp, I, i)
    n = len(I)
    orders = _orderings(I)
    for sigma in orders:
        d = delta(lp, sigma + (i,), mode)
        if d:
            raise Indeterminate(
                f"Delta({format_index(sigma + (i,))}) = {d}; exponents are not determined")
    ctx = _small_context(lp.m, n, generator_order, pair_order)
    r = ctx.ring
    b = np.zeros(lp.m ** n, dtype=object)
    start = r.block(n).start
    for sigma in orders:
        b[r.index(sigma) - start] = lp.raw(sigma + (i,))
    solver = ctx.solver(n)
    e = solver.solve(b)
    solver.check(e, b)
    md = _multidegree(I, lp.m)
    return {c: int(x) for c, x in zip(ctx.stratum(n), e) if c.multidegree == md}


# -- relations between the exponents ------------------------------------------


def _require_vanishing(lp: LinkPresentation, n: int):
    """All mu-bar of length <= n vanish iff every l_j lies in gamma_n."""
    for j, w in enumerate(lp.longitudes, 1):
        S = expand(w, n)
        if S.min_degree() < n:
            raise NonvanishingInvariants(
                f"l{j} has a nonzero mu-bar invariant of length <= {n}; the check needs them all to vanish")


@dataclass
class StarReport:
    n: int
    sums: dict          # basic commutator of weight n+1 -> relation value
    oracle: dict        # same coordinates of prod_j [x_j, l_j]
    passed: bool

    def lines(self, rank: int | None = None) -> list:
        out = [f"relations for weight {self.n + 1}: {'pass' if self.passed else 'FAIL'}"]
        for c, v in self.sums.items():
            out.append(f"  {c.format(rank)} {v}")
        return out


def check_relations_star(lp: LinkPresentation, n: int) -> StarReport:
    """Evaluate sum_{(J,j)=K} sum_c E(K; [x_j, J^c]) E(J^c; l_j) for every K of weight n+1.

    Requires all mu-bar of length <= n to vanish.  The sums are also
    compared with the weight n+1 exponents of prod_j [x_j, l_j], computed
    directly from the words; the report passes when all sums vanish.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if n + 1 >= lp.q:
        raise ValueError(f"weight {n + 1} needs q > {n + 1}, presentation has q={lp.q}")
    _require_vanishing(lp, n)
    m = lp.m
    ctx = context(m, n + 2, max_q=max(n + 2, default_max_q(m)))
    stratum = ctx.stratum(n)
    top = ctx.stratum(n + 1)
    sums = np.zeros(len(top), dtype=object)
    product = ctx.identity()
    for j in range(1, m + 1):
        lj = ctx.element(lp.longitude(j))
        xj = ctx.generator(j)
        product = product * xj.comm(lj)
        e = ctx.normal_form(lj)
        for c in stratum:
            k = e[c.ordinal]
            if not k:
                continue
            w = xj.comm(ctx.basis_element(c.ordinal))
            _, row = ctx.leading_row(w, n + 1)
            sums += k * np.array(row, dtype=object)
    _, direct = ctx.leading_row(product, n + 1)
    rows = {c: int(v) for c, v in zip(top, sums)}
    oracle = {c: int(v) for c, v in zip(top, direct)}
    return StarReport(n, rows, oracle, all(v == 0 for v in rows.values()))


@dataclass
class CyclicReport:
    length: int
    mode: str
    failures: list = field(default_factory=list)   # (rotation class, values)
    passed: bool = True
    star_passed: bool | None = None

    @property
    def equivalent(self) -> bool:
        return self.star_passed is None or self.star_passed == self.passed


def check_cyclic_symmetry(lp: LinkPresentation, length: int, mode: str = "ordered") -> CyclicReport:
    """Compare mu-bar across the cyclic rotations of every index of the given length.

    Values are compared modulo the gcd of the Deltas of the rotations.  The
    relation check at n = length - 1 is run on the same presentation, so
    the report also says whether both checks agree.
    """
    if length < 2:
        raise ValueError(f"need length >= 2, got {length}")
    n = length - 1
    _require_vanishing(lp, n)
    report = CyclicReport(length, mode)
    done = set()
    for idx in itertools.product(range(1, lp.m + 1), repeat=length):
        if idx in done:
            continue
        rots = [idx[r:] + idx[:r] for r in range(length)]
        done.update(rots)
        vals = [mu(lp, r, mode) for r in rots]
        g = 0
        for v in vals:
            g = gcd(g, v.modulus)
        reduced = {v.raw % g if g else v.raw for v in vals}
        if len(reduced) > 1:
            report.failures.append((idx, [(v.index, v.raw) for v in vals]))
    report.passed = not report.failures
    if n + 1 < lp.q:
        report.star_passed = check_relations_star(lp, n).passed
    return report


# -- counting and classification -----------------------------------------------


def count_independent_mu(m: int, length: int) -> int:
    """Number of linearly independent mu-bar invariants of the given length.

    For length n + 1 >= 3 this is m N_n - N_(n+1), valid when all shorter
    invariants vanish; for length 2 it is the number of linking numbers.
    """
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if length < 2:
        raise ValueError(f"length must be at least 2, got {length}")
    if length == 2:
        return m * (m - 1) // 2
    return m * witt_count(m, length - 1) - witt_count(m, length)


CLASSES = ("extractable", "notExtractable", "invariantOnly", "outside")


def classify_mu(idx, k: int) -> str:
    """Place mu(idx) relative to the invariants of k-quasi-isotopy (k >= 1).

    extractable     deleting one position leaves <= k+1 copies of every index
    invariantOnly   not extractable, but of length <= 2k+3
    notExtractable  some index occurs >= k+3 times or two indices >= k+2 times
                    each, and the length exceeds 2k+3
    outside         not a mu-bar index at all (length < 2)
    """
    if k < 1:
        raise ValueError(f"classification needs k >= 1, got {k}")
    idx = parse_index(idx)
    if len(idx) < 2:
        return "outside"
    counts = sorted(Counter(idx).values(), reverse=True)
    extractable = counts[0] <= k + 2 and (len(counts) == 1 or counts[1] <= k + 1)
    if extractable:
        return "extractable"
    if len(idx) <= 2 * k + 3:
        return "invariantOnly"
    return "notExtractable"


# -- presentation of the quotient by mu_k -------------------------------------


@dataclass
class QuotientPresentation:
    m: int
    k: int
    peripheral: list       # [x_i, l_i]
    heavy: list            # basic commutators with >= k+2 equal entries
    top: list              # left-normed commutators of weight m(k+1)+1

    def text(self) -> str:
        gens = " ".join(generator_name(i, self.m) for i in range(1, self.m + 1))
        lines = [f"generators: {gens}", f"k: {self.k}"]
        lines += [f"peripheral: {format_word(w)}" for w in self.peripheral]
        lines += [f"heavy: {c.format(self.m)}" for c in self.heavy]
        width = self.m * (self.k + 1) + 1
        lines.append(f"top: all {len(self.top)} left-normed commutators of weight {width}")
        lines += [f"  {t}" for t in self._top_names()]
        return "\n".join(lines) + "\n"

    def _top_names(self):
        for idx in itertools.product(range(1, self.m + 1), repeat=self.m * (self.k + 1) + 1):
            yield "[" + ",".join(generator_name(i, self.m) for i in idx) + "]"

    def relators(self) -> list:
        return list(self.peripheral) + [c.as_word(self.m) for c in self.heavy] + list(self.top)


def emit_gk_presentation(lp: LinkPresentation, k: int) -> QuotientPresentation:
    """Finite presentation of pi / mu_k from the longitudes (needs q > m(k+1)).

    Relators: the peripheral commutators [x_i, l_i], every basic commutator
    of weight <= m(k+1) in which one generator fills at least k+2 entries,
    and every left-normed commutator of weight m(k+1)+1.
    """
    m = lp.m
    if k < 0:
        raise ValueError(f"need k >= 0, got {k}")
    bound = m * (k + 1)
    if lp.q <= bound:
        raise ValueError(f"need q > m(k+1) = {bound}, presentation has q={lp.q}")
    peripheral = [commutator(Word.generator(i, m), lp.longitude(i)) for i in range(1, m + 1)]
    heavy = [c for c in generate_basis(m, bound) if max(c.multidegree) >= k + 2]
    top = [left_normed(*(Word.generator(i, m) for i in idx))
           for idx in itertools.product(range(1, m + 1), repeat=bound + 1)]
    return QuotientPresentation(m, k, peripheral, heavy, top)
