"""Normal forms in the free nilpotent group F_m / gamma_q.

Elements are handled through their Magnus expansions truncated below
degree q, which is a faithful representation of F_m / gamma_q.  A normal
form is the exponent vector e with

    w = prod_c c^{e(c)}  (mod gamma_q),

the product running over the basic commutators of weight < q in Hall
order.  It is found one weight at a time: the lowest nonvanishing degree
n of M(w) - 1 is a Z-combination of the Lie polynomials rho(c) of the
weight-n basic commutators, the coefficients are the weight-n exponents,
and the weight-n factor is then peeled off the left of w.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import sympy

from .errors import CommCalcError, InconsistentSystem, RankError, ResourceLimit
from .hall import BasicCommutator, generate_basis, rho
from .magnus import TruncatedSeries, _maxabs, _normalize, binomial, expand, ring
from .words import Word

DEFAULT_MAX_Q = {1: 12, 2: 7, 3: 5, 4: 4}


def default_max_q(m: int) -> int:
    return DEFAULT_MAX_Q.get(m, 3)


class _WeightSolver:
    """Solves  e . R = b  for the weight-n block R of the rho matrix."""

    def __init__(self, rows: np.ndarray):
        self.rows = rows
        mat = sympy.Matrix(rows.tolist())
        _, pivots = mat.rref(simplify=False)
        if len(pivots) != rows.shape[0]:
            raise CommCalcError("rho polynomials are not independent; Hall basis is broken")
        self.pivots = np.array(pivots, dtype=np.int64)
        square = mat.extract(list(range(rows.shape[0])), list(pivots))
        det = int(square.det(method="bareiss"))
        adj = square.adjugate(method="bareiss")
        if det < 0:
            det, adj = -det, -adj
        self.den = det
        self.adj = np.array([[int(x) for x in row] for row in adj.tolist()], dtype=object)
        self.adj64 = self.adj.astype(np.int64)
        self._adjmax = max((abs(int(x)) for x in self.adj.ravel()), default=0)
        self._rowmax = _maxabs(rows)

    def solve(self, b: np.ndarray) -> list:
        bp = b[self.pivots]
        bmax = int(np.abs(bp).max()) if bp.dtype != object else max(abs(int(x)) for x in bp)
        if bmax * self._adjmax * len(bp) < 2**62:
            num = [int(x) for x in bp.astype(np.int64) @ self.adj64]
        else:
            num = [int(x) for x in bp.astype(object) @ self.adj]
        out = []
        for x in num:
            quo, rem = divmod(x, self.den)
            if rem:
                raise InconsistentSystem("leading part has no integral Hall coordinates")
            out.append(quo)
        return out

    def solve_batch(self, B: np.ndarray) -> np.ndarray:
        """Row-wise solve for a (K, m^n) block matrix; returns a (K, N) integer matrix."""
        bp = B[:, self.pivots]
        bmax = _maxabs(bp)
        if bmax * self._adjmax * max(1, bp.shape[1]) < 2**62:
            num = bp.astype(np.int64) @ self.adj64
        else:
            num = bp.astype(object) @ self.adj
        quo, rem = np.divmod(num, self.den)
        if np.any(rem != 0):
            raise InconsistentSystem("leading part has no integral Hall coordinates")
        if _maxabs(quo) * self._rowmax * max(1, quo.shape[1]) < 2**62:
            back = quo.astype(np.int64) @ self.rows
        else:
            back = quo.astype(object) @ self.rows.astype(object)
        if np.any(back != B):
            raise InconsistentSystem("leading part is not in the span of the rho polynomials")
        return _normalize(quo) if quo.dtype == object else quo

    def check(self, e, b) -> None:
        back = np.array(e, dtype=object) @ self.rows.astype(object)
        if any(int(x) != int(y) for x, y in zip(back, b)):
            raise InconsistentSystem("leading part is not in the span of the rho polynomials")


class ExponentVector:
    """Exponents of the basic commutators of weight < q, indexed by ordinal."""

    __slots__ = ("ctx", "values")

    def __init__(self, ctx: NilpotentContext, values):
        values = tuple(int(v) for v in values)
        if len(values) != len(ctx.basis):
            raise ValueError(f"expected {len(ctx.basis)} exponents, got {len(values)}")
        self.ctx = ctx
        self.values = values

    @classmethod
    def zero(cls, ctx):
        return cls(ctx, [0] * len(ctx.basis))

    @classmethod
    def from_dict(cls, ctx, entries: dict):
        vals = [0] * len(ctx.basis)
        for c, e in entries.items():
            vals[ctx.index_of(c)] += e
        return cls(ctx, vals)

    def __getitem__(self, c) -> int:
        return self.values[self.ctx.index_of(c)]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def items(self):
        """Nonzero (basic commutator, exponent) pairs in Hall order."""
        basis = self.ctx.basis
        return [(basis[i], v) for i, v in enumerate(self.values) if v]

    def weight_part(self, n: int) -> list:
        return [self.values[c.ordinal] for c in self.ctx.basis.stratum(n)]

    def is_zero(self) -> bool:
        return not any(self.values)

    def __eq__(self, other):
        if not isinstance(other, ExponentVector):
            return NotImplemented
        return self.ctx is other.ctx and self.values == other.values

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        inner = ", ".join(f"{c}: {e}" for c, e in self.items())
        return f"ExponentVector({{{inner}}})"

    def lines(self, include_zero: bool = False) -> list:
        out = []
        for c in self.ctx.basis:
            e = self.values[c.ordinal]
            if e or include_zero:
                out.append(f"{c.ordinal} {c.weight} {c} {e}")
        return out


class Element:
    """Element of F_m / gamma_q stored as its truncated Magnus expansion."""

    __slots__ = ("ctx", "series", "_ypowers")

    def __init__(self, ctx: NilpotentContext, series: TruncatedSeries):
        if series.m != ctx.m or series.D != ctx.q:
            raise RankError(f"series (m={series.m}, D={series.D}) does not fit context (m={ctx.m}, q={ctx.q})")
        if series.constant != 1:
            raise CommCalcError("group elements have constant term 1")
        self.ctx = ctx
        self.series = series
        self._ypowers = None

    def __mul__(self, other: Element) -> Element:
        if not isinstance(other, Element):
            return NotImplemented
        return Element(self.ctx, self.series * other.series)

    def _y_powers(self) -> list:
        """[y, y^2, ...] for y = series - 1, up to the last nonzero power."""
        if self._ypowers is None:
            y = self.series - 1
            d = y.min_degree()
            powers = []
            if d < self.ctx.q:
                powers.append(y)
                for _ in range((self.ctx.q - 1) // d - 1):
                    powers.append(powers[-1] * y)
            self._ypowers = powers
        return self._ypowers

    def power_series(self, k: int) -> TruncatedSeries:
        r = self.series.ring
        data = r.one()
        if k == 0:
            return TruncatedSeries._wrap(r, data)
        for j, yj in enumerate(self._y_powers(), start=1):
            c = binomial(k, j)
            if c:
                data = r.add(data, yj.data, c)
        return TruncatedSeries._wrap(r, data)

    def __pow__(self, k: int) -> Element:
        return Element(self.ctx, self.power_series(k))

    def inverse(self) -> Element:
        return self ** -1

    def conj(self, g: Element) -> Element:
        return g.inverse() * self * g

    def comm(self, other: Element) -> Element:
        return self.inverse() * other.inverse() * self * other

    @property
    def weight(self) -> int:
        """Largest n < q with the element in gamma_n; q when trivial."""
        return self.series.min_degree()

    def is_identity(self) -> bool:
        return self.series.min_degree() >= self.ctx.q

    def key(self, prec: int | None = None):
        """Hashable fingerprint of the image in F_m / gamma_prec."""
        r = self.series.ring
        prec = self.ctx.q if prec is None else min(prec, self.ctx.q)
        data = self.series.data[: r.offsets[prec]]
        data = _normalize(data) if data.dtype == object else data
        if data.dtype == object:
            return tuple(int(x) for x in data)
        return data.tobytes()

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.series == other.series

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Element({self.ctx.normal_form(self)!r})"


class ElementBatch:
    """K elements of F_m / gamma_q at once, as a (K, size) coefficient array.

    Used to evaluate generator families over many candidate words, where
    per-element overhead would dominate.  Multiplication works degree block
    by degree block with outer products, exactly as for single series.
    """

    __slots__ = ("ctx", "data")

    def __init__(self, ctx: NilpotentContext, data: np.ndarray):
        self.ctx = ctx
        self.data = data

    @classmethod
    def from_elements(cls, ctx, elements):
        elements = list(elements)
        if not elements:
            return cls(ctx, np.zeros((0, ctx.ring.size), dtype=np.int64))
        dtype = object if any(e.series.data.dtype == object for e in elements) else np.int64
        return cls(ctx, np.stack([e.series.data.astype(dtype) for e in elements]))

    @classmethod
    def identity(cls, ctx, K: int = 1):
        data = np.zeros((K, ctx.ring.size), dtype=np.int64)
        data[:, 0] = 1
        return cls(ctx, data)

    def __len__(self):
        return self.data.shape[0]

    def element(self, i: int) -> Element:
        row = self.data[i].copy()
        return Element(self.ctx, TruncatedSeries._wrap(self.ctx.ring, _normalize(row) if row.dtype == object else row))

    def elements(self) -> list:
        return [self.element(i) for i in range(len(self))]

    def take(self, idx) -> ElementBatch:
        return ElementBatch(self.ctx, self.data[idx])

    def repeat(self, n: int) -> ElementBatch:
        return ElementBatch(self.ctx, np.repeat(self.data, n, axis=0))

    def tile(self, n: int) -> ElementBatch:
        return ElementBatch(self.ctx, np.tile(self.data, (n, 1)))

    @staticmethod
    def concat(ctx, batches) -> ElementBatch:
        batches = [b for b in batches if len(b)]
        if not batches:
            return ElementBatch(ctx, np.zeros((0, ctx.ring.size), dtype=np.int64))
        if any(b.data.dtype == object for b in batches):
            return ElementBatch(ctx, np.concatenate([b.data.astype(object) for b in batches]))
        return ElementBatch(ctx, np.concatenate([b.data for b in batches]))

    def _broadcast(self, other):
        if isinstance(other, Element):
            return np.broadcast_to(other.series.data, (len(self), self.ctx.ring.size))
        if len(other) == len(self):
            return other.data
        if len(other) == 1:
            return np.broadcast_to(other.data, (len(self), self.ctx.ring.size))
        if len(self) == 1:
            return other.data
        raise ValueError(f"batch sizes {len(self)} and {len(other)} do not match")

    def __mul__(self, other) -> ElementBatch:
        b = self._broadcast(other)
        a = self.data
        if len(self) == 1 and b.shape[0] > 1:
            a = np.broadcast_to(a, b.shape)
        return ElementBatch(self.ctx, _batch_mul(self.ctx.ring, a, b))

    def __rmul__(self, other) -> ElementBatch:
        if isinstance(other, Element):
            a = np.broadcast_to(other.series.data, self.data.shape)
            return ElementBatch(self.ctx, _batch_mul(self.ctx.ring, a, self.data))
        return NotImplemented

    def power(self, ks) -> ElementBatch:
        """Row-wise powers; ``ks`` is an int or a length-K sequence."""
        ks = np.asarray(ks, dtype=object).reshape(-1)
        data = self.data
        if len(self) == 1 and len(ks) > 1:
            data = np.repeat(data, len(ks), axis=0)
        K = data.shape[0]
        ks = np.broadcast_to(ks, (K,))
        r = self.ctx.ring
        y = data.copy()
        y[:, 0] -= 1
        out = np.zeros_like(data)
        out[:, 0] = 1
        yj = y
        uniq, inv = np.unique(np.asarray([int(k) for k in ks], dtype=object), return_inverse=True)
        kmax = max((abs(int(k)) for k in uniq), default=0)
        for j in range(1, self.ctx.q):
            if not np.any(yj):
                break
            coeff = np.array([binomial(int(k), j) for k in uniq], dtype=object)[inv]
            if kmax ** j * _maxabs(yj) < 2**61 and out.dtype != object and yj.dtype != object:
                out = out + coeff.astype(np.int64)[:, None] * yj
            else:
                out = _normalize_2d(out.astype(object) + coeff[:, None] * yj.astype(object))
            yj = _batch_mul(r, yj, y)
        return ElementBatch(self.ctx, out)

    def __pow__(self, k) -> ElementBatch:
        return self.power(k)

    def inverse(self) -> ElementBatch:
        return self.power(-1)

    def comm(self, other) -> ElementBatch:
        if isinstance(other, Element):
            oinv = other.inverse()
            return self.inverse() * oinv * self * other
        return self.inverse() * other.inverse() * self * other

    def conj(self, g) -> ElementBatch:
        if isinstance(g, Element):
            return g.inverse() * self * g
        return g.inverse() * self * g

    def degrees(self) -> np.ndarray:
        """Row-wise leading weight (q for trivial rows)."""
        nz = self.data[:, 1:] != 0
        has = nz.any(axis=1)
        first = np.argmax(nz, axis=1) + 1
        deg = self.ctx.ring.degree[first]
        return np.where(has, deg, self.ctx.q)

    def keys(self, prec: int | None = None) -> list:
        prec = self.ctx.q if prec is None else min(prec, self.ctx.q)
        width = self.ctx.ring.offsets[max(prec, 0)]
        part = self.data[:, :width]
        if part.dtype == object:
            part = _normalize_2d(part)
        if part.dtype == object:
            return [tuple(int(x) for x in row) for row in part]
        part = np.ascontiguousarray(part)
        return [row.tobytes() for row in part]

    def dedupe(self, prec: int | None = None):
        """Indices of the first row of each class modulo gamma_prec, in order."""
        seen = set()
        keep = []
        for i, key in enumerate(self.keys(prec)):
            if key not in seen:
                seen.add(key)
                keep.append(i)
        return keep


def _normalize_2d(a: np.ndarray) -> np.ndarray:
    if a.dtype == object and _maxabs(a) < 2**61:
        return a.astype(np.int64)
    return a


def _batch_mul(r, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise product of two (K, size) coefficient arrays."""
    K = max(a.shape[0], b.shape[0])
    big = a.dtype == object or b.dtype == object or _maxabs(a) * _maxabs(b) * r.D >= 2**62
    if big:
        a = a.astype(object)
        b = b.astype(object)
    out = np.zeros((K, r.size), dtype=object if big else np.int64)
    m = r.m
    blocks_a = [a[:, r.block(s)] for s in range(r.D)]
    blocks_b = [b[:, r.block(s)] for s in range(r.D)]
    # commutator-heavy work has many identically zero blocks
    live_a = [bool(np.any(x)) for x in blocks_a]
    live_b = [bool(np.any(x)) for x in blocks_b]
    for s in range(r.D):
        acc = out[:, r.block(s)]
        for t in range(s + 1):
            u = s - t
            if not (live_a[t] and live_b[u]):
                continue
            prod = blocks_a[t][:, :, None] * blocks_b[u][:, None, :]
            acc += prod.reshape(K, m**s)
    return _normalize_2d(out) if big else out


class ElementAlgebra:
    """Backend for evaluating word patterns directly in F_m / gamma_q."""

    def __init__(self, ctx: NilpotentContext):
        self.ctx = ctx

    def generator(self, i):
        return self.ctx.generator(i)

    def identity(self):
        return self.ctx.identity()

    def mul(self, x, y):
        return x * y

    def inv(self, x):
        return x.inverse()

    def pow(self, x, n):
        return x ** n

    def conj(self, x, g):
        return x.conj(g)

    def comm(self, x, y):
        return x.comm(y)


class NilpotentContext:
    """The free nilpotent group F_m / gamma_q with its Hall basis of weight < q."""

    def __init__(self, m: int, q: int, max_q: int | None = None,
                 generator_order=None, pair_order: str = "vu"):
        if m < 1:
            raise ValueError(f"rank must be at least 1, got {m}")
        if q < 2:
            raise ValueError(f"q must be at least 2, got {q}")
        cap = default_max_q(m) if max_q is None else max_q
        if q > cap:
            raise ResourceLimit(f"q={q} exceeds the configured cap {cap} for m={m}")
        self.m = m
        self.q = q
        self.basis = generate_basis(m, q - 1, generator_order, pair_order)
        self.ring = ring(m, q)
        self._solvers = {}
        self._elements = {}
        self.algebra = ElementAlgebra(self)

    def __repr__(self):
        return f"NilpotentContext(m={self.m}, q={self.q})"

    # -- basis access ------------------------------------------------------

    def index_of(self, c) -> int:
        if isinstance(c, BasicCommutator):
            found = self.basis.find(c.key)
        elif isinstance(c, int):
            return c
        elif isinstance(c, str):
            found = self.basis.parse(c)
        else:
            found = self.basis.find(c)
        if found is None:
            raise KeyError(f"{c} is not a basic commutator of weight < {self.q}")
        return found.ordinal

    def stratum(self, n: int) -> tuple:
        return self.basis.stratum(n)

    def solver(self, n: int) -> _WeightSolver:
        s = self._solvers.get(n)
        if s is None:
            rows = np.array(
                [[int(x) for x in rho(c, self.q).block(n)] for c in self.stratum(n)],
                dtype=np.int64,
            )
            s = _WeightSolver(rows)
            self._solvers[n] = s
        return s

    def basis_element(self, c) -> Element:
        i = self.index_of(c)
        el = self._elements.get(i)
        if el is None:
            c = self.basis[i]
            if c.is_generator:
                el = Element(self, TruncatedSeries.variable(c.key, self.m, self.q) + 1)
            else:
                el = self.basis_element(c.left.ordinal).comm(self.basis_element(c.right.ordinal))
            self._elements[i] = el
        return el

    # -- conversions -------------------------------------------------------

    def generator(self, i: int) -> Element:
        if not 1 <= i <= self.m:
            raise RankError(f"generator {i} outside 1..{self.m}")
        return self.basis_element(self.basis.lookup(i))

    def identity(self) -> Element:
        return Element(self, TruncatedSeries.one(self.m, self.q))

    def element(self, x) -> Element:
        if isinstance(x, Element):
            if x.ctx is not self:
                raise RankError("element belongs to a different context")
            return x
        if isinstance(x, Word):
            if x.rank != self.m:
                raise RankError(f"word of rank {x.rank} used in context of rank {self.m}")
            return Element(self, expand(x, self.q))
        if isinstance(x, TruncatedSeries):
            return Element(self, x)
        if isinstance(x, ExponentVector):
            return Element(self, self.series_of(x))
        raise TypeError(f"cannot convert {type(x).__name__} to a group element")

    # -- normal forms --------------------------------------------------------

    def leading_row(self, x, n: int | None = None):
        """(n, exponents of the weight-n stratum) for the leading weight n of x."""
        S = self.element(x).series
        if n is None:
            n = S.min_degree()
        if n >= self.q:
            return n, []
        b = S.block(n)
        solver = self.solver(n)
        e = solver.solve(b)
        solver.check(e, b)
        return n, e

    def leading_rows(self, batch: ElementBatch, n: int) -> np.ndarray:
        """Weight-n Hall rows of every element in a batch (lower blocks must vanish)."""
        return self.solver(n).solve_batch(batch.data[:, self.ring.block(n)])

    def _peel(self, S: TruncatedSeries, n: int, e) -> TruncatedSeries:
        """Left-multiply S by the inverse of prod_{c in stratum n} c^{e_c}."""
        stratum = self.stratum(n)
        r = self.ring
        if 2 * n >= self.q:
            data = S.data
            for c, k in zip(stratum, e):
                if k:
                    y = self.basis_element(c.ordinal)._y_powers()[0]
                    data = r.add(data, y.data, -k)
            return TruncatedSeries._wrap(r, data)
        # successive left factors end up in reverse order, as the inverse needs
        for c, k in zip(stratum, e):
            if k:
                S = self.basis_element(c.ordinal).power_series(-k) * S
        return S

    def normal_form(self, x) -> ExponentVector:
        S = self.element(x).series
        values = [0] * len(self.basis)
        for n in range(1, self.q):
            b = S.block(n)
            if not b.any():
                continue
            solver = self.solver(n)
            e = solver.solve(b)
            solver.check(e, b)
            for c, k in zip(self.stratum(n), e):
                values[c.ordinal] = k
            S = self._peel(S, n, e)
            if S.block(n).any():
                raise InconsistentSystem(f"weight {n} part survived elimination")
        return ExponentVector(self, values)

    def series_of(self, e: ExponentVector) -> TruncatedSeries:
        if e.ctx is not self:
            raise RankError("exponent vector belongs to a different context")
        S = TruncatedSeries.one(self.m, self.q)
        for c, k in e.items():
            S = S * self.basis_element(c.ordinal).power_series(k)
        return S

    def evaluate(self, e: ExponentVector) -> Word:
        runs = []
        for c, k in e.items():
            runs.extend((c.as_word(self.m) ** k).runs)
        return Word(self.m, runs)

    def weight_of(self, x) -> int:
        return min(self.element(x).weight, self.q)

    def nf_multiply(self, e1: ExponentVector, e2: ExponentVector) -> ExponentVector:
        return self.normal_form(self.series_of(e1) * self.series_of(e2))

    def nf_inverse(self, e: ExponentVector) -> ExponentVector:
        return self.normal_form(self.element(e).inverse())


@lru_cache(maxsize=32)
def context(m: int, q: int, max_q: int | None = None, generator_order=None,
            pair_order: str = "vu") -> NilpotentContext:
    """Shared, cached context; contexts are read-only after their caches fill."""
    return NilpotentContext(m, q, max_q, generator_order, pair_order)


def normal_form(w: Word, ctx: NilpotentContext) -> ExponentVector:
    return ctx.normal_form(w)


def evaluate(e: ExponentVector, ctx: NilpotentContext) -> Word:
    return ctx.evaluate(e)


def weight_of(w: Word, ctx: NilpotentContext) -> int:
    return ctx.weight_of(w)


def nf_multiply(e1: ExponentVector, e2: ExponentVector, ctx: NilpotentContext) -> ExponentVector:
    return ctx.nf_multiply(e1, e2)
