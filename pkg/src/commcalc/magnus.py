"""Truncated noncommutative power series with integer coefficients.

A series in variables X1..Xm is kept modulo all monomials of degree >= D.
Coefficients are stored densely in graded-lexicographic order, so index
``offset[s] + sum((i_j - 1) * m**(s - j))`` holds the monomial
``X_{i_1} ... X_{i_s}``.  Arrays are int64 while a cheap bound shows no
overflow can happen and fall back to Python integers (object dtype)
otherwise; the observable behaviour is exact integer arithmetic.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

import numpy as np

from .errors import CommCalcError, RankError
from .words import Word

_FLOAT_EXACT = 2**52
_INT64_SAFE = 2**61


class _Ring:
    """Index tables for the truncated free algebra on m letters below degree D."""

    def __init__(self, m: int, D: int):
        if m < 1 or D < 1:
            raise ValueError(f"need m >= 1 and D >= 1, got m={m}, D={D}")
        self.m = m
        self.D = D
        self.offsets = [0]
        for s in range(D):
            self.offsets.append(self.offsets[-1] + m**s)
        self.size = self.offsets[D]
        self.degree = np.concatenate(
            [np.full(m**s, s, dtype=np.int64) for s in range(D)]
        )

        ia, ib, ic = [], [], []
        for s in range(D):
            for t in range(D - s):
                iu = np.arange(m**s, dtype=np.int64)
                iv = np.arange(m**t, dtype=np.int64)
                ia.append(np.repeat(self.offsets[s] + iu, m**t))
                ib.append(np.tile(self.offsets[t] + iv, m**s))
                ic.append((self.offsets[s + t] + iu[:, None] * m**t + iv[None, :]).ravel())
        self._ia = np.concatenate(ia)
        self._ib = np.concatenate(ib)
        self._ic = np.concatenate(ic)

        # right multiplication by X_g^j: source indices and destination bases
        self._shift = []
        for j in range(D):
            src, dst = [], []
            for s in range(D - j):
                iu = np.arange(m**s, dtype=np.int64)
                src.append(self.offsets[s] + iu)
                dst.append(self.offsets[s + j] + iu * m**j)
            self._shift.append((np.concatenate(src), np.concatenate(dst)))

        self._monomials = None
        self._run_cache = {}
        self._var_counts = None

    def power_index(self, g: int, j: int) -> int:
        """Position of X_g^j inside the degree-j block."""
        return (g - 1) * sum(self.m**r for r in range(j))

    def index(self, mono) -> int:
        s = len(mono)
        if s >= self.D:
            raise CommCalcError(f"monomial of degree {s} not below truncation {self.D}")
        idx = 0
        for v in mono:
            if not 1 <= v <= self.m:
                raise RankError(f"variable {v} outside 1..{self.m}")
            idx = idx * self.m + (v - 1)
        return self.offsets[s] + idx

    @property
    def monomials(self) -> list:
        if self._monomials is None:
            out = []
            for s in range(self.D):
                for k in range(self.m**s):
                    digits = []
                    for _ in range(s):
                        k, r = divmod(k, self.m)
                        digits.append(r + 1)
                    out.append(tuple(reversed(digits)))
            self._monomials = out
        return self._monomials

    @property
    def var_counts(self) -> np.ndarray:
        """``var_counts[v - 1, idx]`` = occurrences of X_v in monomial idx."""
        if self._var_counts is None:
            counts = np.zeros((self.m, self.size), dtype=np.int64)
            for idx, mono in enumerate(self.monomials):
                for v in mono:
                    counts[v - 1, idx] += 1
            self._var_counts = counts
        return self._var_counts

    def block(self, n: int) -> slice:
        return slice(self.offsets[n], self.offsets[n + 1])

    # -- exact kernels -----------------------------------------------------

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        bound = _maxabs(a) * _maxabs(b) * self.D
        if bound < _FLOAT_EXACT:
            w = (a[self._ia] * b[self._ib]).astype(np.float64)
            out = np.bincount(self._ic, weights=w, minlength=self.size)
            return np.rint(out).astype(np.int64)
        prod = a[self._ia].astype(object) * b[self._ib].astype(object)
        out = np.zeros(self.size, dtype=object)
        np.add.at(out, self._ic, prod)
        return _normalize(out)

    def _run_tables(self, g: int):
        """Source/destination indices for right multiplication by X_g^j, all j >= 1."""
        tables = self._run_cache.get(g)
        if tables is None:
            src, dst, js = [], [], []
            for j in range(1, self.D):
                s, d = self._shift[j]
                src.append(s)
                dst.append(d + self.power_index(g, j))
                js.append(np.full(len(s), j, dtype=np.int64))
            if src:
                tables = (np.concatenate(src), np.concatenate(dst), np.concatenate(js))
            else:
                empty = np.zeros(0, dtype=np.int64)
                tables = (empty, empty, empty)
            self._run_cache[g] = tables
        return tables

    def mul_power_series(self, a: np.ndarray, g: int, coeffs) -> np.ndarray:
        """``a * sum_j coeffs[j] X_g^j`` (coeffs[0] is the constant)."""
        src, dst, js = self._run_tables(g)
        coeffs = list(coeffs)[: self.D] + [0] * max(0, self.D - len(coeffs))
        total = sum(abs(c) for c in coeffs)
        bound = _maxabs(a) * total
        if bound < _FLOAT_EXACT:
            w = np.array(coeffs, dtype=np.float64)[js] * a[src]
            out = np.bincount(dst, weights=w, minlength=self.size) + a * float(coeffs[0])
            return np.rint(out).astype(np.int64)
        c = np.array(coeffs, dtype=object)
        out = a.astype(object) * coeffs[0]
        np.add.at(out, dst, c[js] * a[src].astype(object))
        return _normalize(out)

    def add(self, a: np.ndarray, b: np.ndarray, scale: int = 1) -> np.ndarray:
        if _maxabs(a) + _maxabs(b) * abs(scale) >= _INT64_SAFE or abs(scale) >= _INT64_SAFE:
            return _normalize(a.astype(object) + b.astype(object) * scale)
        return a + b * np.int64(scale)

    def one(self) -> np.ndarray:
        out = np.zeros(self.size, dtype=np.int64)
        out[0] = 1
        return out


def _maxabs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(x)) for x in a)
    return int(np.abs(a).max())


def _normalize(a: np.ndarray) -> np.ndarray:
    if a.dtype == object and _maxabs(a) < _INT64_SAFE:
        return a.astype(np.int64)
    return a


@lru_cache(maxsize=None)
def ring(m: int, D: int) -> _Ring:
    return _Ring(m, D)


@lru_cache(maxsize=4096)
def _binomials(k: int, D: int) -> tuple:
    return tuple(binomial(k, j) for j in range(D))


def binomial(k: int, j: int) -> int:
    """Generalized binomial coefficient C(k, j) for any integer k."""
    if k >= 0:
        return comb(k, j)
    return (-1) ** j * comb(-k + j - 1, j)


class TruncatedSeries:
    """Immutable element of Z<<X1..Xm>> modulo degree >= D."""

    __slots__ = ("ring", "data")

    def __init__(self, m: int, D: int, coefficients=None):
        self.ring = ring(m, D)
        self.data = np.zeros(self.ring.size, dtype=np.int64)
        if coefficients:
            data = self.data.astype(object)
            for mono, c in coefficients.items():
                data[self.ring.index(tuple(mono))] += int(c)
            self.data = _normalize(data)
        self.data.flags.writeable = False

    @classmethod
    def _wrap(cls, r: _Ring, data: np.ndarray) -> TruncatedSeries:
        out = object.__new__(cls)
        out.ring = r
        data.flags.writeable = False
        out.data = data
        return out

    @classmethod
    def one(cls, m: int, D: int) -> TruncatedSeries:
        r = ring(m, D)
        return cls._wrap(r, r.one())

    @classmethod
    def variable(cls, i: int, m: int, D: int) -> TruncatedSeries:
        return cls(m, D, {(i,): 1})

    @property
    def m(self) -> int:
        return self.ring.m

    @property
    def D(self) -> int:
        return self.ring.D

    @property
    def constant(self) -> int:
        return int(self.data[0])

    def coefficients(self) -> dict:
        mons = self.ring.monomials
        return {mons[i]: int(self.data[i]) for i in np.flatnonzero(self.data)}

    def coefficient(self, mono) -> int:
        return int(self.data[self.ring.index(tuple(mono))])

    def homogeneous(self, n: int) -> TruncatedSeries:
        out = np.zeros_like(self.data)
        if 0 <= n < self.D:
            blk = self.ring.block(n)
            out[blk] = self.data[blk]
        return TruncatedSeries._wrap(self.ring, out)

    def block(self, n: int) -> np.ndarray:
        return self.data[self.ring.block(n)]

    def truncate(self, D: int) -> TruncatedSeries:
        if D > self.D:
            raise ValueError(f"cannot raise truncation from {self.D} to {D}")
        r = ring(self.m, D)
        return TruncatedSeries._wrap(r, self.data[: r.size].copy())

    def min_degree(self) -> int:
        """Lowest degree of a nonzero term of ``self - constant``; D if none."""
        nz = np.flatnonzero(self.data[1:])
        if nz.size == 0:
            return self.D
        return int(self.ring.degree[nz[0] + 1])

    def _same(self, other: TruncatedSeries) -> None:
        if self.ring is not other.ring:
            raise CommCalcError(
                f"series mismatch: (m={self.m}, D={self.D}) vs (m={other.m}, D={other.D})"
            )

    def __add__(self, other):
        if isinstance(other, int):
            other = TruncatedSeries.one(self.m, self.D) * other
        self._same(other)
        return TruncatedSeries._wrap(self.ring, self.ring.add(self.data, other.data))

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        if isinstance(other, int):
            other = TruncatedSeries.one(self.m, self.D) * other
        self._same(other)
        return TruncatedSeries._wrap(self.ring, self.ring.add(self.data, other.data, -1))

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            zero = np.zeros_like(self.data)
            return TruncatedSeries._wrap(self.ring, self.ring.add(zero, self.data, int(other)))
        self._same(other)
        return TruncatedSeries._wrap(self.ring, self.ring.mul(self.data, other.data))

    def __rmul__(self, other):
        if isinstance(other, (int, np.integer)):
            return self * other
        return NotImplemented

    def power(self, k: int) -> TruncatedSeries:
        """``self**k`` for a series with constant term 1 (k may be negative)."""
        if self.constant != 1:
            if k >= 0:
                out = TruncatedSeries.one(self.m, self.D)
                for _ in range(k):
                    out = out * self
                return out
            return self.inverse().power(-k)
        y = self - 1
        d = y.min_degree()
        out = TruncatedSeries.one(self.m, self.D)
        if d >= self.D or k == 0:
            return out
        yj = y
        for j in range(1, (self.D - 1) // d + 1):
            c = binomial(k, j)
            if c:
                out = out + yj * c
            if j < (self.D - 1) // d:
                yj = yj * y
        return out

    def inverse(self) -> TruncatedSeries:
        """Two-sided inverse; requires constant term +1 or -1."""
        c = self.constant
        if c not in (1, -1):
            raise CommCalcError(f"constant term {c} is not a unit")
        unit = self * c
        return unit.power(-1) * c

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.ring is other.ring and bool(np.array_equal(self.data, other.data))

    __hash__ = None

    def __repr__(self) -> str:
        return f"TruncatedSeries(m={self.m}, D={self.D}, {self})"

    def __str__(self) -> str:
        terms = []
        mons = self.ring.monomials
        for i in np.flatnonzero(self.data):
            c = int(self.data[i])
            name = "".join(f"X{v}" for v in mons[i])
            if not name:
                body = str(abs(c))
            elif abs(c) == 1:
                body = name
            else:
                body = f"{abs(c)}*{name}"
            if not terms:
                terms.append(body if c > 0 else f"-{body}")
            else:
                terms.append(("+ " if c > 0 else "- ") + body)
        return " ".join(terms) if terms else "0"


_EXPAND_CHUNK = 1024


def expand(w: Word, D: int) -> TruncatedSeries:
    """Magnus expansion of w truncated below degree D (x_i -> 1 + X_i)."""
    r = ring(w.rank, D)
    runs = w.runs
    data = r.one()
    for start in range(0, len(runs), _EXPAND_CHUNK):
        part = _expand_runs(r, runs[start:start + _EXPAND_CHUNK])
        data = part if start == 0 else r.mul(data, part)
    return TruncatedSeries._wrap(r, data)


def _expand_runs(r: _Ring, runs) -> np.ndarray:
    """Expansion of a run sequence, vectorized over the runs.

    Row t of ``levels[s]`` holds the degree-s coefficients of the prefix
    made of the first t runs; a degree-s term either comes from the prefix
    already or ends with X_g^j taken from run t, which gives a cumulative
    sum over t of contributions from the lower levels.
    """
    m, D = r.m, r.D
    T = len(runs)
    if T == 0:
        return r.one()
    gens = np.array([g for g, _ in runs], dtype=np.int64)
    exps = [e for _, e in runs]
    letters = sum(abs(e) for e in exps)
    # every coefficient (and partial sum) is bounded by C(letters + D - 2, D - 1)
    dtype = object if comb(letters + D - 2, D - 1) >= _INT64_SAFE else np.int64
    table = np.array([_binomials(e, D) for e in exps], dtype=dtype)
    rows = np.arange(T)[:, None]
    levels = [np.ones((T + 1, 1), dtype=dtype)]
    for s in range(1, D):
        contrib = np.zeros((T, m**s), dtype=dtype)
        for j in range(1, s + 1):
            prev = levels[s - j][:-1]
            shift = np.array([r.power_index(g, j) for g in range(1, m + 1)], dtype=np.int64)
            cols = np.arange(m ** (s - j))[None, :] * m**j + shift[gens - 1][:, None]
            contrib[rows, cols] += table[:, j][:, None] * prev
        level = np.zeros((T + 1, m**s), dtype=dtype)
        level[1:] = np.cumsum(contrib, axis=0)
        levels.append(level)
    data = np.concatenate([lvl[-1] for lvl in levels])
    return _normalize(data) if dtype is object else data


def series_arith(kind: str, *operands) -> TruncatedSeries:
    if kind == "add":
        a, b = operands
        return a + b
    if kind == "multiply":
        out = operands[0]
        for x in operands[1:]:
            out = out * x
        return out
    if kind == "invertUnit":
        (a,) = operands
        return a.inverse()
    raise ValueError(f"unknown series operation {kind!r}")


def coefficient(S: TruncatedSeries, mono) -> int:
    return S.coefficient(mono)


def min_degree_in(S: TruncatedSeries, var: int) -> int:
    """Least number of occurrences of X_var over the nonzero terms of S - 1.

    Terms that omit X_var count as 0.  Returns D (meaning ">= D") when S == 1.
    """
    if not 1 <= var <= S.m:
        raise RankError(f"variable {var} outside 1..{S.m}")
    y = (S - 1).data
    nz = np.flatnonzero(y)
    if nz.size == 0:
        return S.D
    return int(S.ring.var_counts[var - 1, nz].min())


def lie_bracket(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a * b - b * a
