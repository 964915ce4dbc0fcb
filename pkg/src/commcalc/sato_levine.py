"""Crossing-change calculus for Sato-Levine type link invariants.

Two invariants are handled, both defined by how they jump when one
component crosses itself.  At such a crossing the singular component
splits into two lobes; p_i and q_i are the linking numbers of the first
and second lobe with component i (so p_i + q_i = a_xi) and lambda is the
linking number of the two smoothed lobes.

* beta~ for 2-component links: beta~(L0) - beta~(L1) = n(l - n), where n
  is the lobe linking number and l the linking number of the link.  Its
  value along a recorded homotopy is the base value plus the signed jumps.
* beta(L, s) for m components and s in Q^m: the jump is the determinant of
  the linking matrix with diagonal s whose row x is replaced by
  (p_1, ..., lambda, ..., p_m) and column x by (q_1, ..., lambda, ..., q_m).

Everything is exact (fractions.Fraction); sympy is used only to take
determinants, so symbolic entries work as well.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .errors import CommCalcError


class TraceError(CommCalcError, ValueError):
    """Malformed or inconsistent crossing-change trace."""


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, sympy.Basic):
        if x.is_Rational:
            return Fraction(int(x.p), int(x.q))
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


@dataclass(frozen=True)
class CrossingRecord:
    """One self-crossing change of component x (1-based).

    p and q hold the lobe linking numbers with every component; the
    entries at position x are ignored.  sign = +1 records a move from L1 to
    L0 in the jump formula (the invariant increases by the jump), -1 the
    reverse.
    """

    x: int
    p: tuple
    q: tuple
    lam: object = 0
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise TraceError(f"sign must be +1 or -1, got {self.sign}")
        if len(self.p) != len(self.q):
            raise TraceError("p and q have different lengths")
        if not 1 <= self.x <= len(self.p):
            raise TraceError(f"component {self.x} outside 1..{len(self.p)}")


@dataclass
class HomotopyTrace:
    m: int
    linking: list                 # symmetric m x m, zero diagonal
    records: list = field(default_factory=list)
    base: Fraction = Fraction(0)

    def __post_init__(self):
        a = self.linking
        if len(a) != self.m or any(len(row) != self.m for row in a):
            raise TraceError(f"linking matrix must be {self.m} x {self.m}")
        for i in range(self.m):
            if a[i][i]:
                raise TraceError("linking matrix must have zero diagonal")
            for j in range(i):
                if a[i][j] != a[j][i]:
                    raise TraceError("linking matrix must be symmetric")
        for r in self.records:
            self.check(r)

    def check(self, rec: CrossingRecord) -> None:
        if len(rec.p) != self.m:
            raise TraceError(f"record has {len(rec.p)} lobe entries, expected {self.m}")
        x = rec.x - 1
        for i in range(self.m):
            if i != x and rec.p[i] + rec.q[i] != self.linking[x][i]:
                raise TraceError(
                    f"lobe linking numbers {rec.p[i]} + {rec.q[i]} do not add up to "
                    f"a_{rec.x}{i + 1} = {self.linking[x][i]}")

    def __add__(self, other: HomotopyTrace) -> HomotopyTrace:
        """Concatenate: other continues from where this trace ends."""
        if self.m != other.m or self.linking != other.linking:
            raise TraceError("traces have different linking data")
        return HomotopyTrace(self.m, self.linking, self.records + other.records, self.base)


def linking_matrix(m: int, upper) -> list:
    """Symmetric matrix from the upper-triangle entries a12, a13, ..., a(m-1)m."""
    upper = list(upper)
    if len(upper) != m * (m - 1) // 2:
        raise TraceError(f"{m} components need {m * (m - 1) // 2} linking numbers, got {len(upper)}")
    a = [[0] * m for _ in range(m)]
    it = iter(upper)
    for i in range(m):
        for j in range(i + 1, m):
            a[i][j] = a[j][i] = int(next(it))
    return a


def tilde_jump(rec: CrossingRecord, l: int) -> int:
    """n(l - n) for the crossing, n the linking of the first lobe with the other component."""
    other = 1 if rec.x == 1 else 0
    n = rec.p[other]
    return n * (l - n)


def beta_tilde(trace: HomotopyTrace) -> Fraction:
    """Base value plus the signed jumps n(l - n) along the trace (2 components only)."""
    if trace.m != 2:
        raise TraceError(f"beta~ is defined for 2-component links, got m={trace.m}")
    l = trace.linking[0][1]
    total = Fraction(trace.base)
    for rec in trace.records:
        total += rec.sign * tilde_jump(rec, l)
    return total


def jump_matrix(s, a, rec: CrossingRecord) -> sympy.Matrix:
    m = len(a)
    if len(s) != m or len(rec.p) != m:
        raise ValueError(f"dimension mismatch: s has {len(s)}, a is {m} x {m}, record has {len(rec.p)}")
    x = rec.x - 1
    rows = []
    for i in range(m):
        row = []
        for j in range(m):
            if i == x and j == x:
                v = rec.lam
            elif i == x:
                v = rec.p[j]
            elif j == x:
                v = rec.q[i]
            elif i == j:
                v = s[i]
            else:
                v = a[i][j]
            row.append(sympy.nsimplify(v) if isinstance(v, (Fraction, float)) else sympy.sympify(v))
        rows.append(row)
    return sympy.Matrix(rows)


def beta_jump(s, a, rec: CrossingRecord):
    """beta(L1, s) - beta(L0, s) for the crossing change described by rec.

    Row x carries p, column x carries q and lambda sits at (x, x);
    transposing swaps the roles of p and q without changing the value.
    """
    return _frac(sympy.expand(jump_matrix(s, a, rec).det(method="bareiss")))


def surgery_matrix(s, a) -> sympy.Matrix:
    m = len(a)
    if len(s) != m:
        raise ValueError(f"s has {len(s)} entries for {m} components")
    return sympy.Matrix(m, m, lambda i, j: _sym(s[i]) if i == j else _sym(a[i][j]))


def _sym(v):
    if isinstance(v, Fraction):
        return sympy.Rational(v.numerator, v.denominator)
    return sympy.sympify(v)


def principal_minors(s, a) -> list:
    """det A_i for each i, A_i being A with row and column i deleted."""
    A = surgery_matrix(s, a)
    m = A.shape[0]
    out = []
    for i in range(m):
        keep = [j for j in range(m) if j != i]
        out.append(_frac(A.extract(keep, keep).det(method="bareiss")) if m > 1 else Fraction(1))
    return out


def invariance_condition(s, a) -> list:
    """For each component, whether the principal minor deleting it vanishes."""
    return [d == 0 for d in principal_minors(s, a)]


def surgery_det(s, a):
    return _frac(surgery_matrix(s, a).det(method="bareiss"))


def three_component_special_s(a, sign: int) -> tuple:
    """(+-a12 a13/a23, +-a12 a23/a13, +-a13 a23/a12) for 3-component linking data.

    ``a`` is either a 3 x 3 matrix or the triple (a12, a13, a23).
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if len(a) == 3 and not hasattr(a[0], "__len__"):
        a12, a13, a23 = (int(v) for v in a)
    else:
        a12, a13, a23 = int(a[0][1]), int(a[0][2]), int(a[1][2])
    if 0 in (a12, a13, a23):
        raise ValueError("all three linking numbers must be nonzero")
    return (sign * Fraction(a12 * a13, a23), sign * Fraction(a12 * a23, a13),
            sign * Fraction(a13 * a23, a12))


# -- trace files -----------------------------------------------------------------


def parse_trace(text: str) -> HomotopyTrace:
    """Read a trace.

    Header lines ``m=<int>`` (default 2), ``a=<a12,a13,...>`` (upper triangle
    of the linking matrix; for two components just ``a= l``) and optional
    ``base=<rational>``; then one record per line:
    ``x p1,...,pm q1,...,qm lambda sign``.  ``#`` starts a comment.
    """
    m = 2
    upper = None
    base = Fraction(0)
    pending = []
    for lineno, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        mt = re.match(r"^(m|a|base)\s*=\s*(.*)$", line)
        if mt:
            key, val = mt.groups()
            try:
                if key == "m":
                    m = int(val)
                elif key == "a":
                    upper = [int(v) for v in re.split(r"[,\s]+", val.strip()) if v]
                else:
                    base = Fraction(val.strip())
            except ValueError:
                raise TraceError(f"line {lineno}: bad value {val!r} for {key}") from None
            continue
        parts = line.split()
        if len(parts) != 5:
            raise TraceError(f"line {lineno}: expected 'x p q lambda sign', got {raw_line!r}")
        try:
            x = int(parts[0])
            p = tuple(int(v) for v in parts[1].split(","))
            q = tuple(int(v) for v in parts[2].split(","))
            lam = Fraction(parts[3])
            sign = int(parts[4])
        except ValueError:
            raise TraceError(f"line {lineno}: non-numeric field in {raw_line!r}") from None
        pending.append((lineno, x, p, q, lam, sign))
    if upper is None:
        raise TraceError("missing a= line")
    a = linking_matrix(m, upper)
    records = []
    for lineno, x, p, q, lam, sign in pending:
        try:
            records.append(CrossingRecord(x, p, q, lam, sign))
        except TraceError as exc:
            raise TraceError(f"line {lineno}: {exc}") from None
    try:
        return HomotopyTrace(m, a, records, base)
    except TraceError as exc:
        raise TraceError(f"inconsistent trace: {exc}") from None


def read_trace(path) -> HomotopyTrace:
    with open(path) as fh:
        return parse_trace(fh.read())
