"""Row-style Hermite normal form and indices of integer lattices."""

from __future__ import annotations

from sympy.core.intfunc import igcdex


def xgcd(a: int, b: int):
    """(g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s, t, g = igcdex(a, b)
    s, t, g = int(s), int(t), int(g)
    if g < 0:
        s, t, g = -s, -t, -g
    return g, s, t


class EchelonBasis:
    """Incrementally maintained echelon basis of a sublattice of Z^n.

    Rows are stored by their leading column with a positive leading entry.
    """

    def __init__(self, n: int):
        self.n = n
        self.rows = {}

    def _lead(self, row):
        for j, x in enumerate(row):
            if x:
                return j
        return None

    def add(self, row) -> bool:
        """Insert a vector; returns True if the lattice grew."""
        row = [int(x) for x in row]
        if len(row) != self.n:
            raise ValueError(f"expected length {self.n}, got {len(row)}")
        grew = False
        while True:
            j = self._lead(row)
            if j is None:
                return grew
            if row[j] < 0:
                row = [-x for x in row]
            piv = self.rows.get(j)
            if piv is None:
                self.rows[j] = row
                return True
            d, a = piv[j], row[j]
            if a % d == 0:
                f = a // d
                row = [x - f * y for x, y in zip(row, piv)]
                continue
            g, s, t = xgcd(d, a)
            new = [s * y + t * x for x, y in zip(row, piv)]
            self.rows[j] = new
            grew = True
            # both old rows now reduce by the new pivot; keep sifting them
            f = a // g
            rest = [x - f * y for x, y in zip(row, new)]
            f = d // g
            old = [y - f * z for y, z in zip(piv, new)]
            self.add(old)
            row = rest

    def contains(self, row) -> bool:
        row = [int(x) for x in row]
        while True:
            j = self._lead(row)
            if j is None:
                return True
            piv = self.rows.get(j)
            if piv is None or row[j] % piv[j]:
                return False
            f = row[j] // piv[j]
            row = [x - f * y for x, y in zip(row, piv)]

    def hermite(self) -> list:
        return hermite_from_echelon(self.rows, self.n)

    @property
    def rank(self) -> int:
        return len(self.rows)


def hermite_from_echelon(rows: dict, n: int) -> list:
    """Reduce an echelon basis {lead column: row} to Hermite normal form."""
    cols = sorted(rows)
    out = {j: list(rows[j]) for j in cols}
    # left to right: reducing by a later pivot never disturbs earlier columns
    for idx in range(len(cols)):
        j = cols[idx]
        for i in cols[:idx]:
            f = out[i][j] // out[j][j]
            if f:
                out[i] = [x - f * y for x, y in zip(out[i], out[j])]
    return [out[j] for j in cols]


def hermite_form(rows, n: int) -> list:
    basis = EchelonBasis(n)
    for r in rows:
        basis.add(r)
    return basis.hermite()


def lattice_index(hnf: list, n: int) -> int:
    """Index of the lattice in Z^n; 0 when the rank is deficient (infinite index)."""
    if len(hnf) < n:
        return 0
    out = 1
    for j, row in enumerate(hnf):
        out *= row[j]
    return out
