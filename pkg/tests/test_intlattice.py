import sympy
from hypothesis import given
from hypothesis import strategies as st

from commcalc.intlattice import EchelonBasis, hermite_form, lattice_index, xgcd

vectors = st.lists(st.lists(st.integers(-6, 6), min_size=4, max_size=4), min_size=1, max_size=6)


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_xgcd(a, b):
    g, s, t = xgcd(a, b)
    assert g == sympy.gcd(a, b) and s * a + t * b == g


def _is_hermite(h):
    leads = []
    for row in h:
        j = next(i for i, x in enumerate(row) if x)
        assert row[j] > 0
        leads.append(j)
    assert leads == sorted(leads) and len(set(leads)) == len(leads)
    for k, j in enumerate(leads):
        for row in h[:k]:
            assert 0 <= row[j] < h[k][j]


@given(vectors)
def test_hermite_form_is_canonical(rows):
    h = hermite_form(rows, 4)
    _is_hermite(h)
    # same row space: each input row lies in the span, and rank agrees
    basis = EchelonBasis(4)
    for r in h:
        basis.add(r)
    assert all(basis.contains(r) for r in rows)
    assert len(h) == sympy.Matrix(rows).rank()
    assert hermite_form(list(reversed(rows)), 4) == h


@given(vectors)
def test_index_equals_determinant_gcd(rows):
    h = hermite_form(rows, 4)
    idx = lattice_index(h, 4)
    M = sympy.Matrix(rows)
    if M.rank() < 4:
        assert idx == 0
    else:
        # gcd of maximal minors
        from itertools import combinations
        g = 0
        for sel in combinations(range(len(rows)), 4):
            g = sympy.gcd(g, M.extract(list(sel), list(range(4))).det())
        assert idx == abs(g)


def test_small_example():
    assert hermite_form([[2, 0], [0, 3], [1, 1]], 2) == [[1, 0], [0, 1]]
    assert lattice_index(hermite_form([[2, 1], [0, 3]], 2), 2) == 6
