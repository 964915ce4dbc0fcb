from itertools import product
from math import factorial

import pytest
import sympy

from commcalc.errors import ResourceLimit
from commcalc.hall import generate_basis, rho, witt_count, witt_multidegree
from commcalc.magnus import expand


def mobius(n):
    return sympy.mobius(n)


def necklace(m, n):
    return sum(mobius(d) * m ** (n // d) for d in sympy.divisors(n)) // n


def multidegree_oracle(counts):
    n = sum(counts)
    total = 0
    for d in sympy.divisors(n):
        if all(c % d == 0 for c in counts):
            ways = factorial(n // d)
            for c in counts:
                ways //= factorial(c // d)
            total += mobius(d) * ways
    return total // n


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_witt_counts_match_necklaces(m):
    for n in range(1, 9):
        assert witt_count(m, n) == necklace(m, n)


def test_witt_values_m2():
    assert [witt_count(2, n) for n in range(1, 10)] == [2, 1, 2, 3, 6, 9, 18, 30, 56]


def test_witt_multidegree():
    for counts in [(3, 1), (1, 3), (2, 2), (2, 1, 1), (3, 3), (4, 0), (2, 2, 2)]:
        assert witt_multidegree(counts) == multidegree_oracle(counts)
    assert witt_multidegree((3, 1)) == 1 and witt_multidegree((4, 0)) == 0


@pytest.mark.parametrize("m,w", [(2, 6), (3, 4)])
def test_strata_sizes_and_multidegrees(m, w):
    basis = generate_basis(m, w)
    for n in range(1, w + 1):
        st = basis.stratum(n)
        assert len(st) == witt_count(m, n)
        for md in product(range(n + 1), repeat=m):
            if sum(md) == n:
                assert sum(1 for c in st if c.multidegree == md) == witt_multidegree(md)


def test_hall_conditions():
    basis = generate_basis(3, 5)
    for c in basis:
        if c.is_generator:
            continue
        assert c.left > c.right
        if not c.left.is_generator:
            assert c.left.right <= c.right


def test_weight3_stratum_of_f3():
    got = {c.format(3) for c in generate_basis(3, 3).stratum(3)}
    assert got == {"[b,a,a]", "[b,a,b]", "[b,a,c]", "[c,a,a]", "[c,a,b]", "[c,a,c]", "[c,b,b]", "[c,b,c]"}


def test_rho_is_leading_part_of_magnus_image():
    basis = generate_basis(2, 5)
    for c in basis:
        if c.is_generator:
            continue
        S = expand(c.as_word(2), c.weight + 1)
        assert S.homogeneous(c.weight) == rho(c, c.weight + 1).homogeneous(c.weight)
        assert S.min_degree() == c.weight


@pytest.mark.parametrize("m,w", [(2, 5), (3, 4)])
def test_rho_independent(m, w):
    basis = generate_basis(m, w)
    for n in range(1, w + 1):
        rows = [list(rho(c, n + 1).block(n)) for c in basis.stratum(n)]
        assert sympy.Matrix(rows).rank() == len(rows)


def test_parse_and_lookup():
    basis = generate_basis(2, 4)
    c = basis.parse("[b,a,a]")
    assert c.key == ((2, 1), 1)
    assert basis.by_entries(2, 1, 1) is c
    with pytest.raises(KeyError):
        basis.parse("[a,b]")


def test_generator_order_changes_basis_not_counts():
    b1 = generate_basis(3, 4)
    b2 = generate_basis(3, 4, generator_order=(3, 1, 2), pair_order="uv")
    assert [len(b1.stratum(n)) for n in range(1, 5)] == [len(b2.stratum(n)) for n in range(1, 5)]
    with pytest.raises(ValueError):
        generate_basis(3, 4, generator_order=(1, 1, 2))


def test_basis_cap():
    with pytest.raises(ResourceLimit):
        generate_basis(3, 8, cap=100)
