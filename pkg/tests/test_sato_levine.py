import random
from fractions import Fraction
from itertools import permutations

import pytest
import sympy

from commcalc.sato_levine import (CrossingRecord, HomotopyTrace, TraceError, beta_jump, beta_tilde,
                                  invariance_condition, jump_matrix, linking_matrix, parse_trace,
                                  principal_minors, surgery_det, three_component_special_s)


def leibniz_det(M):
    n = len(M)
    total = Fraction(0)
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        prod = Fraction(1)
        for i in range(n):
            prod *= M[i][perm[i]]
        total += sign * prod
    return total


LOBE = CrossingRecord(1, (0, 2), (0, -1), 0, 1)


def test_beta_tilde_of_Mn():
    for n in range(1, 6):
        assert beta_tilde(HomotopyTrace(2, [[0, 1], [1, 0]], [LOBE] * n)) == -2 * n


def test_beta_tilde_signs_cancel():
    back = CrossingRecord(1, (0, 2), (0, -1), 0, -1)
    tr = HomotopyTrace(2, [[0, 1], [1, 0]], [LOBE, back], Fraction(7, 2))
    assert beta_tilde(tr) == Fraction(7, 2)


def test_beta_tilde_second_component():
    rec = CrossingRecord(2, (3, 0), (-2, 0))
    assert beta_tilde(HomotopyTrace(2, [[0, 1], [1, 0]], [rec])) == 3 * (1 - 3)


def test_beta_tilde_needs_two_components():
    with pytest.raises(TraceError):
        beta_tilde(HomotopyTrace(3, linking_matrix(3, [1, 1, 1])))


def test_jump_two_components_symbolic():
    n, l, lam = sympy.symbols("n l lam")
    j = beta_jump((0, 0), [[0, l], [l, 0]], CrossingRecord(1, (0, n), (0, l - n), lam))
    assert sympy.expand(j + n * (l - n)) == 0


def test_jump_grid():
    for n in range(10):
        for l in range(10):
            assert beta_jump((0, 0), [[0, l], [l, 0]], CrossingRecord(1, (0, n), (0, l - n), 3)) == -n * (l - n)


def test_jump_matches_leibniz_oracle():
    rng = random.Random(3)
    for _ in range(30):
        m = rng.choice([3, 4])
        a = linking_matrix(m, [rng.randint(-3, 3) for _ in range(m * (m - 1) // 2)])
        x = rng.randint(1, m)
        p = [rng.randint(-3, 3) for _ in range(m)]
        q = [a[x - 1][i] - p[i] for i in range(m)]
        s = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(m)]
        rec = CrossingRecord(x, tuple(p), tuple(q), rng.randint(-2, 2))
        M = [[Fraction(0)] * m for _ in range(m)]
        for i in range(m):
            for k in range(m):
                if i == x - 1 and k == x - 1:
                    M[i][k] = Fraction(rec.lam)
                elif i == x - 1:
                    M[i][k] = Fraction(p[k])
                elif k == x - 1:
                    M[i][k] = Fraction(q[i])
                elif i == k:
                    M[i][k] = s[i]
                else:
                    M[i][k] = Fraction(a[i][k])
        assert beta_jump(s, a, rec) == leibniz_det(M)
        assert jump_matrix(s, a, rec).shape == (m, m)


def test_special_s_example():
    assert three_component_special_s((1, 2, 3), 1) == (Fraction(2, 3), Fraction(3, 2), Fraction(6))
    a = linking_matrix(3, [1, 2, 3])
    assert invariance_condition(three_component_special_s(a, 1), a) == [True] * 3
    assert invariance_condition(three_component_special_s(a, -1), a) == [True] * 3
    with pytest.raises(ValueError):
        three_component_special_s((0, 1, 2), 1)


def test_special_s_determinants():
    rng = random.Random(5)
    for _ in range(100):
        v = [rng.choice([x for x in range(-9, 10) if x]) for _ in range(3)]
        a = linking_matrix(3, v)
        plus, minus = three_component_special_s(v, 1), three_component_special_s(v, -1)
        assert surgery_det(plus, a) == 0
        assert surgery_det(minus, a) == 4 * v[0] * v[1] * v[2]
        assert principal_minors(plus, a) == [0, 0, 0]


def test_invariance_condition_two_components():
    assert invariance_condition((0, 0), [[0, 5], [5, 0]]) == [True, True]
    assert invariance_condition((1, 0), [[0, 5], [5, 0]]) == [True, False]


def test_trace_parsing():
    tr = parse_trace("# two lobes\na= 1\nbase=1/2\n1 0,2 0,-1 0 1\n1 0,2 0,-1 0 1\n")
    assert tr.m == 2 and len(tr.records) == 2 and beta_tilde(tr) == Fraction(1, 2) - 4
    tr3 = parse_trace("m=3\na= 1,2,3\n2 1,0,0 0,0,3 1 -1\n")
    assert tr3.linking == [[0, 1, 2], [1, 0, 3], [2, 3, 0]]
    for bad in ["1 0,2 0,-1 0 1\n", "a= 1\n1 0,2 0,0 0 1\n", "a= 1\n1 0,2 0,-1 0\n",
                "a= 1\n3 0,2 0,-1 0 1\n", "a= 1\n1 0,2 0,-1 0 2\n", "a= x\n", "m=3\na= 1\n"]:
        with pytest.raises(TraceError):
            parse_trace(bad)


def test_trace_concatenation():
    t = HomotopyTrace(2, [[0, 1], [1, 0]], [LOBE])
    assert beta_tilde(t + t) == -4
    with pytest.raises(TraceError):
        t + HomotopyTrace(2, [[0, 2], [2, 0]])


def test_linking_matrix_validation():
    with pytest.raises(TraceError):
        HomotopyTrace(2, [[1, 0], [0, 0]])
    with pytest.raises(TraceError):
        HomotopyTrace(2, [[0, 1], [2, 0]])
    with pytest.raises(TraceError):
        linking_matrix(3, [1, 2])
