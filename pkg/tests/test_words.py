import pytest
from hypothesis import given
from hypothesis import strategies as st

from commcalc.errors import RankError, UnboundVariable, WordSyntaxError, WordTooLong
from commcalc.words import (Word, commutator, format_word, group_op, left_normed, parse_pattern,
                            parse_word, right_normed, set_max_length, substitute, verify_identity)

from conftest import words

a, b, c = (Word.generator(i, 3) for i in (1, 2, 3))


def naive_reduce(letters):
    out = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return out


def test_parse_literal():
    w = parse_word("a*b*a^-1*b^-1", 2)
    assert list(w.letters()) == [1, 2, -1, -2]


def test_parse_bracket_and_left_normed():
    assert parse_word("[b,a]", 2) == Word.from_letters(2, [-2, -1, 2, 1])
    assert parse_word("[b,a,a]", 2) == parse_word("[[b,a],a]", 2)


def test_parse_x_names_and_conjugation():
    assert parse_word("x1^(x2)", 2) == parse_word("b^-1*a*b", 2)
    assert parse_word("a^-(b)", 2) == parse_word("b^-1*a^-1*b", 2)
    assert parse_word("1", 2).is_identity()


@pytest.mark.parametrize("text", ["a*", "[a,", "a^", "(a", "a^b", "2"])
def test_syntax_errors(text):
    with pytest.raises(WordSyntaxError):
        parse_word(text, 2)


def test_syntax_error_reports_position():
    with pytest.raises(WordSyntaxError) as exc:
        parse_word("a*b*)", 2)
    assert exc.value.position == 4


def test_generator_out_of_range():
    with pytest.raises(RankError):
        parse_word("c", 2)
    with pytest.raises(RankError):
        parse_word("x3", 2)


def test_group_ops():
    assert group_op("commutator", a, a).is_identity()
    assert group_op("conjugate", a, b) == Word.from_letters(3, [-2, 1, 2])
    assert group_op("inverse", a * b) == Word.from_letters(3, [-2, -1])
    assert group_op("leftNormed", a, b, c) == commutator(commutator(a, b), c)
    assert group_op("power", a * b, 2) == a * b * a * b
    assert group_op("multiply", a, b, c) == a * b * c
    with pytest.raises(RankError):
        a * Word.generator(1, 2)
    with pytest.raises(ValueError):
        group_op("nonsense", a)


def test_right_normed():
    assert right_normed(a, b, c) == commutator(a, commutator(b, c))
    assert left_normed(a) == a


def test_substitute_examples():
    p = parse_pattern("[g,h,h,h]", 2, ("g", "h"))
    A, B = Word.generator(1, 2), Word.generator(2, 2)
    assert substitute(p, {"g": A, "h": B}) == left_normed(A, B, B, B)
    p = parse_pattern("x^(y)", 2, ("x", "y"))
    assert substitute(p, {"x": A, "y": Word.identity(2)}) == A
    p = parse_pattern("[m,m^(g)]", 2, ("m", "g"))
    assert substitute(p, {"m": A, "g": B}) == commutator(A, A.conjugate(B))
    with pytest.raises(UnboundVariable):
        substitute(p, {"m": A})


def test_length_cap():
    set_max_length(10)
    try:
        with pytest.raises(WordTooLong):
            Word.generator(1, 2) ** 11
    finally:
        set_max_length(10**6)


@given(st.lists(st.sampled_from([-3, -2, -1, 1, 2, 3]), max_size=30))
def test_reduction_matches_stack_oracle(letters):
    assert list(Word.from_letters(3, letters).letters()) == naive_reduce(letters)


@given(words(3, 10))
def test_format_parse_roundtrip(w):
    assert parse_word(format_word(w), 3) == w


@given(words(3, 10))
def test_reduce_idempotent(w):
    assert Word(3, w.runs) == w


@given(words(3, 6), words(3, 6), words(3, 6))
def test_commutator_identities(x, y, z):
    assert verify_identity(commutator(x * y, z), commutator(x, z).conjugate(y) * commutator(y, z))
    assert verify_identity(commutator(x, y * z), commutator(x, z) * commutator(x, y).conjugate(z))
    assert verify_identity(commutator(x.inverse(), y), commutator(x, y).inverse().conjugate(x.inverse()))
    assert verify_identity(x.conjugate(y), x * commutator(x, y))


@given(words(3, 5), words(3, 5), words(3, 5))
def test_hall_witt_cyclic_order(x, y, z):
    def term(u, v, w):
        return commutator(commutator(u, v.inverse()), w).conjugate(v)
    assert (term(x, y, z) * term(y, z, x) * term(z, x, y)).is_identity()


@given(words(2, 6))
def test_nested_conjugate_rewrite(g):
    # [x, x^(x^(...(x^g)))] equals [x,[x,...,[x,g]]] for a generator x
    x = Word.generator(1, 2)
    for k in range(5):
        inner = g
        for _ in range(k + 1):
            inner = x.conjugate(inner)
        rhs = g
        for _ in range(k + 2):
            rhs = commutator(x, rhs)
        assert verify_identity(commutator(x, inner), rhs)


def test_engel_conjugation_identities():
    g, h = Word.generator(1, 2), Word.generator(2, 2)
    lhs = left_normed(h, g, h, h)
    conj = commutator(h, commutator(g, h)) ** 2 * commutator(h, g)
    assert verify_identity(lhs, left_normed(g, h, h, h).inverse().conjugate(conj))
    assert verify_identity(commutator(commutator(g, h), h),
                           commutator(h, h.conjugate(g)).conjugate(commutator(g, h)))
    rhs = right_normed(h, h, h, g).inverse().conjugate(commutator(g, h).conjugate(h))
    assert verify_identity(left_normed(g, h, h, h), rhs)
