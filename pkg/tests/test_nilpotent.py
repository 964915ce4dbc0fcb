import pytest
from hypothesis import given

from commcalc.errors import ResourceLimit
from commcalc.magnus import expand
from commcalc.nilpotent import ElementBatch, ExponentVector, context, evaluate, normal_form, weight_of
from commcalc.words import Word, commutator, parse_word

from conftest import random_word, words

CTX = context(2, 6)


def test_normal_form_of_commutator():
    ctx = context(2, 4)
    e = normal_form(parse_word("[b,a]*a", 2), ctx)
    assert dict((str(c), v) for c, v in e.items()) == {"a": 1, "[b,a]": 1, "[b,a,a]": 1}


@given(words(2, 12))
def test_normal_form_sound(w):
    e = CTX.normal_form(w)
    assert expand(evaluate(e, CTX), 6) == expand(w, 6)


def test_evaluate_roundtrip(rng):
    for _ in range(50):
        e = ExponentVector(CTX, [rng.randint(-3, 3) for _ in range(len(CTX.basis))])
        assert normal_form(evaluate(e, CTX), CTX) == e


@given(words(2, 8), words(2, 8))
def test_nf_multiply_and_inverse(x, y):
    ex, ey = CTX.normal_form(x), CTX.normal_form(y)
    assert CTX.nf_multiply(ex, ey) == CTX.normal_form(x * y)
    assert CTX.nf_inverse(ex) == CTX.normal_form(x.inverse())


def test_weight():
    assert weight_of(parse_word("[b,a,a,b]", 2), CTX) == 4
    assert weight_of(parse_word("a", 2), CTX) == 1
    assert weight_of(Word.identity(2), CTX) == 6


@given(words(2, 6), words(2, 6))
def test_element_ops_match_words(x, y):
    X, Y = CTX.element(x), CTX.element(y)
    assert (X * Y).key() == CTX.element(x * y).key()
    assert X.comm(Y).key() == CTX.element(commutator(x, y)).key()
    assert X.conj(Y).key() == CTX.element(x.conjugate(y)).key()
    assert (X ** -3).key() == CTX.element(x ** -3).key()


def test_batch_ops_match_scalar(rng):
    xs = [random_word(rng, 3, 6) for _ in range(12)]
    ys = [random_word(rng, 3, 6) for _ in range(12)]
    ctx = context(3, 5)
    X = ElementBatch.from_elements(ctx, [ctx.element(w) for w in xs])
    Y = ElementBatch.from_elements(ctx, [ctx.element(w) for w in ys])
    for i, (x, y) in enumerate(zip(xs, ys)):
        assert X.comm(Y).element(i).key() == ctx.element(commutator(x, y)).key()
        assert (X * Y).element(i).key() == ctx.element(x * y).key()
    ks = [rng.randint(-3, 3) for _ in xs]
    P = X.power(ks)
    for i, (x, k) in enumerate(zip(xs, ks)):
        assert P.element(i).key() == ctx.element(x ** k).key()
    single = X.take([0]).power([2, -1, 3])
    assert [single.element(i).key() for i in range(3)] == [ctx.element(xs[0] ** k).key() for k in (2, -1, 3)]


def test_class_cap():
    with pytest.raises(ResourceLimit):
        context(3, 9)
    assert context(3, 6, max_q=6).q == 6
