import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commcalc.errors import ResourceLimit
from commcalc.intlattice import hermite_form, lattice_index
from commcalc.nilpotent import ElementBatch, ExponentVector, context
from commcalc.subgroups import (GeneratorScheme, SubgroupLattice, build_lattice, build_stable_lattice,
                                close_subgroup, compare_lattices, contains, cyclic_closure_lattices,
                                engel_image_span, instantiate, product_lattice, reduce_mod_mu_k,
                                section_lattice)
from commcalc.words import Word, parse_word

from conftest import words

CTX6 = context(2, 6)
CTX5 = context(2, 5)


def lattice(scheme, ctx, **kw):
    return build_lattice(GeneratorScheme.parse(scheme, **kw), ctx)


@pytest.fixture(scope="module")
def mu1():
    return build_stable_lattice(GeneratorScheme.parse("mu:1"), CTX6)


def full_from(lat, n):
    return all(lat.section_index(j) == (1 if j >= n else 0) for j in range(1, lat.ctx.q))


def test_scheme_parsing():
    s = GeneratorScheme.parse("nu:2", length=3)
    assert (s.name, s.param, s.length) == ("nu", 2, 3)
    for bad in ("bogus:1", "mu", "gamma:0", "mu:x"):
        with pytest.raises(ValueError):
            GeneratorScheme.parse(bad)
    assert not GeneratorScheme.parse("mu28:1").normal


def test_instantiate_epsilon1_is_generator_commutators():
    ctx = context(2, 3)
    ws = instantiate(GeneratorScheme.parse("epsilon:1", length=1), ctx)
    nontrivial = {str(w) for w in ws if not w.is_identity()}
    assert nontrivial <= {str(parse_word(t, 2)) for t in
                          ["[a,b]", "[b,a]", "[a^-1,b]", "[a,b^-1]", "[a^-1,b^-1]",
                           "[b^-1,a]", "[b,a^-1]", "[b^-1,a^-1]"]}
    assert str(parse_word("[a,b]", 2)) in nontrivial


def test_instantiate_is_deterministic():
    s = GeneratorScheme.parse("delta:1", length=2)
    assert instantiate(s, CTX5) == instantiate(s, CTX5)


def test_closure_of_generator():
    ctx = context(2, 3)
    lat = close_subgroup([parse_word("a", 2)], ctx, normal=True)
    assert lat.contains(parse_word("[b,a]", 2))
    assert not lat.contains(parse_word("b", 2))
    assert lat.verify_closed()
    with pytest.raises(ValueError):
        close_subgroup([], ctx, True)


def test_gamma_lattices():
    lat = lattice("gamma:2", CTX5)
    assert full_from(lat, 2)
    assert not contains(lat, parse_word("a", 2))
    assert section_lattice(lat, 2) == [[1]]


def test_epsilon1_is_gamma2():
    assert compare_lattices(lattice("epsilon:1", CTX5, length=2), lattice("gamma:2", CTX5)) == "equal"


def test_mu1_examples(mu1):
    assert mu1.stable
    assert mu1.contains(parse_word("[b,a,a,a]", 2))
    assert not mu1.contains(parse_word("[b,a,a,b]", 2))
    for c in CTX6.stratum(5):
        assert mu1.contains(c.as_word(2))
    assert mu1.verify_closed()


def test_mu_forms_agree_at_q6(mu1):
    for name in ("mu27:1", "mu28:1"):
        other = build_stable_lattice(GeneratorScheme.parse(name), CTX6)
        assert other.stable
        assert compare_lattices(mu1, other) == "equal"


def test_mu_forms_agree_milnor_case():
    ctx = context(2, 4)
    lats = [build_stable_lattice(GeneratorScheme.parse(s), ctx) for s in ("mu:0", "mu27:0", "mu28:0")]
    assert all(l.stable for l in lats)
    assert compare_lattices(lats[0], lats[1]) == "equal" == compare_lattices(lats[0], lats[2])


def test_delta1_contains_weight5():
    lat = build_stable_lattice(GeneratorScheme.parse("delta:1"), CTX6)
    assert lat.stable
    assert lat.contains(parse_word("[b,a,a,b,b]", 2))
    assert lat.section_index(5) == 1


def test_delta_forms_agree():
    a = lattice("delta:1", CTX5)
    b = lattice("delta32:1", CTX5)
    assert compare_lattices(a, b) == "equal"


def test_nk_contains_mu_and_is_plain():
    lat = lattice("nk:1", CTX5)
    assert not lat.normal
    assert compare_lattices(lattice("mu:1", CTX5), lat) in ("equal", "strictlyFiner")


def test_epsilon2_equals_nu2():
    eps = lattice("epsilon:2", CTX5)
    nu = lattice("nu:2", CTX5)
    assert compare_lattices(eps, nu) == "equal"
    assert compare_lattices(nu, lattice("gamma:3", CTX5)) in ("equal", "strictlyFiner")


def test_epsilon3_section_index_two():
    lat = lattice("epsilon:3", CTX5, length=3)
    assert lattice_index(lat.section(4), 3) == 2


def test_epsilon2_in_f3_is_finer_than_gamma3():
    ctx = context(3, 4)
    eps = lattice("epsilon:2", ctx)
    assert compare_lattices(eps, lattice("gamma:3", ctx)) == "strictlyFiner"
    assert eps.section_index(3) == 3


def test_cyclic_closure_identity():
    closure, tower = cyclic_closure_lattices(CTX5, 1, 2)
    assert compare_lattices(closure, tower) == "equal"


def test_metabelian_images_agree():
    d2 = lattice("derived2", CTX6)
    left = product_lattice(lattice("mu:1", CTX6), d2)
    right = product_lattice(lattice("delta:1", CTX6), d2)
    assert compare_lattices(left, right) == "equal"


def test_monotone_in_length():
    small = lattice("delta:1", CTX5, length=1)
    big = lattice("delta:1", CTX5, length=2)
    assert compare_lattices(small, big) in ("equal", "strictlyFiner")


def test_instantiation_cap():
    with pytest.raises(ResourceLimit):
        build_lattice(GeneratorScheme.parse("mu:1"), CTX6, max_instances=100)


def test_reduce_mod_mu_k():
    ctx = CTX6
    e = ExponentVector.from_dict(ctx, {ctx.basis.parse("[b,a,a,a]"): 1})
    assert reduce_mod_mu_k(e, 1).is_zero()
    e = ExponentVector.from_dict(ctx, {ctx.basis.parse("[b,a,a,b]"): 5})
    assert reduce_mod_mu_k(e, 1) == e
    e = ctx.normal_form(parse_word("[b,a,a,a,b]*a*[a,b]", 2))
    assert reduce_mod_mu_k(e, 6) == e
    with pytest.raises(ValueError):
        reduce_mod_mu_k(e, -1)


def test_engel_spans():
    assert lattice_index(engel_image_span(2, 2, 2), 2) == 1
    assert lattice_index(engel_image_span(2, 3, 2), 3) == 2


@settings(max_examples=25)
@given(st.lists(words(2, 6), min_size=1, max_size=4), st.lists(words(2, 8), min_size=1, max_size=8))
def test_sift_batch_agrees_with_sift(gens, probes):
    ctx = context(2, 5)
    lat = close_subgroup([g for g in gens], ctx, normal=bool(len(gens) % 2))
    batch = ElementBatch.from_elements(ctx, [ctx.element(w) for w in probes])
    residuals, member = lat.sift_batch(batch)
    for i, w in enumerate(probes):
        res, n, row, col = lat.sift(ctx.element(w))
        assert bool(member[i]) == (row is None) == lat.contains(w)
        assert residuals.element(i).key() == res.key()


@settings(max_examples=20)
@given(st.lists(words(2, 5), min_size=1, max_size=5))
def test_add_batch_matches_add_generators(gens):
    ctx = context(2, 5)
    one = SubgroupLattice(ctx, True)
    one.add_generators(gens)
    two = SubgroupLattice(ctx, True)
    two.add_batch(ElementBatch.from_elements(ctx, [ctx.element(w) for w in gens]))
    assert one == two
    assert all(one.contains(w) for w in gens)
    for n in range(1, 5):
        assert one.section(n) == hermite_form(one.section(n), len(ctx.stratum(n)))


@pytest.mark.slow
def test_epsilon3_equals_nu3_at_q6():
    ctx = context(2, 6)
    eps = lattice("epsilon:3", ctx, length=3)
    nu = build_lattice(GeneratorScheme.parse("nu:3"), ctx, max_instances=3_000_000)
    assert compare_lattices(eps, nu) == "equal"
    assert compare_lattices(nu, lattice("gamma:4", ctx)) == "strictlyFiner"
