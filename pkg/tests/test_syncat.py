import itertools
from dataclasses import replace

import networkx as nx
import pytest

from core.calculus import CalcMorphism
from core.errors import (InconsistentCalculus, InvalidMorphism, NotAFunction, NotARelation,
                         NotEnumerable, ObjectMismatch)
from core.frc import TERMINAL, mk_context, sym, unary
from core.model import Carriers, FiniteSetModel, relabeling_morphism
from core.syncat import (SubobjectPoset, SynMorphism, SynObject, SyntacticCategory,
                         concrete_functions, syn_of_morphism)


@pytest.fixture
def cat(two_atoms):
    return SyntacticCategory(two_atoms)


@pytest.fixture
def full_x(two_atoms, x1):
    return SynObject(x1, two_atoms.full(x1))


def _map(cat, src, dst, pairs):
    rows = [(a, b) for a, b in pairs]
    theta = cat.calc.predicate(src.context.oplus(dst.context), rows)
    return SynMorphism(src, dst, theta)


def test_full_unary_object_has_four_endofunctions(cat, full_x):
    assert len(list(cat.functions_between(full_x, full_x))) == 4


@pytest.mark.parametrize("left, right", [(["a"], ["a", "b"]), (["a", "b"], ["a", "b"]), ([], ["b"])])
def test_relation_hom_sets_are_powersets(cat, x1, left, right):
    calc = cat.calc
    src = SynObject(x1, calc.predicate(x1, [(a,) for a in left]))
    dst = SynObject(x1, calc.predicate(x1, [(b,) for b in right]))
    assert len(list(cat.relations_between(src, dst))) == 2 ** (len(left) * len(right))


def test_total_deterministic_agrees_with_transpose_adjunction(x1):
    calc = FiniteSetModel(Carriers({"x": ["a", "b", "c"]}))
    cat = SyntacticCategory(calc)
    full = SynObject(x1, calc.full(x1))
    checked = functions = 0
    for theta in calc.elements(mk_context("xx")):
        verdict = cat.is_internal_function(theta, full, full, search_witness=False)
        checked += 1
        functions += verdict.ok
    assert checked == 512
    assert functions == 27


def test_witness_search_agrees_on_subobject_pairs(cat, x1):
    objects = [SynObject(x1, p) for p in cat.calc.elements(x1)]
    seen = 0
    for src, dst in itertools.product(objects, objects):
        for f in cat.relations_between(src, dst):
            verdict = cat.is_internal_function(f.theta, src, dst, search_witness=True)
            seen += 1
            if verdict.ok:
                assert cat.calc.equal(verdict.witness, cat.dagger(f).theta)
    assert seen == 47


def test_function_failure_reasons(cat, full_x):
    partial = _map(cat, full_x, full_x, [("a", "a")])
    split = _map(cat, full_x, full_x, [("a", "a"), ("a", "b"), ("b", "a")])
    assert cat.is_internal_function(partial.theta, full_x, full_x).reason == "not total"
    assert cat.is_internal_function(split.theta, full_x, full_x).reason == "not deterministic"
    with pytest.raises(NotAFunction):
        cat.certify(partial)


def test_relations_must_stay_inside_their_endpoints(cat, x1, full_x):
    only_a = SynObject(x1, cat.calc.predicate(x1, [("a",)]))
    theta = _map(cat, full_x, full_x, [("b", "b")]).theta
    assert not cat.is_internal_relation(theta, only_a, full_x)
    with pytest.raises(NotARelation):
        cat.is_internal_function(theta, only_a, full_x)


def test_identity_composition_and_dagger(cat, full_x):
    swap = cat.certify(_map(cat, full_x, full_x, [("a", "b"), ("b", "a")]))
    ident = cat.id_syn(full_x)
    assert cat.equal_morphisms(cat.compose_syn(ident, swap), swap)
    assert cat.equal_morphisms(cat.compose_syn(swap, swap), ident)
    assert cat.equal_morphisms(cat.dagger(swap), swap)
    with pytest.raises(ObjectMismatch):
        cat.compose_syn(cat.bang(full_x), swap)


def test_terminal_object(cat, full_x, x1):
    assert cat.check_terminal(full_x)
    assert cat.check_terminal(SynObject(x1, cat.calc.empty(x1)))
    assert str(cat.terminal_syn().predicate) == "{()}"


def test_pullback_of_constant_and_identity(cat, full_x):
    const = _map(cat, full_x, full_x, [("a", "a"), ("b", "a")])
    ident = cat.id_syn(full_x)
    square = cat.pullback_syn(const, ident)
    assert str(square.apex.predicate) == "{(a,a),(b,a)}"
    assert cat.check_pullback(const, ident)
    assert cat.check_pullback_stability(ident, const)


def test_pullback_needs_functions(cat, full_x):
    partial = _map(cat, full_x, full_x, [("a", "a")])
    with pytest.raises(NotAFunction):
        cat.pullback_syn(partial, cat.id_syn(full_x))


def test_equalizer(cat, full_x):
    const = cat.certify(_map(cat, full_x, full_x, [("a", "a"), ("b", "a")]))
    ident = cat.id_syn(full_x)
    eq = cat.equalizer_syn(const, ident)
    assert eq.predicate.tuples == (("a",),)
    assert cat.check_equalizer(const, ident)


def test_classification_and_images(cat, full_x):
    const = cat.certify(_map(cat, full_x, full_x, [("a", "a"), ("b", "a")]))
    swap = cat.certify(_map(cat, full_x, full_x, [("a", "b"), ("b", "a")]))
    assert tuple(cat.classify_syn(const)) == (False, False)
    assert tuple(cat.classify_syn(swap)) == (True, True)
    parts = cat.image_factorize_syn(const)
    assert parts.image.predicate.tuples == (("a",),)
    assert cat.classify_syn(parts.mono).mono
    assert cat.classify_syn(parts.epi).reg_epi
    assert cat.check_image(const)


def test_subobject_poset(cat, full_x):
    poset = cat.subobjects_of(full_x)
    assert isinstance(poset, SubobjectPoset)
    assert len(poset) == 4
    hasse = poset.hasse()
    assert isinstance(hasse, nx.DiGraph)
    assert hasse.number_of_edges() == 4
    a = poset.index_of(cat.calc.predicate(full_x.context, [("a",)]))
    b = poset.index_of(cat.calc.predicate(full_x.context, [("b",)]))
    assert poset.meet(a, b) == poset.bottom()
    assert poset.leq(poset.bottom(), poset.top())
    assert all(cat.classify_syn(m).mono for m in poset.monos())


def test_budget_is_enforced(two_atoms, full_x):
    tight = SyntacticCategory(two_atoms, max_enum=8)
    with pytest.raises(NotEnumerable):
        list(tight.relations_between(full_x, full_x))


def test_concrete_round_trip(cat, full_x):
    assert cat.to_concrete(full_x) == frozenset({("a",), ("b",)})
    rows = sorted(full_x.predicate.tuples)
    for mapping in concrete_functions(rows, rows):
        f = cat.from_concrete(full_x, full_x, mapping)
        assert cat.to_concrete(f) == mapping
    with pytest.raises(NotAFunction):
        cat.from_concrete(full_x, full_x, {("a",): ("a",)})


def test_functor_of_a_relabeling(two_atoms, cat, full_x):
    target = FiniteSetModel(Carriers({"u": ["1", "2"]}))
    m = relabeling_morphism(two_atoms, target, {"x": "u"}, {"x": {"a": "1", "b": "2"}})
    functor = syn_of_morphism(m)
    swap = cat.certify(_map(cat, full_x, full_x, [("a", "b"), ("b", "a")]))
    image = functor.on_morphism(swap)
    assert image.src.context == unary("u")
    assert str(image.theta) == "{(1,2),(2,1)}"
    assert functor.target.certify(replace(image, certified=False)).certified
    composite = functor.on_morphism(cat.compose_syn(swap, swap))
    assert functor.target.equal_morphisms(
        composite, functor.target.compose_syn(image, image))


class _BrokenModel(FiniteSetModel):
    """Entailment by size only"""

    def _entails(self, x, y):
        return len(x) <= len(y)


def test_inconsistent_calculus_is_reported(x1):
    calc = _BrokenModel(Carriers({"x": ["a", "b"]}))
    cat = SyntacticCategory(calc)
    full = SynObject(x1, calc.full(x1))
    only_a = SynObject(x1, calc.predicate(x1, [("a",)]))
    theta = calc.predicate(mk_context("xx"), [("b", "b")])
    with pytest.raises(InconsistentCalculus):
        cat.is_internal_relation(theta, only_a, full)


def test_functor_needs_a_lawful_calculus_morphism(two_atoms):
    with pytest.raises(InvalidMorphism, match="calculus morphism"):
        syn_of_morphism(lambda p: p)

    def complement(p):
        return two_atoms.predicate(p.context, [r for r in two_atoms.pi_tuples(p.context) if r not in p])

    flipped = CalcMorphism(two_atoms, two_atoms, {sym("x"): sym("x")}, complement)
    with pytest.raises(InvalidMorphism):
        syn_of_morphism(flipped)


def test_pullback_cones_start_beyond_the_apex(cat, full_x, x1):
    xx = mk_context("xx")
    sources = cat.cone_sources([TERMINAL, x1, xx, x1])
    assert [sum(s.context == c for s in sources) for c in (TERMINAL, x1, xx)] == [2, 4, 16]
    const = _map(cat, full_x, full_x, [("a", "a"), ("b", "a")])
    assert cat.check_pullback(const, cat.id_syn(full_x), contexts=[xx])


@pytest.fixture(params=[0, 1, 2], ids=lambda n: f"x{n}")
def small_cat(request):
    return SyntacticCategory(FiniteSetModel(Carriers({"x": ["a", "b"][:request.param]})))


def _unary_world(cat):
    """Every object on [x] and every certified function between them"""
    objects = [SynObject(unary("x"), p) for p in cat.calc.elements(unary("x"))]
    functions = [f for src, dst in itertools.product(objects, repeat=2)
                 for f in cat.functions_between(src, dst)]
    return objects, functions


def test_regular_category_laws_over_small_carriers(small_cat):
    cat = small_cat
    n = len(cat.calc.carriers["x"])
    objects, functions = _unary_world(cat)
    assert len(functions) == {0: 1, 1: 3, 2: 18}[n]
    assert all(cat.check_terminal(obj) for obj in objects)

    for f in functions:
        mapping = cat.to_concrete(f)
        kind = cat.classify_syn(f)
        assert kind.mono == (len(set(mapping.values())) == len(mapping))
        assert kind.reg_epi == (set(mapping.values()) == cat.to_concrete(f.dst))
        assert cat.check_image(f)

    sources = cat.cone_sources([TERMINAL, unary("x")])
    cospans = parallel = 0
    for f, g in itertools.product(functions, repeat=2):
        if f.dst != g.dst:
            continue
        cospans += 1
        assert cat.check_pullback(f, g, sources=sources)
        assert cat.check_pullback_stability(f, g)
        if f.src == g.src:
            parallel += 1
            assert cat.check_equalizer(f, g)
            eq = cat.equalizer_syn(f, g)
            assert cat.classify_syn(cat.inclusion(eq, f.src)).mono
    assert (cospans, parallel) == {0: (1, 1), 1: (5, 3), 2: (114, 34)}[n]


def test_functions_are_discrete(small_cat):
    cat = small_cat
    _, functions = _unary_world(cat)
    for f, g in itertools.product(functions, repeat=2):
        if f.src == g.src and f.dst == g.dst and cat.calc.entails(f.theta, g.theta):
            assert cat.equal_morphisms(f, g)


def test_pullback_over_the_terminal_is_the_product(small_cat):
    cat = small_cat
    objects, _ = _unary_world(cat)
    for a, b in itertools.product(objects, repeat=2):
        square = cat.pullback_syn(cat.bang(a), cat.bang(b))
        assert square.apex.context == a.context.oplus(b.context)
        assert cat.calc.equal(square.apex.predicate, cat.calc.rho([a.predicate, b.predicate]))


def test_functor_preserves_identities_and_pullbacks(two_atoms, cat):
    target = FiniteSetModel(Carriers({"u": ["1", "2"]}))
    functor = syn_of_morphism(
        relabeling_morphism(two_atoms, target, {"x": "u"}, {"x": {"a": "2", "b": "1"}}))
    objects, functions = _unary_world(cat)
    for obj in objects:
        image = functor.on_object(obj)
        assert functor.target.equal_morphisms(functor.on_morphism(cat.id_syn(obj)),
                                              functor.target.id_syn(image))
    for f, g in itertools.product(functions, repeat=2):
        if f.dst != g.dst:
            continue
        square = cat.pullback_syn(f, g)
        image = functor.target.pullback_syn(functor.on_morphism(f), functor.on_morphism(g))
        assert functor.on_object(square.apex) == image.apex
        assert functor.target.equal_morphisms(functor.on_morphism(square.p1), image.p1)
        assert functor.target.equal_morphisms(functor.on_morphism(square.p2), image.p2)
