import itertools

import pytest

from core.errors import InvalidPredicate, MissingCarrier, NotEnumerable
from core.frb import OUT, compose_rel, graph_rel, leq_rel, mk_relation
from core.frc import TERMINAL, diagonal, mk_context, unary
from core.model import (Carriers, FiniteSetModel, Predicate, apply_rel, model_calculus,
                        normalize_atom, pi_card, pi_tuples)


def test_carriers_sort_dedupe_and_normalize():
    carriers = Carriers({"x": ["b", "a", "b"], "s": ["e\u0301", "\u00e9"]})
    assert carriers["x"] == ("a", "b")
    assert carriers["s"] == ("\u00e9",)
    assert normalize_atom("e\u0301") == "\u00e9"
    assert "x" in carriers and "y" not in carriers
    with pytest.raises(MissingCarrier):
        carriers["y"]


def test_pi_tuples_respect_empty_support():
    carriers = Carriers({"x": ["a", "b"], "z": []})
    assert pi_tuples(mk_context("xx"), carriers) == [("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")]
    assert pi_tuples(mk_context("x", "z"), carriers) == []
    assert pi_card(mk_context("x", "z"), carriers) == 0
    assert pi_tuples(TERMINAL, carriers) == [()]


def test_predicate_validation(two_atoms):
    x = unary("x")
    p = two_atoms.predicate(x, [("b",), ("a",), ("a",)])
    assert p.tuples == (("a",), ("b",))
    assert str(p) == "{(a),(b)}"
    assert ("a",) in p and len(p) == 2
    with pytest.raises(InvalidPredicate):
        two_atoms.predicate(x, [("c",)])
    with pytest.raises(InvalidPredicate):
        two_atoms.predicate(x, [("a", "b")])


def test_apply_forces_blocks_and_frees_outer_dots(two_atoms):
    x = unary("x")
    p = two_atoms.predicate(x, [("a",)])
    delta = graph_rel(diagonal(x))
    assert str(apply_rel(delta, p, two_atoms.carriers)) == "{(a,a)}"
    loose = mk_relation([x], mk_context("xx"), [[(0, 0), (OUT, 0)], [(OUT, 1)]])
    assert str(two_atoms.apply(loose, p)) == "{(a,a),(a,b)}"


def test_apply_hides_inner_only_dots(two_atoms):
    xx = mk_context("xx")
    theta = two_atoms.predicate(xx, [("a", "b")])
    project = mk_relation([xx], unary("x"), [[(0, 0)], [(0, 1), (OUT, 0)]])
    assert two_atoms.apply(project, theta).tuples == (("b",),)


def test_apply_with_inconsistent_rows_drops_them(two_atoms):
    xx = mk_context("xx")
    theta = two_atoms.predicate(xx, [("a", "b"), ("b", "b")])
    equal = mk_relation([xx], unary("x"), [[(0, 0), (0, 1), (OUT, 0)]])
    assert two_atoms.apply(equal, theta).tuples == (("b",),)


def test_empty_support_carrier_empties_everything(sorted_model):
    x = unary("x")
    p = sorted_model.full(x)
    annotated = mk_relation([x], x, [[(0, 0), (OUT, 0)]], ["z"])
    assert len(sorted_model.apply(annotated, p)) == 0
    assert len(sorted_model.full(mk_context("x", "z"))) == 0


def test_floating_support_needs_a_carrier(example_relation):
    carriers = Carriers({"w": ["0"], "x": ["a"], "y": ["b"], "z": ["c"]})
    calc = FiniteSetModel(carriers)
    with pytest.raises(MissingCarrier):
        calc.apply(example_relation, calc.full(example_relation.source))


def test_functoriality_on_a_composite(two_atoms):
    x = unary("x")
    d = graph_rel(diagonal(x))
    merge = mk_relation([mk_context("xx")], x, [[(0, 0), (0, 1), (OUT, 0)]])
    p = two_atoms.full(x)
    composite = compose_rel(d, merge)
    assert two_atoms.apply(composite, p) == two_atoms.apply(merge, two_atoms.apply(d, p))


def test_rho_and_lam(sorted_model):
    x, y = unary("x"), unary("y")
    p = sorted_model.predicate(x, [("a",)])
    q = sorted_model.predicate(y, [("c",), ("e",)])
    both = sorted_model.rho([p, q])
    assert both.context == mk_context("xy")
    assert both.tuples == (("a", "c"), ("a", "e"))
    assert sorted_model.lam(both, [x, y]) == [p, q]
    assert sorted_model.rho([]) == Predicate(TERMINAL, ((),))


def test_elements_are_ordered_and_budgeted(two_atoms):
    x = unary("x")
    found = [str(p) for p in two_atoms.elements(x)]
    assert found == ["{}", "{(a)}", "{(b)}", "{(a),(b)}"]
    assert two_atoms.element_count(mk_context("xx")) == 16
    small = model_calculus(two_atoms.carriers, max_enum=8)
    with pytest.raises(NotEnumerable):
        small.elements(mk_context("xx"))


def test_tuple_sets_follow_the_carriers(sorted_model):
    carriers = sorted_model.carriers
    for s in ("x", "y", "z"):
        assert pi_tuples(unary(s), carriers) == [(a,) for a in carriers[s]]
    shapes = [TERMINAL, unary("x"), mk_context("xy"), mk_context("y", "z"), mk_context("", "x")]
    for left, right in itertools.product(shapes, repeat=2):
        rows = [r + s for r in pi_tuples(left, carriers) for s in pi_tuples(right, carriers)]
        assert pi_tuples(left.oplus(right), carriers) == rows
        assert pi_card(left.oplus(right), carriers) == len(rows)


def test_action_is_functorial_on_every_small_composite(small_model, small_chains):
    carriers = small_model.carriers
    elements = {}
    for first, followers in small_chains:
        if first.source not in elements:
            elements[first.source] = list(small_model.elements(first.source))
        for pred in elements[first.source]:
            mid = apply_rel(first, pred, carriers)
            for second, both in followers:
                assert apply_rel(both, pred, carriers) == apply_rel(second, mid, carriers)


def test_two_cells_act_by_containment_on_every_small_pair(small_model, small_homs):
    carriers = small_model.carriers
    for (a, _), rels in small_homs.items():
        preds = list(small_model.elements(a))
        images = [[apply_rel(w, p, carriers).as_set() for p in preds] for w in rels]
        for i, j in itertools.product(range(len(rels)), repeat=2):
            if leq_rel(rels[i], rels[j]):
                assert all(x <= y for x, y in zip(images[i], images[j]))
