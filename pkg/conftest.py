import os
import sys

import hypothesis
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from core.calculus import GraphicalTerm, LeafSymbol  # noqa: E402
from core.frb import OUT, compose_rel, mk_relation  # noqa: E402
from core.frc import mk_context, unary  # noqa: E402
from core.model import Carriers, FiniteSetModel  # noqa: E402
from utils.sampling import all_contexts, all_relations, pinned_seed  # noqa: E402

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "tests", "data")
SMALL_TYPES = ("x", "y")

hypothesis.settings.register_profile("pinned", database=None)


def pytest_collection_modifyitems(items):
    """Pin every hypothesis test to REGULUS_SEED when it is set"""
    seed = pinned_seed()
    if seed is None:
        return
    hypothesis.settings.load_profile("pinned")
    for item in items:
        obj = getattr(item, "obj", None)
        test = getattr(obj, "__func__", obj)
        if getattr(test, "is_hypothesis_test", False):
            hypothesis.seed(seed)(test)


@pytest.fixture
def data_path():
    return lambda name: os.path.join(DATA_DIR, name)


@pytest.fixture
def example_shells():
    return (mk_context("xyy"), mk_context("xxx", "wy"), mk_context("yyxx"),
            mk_context("yzzxxz", "w"))


@pytest.fixture
def example_relation(example_shells):
    """Three inner shells, seven dots, a floating v"""
    g1, g2, g3, out = example_shells
    blocks = [
        [(0, 2), (2, 0), (OUT, 0)],
        [(0, 1), (2, 1)],
        [(OUT, 1), (OUT, 2)],
        [(0, 0), (1, 1)],
        [(1, 2), (OUT, 3)],
        [(1, 0), (2, 2), (2, 3), (OUT, 4)],
        [(OUT, 5)],
    ]
    return mk_relation([g1, g2, g3], out, blocks, ["v"])


@pytest.fixture
def example_term(example_relation):
    leaves = [LeafSymbol(name, ctx) for name, ctx in zip(("th1", "th2", "th3"), example_relation.inner)]
    return GraphicalTerm.of(example_relation, leaves)


@pytest.fixture
def nesting_pair():
    """omega' nests into the only shell of omega; the composite leaves t, w, x, z unwired"""
    mid = mk_context("xyyy", "t")
    inner = mk_relation([mk_context("yy")], mid,
                        [[(OUT, 0)], [(0, 0), (OUT, 1)], [(0, 1), (OUT, 2), (OUT, 3)]], ["w"])
    outer = mk_relation([mid], mk_context("yy"),
                        [[(0, 0)], [(0, 1), (0, 2), (OUT, 0)], [(0, 3), (OUT, 1)]], ["z"])
    return inner, outer


@pytest.fixture
def breaking_pair():
    """One dot on three outer ports, and the same ports split 1 + 2"""
    ctx = mk_context("xxx")
    connected = mk_relation([], ctx, [[(OUT, 0), (OUT, 1), (OUT, 2)]])
    broken = mk_relation([], ctx, [[(OUT, 0)], [(OUT, 1), (OUT, 2)]])
    return connected, broken


@pytest.fixture
def two_atoms():
    return FiniteSetModel(Carriers({"x": ["a", "b"]}))


@pytest.fixture
def sorted_model():
    return FiniteSetModel(Carriers({"x": ["a", "b"], "y": ["c", "d", "e"], "z": []}))


@pytest.fixture
def x1():
    return unary("x")


@pytest.fixture(scope="session")
def small_homs():
    """Every one-shell diagram between contexts of at most two ports over x and y"""
    contexts = all_contexts(SMALL_TYPES, 2)
    return {(a, b): all_relations([a], b, SMALL_TYPES) for a in contexts for b in contexts}


@pytest.fixture(scope="session")
def small_chains(small_homs):
    """Each small diagram with every diagram that can follow it, and the composites"""
    after = {}
    for (a, _), rels in small_homs.items():
        after.setdefault(a, []).extend(rels)
    return [(first, [(second, compose_rel(first, second)) for second in after[first.outer]])
            for rels in small_homs.values() for first in rels]


@pytest.fixture(params=[(i, j) for i in range(3) for j in range(3)], ids=lambda p: f"x{p[0]}-y{p[1]}")
def small_model(request):
    """x and y carriers of every size up to two"""
    i, j = request.param
    return FiniteSetModel(Carriers({"x": ["a", "b"][:i], "y": ["c", "d"][:j]}))
