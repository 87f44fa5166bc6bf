"""Seeded random and exhaustive contexts, relations, predicates and terms for property checks."""
import itertools
import os
from typing import Iterator, List, Mapping, Optional, Sequence

import numpy as np

from config import Config
from core.calculus import GraphicalTerm, LeafSymbol
from core.frb import Relation, mk_relation
from core.frc import Context, TypeLike, mk_context, sym
from core.model import FiniteSetModel, Predicate


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    """A generator seeded from `seed`, else from REGULUS_SEED or the config default"""
    if seed is None:
        seed = Config().get_enumeration_settings()['seed']
    return np.random.default_rng(seed)


def pinned_seed() -> Optional[int]:
    """The seed property tests are pinned to, when REGULUS_SEED is set"""
    if os.environ.get('REGULUS_SEED') is None:
        return None
    return Config().get_enumeration_settings()['seed']


def random_context(rng: np.random.Generator, types: Sequence[TypeLike], max_ports: int = 2,
                   extra_prob: float = 0.0) -> Context:
    n = int(rng.integers(0, max_ports + 1))
    ports = [types[int(k)] for k in rng.integers(0, len(types), size=n)]
    extra = [t for t in types if rng.random() < extra_prob]
    return mk_context(ports, extra)


def random_partition(rng: np.random.Generator, port_types: Sequence) -> List[List[int]]:
    """Each port joins an existing block of its type or opens a new one"""
    blocks: List[List[int]] = []
    for g, t in enumerate(port_types):
        options = [b for b in blocks if port_types[b[0]] == t]
        k = int(rng.integers(0, len(options) + 1))
        if k == len(options):
            blocks.append([g])
        else:
            options[k].append(g)
    return blocks


def random_relation(rng: np.random.Generator, inner: Sequence[Context], outer: Context,
                    extra_types: Sequence[TypeLike] = (), extra_prob: float = 0.25) -> Relation:
    draft = Relation(tuple(inner), outer, (), ())
    blocks = random_partition(rng, draft.port_types)
    extra = [t for t in extra_types if rng.random() < extra_prob]
    return mk_relation(inner, outer, [[draft.port(g) for g in b] for b in blocks], extra)


def random_breaking(rng: np.random.Generator, omega: Relation, drop_prob: float = 0.5) -> Relation:
    """A diagram above omega: blocks split at random, white-dot annotations dropped at random"""
    blocks: List[List[int]] = []
    for members in omega.blocks:
        for part in random_partition(rng, [0] * len(members)):
            blocks.append([members[i] for i in part])
    kept = [s for s in omega.white_dot if rng.random() >= drop_prob]
    return mk_relation(omega.inner, omega.outer, [[omega.port(g) for g in b] for b in blocks], kept)


def random_predicate(rng: np.random.Generator, calc: FiniteSetModel, ctx: Context,
                     density: float = 0.5) -> Predicate:
    rows = [row for row in calc.pi_tuples(ctx) if rng.random() < density]
    return calc.predicate(ctx, rows)


def random_term(rng: np.random.Generator, vocabulary: Mapping[str, Context], outer: Context,
                max_leaves: int = 2, extra_types: Sequence[TypeLike] = (),
                extra_prob: float = 0.2) -> GraphicalTerm:
    """A term over named leaf symbols, leaves drawn with repetition from the vocabulary"""
    names = sorted(vocabulary)
    count = int(rng.integers(0, max_leaves + 1))
    chosen = [names[int(k)] for k in rng.integers(0, len(names), size=count)]
    inner = [vocabulary[n] for n in chosen]
    wiring = random_relation(rng, inner, outer, [sym(t) for t in extra_types], extra_prob)
    return GraphicalTerm(wiring, tuple(LeafSymbol(n, vocabulary[n]) for n in chosen))


def all_contexts(types: Sequence[TypeLike], max_ports: int) -> List[Context]:
    """Every context of at most max_ports ports over types, no extra support"""
    return [mk_context(ports) for n in range(max_ports + 1)
            for ports in itertools.product(types, repeat=n)]


def all_partitions(port_types: Sequence) -> Iterator[List[List[int]]]:
    """Every partition of the ports into blocks of a single type"""
    blocks: List[List[int]] = []

    def extend(g: int) -> Iterator[List[List[int]]]:
        if g == len(port_types):
            yield [list(b) for b in blocks]
            return
        for block in blocks:
            if port_types[block[0]] == port_types[g]:
                block.append(g)
                yield from extend(g + 1)
                block.pop()
        blocks.append([g])
        yield from extend(g + 1)
        blocks.pop()

    return extend(0)


def all_relations(inner: Sequence[Context], outer: Context,
                  extra_types: Sequence[TypeLike] = ()) -> List[Relation]:
    """Every diagram between the shells, with any subset of extra_types as annotations"""
    draft = Relation(tuple(inner), outer, (), ())
    found: List[Relation] = []
    for blocks in all_partitions(draft.port_types):
        ports = [[draft.port(g) for g in b] for b in blocks]
        for r in range(len(extra_types) + 1):
            for extra in itertools.combinations(extra_types, r):
                rel = mk_relation(inner, outer, ports, extra)
                if rel not in found:
                    found.append(rel)
    return found
