"""
The finite-set model prd(FinSet).

A predicate on Γ is a set of tuples, entry j drawn from the carrier of the
j-th port type. A support type with an empty carrier makes Π[Γ] empty, so
every predicate on such a context is the empty set.
"""
import itertools
import logging
import math
import unicodedata
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple

from core.calculus import CalcMorphism, RegularCalculus
from core.errors import (ContextMismatch, InvalidMorphism, InvalidPredicate,
                         MissingCarrier, NotEnumerable)
from core.frb import Relation
from core.frc import Context, TypeLike, TypeSym, oplus_all, sym

logger = logging.getLogger(__name__)

Row = Tuple[str, ...]


def normalize_atom(atom: str) -> str:
    return unicodedata.normalize("NFC", str(atom))


class Carriers:
    """Type symbol → sorted tuple of atoms"""

    def __init__(self, sets: Mapping[TypeLike, Iterable[str]]):
        self._sets: Dict[TypeSym, Tuple[str, ...]] = {
            sym(s): tuple(sorted({normalize_atom(a) for a in atoms})) for s, atoms in sets.items()
        }

    def __getitem__(self, s: TypeLike) -> Tuple[str, ...]:
        key = sym(s)
        if key not in self._sets:
            raise MissingCarrier(f"no carrier declared for type {key}")
        return self._sets[key]

    def __contains__(self, s: TypeLike) -> bool:
        return sym(s) in self._sets

    def __eq__(self, other) -> bool:
        return isinstance(other, Carriers) and self._sets == other._sets

    def __hash__(self) -> int:
        return hash(tuple(sorted(self._sets.items())))

    def types(self) -> List[TypeSym]:
        return sorted(self._sets)

    def inhabited(self, s: TypeLike) -> bool:
        return bool(self[s])

    def items(self):
        return sorted(self._sets.items())

    def __repr__(self) -> str:
        body = ", ".join(f"{s}={{{', '.join(atoms)}}}" for s, atoms in self.items())
        return f"Carriers({body})"


@dataclass(frozen=True)
class Predicate:
    """A sorted, duplicate-free tuple set on a context"""
    context: Context
    tuples: Tuple[Row, ...]

    def __contains__(self, row: Row) -> bool:
        return row in self.as_set()

    def as_set(self) -> frozenset:
        return frozenset(self.tuples)

    def __len__(self) -> int:
        return len(self.tuples)

    def __str__(self) -> str:
        return "{" + ",".join(f"({','.join(row)})" for row in self.tuples) + "}"


def _predicate(ctx: Context, rows: Iterable[Row]) -> Predicate:
    return Predicate(ctx, tuple(sorted(set(rows))))


def pi_tuples(ctx: Context, carriers: Carriers) -> List[Row]:
    """Π[Γ] as a sorted list of rows"""
    if not all(carriers.inhabited(s) for s in ctx.support):
        return []
    return list(itertools.product(*(carriers[p] for p in ctx.ports)))


def pi_card(ctx: Context, carriers: Carriers) -> int:
    ports = math.prod(len(carriers[p]) for p in ctx.ports)
    supports = math.prod(1 if carriers.inhabited(s) else 0 for s in ctx.support)
    return ports * supports


def apply_rel(omega: Relation, pred: Predicate, carriers: Carriers) -> Predicate:
    """
    P(ω)(X): the outer tuples of all block assignments that restrict to a
    row of X on the inner ports.
    """
    if pred.context != omega.source:
        raise ContextMismatch(f"relation reads {omega.source}, predicate lives on {pred.context}")
    if not all(carriers.inhabited(s) for s in omega.support):
        return Predicate(omega.outer, ())

    owner = omega.block_of
    inner_blocks = {owner[g] for g in range(omega.n_inner)}
    free = sorted({owner[omega.n_inner + j] for j in range(omega.outer.n)} - inner_blocks)
    free_choices = [carriers[omega.block_types[b]] for b in free]
    outer_owner = owner[omega.n_inner:]

    rows = set()
    for row in pred.tuples:
        value: Dict[int, str] = {}
        consistent = True
        for g, atom in enumerate(row):
            if value.setdefault(owner[g], atom) != atom:
                consistent = False
                break
        if not consistent:
            continue
        for choice in itertools.product(*free_choices):
            value.update(zip(free, choice))
            rows.add(tuple(value[b] for b in outer_owner))
    logger.debug("applied %d-block relation to %d rows: %d results",
                 omega.n_blocks, len(pred), len(rows))
    return _predicate(omega.outer, rows)


class FiniteSetModel(RegularCalculus[Predicate]):
    """
    The regular calculus of tuple sets over fixed carriers.

    Args:
        carriers: atoms for every type symbol in use
        max_enum: largest number of predicates `elements` will enumerate
    """

    def __init__(self, carriers: Carriers, max_enum: int = 4096):
        self.carriers = carriers
        self.max_enum = max_enum

    def _apply(self, omega: Relation, x: Predicate) -> Predicate:
        return apply_rel(omega, x, self.carriers)

    def rho(self, xs: Sequence[Predicate]) -> Predicate:
        ctx = oplus_all(x.context for x in xs)
        if not all(self.carriers.inhabited(s) for s in ctx.support):
            return Predicate(ctx, ())
        rows = (sum(parts, ()) for parts in itertools.product(*(x.tuples for x in xs)))
        return _predicate(ctx, rows)

    def lam(self, x: Predicate, shells: Sequence[Context]) -> List[Predicate]:
        if oplus_all(shells) != x.context:
            raise ContextMismatch(f"shells {[str(s) for s in shells]} do not split {x.context}")
        parts, start = [], 0
        for shell in shells:
            stop = start + shell.n
            parts.append(_predicate(shell, (row[start:stop] for row in x.tuples)))
            start = stop
        return parts

    def _entails(self, x: Predicate, y: Predicate) -> bool:
        return x.as_set() <= y.as_set()

    def predicate(self, ctx: Context, rows: Iterable[Sequence[str]]) -> Predicate:
        """Validated constructor"""
        allowed = set(pi_tuples(ctx, self.carriers))
        clean = []
        for row in rows:
            row = tuple(normalize_atom(a) for a in row)
            if len(row) != ctx.n:
                raise InvalidPredicate(f"row {row} has {len(row)} entries for {ctx.n} ports")
            if row not in allowed:
                raise InvalidPredicate(f"row {row} is not in the carrier product of {ctx}")
            clean.append(row)
        return _predicate(ctx, clean)

    def full(self, ctx: Context) -> Predicate:
        return Predicate(ctx, tuple(pi_tuples(ctx, self.carriers)))

    def empty(self, ctx: Context) -> Predicate:
        return Predicate(ctx, ())

    def pi_tuples(self, ctx: Context) -> List[Row]:
        return pi_tuples(ctx, self.carriers)

    def element_count(self, ctx: Context) -> int:
        return 2 ** pi_card(ctx, self.carriers)

    def elements(self, ctx: Context) -> Iterator[Predicate]:
        """All predicates on ctx, by size then lexicographically"""
        count = self.element_count(ctx)
        if count > self.max_enum:
            raise NotEnumerable(f"P({ctx}) has {count} elements, budget is {self.max_enum}")
        return self._subsets(ctx)

    def _subsets(self, ctx: Context) -> Iterator[Predicate]:
        rows = pi_tuples(ctx, self.carriers)
        for size in range(len(rows) + 1):
            for chosen in itertools.combinations(rows, size):
                yield Predicate(ctx, chosen)


def model_calculus(carriers: Carriers, max_enum: int = 4096) -> FiniteSetModel:
    return FiniteSetModel(carriers, max_enum)


def relabeling_morphism(source: FiniteSetModel, target: FiniteSetModel,
                        type_map: Mapping[TypeLike, TypeLike],
                        atom_maps: Mapping[TypeLike, Mapping[str, str]]) -> CalcMorphism:
    """
    The calculus morphism induced by F on types and a bijection
    carrier(s) → carrier'(F s) for every source type.
    """
    fmap = {sym(s): sym(t) for s, t in type_map.items()}
    amap: Dict[TypeSym, Dict[str, str]] = {}
    for s in source.carriers.types():
        if s not in fmap:
            raise InvalidMorphism(f"type map is undefined on {s}")
        mapping = {normalize_atom(a): normalize_atom(b)
                   for a, b in atom_maps.get(s, atom_maps.get(str(s), {})).items()}
        domain, codomain = source.carriers[s], target.carriers[fmap[s]]
        if sorted(mapping) != list(domain) or sorted(mapping.values()) != list(codomain):
            raise InvalidMorphism(f"atom map for {s} is not a bijection onto carrier of {fmap[s]}")
        amap[s] = mapping

    def component(x: Predicate) -> Predicate:
        ctx = x.context.rename(fmap)
        rows = (tuple(amap[t][a] for t, a in zip(x.context.ports, row)) for row in x.tuples)
        return _predicate(ctx, rows)

    return CalcMorphism(source, target, fmap, component)


def identity_morphism(calc: FiniteSetModel) -> CalcMorphism:
    types = calc.carriers.types()
    return relabeling_morphism(calc, calc, {s: s for s in types},
                               {s: {a: a for a in calc.carriers[s]} for s in types})
