"""
The free regular po-category frb(T): relations of frc(T) drawn as wiring
diagrams.

A relation Γ1⊕…⊕Γk ⇸ Γout is stored as a partition of its global ports
into typed blocks (the black dots) plus a support set. Global ports are
numbered with the inner shells first, in shell order, then the outer shell.
Every Relation is kept in normal form, so equality is structural.
"""
import logging
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from networkx.utils import UnionFind

from core.errors import (ArityMismatch, IllTypedBlock, NotAPartition,
                         ObjectMismatch, SlotOutOfRange, UnknownPort)
from core.frc import (TERMINAL, Context, FrcMorphism, TypeLike, TypeSym,
                      diagonal, bang, braiding, oplus_all, sym)

logger = logging.getLogger(__name__)

OUT = "out"

Shell = Union[int, str]
Port = Tuple[Shell, int]


@dataclass(frozen=True)
class Relation:
    """
    A morphism of frb(T) in normal form.

    Args:
        inner: the k inner shells
        outer: the outer shell
        blocks: global port indices grouped into blocks; members sorted,
                blocks ordered by least member
        support: S_ω, sorted
    """
    inner: Tuple[Context, ...]
    outer: Context
    blocks: Tuple[Tuple[int, ...], ...]
    support: Tuple[TypeSym, ...]

    @property
    def k(self) -> int:
        return len(self.inner)

    @cached_property
    def offsets(self) -> Tuple[int, ...]:
        """Global index of the first port of each inner shell, then of the outer shell"""
        starts = [0]
        for ctx in self.inner:
            starts.append(starts[-1] + ctx.n)
        return tuple(starts)

    @property
    def n_inner(self) -> int:
        return self.offsets[-1]

    @property
    def n_ports(self) -> int:
        return self.n_inner + self.outer.n

    @cached_property
    def source(self) -> Context:
        """⊕ of the inner shells: the domain when ω is read as a binary relation"""
        return oplus_all(self.inner)

    @cached_property
    def port_types(self) -> Tuple[TypeSym, ...]:
        return self.source.ports + self.outer.ports

    @cached_property
    def block_of(self) -> Tuple[int, ...]:
        owner = [0] * self.n_ports
        for b, members in enumerate(self.blocks):
            for g in members:
                owner[g] = b
        return tuple(owner)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    @cached_property
    def block_types(self) -> Tuple[TypeSym, ...]:
        return tuple(self.port_types[members[0]] for members in self.blocks)

    @property
    def white_dot(self) -> Tuple[TypeSym, ...]:
        used = set(self.block_types)
        return tuple(s for s in self.support if s not in used)

    @property
    def floating(self) -> Tuple[TypeSym, ...]:
        """Support types carried neither by a block nor by any shell's support"""
        carried = set(self.block_types) | set(self.outer.support)
        for ctx in self.inner:
            carried.update(ctx.support)
        return tuple(s for s in self.support if s not in carried)

    def port(self, g: int) -> Port:
        """Translate a global index to (shell, j), both 0-based"""
        if g >= self.n_inner:
            return (OUT, g - self.n_inner)
        for i in range(self.k):
            if g < self.offsets[i + 1]:
                return (i, g - self.offsets[i])
        raise UnknownPort(f"no port with global index {g}")

    def global_index(self, port: Port) -> int:
        shell, j = port
        if shell == OUT:
            ctx, base = self.outer, self.n_inner
        elif isinstance(shell, int) and 0 <= shell < self.k:
            ctx, base = self.inner[shell], self.offsets[shell]
        else:
            raise UnknownPort(f"no shell {shell!r}")
        if not 0 <= j < ctx.n:
            raise UnknownPort(f"shell {shell!r} has no port {j + 1}")
        return base + j

    def is_outer(self, g: int) -> bool:
        return g >= self.n_inner

    def as_binary(self) -> "Relation":
        """The same diagram with its inner shells merged into one"""
        return Relation((self.source,), self.outer, self.blocks, self.support)

    def __str__(self) -> str:
        shells = ", ".join(map(str, self.inner))
        nodes = "; ".join(
            f"{t}({', '.join(port_label(self.port(g)) for g in members)})"
            for t, members in zip(self.block_types, self.blocks))
        support = ", ".join(map(str, self.support))
        return f"{shells} -> {self.outer} {{{nodes}}} support {{{support}}}"


def _normalize(inner: Sequence[Context], outer: Context, blocks: Iterable[Iterable[int]],
               support: Iterable[TypeSym]) -> Relation:
    ordered = sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0])
    full = set(support) | set(outer.support)
    for ctx in inner:
        full.update(ctx.support)
    rel = Relation(tuple(inner), outer, tuple(ordered), ())
    full.update(rel.block_types)
    return Relation(tuple(inner), outer, tuple(ordered), tuple(sorted(full)))


def mk_relation(inner: Sequence[Context], outer: Context, blocks: Iterable[Iterable[Port]],
                extra_support: Iterable[TypeLike] = ()) -> Relation:
    """
    Build and validate a wiring diagram.

    Args:
        inner: inner shell contexts
        outer: outer shell context
        blocks: each block lists its ports as (shell, j), shell a 0-based
                inner index or OUT, j 0-based
        extra_support: white-dot annotations
    """
    draft = Relation(tuple(inner), outer, (), ())
    seen: Dict[int, int] = {}
    grouped: List[Tuple[int, ...]] = []
    for b, block in enumerate(blocks):
        members = tuple(draft.global_index(p) for p in block)
        if not members:
            raise NotAPartition(f"block {b + 1} is empty")
        for g in members:
            if g in seen:
                raise NotAPartition(
                    f"port {port_label(draft.port(g))} lies in blocks {seen[g] + 1} and {b + 1}")
            seen[g] = b
        types = {draft.port_types[g] for g in members}
        if len(types) > 1:
            raise IllTypedBlock(f"block {b + 1} mixes types {sorted(map(str, types))}")
        grouped.append(members)
    missing = [g for g in range(draft.n_ports) if g not in seen]
    if missing:
        labels = ", ".join(port_label(draft.port(g)) for g in missing)
        raise NotAPartition(f"ports not covered by any block: {labels}")
    return _normalize(inner, outer, grouped, (sym(s) for s in extra_support))


def port_label(port: Port) -> str:
    shell, j = port
    return f"{OUT}.{j + 1}" if shell == OUT else f"{shell + 1}.{j + 1}"


def identity_rel(ctx: Context) -> Relation:
    return _normalize((ctx,), ctx, ((j, ctx.n + j) for j in range(ctx.n)), ctx.support)


def unit_rel() -> Relation:
    """The identity on the monoidal unit: no shells, no ports"""
    return Relation((), TERMINAL, (), ())


def compose_rel(first: Relation, second: Relation) -> Relation:
    """
    Composite first;second, glued along first.outer = second.source.

    Blocks of both diagrams are merged through each shared port with a
    union-find; merged blocks that touch no remaining port are dropped and
    their types survive only in the support.
    """
    if first.outer != second.source:
        raise ObjectMismatch(f"cannot compose: {first.outer} is not {second.source}")
    mid = first.outer.n
    uf = UnionFind()
    for d in range(mid):
        uf.union(("a", first.block_of[first.n_inner + d]), ("b", second.block_of[d]))

    grouped: Dict[object, List[int]] = {}
    for g in range(first.n_inner):
        grouped.setdefault(uf[("a", first.block_of[g])], []).append(g)
    for j in range(second.outer.n):
        root = uf[("b", second.block_of[second.n_inner + j])]
        grouped.setdefault(root, []).append(first.n_inner + j)
    logger.debug("composite keeps %d of %d blocks", len(grouped), first.n_blocks + second.n_blocks)
    return _normalize(first.inner, second.outer, grouped.values(),
                      set(first.support) | set(second.support))


def tensor_rel(*relations: Relation) -> Relation:
    """Juxtaposition; with no arguments, the unit"""
    return reduce(_tensor_pair, relations, unit_rel())


def _tensor_pair(left: Relation, right: Relation) -> Relation:
    li, ri, lo = left.n_inner, right.n_inner, left.outer.n

    def shift_left(g: int) -> int:
        return g if g < li else g + ri

    def shift_right(g: int) -> int:
        return li + g if g < ri else li + ri + lo + (g - ri)

    blocks = [tuple(map(shift_left, b)) for b in left.blocks]
    blocks += [tuple(map(shift_right, b)) for b in right.blocks]
    return _normalize(left.inner + right.inner, left.outer.oplus(right.outer), blocks,
                      set(left.support) | set(right.support))


def substitute(omega: Relation, slot: int, inner: Relation) -> Relation:
    """Nest `inner` into shell `slot` (0-based) of omega"""
    if not 0 <= slot < omega.k:
        raise SlotOutOfRange(f"diagram has {omega.k} shells, no slot {slot + 1}")
    if inner.outer != omega.inner[slot]:
        raise ObjectMismatch(f"cannot nest a diagram with outer {inner.outer} into {omega.inner[slot]}")
    parts = [identity_rel(ctx) for ctx in omega.inner[:slot]]
    parts.append(inner)
    parts += [identity_rel(ctx) for ctx in omega.inner[slot + 1:]]
    return compose_rel(tensor_rel(*parts), omega)


def transpose_rel(omega: Relation) -> Relation:
    if omega.k != 1:
        raise ArityMismatch(f"transpose needs one inner shell, got {omega.k}")
    n_in, n_out = omega.n_inner, omega.outer.n

    def swap(g: int) -> int:
        return n_out + g if g < n_in else g - n_in

    return _normalize((omega.outer,), omega.inner[0],
                      (map(swap, b) for b in omega.blocks), omega.support)


def graph_rel(f: FrcMorphism) -> Relation:
    """⟨id, f⟩ : src ⇸ dst"""
    blocks = [[i] for i in range(f.src.n)]
    for j, i in enumerate(f.assign):
        blocks[i].append(f.src.n + j)
    return _normalize((f.src,), f.dst, blocks, f.src.support)


def cograph_rel(f: FrcMorphism) -> Relation:
    return transpose_rel(graph_rel(f))


def braiding_rel(left: Context, right: Context) -> Relation:
    return graph_rel(braiding(left, right))


def discard_rel(ctx: Context) -> Relation:
    """(;ε_Γ): no inner shell, every outer port on its own dot"""
    return _normalize((), ctx, ((j,) for j in range(ctx.n)), ctx.support)


def merge_rel(ctx: Context) -> Relation:
    """Two Γ shells whose j-th ports meet the j-th outer port"""
    n = ctx.n
    return _normalize((ctx, ctx), ctx, ((j, n + j, 2 * n + j) for j in range(n)), ctx.support)


def leq_rel(omega: Relation, other: Relation) -> bool:
    """2-cell omega ≤ other: other only breaks wires and drops support"""
    if omega.inner != other.inner or omega.outer != other.outer:
        raise ObjectMismatch("2-cells compare diagrams with the same shells")
    owner = omega.block_of
    for block in other.blocks:
        if len({owner[g] for g in block}) != 1:
            return False
    return set(other.support) <= set(omega.support)


def as_graph(omega: Relation) -> Optional[FrcMorphism]:
    """The frc morphism whose graph is omega, if there is one"""
    if omega.k != 1 or omega.support != omega.inner[0].support:
        return None
    source_port = []
    for block in omega.blocks:
        inner_ports = [g for g in block if not omega.is_outer(g)]
        if len(inner_ports) != 1:
            return None
        source_port.append(inner_ports[0])
    assign = tuple(source_port[omega.block_of[omega.n_inner + j]] for j in range(omega.outer.n))
    return FrcMorphism(omega.inner[0], omega.outer, assign)


def span_decompose(omega: Relation) -> Tuple[FrcMorphism, FrcMorphism]:
    """
    Legs (g, f) of the span Γ1 ← Γ_ω → Γ2 with cograph(g);graph(f) = omega.

    Γ_ω has one port per block; a diagram with several inner shells is read
    as a relation out of their ⊕.
    """
    binary = omega.as_binary()
    apex = Context(binary.block_types, binary.support)
    owner = binary.block_of
    g = FrcMorphism(apex, binary.source, tuple(owner[i] for i in range(binary.n_inner)))
    f = FrcMorphism(apex, binary.outer,
                    tuple(owner[binary.n_inner + j] for j in range(binary.outer.n)))
    return g, f


def rename_rel(omega: Relation, type_map: Mapping[TypeSym, TypeSym]) -> Relation:
    """frb[F] for F: T → T'"""
    return _normalize([ctx.rename(type_map) for ctx in omega.inner], omega.outer.rename(type_map),
                      omega.blocks, (type_map[s] for s in omega.support))


def diagonal_rel(ctx: Context) -> Relation:
    return graph_rel(diagonal(ctx))


def true_rel(ctx: Context) -> Relation:
    """cograph of ε_Γ : 0 ⇸ Γ, the diagram giving true_Γ"""
    return cograph_rel(bang(ctx))
