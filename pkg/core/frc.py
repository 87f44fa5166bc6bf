"""
The free regular category frc(T) on a set T of type symbols.

Objects are contexts (n typed ports plus a support set) and a morphism
Γ → Γ' is a function from the ports of Γ' to the ports of Γ that preserves
types and only shrinks the support. Limits and image factorizations are
finite combinatorics on these index maps.
"""
import enum
import itertools
import logging
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from networkx.utils import UnionFind

from core.errors import (IndexOutOfRange, InvalidName, ObjectMismatch,
                         SupportViolation, TypeMismatch)

logger = logging.getLogger(__name__)

_NAME = re.compile(r"^[A-Za-z0-9_]+$")


@dataclass(frozen=True, order=True)
class TypeSym:
    """An element of T; ordered and compared by name"""
    name: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not _NAME.match(self.name):
            raise InvalidName(f"invalid type symbol {self.name!r}")

    def __str__(self) -> str:
        return self.name


TypeLike = Union[TypeSym, str]


def sym(value: TypeLike) -> TypeSym:
    """Coerce a string to a TypeSym"""
    return value if isinstance(value, TypeSym) else TypeSym(value)


@dataclass(frozen=True)
class Context:
    """
    A context Γ = (n, S, τ).

    Args:
        ports: port types, in port order
        support: the full support S, sorted and duplicate-free; every port
                 type is a member
    """
    ports: Tuple[TypeSym, ...]
    support: Tuple[TypeSym, ...]

    def __post_init__(self):
        if tuple(sorted(set(self.support))) != self.support:
            raise SupportViolation(f"support {self.support} is not sorted and duplicate-free")
        missing = set(self.ports) - set(self.support)
        if missing:
            raise SupportViolation(f"port types {sorted(map(str, missing))} are not in the support")

    @property
    def n(self) -> int:
        return len(self.ports)

    @property
    def annotation(self) -> Tuple[TypeSym, ...]:
        """The white-dot label: support types not carried by any port"""
        used = set(self.ports)
        return tuple(s for s in self.support if s not in used)

    def oplus(self, other: "Context") -> "Context":
        return product(self, other).context

    def rename(self, type_map: Mapping[TypeSym, TypeSym]) -> "Context":
        return mk_context([type_map[p] for p in self.ports],
                          [type_map[s] for s in self.support])

    def __str__(self) -> str:
        ports = ", ".join(map(str, self.ports))
        extra = ", ".join(map(str, self.annotation))
        return f"[{ports} | {extra}]" if extra else f"[{ports}]"


def mk_context(ports: Iterable[TypeLike], extra_support: Iterable[TypeLike] = ()) -> Context:
    """
    Build a context from its port types and any support beyond them.

    Args:
        ports: port types in order
        extra_support: additional support types (white-dot annotations)
    """
    port_syms = tuple(sym(p) for p in ports)
    support = tuple(sorted(set(port_syms) | {sym(s) for s in extra_support}))
    return Context(port_syms, support)


TERMINAL = Context((), ())


def unary(s: TypeLike) -> Context:
    return mk_context([s])


def supp(s: TypeLike) -> Context:
    """The support context Supp(s) = (0, {s})"""
    return mk_context([], [s])


def oplus_all(contexts: Iterable[Context]) -> Context:
    ports = []
    support = set()
    for ctx in contexts:
        ports.extend(ctx.ports)
        support.update(ctx.support)
    return Context(tuple(ports), tuple(sorted(support)))


@dataclass(frozen=True)
class FrcMorphism:
    """
    A morphism src → dst of frc(T).

    Args:
        src: domain context
        dst: codomain context
        assign: for each dst port j (0-based), the src port it reads from
    """
    src: Context
    dst: Context
    assign: Tuple[int, ...]

    def __post_init__(self):
        if len(self.assign) != self.dst.n:
            raise IndexOutOfRange(f"assign has {len(self.assign)} entries for {self.dst.n} ports")
        for j, i in enumerate(self.assign):
            if not 0 <= i < self.src.n:
                raise IndexOutOfRange(f"port {j + 1} reads from missing port {i + 1}")
            if self.src.ports[i] != self.dst.ports[j]:
                raise TypeMismatch(
                    f"port {j + 1} has type {self.dst.ports[j]} but reads {self.src.ports[i]}")
        if not set(self.dst.support) <= set(self.src.support):
            raise SupportViolation(
                f"codomain support {list(map(str, self.dst.support))} "
                f"is not contained in {list(map(str, self.src.support))}")

    def rename(self, type_map: Mapping[TypeSym, TypeSym]) -> "FrcMorphism":
        return FrcMorphism(self.src.rename(type_map), self.dst.rename(type_map), self.assign)

    def __str__(self) -> str:
        table = ", ".join(f"{j + 1}->{i + 1}" for j, i in enumerate(self.assign))
        return f"{self.src} -> {self.dst} {{{table}}}"


def mk_morphism(src: Context, dst: Context, assign: Sequence[int]) -> FrcMorphism:
    return FrcMorphism(src, dst, tuple(int(i) for i in assign))


def identity(ctx: Context) -> FrcMorphism:
    return FrcMorphism(ctx, ctx, tuple(range(ctx.n)))


def compose_morphism(f: FrcMorphism, g: FrcMorphism) -> FrcMorphism:
    """Diagrammatic composite f;g"""
    if f.dst != g.src:
        raise ObjectMismatch(f"cannot compose: {f.dst} is not {g.src}")
    return FrcMorphism(f.src, g.dst, tuple(f.assign[i] for i in g.assign))


class Product(NamedTuple):
    context: Context
    pi1: FrcMorphism
    pi2: FrcMorphism


def product(left: Context, right: Context) -> Product:
    ctx = Context(left.ports + right.ports,
                  tuple(sorted(set(left.support) | set(right.support))))
    pi1 = FrcMorphism(ctx, left, tuple(range(left.n)))
    pi2 = FrcMorphism(ctx, right, tuple(range(left.n, left.n + right.n)))
    return Product(ctx, pi1, pi2)


def pairing(f: FrcMorphism, g: FrcMorphism) -> FrcMorphism:
    """⟨f, g⟩ : Δ → Γ1⊕Γ2 for f: Δ → Γ1 and g: Δ → Γ2"""
    if f.src != g.src:
        raise ObjectMismatch(f"pairing needs a common domain, got {f.src} and {g.src}")
    return FrcMorphism(f.src, product(f.dst, g.dst).context, f.assign + g.assign)


def projection(left: Context, right: Context, i: int) -> FrcMorphism:
    prod = product(left, right)
    return prod.pi1 if i == 1 else prod.pi2


def diagonal(ctx: Context) -> FrcMorphism:
    """δ : Γ → Γ⊕Γ"""
    return pairing(identity(ctx), identity(ctx))


def bang(ctx: Context) -> FrcMorphism:
    """ε : Γ → 0"""
    return FrcMorphism(ctx, TERMINAL, ())


def braiding(left: Context, right: Context) -> FrcMorphism:
    """σ : Γ1⊕Γ2 → Γ2⊕Γ1"""
    prod = product(left, right)
    return pairing(prod.pi2, prod.pi1)


def tensor_morphism(f: FrcMorphism, g: FrcMorphism) -> FrcMorphism:
    """f⊕g acting on each factor separately"""
    src = product(f.src, g.src).context
    dst = product(f.dst, g.dst).context
    shift = f.src.n
    return FrcMorphism(src, dst, f.assign + tuple(i + shift for i in g.assign))


class Pullback(NamedTuple):
    apex: Context
    leg1: FrcMorphism
    leg2: FrcMorphism


def pullback(f1: FrcMorphism, f2: FrcMorphism) -> Pullback:
    """
    Pullback of Γ1 → Γ ← Γ2, computed as a pushout of port sets.

    Ports of Γ1 are numbered 0..n1-1 and ports of Γ2 follow them; the apex
    has one port per class of the quotient, ordered by least member.
    """
    if f1.dst != f2.dst:
        raise ObjectMismatch(f"cospan legs end at {f1.dst} and {f2.dst}")
    n1, n2 = f1.src.n, f2.src.n
    uf = UnionFind(range(n1 + n2))
    for i in range(f1.dst.n):
        uf.union(f1.assign[i], n1 + f2.assign[i])

    classes = sorted((sorted(c) for c in uf.to_sets()), key=lambda c: c[0])
    class_of = {g: k for k, members in enumerate(classes) for g in members}
    port_types = f1.src.ports + f2.src.ports
    apex = Context(tuple(port_types[c[0]] for c in classes),
                   tuple(sorted(set(f1.src.support) | set(f2.src.support))))
    leg1 = FrcMorphism(apex, f1.src, tuple(class_of[g] for g in range(n1)))
    leg2 = FrcMorphism(apex, f2.src, tuple(class_of[n1 + g] for g in range(n2)))
    logger.debug("pullback of %d+%d ports has %d classes", n1, n2, len(classes))
    return Pullback(apex, leg1, leg2)


def mediate(pb: Pullback, h1: FrcMorphism, h2: FrcMorphism) -> Optional[FrcMorphism]:
    """The unique m with m;leg1 = h1 and m;leg2 = h2, or None when the cone does not factor"""
    if h1.src != h2.src or h1.dst != pb.leg1.dst or h2.dst != pb.leg2.dst:
        raise ObjectMismatch("cone does not sit over the pullback legs")
    chosen = [None] * pb.apex.n
    for leg, h in ((pb.leg1, h1), (pb.leg2, h2)):
        for j, k in enumerate(leg.assign):
            if chosen[k] is None:
                chosen[k] = h.assign[j]
            elif chosen[k] != h.assign[j]:
                return None
    if any(c is None for c in chosen):
        return None
    try:
        return FrcMorphism(h1.src, pb.apex, tuple(chosen))
    except (TypeMismatch, SupportViolation):
        return None


class MorphismClass(enum.Enum):
    MONO = "Mono"
    REG_EPI = "RegEpi"
    BOTH = "Both"
    NEITHER = "Neither"


def morphism_class(f: FrcMorphism) -> MorphismClass:
    mono = set(f.assign) == set(range(f.src.n))
    reg_epi = len(set(f.assign)) == len(f.assign) and f.src.support == f.dst.support
    if mono and reg_epi:
        return MorphismClass.BOTH
    if mono:
        return MorphismClass.MONO
    if reg_epi:
        return MorphismClass.REG_EPI
    return MorphismClass.NEITHER


def is_mono(f: FrcMorphism) -> bool:
    return morphism_class(f) in (MorphismClass.MONO, MorphismClass.BOTH)


def is_reg_epi(f: FrcMorphism) -> bool:
    return morphism_class(f) in (MorphismClass.REG_EPI, MorphismClass.BOTH)


def image_factorize(f: FrcMorphism) -> Tuple[FrcMorphism, FrcMorphism]:
    """Factor f as a regular epi onto its image followed by a mono"""
    used = sorted(set(f.assign))
    image = Context(tuple(f.src.ports[i] for i in used), f.src.support)
    epi = FrcMorphism(f.src, image, tuple(used))
    position = {i: k for k, i in enumerate(used)}
    mono = FrcMorphism(image, f.dst, tuple(position[i] for i in f.assign))
    return epi, mono


def hom_set(src: Context, dst: Context) -> Iterator[FrcMorphism]:
    """All morphisms src → dst, in lexicographic order of assign"""
    if not set(dst.support) <= set(src.support):
        return
    choices = [[i for i, t in enumerate(src.ports) if t == want] for want in dst.ports]
    for assign in itertools.product(*choices):
        yield FrcMorphism(src, dst, tuple(assign))
