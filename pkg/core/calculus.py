"""
Regular calculi: ajax po-functors P: frb(T) → Poset.

A calculus supplies the action of wiring diagrams on predicates, the
k-ary laxator ρ with its left adjoint λ, and entailment. Everything else
(top, meet, adjoint pushes and pulls, graphical term values) is derived from
those through fixed diagrams.
"""
import enum
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import (Any, Callable, Generic, Iterator, List, Mapping, Optional,
                    Sequence, Tuple, TypeVar)

from core.errors import (ContextMismatch, InvalidMorphism, NotEnumerable,
                         RuleInapplicable, VocabularyMismatch)
from core.frb import (Relation, cograph_rel, discard_rel, graph_rel, identity_rel,
                      leq_rel, merge_rel, rename_rel, substitute, tensor_rel, true_rel)
from core.frc import Context, FrcMorphism, TypeSym, braiding, diagonal

logger = logging.getLogger(__name__)

E = TypeVar("E")


def context_of(x: Any) -> Context:
    return x.context


class RegularCalculus(ABC, Generic[E]):
    """
    The interface every calculus implements.

    Elements are opaque to this class apart from their `context` attribute.
    """

    @abstractmethod
    def _apply(self, omega: Relation, x: E) -> E:
        """P(ω) on an element already known to live in ω's source"""

    @abstractmethod
    def rho(self, xs: Sequence[E]) -> E:
        """k-ary laxator; the empty list gives the unit of P(0)"""

    @abstractmethod
    def lam(self, x: E, shells: Sequence[Context]) -> List[E]:
        """Left adjoint of rho, splitting x along the given shells"""

    @abstractmethod
    def _entails(self, x: E, y: E) -> bool:
        pass

    def elements(self, ctx: Context) -> Iterator[E]:
        raise NotEnumerable(f"{type(self).__name__} cannot enumerate P({ctx})")

    def element_count(self, ctx: Context) -> int:
        raise NotEnumerable(f"{type(self).__name__} cannot count P({ctx})")

    def apply(self, omega: Relation, x: E) -> E:
        _require(x, omega.source, "relation source")
        return self._apply(omega, x)

    def entails(self, x: E, y: E) -> bool:
        if context_of(x) != context_of(y):
            raise ContextMismatch(f"cannot compare predicates on {context_of(x)} and {context_of(y)}")
        return self._entails(x, y)

    def equal(self, x: E, y: E) -> bool:
        return self.entails(x, y) and self.entails(y, x)

    def true_of(self, ctx: Context) -> E:
        return self._apply(true_rel(ctx), self.rho([]))

    def meet(self, x: E, y: E) -> E:
        ctx = context_of(x)
        _require(y, ctx, "meet")
        return self._apply(cograph_rel(diagonal(ctx)), self.rho([x, y]))

    def lsh(self, f: FrcMorphism, x: E) -> E:
        """f_!: P(src) → P(dst)"""
        _require(x, f.src, "push-forward domain")
        return self._apply(graph_rel(f), x)

    def ust(self, f: FrcMorphism, y: E) -> E:
        """f^*: P(dst) → P(src)"""
        _require(y, f.dst, "pull-back codomain")
        return self._apply(cograph_rel(f), y)

    def transpose(self, theta: E, left: Context, right: Context) -> E:
        """θ on left⊕right read backwards, as an element on right⊕left"""
        return self.lsh(braiding(left, right), theta)

    def eval_term(self, term: "GraphicalTerm") -> E:
        if term.is_symbolic:
            raise VocabularyMismatch(f"term has unbound leaves {term.unbound_names()}")
        return self._apply(term.wiring, self.rho(list(term.leaves)))


def _require(x: Any, ctx: Context, role: str) -> None:
    if context_of(x) != ctx:
        raise ContextMismatch(f"{role} expects a predicate on {ctx}, got one on {context_of(x)}")


@dataclass(frozen=True)
class LeafSymbol:
    """A named placeholder predicate on a context"""
    name: str
    context: Context

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class GraphicalTerm:
    """
    Leaves attached to the inner shells of a wiring diagram.

    Args:
        wiring: the diagram; its i-th inner shell receives leaf i
        leaves: calculus elements or LeafSymbols
        names: optional display name per leaf
    """
    wiring: Relation
    leaves: Tuple[Any, ...]
    names: Tuple[Optional[str], ...] = ()

    def __post_init__(self):
        if len(self.leaves) != self.wiring.k:
            raise ContextMismatch(f"{len(self.leaves)} leaves for {self.wiring.k} shells")
        for i, (leaf, shell) in enumerate(zip(self.leaves, self.wiring.inner)):
            if context_of(leaf) != shell:
                raise ContextMismatch(f"leaf {i + 1} lives on {context_of(leaf)}, shell is {shell}")
        if not self.names:
            names = tuple(getattr(leaf, "name", None) for leaf in self.leaves)
            object.__setattr__(self, "names", names)
        elif len(self.names) != len(self.leaves):
            raise ContextMismatch(f"{len(self.names)} names for {len(self.leaves)} leaves")

    @classmethod
    def of(cls, wiring: Relation, leaves: Sequence[Any],
           names: Optional[Sequence[Optional[str]]] = None) -> "GraphicalTerm":
        return cls(wiring, tuple(leaves), tuple(names) if names else ())

    @classmethod
    def identity(cls, leaf: Any, name: Optional[str] = None) -> "GraphicalTerm":
        return cls.of(identity_rel(context_of(leaf)), [leaf], [name] if name else None)

    @property
    def outer(self) -> Context:
        return self.wiring.outer

    @property
    def is_symbolic(self) -> bool:
        return any(isinstance(leaf, LeafSymbol) for leaf in self.leaves)

    def unbound_names(self) -> List[str]:
        return [leaf.name for leaf in self.leaves if isinstance(leaf, LeafSymbol)]

    def bind(self, values: Mapping[str, Any]) -> "GraphicalTerm":
        """Replace every LeafSymbol by the element registered under its name"""
        bound = []
        for leaf in self.leaves:
            if isinstance(leaf, LeafSymbol):
                if leaf.name not in values:
                    raise VocabularyMismatch(f"no predicate named {leaf.name}")
                leaf = values[leaf.name]
            bound.append(leaf)
        return GraphicalTerm(self.wiring, tuple(bound), self.names)

    def substitute(self, slot: int, inner: "GraphicalTerm") -> "GraphicalTerm":
        """Nest `inner` into shell `slot` (0-based)"""
        wiring = substitute(self.wiring, slot, inner.wiring)
        leaves = self.leaves[:slot] + inner.leaves + self.leaves[slot + 1:]
        names = self.names[:slot] + inner.names + self.names[slot + 1:]
        return GraphicalTerm(wiring, leaves, names)

    def __str__(self) -> str:
        labels = ", ".join(n if n else f"#{i + 1}" for i, n in enumerate(self.names))
        return f"({labels}; {self.wiring})"


def tensor_terms(*terms: GraphicalTerm) -> GraphicalTerm:
    wiring = tensor_rel(*(t.wiring for t in terms))
    leaves = tuple(leaf for t in terms for leaf in t.leaves)
    names = tuple(n for t in terms for n in t.names)
    return GraphicalTerm(wiring, leaves, names)


class Rule(enum.Enum):
    MONOTONICITY = "monotonicity"
    BREAKING = "breaking"
    NESTING = "nesting"
    TRUE_REMOVABLE = "true-removable"
    MEETS_MERGE = "meets-merge"
    DISCARDING = "discarding"


def check_rules(calc: RegularCalculus, t: GraphicalTerm, t_other: GraphicalTerm, rule: Rule,
                slot: Optional[int] = None) -> bool:
    """
    Verify one reasoning rule on a pair of terms of the rule's shape.

    For nesting, t_other is the term nested into t at `slot` (or at the
    first slot whose leaf equals its value).
    """
    rule = Rule(rule)
    if rule is Rule.MONOTONICITY:
        if t.wiring != t_other.wiring:
            raise RuleInapplicable("monotonicity compares terms over one wiring")
        if not all(calc.entails(a, b) for a, b in zip(t.leaves, t_other.leaves)):
            raise RuleInapplicable("monotonicity needs leaves that entail pointwise")
        return calc.entails(calc.eval_term(t), calc.eval_term(t_other))

    if rule is Rule.BREAKING:
        if t.leaves != t_other.leaves or t.wiring.inner != t_other.wiring.inner \
                or t.wiring.outer != t_other.wiring.outer:
            raise RuleInapplicable("breaking compares two wirings of the same leaves")
        if not leq_rel(t.wiring, t_other.wiring):
            raise RuleInapplicable("the second wiring does not break the first")
        return calc.entails(calc.eval_term(t), calc.eval_term(t_other))

    if rule is Rule.NESTING:
        value = calc.eval_term(t_other)
        slots = range(t.wiring.k) if slot is None else [slot]
        for i in slots:
            if 0 <= i < t.wiring.k and t.wiring.inner[i] == t_other.outer \
                    and calc.equal(t.leaves[i], value):
                return calc.equal(calc.eval_term(t), calc.eval_term(t.substitute(i, t_other)))
        raise RuleInapplicable("no leaf of the outer term is the value of the nested term")

    if t.wiring.k != 1 or t.wiring != identity_rel(t.outer):
        raise RuleInapplicable(f"{rule.value} needs a single leaf on an identity wiring")
    ctx = t.outer
    leaf = t.leaves[0]

    if rule is Rule.MEETS_MERGE:
        if t_other.wiring != merge_rel(ctx):
            raise RuleInapplicable("meets-merge needs the merge wiring on the right")
        if not calc.equal(leaf, calc.meet(*t_other.leaves)):
            raise RuleInapplicable("the left leaf is not the meet of the right leaves")
        return calc.equal(calc.eval_term(t), calc.eval_term(t_other))

    if t_other.wiring != discard_rel(ctx):
        raise RuleInapplicable(f"{rule.value} needs the discard wiring on the right")
    if rule is Rule.TRUE_REMOVABLE:
        if not calc.equal(leaf, calc.true_of(ctx)):
            raise RuleInapplicable("true-removable needs the top predicate as leaf")
        return calc.equal(calc.eval_term(t), calc.eval_term(t_other))
    return calc.entails(calc.eval_term(t), calc.eval_term(t_other))


@dataclass(frozen=True)
class CalcMorphism:
    """
    A strict morphism of regular calculi (F, F♯).

    Args:
        source: the calculus F♯ reads from
        target: the calculus F♯ writes to
        type_map: F on type symbols
        component: F♯ on elements, any context
    """
    source: RegularCalculus
    target: RegularCalculus
    type_map: Mapping[TypeSym, TypeSym]
    component: Callable[[Any], Any]

    def rename_context(self, ctx: Context) -> Context:
        try:
            return ctx.rename(self.type_map)
        except KeyError as exc:
            raise InvalidMorphism(f"type map is undefined on {exc.args[0]}") from exc

    def on_element(self, x: Any) -> Any:
        image = self.component(x)
        if context_of(image) != self.rename_context(context_of(x)):
            raise InvalidMorphism(f"component sends {context_of(x)} to {context_of(image)}")
        return image

    def on_relation(self, omega: Relation) -> Relation:
        try:
            return rename_rel(omega, self.type_map)
        except KeyError as exc:
            raise InvalidMorphism(f"type map is undefined on {exc.args[0]}") from exc

    def verify_naturality(self, omega: Relation, x: Any) -> bool:
        left = self.on_element(self.source.apply(omega, x))
        right = self.target.apply(self.on_relation(omega), self.on_element(x))
        return self.target.equal(left, right)

    def verify_monoidal(self, xs: Sequence[Any]) -> bool:
        left = self.on_element(self.source.rho(xs))
        right = self.target.rho([self.on_element(x) for x in xs])
        return self.target.equal(left, right)


def apply_calc_morphism(m: CalcMorphism, term: GraphicalTerm) -> GraphicalTerm:
    """The image term (F♯θ1, …, F♯θk; frb[F](ω))"""
    leaves = []
    for leaf in term.leaves:
        if isinstance(leaf, LeafSymbol):
            leaves.append(LeafSymbol(leaf.name, m.rename_context(leaf.context)))
        else:
            leaves.append(m.on_element(leaf))
    return GraphicalTerm(m.on_relation(term.wiring), tuple(leaves), term.names)
