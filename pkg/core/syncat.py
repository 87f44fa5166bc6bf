"""
The syntactic regular category of a calculus.

Objects are predicates (Γ, φ); a morphism (Γ1, φ1) → (Γ2, φ2) is a predicate
θ on Γ1⊕Γ2 whose projections entail the endpoints. Functions are the total
and deterministic ones. Composition, limits and images are all computed by
evaluating fixed wiring diagrams in the calculus, so every construction
works for any calculus; universal properties are checked by bounded
enumeration when the calculus can enumerate.
"""
import itertools
import logging
from dataclasses import dataclass, replace
from typing import Any, Dict, Iterator, List, Mapping, NamedTuple, Optional, Sequence

import networkx as nx
from tqdm import tqdm

from core.calculus import CalcMorphism, GraphicalTerm, RegularCalculus, apply_calc_morphism
from core.errors import (ContextMismatch, InconsistentCalculus, InvalidMorphism, NotAFunction,
                         NotARelation, NotEnumerable, ObjectMismatch)
from core.frb import OUT, Relation, diagonal_rel, mk_relation, transpose_rel
from core.frc import (TERMINAL, Context, diagonal, identity, pairing, product,
                      projection, tensor_morphism, unary)
from core.model import FiniteSetModel, Row

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SynObject:
    context: Context
    predicate: Any

    def __post_init__(self):
        if self.predicate.context != self.context:
            raise ContextMismatch(f"predicate on {self.predicate.context} for object on {self.context}")

    def __str__(self) -> str:
        return f"({self.context}, {self.predicate})"


@dataclass(frozen=True)
class SynMorphism:
    """
    An internal relation src → dst.

    Args:
        src: domain object
        dst: codomain object
        theta: predicate on src.context ⊕ dst.context
        certified: set once the function conditions have been verified
    """
    src: SynObject
    dst: SynObject
    theta: Any
    certified: bool = False

    def __post_init__(self):
        expected = self.src.context.oplus(self.dst.context)
        if self.theta.context != expected:
            raise ContextMismatch(f"theta lives on {self.theta.context}, expected {expected}")


class FunctionVerdict(NamedTuple):
    ok: bool
    reason: str
    witness: Any = None


class Classification(NamedTuple):
    mono: bool
    reg_epi: bool


class PullbackSquare(NamedTuple):
    apex: SynObject
    p1: SynMorphism
    p2: SynMorphism


class ImageFactorization(NamedTuple):
    image: SynObject
    epi: SynMorphism
    mono: SynMorphism


def _shared_wiring(base: Context, branches: Sequence[Context]) -> Relation:
    """
    Inner shells base⊕B_i, outer base⊕B_1⊕…⊕B_k; the base wires are shared
    by every shell and the outer, each branch runs to its own outer slot.
    """
    blocks = [[(i, j) for i in range(len(branches))] + [(OUT, j)] for j in range(base.n)]
    offset = base.n
    for i, branch in enumerate(branches):
        for j in range(branch.n):
            blocks.append([(i, base.n + j), (OUT, offset + j)])
        offset += branch.n
    outer = base
    for branch in branches:
        outer = outer.oplus(branch)
    return mk_relation([base.oplus(b) for b in branches], outer, blocks)


def comp_wiring(left: Context, middle: Context, right: Context) -> Relation:
    """[Γ1⊕Γ2, Γ2⊕Γ3] → Γ1⊕Γ3, the middle wires hidden"""
    blocks = [[(0, j), (OUT, j)] for j in range(left.n)]
    blocks += [[(0, left.n + j), (1, j)] for j in range(middle.n)]
    blocks += [[(1, middle.n + j), (OUT, left.n + j)] for j in range(right.n)]
    return mk_relation([left.oplus(middle), middle.oplus(right)], left.oplus(right), blocks)


def equalizer_wiring(left: Context, right: Context) -> Relation:
    """Two shells on Γ1⊕Γ2 sharing every wire; only Γ1 reaches the outer"""
    blocks = [[(0, j), (1, j), (OUT, j)] for j in range(left.n)]
    blocks += [[(0, left.n + j), (1, left.n + j)] for j in range(right.n)]
    pair = left.oplus(right)
    return mk_relation([pair, pair], left, blocks)


class SyntacticCategory:
    """
    Internal relations and functions over one calculus.

    Args:
        calc: the calculus
        max_enum: budget on candidate predicates for any single enumeration
        show_progress: show tqdm bars on enumerations
    """

    def __init__(self, calc: RegularCalculus, max_enum: int = 4096, show_progress: bool = False):
        self.calc = calc
        self.max_enum = max_enum
        self.show_progress = show_progress

    # relational algebra

    def compose_theta(self, theta: Any, xi: Any, left: Context, middle: Context,
                      right: Context) -> Any:
        return self.calc.apply(comp_wiring(left, middle, right), self.calc.rho([theta, xi]))

    def split(self, phi: Any) -> Any:
        """id_φ = (δ_Γ)_!(φ)"""
        return self.calc.lsh(diagonal(phi.context), phi)

    def dagger(self, f: SynMorphism) -> SynMorphism:
        theta = self.calc.transpose(f.theta, f.src.context, f.dst.context)
        return SynMorphism(f.dst, f.src, theta)

    def domain_of(self, f: SynMorphism) -> Any:
        return self.calc.lsh(projection(f.src.context, f.dst.context, 1), f.theta)

    def image_of(self, f: SynMorphism) -> Any:
        """im θ, the codomain predicate left after discarding the domain"""
        return self.calc.lsh(projection(f.src.context, f.dst.context, 2), f.theta)

    def _then(self, f: SynMorphism, g: SynMorphism) -> Any:
        return self.compose_theta(f.theta, g.theta, f.src.context, f.dst.context, g.dst.context)

    # relations and functions

    def is_internal_relation(self, theta: Any, src: SynObject, dst: SynObject) -> bool:
        """
        Projections entail the endpoints; cross-checked against the
        sandwich id_φ1;θ;id_φ2 = θ.
        """
        f = SynMorphism(src, dst, theta)
        by_projection = (self.calc.entails(self.domain_of(f), src.predicate)
                         and self.calc.entails(self.image_of(f), dst.predicate))
        left = self.compose_theta(self.split(src.predicate), theta, src.context, src.context, dst.context)
        sandwich = self.compose_theta(left, self.split(dst.predicate), src.context, dst.context, dst.context)
        by_sandwich = self.calc.equal(sandwich, theta)
        if by_projection != by_sandwich:
            raise InconsistentCalculus(
                f"projection test says {by_projection}, sandwich test says {by_sandwich}")
        return by_projection

    def is_total(self, f: SynMorphism) -> bool:
        return self.calc.entails(f.src.predicate, self.domain_of(f))

    def is_deterministic(self, f: SynMorphism) -> bool:
        """Two copies of θ sharing the domain agree on the codomain"""
        a, b = f.src.context, f.dst.context
        fork = self.calc.apply(_shared_wiring(a, [b, b]), self.calc.rho([f.theta, f.theta]))
        split_codomain = self.calc.lsh(tensor_morphism(identity(a), diagonal(b)), f.theta)
        return self.calc.entails(fork, split_codomain)

    def _adjoint_pair(self, f: SynMorphism, xi: SynMorphism) -> bool:
        unit = self.calc.entails(self.split(f.src.predicate), self._then(f, xi))
        counit = self.calc.entails(self._then(xi, f), self.split(f.dst.predicate))
        return unit and counit

    def is_internal_function(self, theta: Any, src: SynObject, dst: SynObject,
                             search_witness: bool = True) -> FunctionVerdict:
        """
        Decide whether θ is a function, three ways: total and deterministic;
        left adjoint to its transpose; left adjoint to some relation, found
        by enumeration when the calculus allows it. Disagreement means the
        calculus breaks the ajax laws.
        """
        if not self.is_internal_relation(theta, src, dst):
            raise NotARelation(f"theta is not a relation from {src} to {dst}")
        f = SynMorphism(src, dst, theta)
        total = self.is_total(f)
        deterministic = self.is_deterministic(f)
        dagger = self.dagger(f)
        adjoint = self._adjoint_pair(f, dagger)
        if adjoint != (total and deterministic):
            raise InconsistentCalculus(
                f"total={total} deterministic={deterministic} but transpose adjunction={adjoint}")

        witness = dagger.theta if adjoint else None
        if search_witness and self._enumerable(dst.context.oplus(src.context)):
            found = None
            for xi in self.relations_between(dst, src):
                if self._adjoint_pair(f, xi):
                    found = xi.theta
                    break
            if (found is not None) != adjoint:
                raise InconsistentCalculus(f"adjoint search found {found}, transpose test says {adjoint}")
            witness = found

        if adjoint:
            return FunctionVerdict(True, "function", witness)
        reason = "not total" if not total else "not deterministic"
        return FunctionVerdict(False, reason)

    def certify(self, f: SynMorphism, search_witness: bool = False) -> SynMorphism:
        if f.certified:
            return f
        try:
            verdict = self.is_internal_function(f.theta, f.src, f.dst, search_witness)
        except NotARelation as exc:
            raise NotAFunction(str(exc)) from exc
        if not verdict.ok:
            raise NotAFunction(f"theta is {verdict.reason}")
        return replace(f, certified=True)

    def morphism(self, src: SynObject, dst: SynObject, theta: Any) -> SynMorphism:
        """A certified function, or NotAFunction"""
        return self.certify(SynMorphism(src, dst, theta))

    # category structure

    def id_syn(self, obj: SynObject) -> SynMorphism:
        return SynMorphism(obj, obj, self.split(obj.predicate), certified=True)

    def compose_syn(self, f: SynMorphism, g: SynMorphism) -> SynMorphism:
        if f.dst != g.src:
            raise ObjectMismatch(f"cannot compose: {f.dst} is not {g.src}")
        return SynMorphism(f.src, g.dst, self._then(f, g), f.certified and g.certified)

    def equal_morphisms(self, f: SynMorphism, g: SynMorphism) -> bool:
        return f.src == g.src and f.dst == g.dst and self.calc.equal(f.theta, g.theta)

    def terminal_syn(self) -> SynObject:
        return SynObject(TERMINAL, self.calc.true_of(TERMINAL))

    def bang(self, obj: SynObject) -> SynMorphism:
        return SynMorphism(obj, self.terminal_syn(), obj.predicate, certified=True)

    def _require_function(self, f: SynMorphism) -> SynMorphism:
        return self.certify(f)

    def pullback_syn(self, f: SynMorphism, g: SynMorphism) -> PullbackSquare:
        if f.dst != g.dst:
            raise ObjectMismatch(f"cospan legs end at {f.dst} and {g.dst}")
        f, g = self._require_function(f), self._require_function(g)
        a, b = f.src.context, g.src.context
        theta12 = self._then(f, self.dagger(g))
        apex = SynObject(a.oplus(b), theta12)
        prod = product(a, b)
        legs = []
        for leg, target in ((prod.pi1, f.src), (prod.pi2, g.src)):
            theta = self.calc.lsh(pairing(identity(prod.context), leg), theta12)
            legs.append(SynMorphism(apex, target, theta, certified=True))
        logger.debug("pullback apex on %s", apex.context)
        return PullbackSquare(apex, legs[0], legs[1])

    def pair_syn(self, h1: SynMorphism, h2: SynMorphism, square: PullbackSquare) -> SynMorphism:
        """⟨h1, h2⟩ into the apex of the square"""
        if h1.src != h2.src:
            raise ObjectMismatch("pairing needs a common domain")
        x = h1.src.context
        theta = self.calc.apply(_shared_wiring(x, [h1.dst.context, h2.dst.context]),
                                self.calc.rho([h1.theta, h2.theta]))
        return SynMorphism(h1.src, square.apex, theta)

    def equalizer_syn(self, f: SynMorphism, g: SynMorphism) -> SynObject:
        if f.src != g.src or f.dst != g.dst:
            raise ObjectMismatch("equalizer needs a parallel pair")
        f, g = self._require_function(f), self._require_function(g)
        wiring = equalizer_wiring(f.src.context, f.dst.context)
        return SynObject(f.src.context, self.calc.apply(wiring, self.calc.rho([f.theta, g.theta])))

    def inclusion(self, sub: SynObject, obj: SynObject) -> SynMorphism:
        """The canonical mono δ_!(t) of a subobject t ⊢ φ"""
        if sub.context != obj.context or not self.calc.entails(sub.predicate, obj.predicate):
            raise NotARelation(f"{sub} is not a subobject of {obj}")
        return SynMorphism(sub, obj, self.split(sub.predicate), certified=True)

    def classify_syn(self, f: SynMorphism) -> Classification:
        f = self._require_function(f)
        mono = self.calc.equal(self.split(f.src.predicate), self._then(f, self.dagger(f)))
        image = self.image_of(f)
        covers = self.calc.entails(f.dst.predicate, image)
        onto = self.calc.equal(f.dst.predicate, image)
        counit = self.calc.equal(self.split(f.dst.predicate), self._then(self.dagger(f), f))
        if not covers == onto == counit:
            raise InconsistentCalculus(
                f"epi conditions disagree: covers={covers} image={onto} counit={counit}")
        return Classification(mono, onto)

    def image_factorize_syn(self, f: SynMorphism) -> ImageFactorization:
        f = self._require_function(f)
        image = SynObject(f.dst.context, self.image_of(f))
        epi = SynMorphism(f.src, image, f.theta, certified=True)
        return ImageFactorization(image, epi, self.inclusion(image, f.dst))

    # enumeration

    def _enumerable(self, ctx: Context) -> bool:
        try:
            return self.calc.element_count(ctx) <= self.max_enum
        except NotEnumerable:
            return False

    def _elements(self, ctx: Context, label: str) -> Iterator[Any]:
        if not self._enumerable(ctx):
            raise NotEnumerable(f"P({ctx}) exceeds the enumeration budget {self.max_enum}")
        return tqdm(self.calc.elements(ctx), desc=label, total=self.calc.element_count(ctx),
                    disable=not self.show_progress, leave=False)

    def relations_between(self, src: SynObject, dst: SynObject) -> Iterator[SynMorphism]:
        """The hom-poset Rela(src, dst), in the calculus's enumeration order"""
        ctx = src.context.oplus(dst.context)
        for theta in self._elements(ctx, "relations"):
            if self.is_internal_relation(theta, src, dst):
                yield SynMorphism(src, dst, theta)

    def functions_between(self, src: SynObject, dst: SynObject,
                          search_witness: bool = False) -> Iterator[SynMorphism]:
        for f in self.relations_between(src, dst):
            if self.is_internal_function(f.theta, src, dst, search_witness).ok:
                yield replace(f, certified=True)

    def subobjects_of(self, obj: SynObject) -> "SubobjectPoset":
        subs = [SynObject(obj.context, t) for t in self._elements(obj.context, "subobjects")
                if self.calc.entails(t, obj.predicate)]
        return SubobjectPoset(self, obj, subs)

    # universal properties, checked by bounded enumeration

    def check_terminal(self, obj: SynObject) -> bool:
        found = list(self.functions_between(obj, self.terminal_syn()))
        return len(found) == 1 and self.equal_morphisms(found[0], self.bang(obj))

    def cone_sources(self, contexts: Sequence[Context]) -> List[SynObject]:
        """Every subobject of true on each distinct enumerable context, in order"""
        seen, sources = set(), []
        for ctx in contexts:
            if ctx in seen or not self._enumerable(ctx):
                continue
            seen.add(ctx)
            sources.extend(self.subobjects_of(SynObject(ctx, self.calc.true_of(ctx))).objects)
        return sources

    def check_pullback(self, f: SynMorphism, g: SynMorphism,
                       sources: Optional[Sequence[SynObject]] = None,
                       contexts: Sequence[Context] = ()) -> bool:
        """
        The square commutes, and every commuting cone from a source object
        factors through the apex; the factorization is checked unique when
        the hom-set into the apex is within budget.

        By default the cones start at the subobjects of the apex and at the
        subobjects of true on the terminal context, on both domains and on
        any extra contexts given.
        """
        square = self.pullback_syn(f, g)
        if not self.equal_morphisms(self.compose_syn(square.p1, f), self.compose_syn(square.p2, g)):
            return False
        if sources is None:
            extra = [x for x in self.cone_sources([TERMINAL, f.src.context, g.src.context, *contexts])
                     if self._enumerable(x.context.oplus(f.src.context))
                     and self._enumerable(x.context.oplus(g.src.context))]
            sources = list(self.subobjects_of(square.apex).objects) + extra
        for x in sources:
            left = list(self.functions_between(x, f.src))
            right = list(self.functions_between(x, g.src))
            into_apex = (list(self.functions_between(x, square.apex))
                         if self._enumerable(x.context.oplus(square.apex.context)) else None)
            for h1, h2 in itertools.product(left, right):
                if not self.equal_morphisms(self.compose_syn(h1, f), self.compose_syn(h2, g)):
                    continue
                m = self.certify(self.pair_syn(h1, h2, square))
                if not (self.equal_morphisms(self.compose_syn(m, square.p1), h1)
                        and self.equal_morphisms(self.compose_syn(m, square.p2), h2)):
                    return False
                if into_apex is not None:
                    mediators = [u for u in into_apex
                                 if self.equal_morphisms(self.compose_syn(u, square.p1), h1)
                                 and self.equal_morphisms(self.compose_syn(u, square.p2), h2)]
                    if len(mediators) != 1:
                        return False
        return True

    def check_equalizer(self, f: SynMorphism, g: SynMorphism,
                        sources: Optional[Sequence[SynObject]] = None) -> bool:
        eq = self.equalizer_syn(f, g)
        incl = self.inclusion(eq, f.src)
        if not self.equal_morphisms(self.compose_syn(incl, f), self.compose_syn(incl, g)):
            return False
        if sources is None:
            sources = list(self.subobjects_of(f.src).objects)
        for x in sources:
            for h in self.functions_between(x, f.src):
                if not self.equal_morphisms(self.compose_syn(h, f), self.compose_syn(h, g)):
                    continue
                factors = [u for u in self.functions_between(x, eq)
                           if self.equal_morphisms(self.compose_syn(u, incl), h)]
                if len(factors) != 1:
                    return False
        return True

    def check_image(self, f: SynMorphism) -> bool:
        parts = self.image_factorize_syn(f)
        composite = self.compose_syn(parts.epi, parts.mono)
        return (self.equal_morphisms(composite, f)
                and self.classify_syn(parts.epi).reg_epi
                and self.classify_syn(parts.mono).mono)

    def check_pullback_stability(self, f: SynMorphism, g: SynMorphism) -> bool:
        """If f is a regular epi, so is its pullback along g"""
        if not self.classify_syn(f).reg_epi:
            return True
        square = self.pullback_syn(f, g)
        return self.classify_syn(square.p2).reg_epi

    # the finite-set round trip

    def _require_sets(self) -> FiniteSetModel:
        if not isinstance(self.calc, FiniteSetModel):
            raise NotEnumerable("concrete data exists only over the finite-set model")
        return self.calc

    def to_concrete(self, item: Any) -> Any:
        """
        An object becomes its tuple set; a function becomes the dict sending
        each domain row to its image row.
        """
        self._require_sets()
        if isinstance(item, SynObject):
            return item.predicate.as_set()
        f = self.certify(item)
        n = f.src.context.n
        return {row[:n]: row[n:] for row in f.theta.tuples}

    def from_concrete(self, src: SynObject, dst: SynObject,
                      mapping: Mapping[Row, Row]) -> SynMorphism:
        calc = self._require_sets()
        rows = [tuple(a) + tuple(b) for a, b in mapping.items()]
        theta = calc.predicate(src.context.oplus(dst.context), rows)
        return self.morphism(src, dst, theta)


class SubobjectPoset:
    """Subobjects t ⊢ φ of an object, ordered by entailment"""

    def __init__(self, cat: SyntacticCategory, obj: SynObject, objects: List[SynObject]):
        self.cat = cat
        self.obj = obj
        self.objects = objects
        self.order = nx.DiGraph()
        self.order.add_nodes_from(range(len(objects)))
        for i, j in itertools.permutations(range(len(objects)), 2):
            if cat.calc.entails(objects[i].predicate, objects[j].predicate):
                self.order.add_edge(i, j)

    def __len__(self) -> int:
        return len(self.objects)

    def leq(self, i: int, j: int) -> bool:
        return i == j or self.order.has_edge(i, j)

    def hasse(self) -> nx.DiGraph:
        return nx.transitive_reduction(self.order)

    def index_of(self, predicate: Any) -> int:
        for i, sub in enumerate(self.objects):
            if self.cat.calc.equal(sub.predicate, predicate):
                return i
        raise KeyError(f"{predicate} is not a subobject of {self.obj}")

    def meet(self, i: int, j: int) -> int:
        """Greatest lower bound in the poset"""
        lower = [k for k in self.order.nodes if self.leq(k, i) and self.leq(k, j)]
        return next(k for k in lower if all(self.leq(m, k) for m in lower))

    def bottom(self) -> int:
        return next(k for k in self.order.nodes if all(self.leq(k, m) for m in self.order.nodes))

    def top(self) -> int:
        return next(k for k in self.order.nodes if all(self.leq(m, k) for m in self.order.nodes))

    def monos(self) -> List[SynMorphism]:
        return [self.cat.inclusion(sub, self.obj) for sub in self.objects]


class SynFunctor:
    """syn(m) : Func(P) → Func(P') for a calculus morphism m"""

    def __init__(self, morphism: CalcMorphism, source: SyntacticCategory, target: SyntacticCategory):
        self.morphism = morphism
        self.source = source
        self.target = target

    def on_object(self, obj: SynObject) -> SynObject:
        return SynObject(self.morphism.rename_context(obj.context), self.morphism.on_element(obj.predicate))

    def on_morphism(self, f: SynMorphism) -> SynMorphism:
        return SynMorphism(self.on_object(f.src), self.on_object(f.dst),
                           self.morphism.on_element(f.theta), f.certified)

    def on_term(self, term: GraphicalTerm) -> GraphicalTerm:
        return apply_calc_morphism(self.morphism, term)


def syn_of_morphism(m: CalcMorphism, max_enum: int = 4096) -> SynFunctor:
    """
    syn(m), once m commutes with the diagonal on every enumerable unary
    context of a mapped type, and with its transpose and pairing where the
    binary context is enumerable too.
    """
    if not isinstance(m, CalcMorphism):
        raise InvalidMorphism(f"syn needs a calculus morphism, not {type(m).__name__}")
    source = SyntacticCategory(m.source, max_enum)
    for s in m.type_map:
        ctx = unary(s)
        if not source._enumerable(ctx):
            continue
        xs = list(m.source.elements(ctx))
        pairs = list(itertools.product(xs, repeat=2)) if source._enumerable(ctx.oplus(ctx)) else []
        for pair in pairs:
            if not m.verify_monoidal(pair):
                raise InvalidMorphism(f"component does not preserve the pair {pair[0]}, {pair[1]}")
        checks = [(diagonal_rel(ctx), x) for x in xs]
        checks += [(transpose_rel(diagonal_rel(ctx)), m.source.rho(list(pair))) for pair in pairs]
        for omega, x in checks:
            if not m.verify_naturality(omega, x):
                raise InvalidMorphism(f"component is not natural for {omega} at {x}")
    logger.debug("syn functor over types %s", ", ".join(str(s) for s in m.type_map))
    return SynFunctor(m, source, SyntacticCategory(m.target, max_enum))


def concrete_functions(src_rows: Sequence[Row], dst_rows: Sequence[Row]) -> List[Dict[Row, Row]]:
    """Every function between two row sets, as dicts"""
    return [dict(zip(src_rows, image)) for image in itertools.product(dst_rows, repeat=len(src_rows))]
