"""
Graphical terms as conjunctive queries.

emit_formula reads a named term as a regular formula over {=, true, ∧, ∃}.
contains decides syntactic entailment by searching for a homomorphism
between canonical structures.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from core.calculus import GraphicalTerm
from core.errors import ContextMismatch, UnnamedLeaf, VocabularyMismatch
from core.frc import Context, TypeSym
from core.model import Carriers, FiniteSetModel, Predicate, pi_tuples

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Truth:
    def __str__(self) -> str:
        return "true"


@dataclass(frozen=True)
class Inhabited:
    sort: TypeSym

    def __str__(self) -> str:
        return f"(exists _:{self.sort}. true)"


@dataclass(frozen=True)
class Eq:
    left: str
    right: str

    def __str__(self) -> str:
        return f"{self.left} = {self.right}"


@dataclass(frozen=True)
class Atom:
    name: str
    args: Tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.name}({', '.join(self.args)})"


@dataclass(frozen=True)
class And:
    parts: Tuple["Node", ...]

    def __str__(self) -> str:
        if len(self.parts) == 1:
            return str(self.parts[0])
        return " & ".join(str(p) for p in self.parts)


@dataclass(frozen=True)
class Exists:
    var: str
    sort: TypeSym
    body: "Node"

    def __str__(self) -> str:
        return f"exists {self.var}:{self.sort}. {self.body}"


Node = Union[Truth, Inhabited, Eq, Atom, And, Exists]


@dataclass(frozen=True)
class Formula:
    """
    A regular formula with free variables bound to the outer ports.

    Args:
        outer: context of the free variables
        free: one variable name per outer port, in port order
        body: the formula
    """
    outer: Context
    free: Tuple[str, ...]
    body: Node

    def __str__(self) -> str:
        head = ", ".join(f"{v}:{t}" for v, t in zip(self.free, self.outer.ports))
        return f"{{({head}) | {self.body}}}"


def _leaf_names(term: GraphicalTerm) -> Tuple[str, ...]:
    for i, name in enumerate(term.names):
        if not name:
            raise UnnamedLeaf(f"leaf {i + 1} has no name")
    return tuple(term.names)


def _block_var(b: int) -> str:
    return f"v{b + 1}"


def emit_formula(term: GraphicalTerm) -> Formula:
    omega = term.wiring
    names = _leaf_names(term)
    owner = omega.block_of

    free, equalities = [], []
    seen: Dict[int, int] = {}
    for j in range(omega.outer.n):
        b = owner[omega.n_inner + j]
        seen[b] = seen.get(b, 0) + 1
        if seen[b] == 1:
            free.append(_block_var(b))
        else:
            var = f"{_block_var(b)}_{seen[b]}"
            free.append(var)
            equalities.append(Eq(_block_var(b), var))

    atoms = []
    for i, name in enumerate(names):
        start = omega.offsets[i]
        args = tuple(_block_var(owner[start + j]) for j in range(omega.inner[i].n))
        atoms.append(Atom(name, args))
    conjuncts = atoms + equalities + [Inhabited(s) for s in omega.floating]

    body: Node = And(tuple(conjuncts)) if conjuncts else Truth()
    bound = [b for b in range(omega.n_blocks) if b not in seen]
    for b in reversed(bound):
        body = Exists(_block_var(b), omega.block_types[b], body)
    return Formula(omega.outer, tuple(free), body)


def evaluate_formula(formula: Formula, carriers: Carriers,
                     leaves: Mapping[str, Predicate]) -> Predicate:
    """Naive evaluation: test every outer tuple against the formula"""
    tables = {name: pred.as_set() for name, pred in leaves.items()}

    def holds(node: Node, env: Dict[str, str]) -> bool:
        if isinstance(node, Truth):
            return True
        if isinstance(node, Inhabited):
            return carriers.inhabited(node.sort)
        if isinstance(node, Eq):
            return env[node.left] == env[node.right]
        if isinstance(node, Atom):
            if node.name not in tables:
                raise VocabularyMismatch(f"no predicate named {node.name}")
            return tuple(env[v] for v in node.args) in tables[node.name]
        if isinstance(node, And):
            return all(holds(p, env) for p in node.parts)
        return any(holds(node.body, {**env, node.var: atom}) for atom in carriers[node.sort])

    rows = [row for row in pi_tuples(formula.outer, carriers)
            if holds(formula.body, dict(zip(formula.free, row)))]
    return Predicate(formula.outer, tuple(sorted(set(rows))))


class Element(NamedTuple):
    label: str
    sort: TypeSym


@dataclass(frozen=True)
class CanonicalStructure:
    """
    The frozen database of a named term.

    Args:
        elements: one per block, then one anonymous element per floating sort
        facts: (leaf name, element indices) per inner shell
        distinguished: element index of each outer port
        witnessed: sorts inhabited whenever the term holds, through a shell support
        vocabulary: shell context of every leaf name
    """
    elements: Tuple[Element, ...]
    facts: Tuple[Tuple[str, Tuple[int, ...]], ...]
    distinguished: Tuple[int, ...]
    witnessed: Tuple[TypeSym, ...]
    vocabulary: Tuple[Tuple[str, Context], ...]
    outer: Context

    @property
    def anonymous(self) -> FrozenSet[int]:
        return frozenset(i for i, e in enumerate(self.elements) if e.label.startswith("_"))


def canonical_structure(term: GraphicalTerm) -> CanonicalStructure:
    omega = term.wiring
    names = _leaf_names(term)
    owner = omega.block_of

    elements = [Element(_block_var(b), t) for b, t in enumerate(omega.block_types)]
    elements += [Element(f"_{s}", s) for s in omega.floating]

    facts = []
    vocabulary: Dict[str, Context] = {}
    witnessed = set(omega.outer.support)
    for i, name in enumerate(names):
        shell = omega.inner[i]
        if vocabulary.setdefault(name, shell) != shell:
            raise VocabularyMismatch(f"{name} is used on {vocabulary[name]} and on {shell}")
        witnessed.update(shell.support)
        start = omega.offsets[i]
        facts.append((name, tuple(owner[start + j] for j in range(shell.n))))

    distinguished = tuple(owner[omega.n_inner + j] for j in range(omega.outer.n))
    return CanonicalStructure(tuple(elements), tuple(facts), distinguished,
                              tuple(sorted(witnessed)), tuple(sorted(vocabulary.items())),
                              omega.outer)


@dataclass(frozen=True)
class Homomorphism:
    """
    Element map from the canonical structure of the entailed term into that
    of the entailing one. None marks an anonymous element discharged by a
    witnessed sort.
    """
    source: CanonicalStructure
    target: CanonicalStructure
    mapping: Tuple[Optional[int], ...]

    def __str__(self) -> str:
        parts = []
        for i, image in enumerate(self.mapping):
            elem = self.source.elements[i]
            right = f"supp({elem.sort})" if image is None else self.target.elements[image].label
            parts.append(f"{elem.label}->{right}")
        return "{" + ", ".join(parts) + "}"


def _merge_vocabulary(left: CanonicalStructure, right: CanonicalStructure) -> Dict[str, Context]:
    merged = dict(left.vocabulary)
    for name, ctx in right.vocabulary:
        if merged.setdefault(name, ctx) != ctx:
            raise VocabularyMismatch(f"{name} is used on {merged[name]} and on {ctx}")
    return merged


def contains(term: GraphicalTerm, other: GraphicalTerm) -> Optional[Homomorphism]:
    """
    A homomorphism canonical(other) → canonical(term), if one exists.

    A witness means ⟦term⟧ ⊢ ⟦other⟧ in every model. The search visits
    elements by ascending candidate count and candidates in ascending
    order, so the returned witness is deterministic.
    """
    if term.outer != other.outer:
        raise ContextMismatch(f"outer shells differ: {term.outer} and {other.outer}")
    target = canonical_structure(term)
    source = canonical_structure(other)
    _merge_vocabulary(target, source)

    fixed: Dict[int, int] = {}
    for s_el, t_el in zip(source.distinguished, target.distinguished):
        if fixed.setdefault(s_el, t_el) != t_el:
            return None

    anonymous = source.anonymous
    witnessed = set(target.witnessed)
    candidates: List[List[Optional[int]]] = []
    for i, elem in enumerate(source.elements):
        if i in fixed:
            options: List[Optional[int]] = [fixed[i]]
        else:
            options = [k for k, e in enumerate(target.elements) if e.sort == elem.sort]
            if i in anonymous and elem.sort in witnessed:
                options.append(None)
        candidates.append(options)

    target_facts = set(target.facts)
    facts_by_name: Dict[str, List[Tuple[int, ...]]] = {}
    for name, args in source.facts:
        facts_by_name.setdefault(name, []).append(args)

    order = sorted(range(len(source.elements)), key=lambda i: (len(candidates[i]), i))
    position = {i: p for p, i in enumerate(order)}
    # facts are checked once their last argument (in search order) is assigned
    due: Dict[int, List[Tuple[str, Tuple[int, ...]]]] = {}
    for name, args in source.facts:
        last = max((position[a] for a in args), default=-1)
        if last < 0:
            if (name, ()) not in target_facts:
                return None
            continue
        due.setdefault(last, []).append((name, args))

    assignment: List[Optional[int]] = [None] * len(source.elements)
    steps = 0

    def search(p: int) -> bool:
        nonlocal steps
        if p == len(order):
            return True
        i = order[p]
        for choice in candidates[i]:
            steps += 1
            assignment[i] = choice
            if all((name, tuple(assignment[a] for a in args)) in target_facts
                   for name, args in due.get(p, ())):
                if search(p + 1):
                    return True
        assignment[i] = None
        return False

    found = search(0)
    logger.debug("homomorphism search visited %d choices, found=%s", steps, found)
    if not found:
        return None
    return Homomorphism(source, target, tuple(assignment))


class CanonicalModel(NamedTuple):
    calc: FiniteSetModel
    leaves: Dict[str, Predicate]
    row: Tuple[str, ...]


def canonical_model(term: GraphicalTerm, other: Optional[GraphicalTerm] = None) -> CanonicalModel:
    """
    The model whose atoms are the elements of the canonical structure.

    The term holds of `row` there; when contains(term, other) finds nothing,
    other fails at `row`. Sorts and leaf names that only `other` uses get
    empty carriers and empty predicates.
    """
    structure = canonical_structure(term)
    shells = dict(structure.vocabulary)
    carriers: Dict[TypeSym, List[str]] = {s: [] for s in term.wiring.support}
    if other is not None:
        shells = _merge_vocabulary(structure, canonical_structure(other))
        for s in other.wiring.support:
            carriers.setdefault(s, [])
    for elem in structure.elements:
        carriers[elem.sort].append(elem.label)
    for s in structure.witnessed:
        if not carriers[s]:
            carriers[s].append(f"w_{s}")
    calc = FiniteSetModel(Carriers(carriers))

    rows: Dict[str, List[Tuple[str, ...]]] = {name: [] for name in shells}
    for name, args in structure.facts:
        rows[name].append(tuple(structure.elements[a].label for a in args))
    leaves = {name: calc.predicate(shells[name], rows[name]) for name in shells}
    row = tuple(structure.elements[d].label for d in structure.distinguished)
    return CanonicalModel(calc, leaves, row)


def semantic_contains(term: GraphicalTerm, other: GraphicalTerm, calc: FiniteSetModel,
                      leaves: Mapping[str, Predicate]) -> bool:
    """⟦term⟧ ⊢ ⟦other⟧ in one model"""
    return calc.entails(calc.eval_term(term.bind(leaves)), calc.eval_term(other.bind(leaves)))


def all_carriers(sorts: Sequence[TypeSym], max_size: int) -> List[Carriers]:
    """Every assignment of carriers {a1..am}, m ≤ max_size, to the sorts"""
    sizes = itertools.product(range(max_size + 1), repeat=len(sorts))
    return [Carriers({s: [f"a{i + 1}" for i in range(m)] for s, m in zip(sorts, combo)})
            for combo in sizes]
