"""
Name resolution: turn a parsed Program into library values.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from api.parser import (ContextDecl, ContextLit, CtxRef, MapDecl, ModelDecl,
                        PredDecl, Program, QueryDecl, RelDecl, TermDecl, TypeDecl)
from core.calculus import GraphicalTerm, LeafSymbol
from core.errors import (IllTypedBlock, NotAPartition, ResolutionError,
                         UnknownPort)
from core.frb import OUT, Port, Relation, mk_relation
from core.frc import Context, mk_context
from core.model import Carriers, FiniteSetModel, Predicate
from core.syncat import SynMorphism, SynObject

logger = logging.getLogger(__name__)


@dataclass
class ModelEnv:
    name: str
    calc: FiniteSetModel
    predicates: Dict[str, Predicate] = field(default_factory=dict)
    maps: Dict[str, SynMorphism] = field(default_factory=dict)

    def object(self, pred_name: str) -> SynObject:
        pred = self.predicates[pred_name]
        return SynObject(pred.context, pred)


@dataclass
class Workspace:
    contexts: Dict[str, Context] = field(default_factory=dict)
    relations: Dict[str, Relation] = field(default_factory=dict)
    models: Dict[str, ModelEnv] = field(default_factory=dict)
    terms: Dict[str, GraphicalTerm] = field(default_factory=dict)
    queries: List[QueryDecl] = field(default_factory=list)

    def relation(self, name: str) -> Relation:
        if name not in self.relations:
            raise ResolutionError(f"no relation named {name}")
        return self.relations[name]

    def term(self, name: str) -> GraphicalTerm:
        if name not in self.terms:
            raise ResolutionError(f"no term named {name}")
        return self.terms[name]

    def model(self, name: Optional[str] = None) -> ModelEnv:
        """The named model, or the only one when no name is given"""
        if name is None:
            if len(self.models) != 1:
                raise ResolutionError(f"{len(self.models)} models declared; choose one with --model")
            return next(iter(self.models.values()))
        if name not in self.models:
            raise ResolutionError(f"no model named {name}")
        return self.models[name]


def _unique(table: Dict, name: str, kind: str) -> None:
    if name in table:
        raise ResolutionError(f"{kind} {name} is declared twice")


def _context(ws: Workspace, ref: CtxRef) -> Context:
    if isinstance(ref, ContextLit):
        return mk_context(ref.ports, ref.extra)
    if ref not in ws.contexts:
        raise ResolutionError(f"no context named {ref}")
    return ws.contexts[ref]


def _resolve_relation(ws: Workspace, decl: RelDecl) -> Relation:
    inner = [_context(ws, ref) for ref in decl.inner]
    outer = _context(ws, decl.outer)

    def shell_of(node: str, shell) -> int:
        if shell == OUT:
            return -1
        if isinstance(shell, int):
            if not 1 <= shell <= len(inner):
                raise UnknownPort(f"node {node}: no shell {shell} in relation {decl.name}")
            return shell - 1
        hits = [i for i, ref in enumerate(decl.inner) if ref == shell]
        if decl.outer == shell:
            hits.append(-1)
        if len(hits) != 1:
            raise ResolutionError(
                f"node {node}: shell name {shell} matches {len(hits)} shells of {decl.name}")
        return hits[0]

    owner: Dict[Port, str] = {}
    blocks = []
    for node in decl.nodes:
        ports = []
        for ref in node.ports:
            i = shell_of(node.name, ref.shell)
            ctx = outer if i < 0 else inner[i]
            if not 1 <= ref.index <= ctx.n:
                raise UnknownPort(f"node {node.name}: shell {ref.shell} has no port {ref.index}")
            port: Port = (OUT if i < 0 else i, ref.index - 1)
            if port in owner:
                raise NotAPartition(f"port {ref} is listed in nodes {owner[port]} and {node.name}")
            if str(ctx.ports[ref.index - 1]) != node.type:
                raise IllTypedBlock(
                    f"node {node.name} : {node.type} reaches {ref} of type {ctx.ports[ref.index - 1]}")
            owner[port] = node.name
            ports.append(port)
        blocks.append(ports)

    return mk_relation(inner, outer, blocks, decl.support)


def _resolve_model(ws: Workspace, decl: ModelDecl, max_enum: int) -> ModelEnv:
    carriers = {}
    for item in decl.of_kind(TypeDecl):
        _unique(carriers, item.name, "type")
        carriers[item.name] = item.atoms
    env = ModelEnv(decl.name, FiniteSetModel(Carriers(carriers), max_enum))
    for item in decl.of_kind(PredDecl):
        _unique(env.predicates, item.name, "predicate")
        env.predicates[item.name] = env.calc.predicate(_context(ws, item.on), item.rows)
    for item in decl.of_kind(MapDecl):
        _unique(env.maps, item.name, "map")
        for ref in (item.src, item.dst, item.graph):
            if ref not in env.predicates:
                raise ResolutionError(f"map {item.name}: no predicate {ref} in model {decl.name}")
        env.maps[item.name] = SynMorphism(env.object(item.src), env.object(item.dst),
                                          env.predicates[item.graph])
    return env


def _resolve_term(ws: Workspace, decl: TermDecl) -> GraphicalTerm:
    rel = ws.relation(decl.rel)
    if len(decl.leaves) != rel.k:
        raise ResolutionError(f"term {decl.name}: {rel.k} shells but {len(decl.leaves)} leaves")
    leaves = tuple(LeafSymbol(name, shell) for name, shell in zip(decl.leaves, rel.inner))
    return GraphicalTerm(rel, leaves)


def resolve(program: Program, max_enum: int = 4096) -> Workspace:
    """Resolve declarations in order; later declarations may use earlier ones"""
    ws = Workspace()
    for decl in program.decls:
        if isinstance(decl, ContextDecl):
            _unique(ws.contexts, decl.name, "context")
            ws.contexts[decl.name] = _context(ws, decl.literal)
        elif isinstance(decl, RelDecl):
            _unique(ws.relations, decl.name, "relation")
            ws.relations[decl.name] = _resolve_relation(ws, decl)
        elif isinstance(decl, ModelDecl):
            _unique(ws.models, decl.name, "model")
            ws.models[decl.name] = _resolve_model(ws, decl, max_enum)
        elif isinstance(decl, TermDecl):
            _unique(ws.terms, decl.name, "term")
            ws.terms[decl.name] = _resolve_term(ws, decl)
        else:
            ws.queries.append(decl)
    logger.debug("resolved %d relations, %d models, %d terms",
                 len(ws.relations), len(ws.models), len(ws.terms))
    return ws
