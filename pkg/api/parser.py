"""
The .rlog program language.

parse() turns source text into a Program of declarations; str(Program)
prints it back in canonical form, and parsing that text gives an equal
Program. Names are only checked for existence later, in api.workspace.
"""
import logging
import unicodedata
from dataclasses import dataclass
from typing import Tuple, Union

import lark
from lark import Lark, Transformer, v_args

from core.errors import ProgramSyntaxError

logger = logging.getLogger(__name__)

GRAMMAR = r"""
start: _item*
_item: context_decl | rel_decl | model_decl | term_decl | query_decl

context_decl: "context" NAME "=" ctx_lit ";"?
ctx_lit: "[" ports extras? "]"
ports: (NAME ("," NAME)*)?
extras: "|" (NAME ("," NAME)*)?
ctx_ref: NAME | ctx_lit

rel_decl: "rel" NAME ":" shells "->" ctx_ref "{" (node | support)* "}"
shells: (ctx_ref ("," ctx_ref)*)?
node: "node" NAME ":" NAME "=" port ("," port)* ";"?
port: shell "." INT
shell: NAME | INT
support: "support" "{" (NAME ("," NAME)*)? "}" ";"?

model_decl: "model" NAME "{" (type_item | pred_item | map_item)* "}"
type_item: "type" NAME "=" "{" atoms "}" ";"?
atoms: (ATOM ("," ATOM)*)?
pred_item: "pred" NAME "on" ctx_ref "=" "{" (row ("," row)*)? "}" ";"?
row: "(" atoms ")"
map_item: "map" NAME ":" NAME "->" NAME "=" NAME ";"?

term_decl: "term" NAME "=" "rel" NAME ("with" "(" leaf_names ")")? ";"?
leaf_names: (NAME ("," NAME)*)?

query_decl: "query" ARG+ ";"

NAME: /[A-Za-z_][A-Za-z0-9_]*/
INT: /[0-9]+/
ATOM: /[^\s,(){};\[\]|#]+/
ARG: /[^\s;#]+/
COMMENT: /#[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""


def _names(items) -> Tuple[str, ...]:
    return tuple(str(i) for i in items)


@dataclass(frozen=True)
class ContextLit:
    ports: Tuple[str, ...]
    extra: Tuple[str, ...] = ()

    def __str__(self) -> str:
        ports = ", ".join(self.ports)
        return f"[{ports} | {', '.join(self.extra)}]" if self.extra else f"[{ports}]"


CtxRef = Union[str, ContextLit]


@dataclass(frozen=True)
class ContextDecl:
    name: str
    literal: ContextLit

    def __str__(self) -> str:
        return f"context {self.name} = {self.literal};"


@dataclass(frozen=True)
class PortRef:
    """shell: a shell's context name, a 1-based inner shell position, or 'out'; index is 1-based"""
    shell: Union[str, int]
    index: int

    def __str__(self) -> str:
        return f"{self.shell}.{self.index}"


@dataclass(frozen=True)
class NodeDecl:
    name: str
    type: str
    ports: Tuple[PortRef, ...]

    def __str__(self) -> str:
        return f"node {self.name} : {self.type} = {', '.join(map(str, self.ports))};"


@dataclass(frozen=True)
class RelDecl:
    name: str
    inner: Tuple[CtxRef, ...]
    outer: CtxRef
    nodes: Tuple[NodeDecl, ...]
    support: Tuple[str, ...] = ()

    def __str__(self) -> str:
        lines = [f"rel {self.name} : {', '.join(map(str, self.inner))} -> {self.outer} {{"]
        lines += [f"  {node}" for node in self.nodes]
        if self.support:
            lines.append(f"  support {{ {', '.join(self.support)} }};")
        lines.append("}")
        return "\n".join(lines)


@dataclass(frozen=True)
class TypeDecl:
    name: str
    atoms: Tuple[str, ...]

    def __str__(self) -> str:
        return f"type {self.name} = {{{', '.join(self.atoms)}}};"


@dataclass(frozen=True)
class PredDecl:
    name: str
    on: CtxRef
    rows: Tuple[Tuple[str, ...], ...]

    def __str__(self) -> str:
        rows = ", ".join(f"({', '.join(row)})" for row in self.rows)
        return f"pred {self.name} on {self.on} = {{{rows}}};"


@dataclass(frozen=True)
class MapDecl:
    name: str
    src: str
    dst: str
    graph: str

    def __str__(self) -> str:
        return f"map {self.name} : {self.src} -> {self.dst} = {self.graph};"


ModelItem = Union[TypeDecl, PredDecl, MapDecl]


@dataclass(frozen=True)
class ModelDecl:
    name: str
    items: Tuple[ModelItem, ...]

    def of_kind(self, kind: type) -> Tuple[ModelItem, ...]:
        return tuple(i for i in self.items if isinstance(i, kind))

    def __str__(self) -> str:
        body = "".join(f"  {item}\n" for item in self.items)
        return f"model {self.name} {{\n{body}}}"


@dataclass(frozen=True)
class TermDecl:
    name: str
    rel: str
    leaves: Tuple[str, ...] = ()

    def __str__(self) -> str:
        with_part = f" with ({', '.join(self.leaves)})" if self.leaves else ""
        return f"term {self.name} = rel {self.rel}{with_part};"


@dataclass(frozen=True)
class QueryDecl:
    args: Tuple[str, ...]

    @property
    def command(self) -> str:
        return self.args[0]

    def __str__(self) -> str:
        return f"query {' '.join(self.args)};"


Decl = Union[ContextDecl, RelDecl, ModelDecl, TermDecl, QueryDecl]


@dataclass(frozen=True)
class Program:
    decls: Tuple[Decl, ...] = ()

    def of_kind(self, kind: type) -> Tuple[Decl, ...]:
        return tuple(d for d in self.decls if isinstance(d, kind))

    def __str__(self) -> str:
        return "".join(f"{decl}\n" for decl in self.decls)


@v_args(inline=True)
class _ToAst(Transformer):
    def start(self, *decls):
        return Program(tuple(decls))

    def context_decl(self, name, literal):
        return ContextDecl(str(name), literal)

    def ctx_lit(self, ports, extras=()):
        return ContextLit(ports, extras)

    def ports(self, *names):
        return _names(names)

    def extras(self, *names):
        return _names(names)

    def ctx_ref(self, ref):
        return ref if isinstance(ref, ContextLit) else str(ref)

    def shells(self, *refs):
        return tuple(refs)

    def rel_decl(self, name, inner, outer, *items):
        nodes = tuple(i for i in items if isinstance(i, NodeDecl))
        support = tuple(s for i in items if isinstance(i, tuple) for s in i)
        return RelDecl(str(name), inner, outer, nodes, support)

    def node(self, name, type_name, *ports):
        return NodeDecl(str(name), str(type_name), tuple(ports))

    def port(self, shell, index):
        return PortRef(shell, int(index))

    def shell(self, token):
        return int(token) if token.type == "INT" else str(token)

    def support(self, *names):
        return _names(names)

    def model_decl(self, name, *items):
        return ModelDecl(str(name), tuple(items))

    def type_item(self, name, atoms):
        return TypeDecl(str(name), atoms)

    def atoms(self, *tokens):
        return tuple(unicodedata.normalize("NFC", str(t)) for t in tokens)

    def pred_item(self, name, on, *rows):
        return PredDecl(str(name), on, tuple(rows))

    def row(self, atoms):
        return atoms

    def map_item(self, name, src, dst, graph):
        return MapDecl(str(name), str(src), str(dst), str(graph))

    def term_decl(self, name, rel, leaves=()):
        return TermDecl(str(name), str(rel), leaves)

    def leaf_names(self, *names):
        return _names(names)

    def query_decl(self, *args):
        return QueryDecl(_names(args))


_PARSER = Lark(GRAMMAR, parser="lalr", maybe_placeholders=False)


def parse(source: str) -> Program:
    """
    Parse program text.

    Raises:
        ProgramSyntaxError: with the 1-based line and column of the offending token
    """
    try:
        tree = _PARSER.parse(source)
    except lark.exceptions.UnexpectedInput as exc:
        line, column = getattr(exc, "line", 0), getattr(exc, "column", 0)
        message = str(exc).strip().splitlines()[0]
        raise ProgramSyntaxError(message, line, column) from exc
    program = _ToAst().transform(tree)
    logger.debug("parsed %d declarations", len(program.decls))
    return program
