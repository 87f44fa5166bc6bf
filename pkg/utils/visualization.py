from typing import List, Optional, Sequence, Union

import graphviz

from core.calculus import GraphicalTerm
from core.frb import OUT, Relation


def _port_node(rel: Relation, g: int) -> str:
    shell, j = rel.port(g)
    return f"o{j + 1}" if shell == OUT else f"s{shell + 1}_{j + 1}"


def wiring_graph(item: Union[Relation, GraphicalTerm], labels: Optional[Sequence[Optional[str]]] = None,
                 name: str = "wiring") -> graphviz.Graph:
    """
    Build the Graphviz graph of a wiring diagram.

    Shells are clusters (inner ones nested in the outer), ports are plaintext
    nodes, a block gets a point node only when it has other than two ports,
    and the white-dot annotation becomes a diamond. A two-port block is a
    plain edge; the edges into a point node carry the block type.

    Args:
        item: a relation, or a term whose leaf names label the inner shells
        labels: explicit inner shell labels
        name: graph name
    """
    if isinstance(item, GraphicalTerm):
        rel = item.wiring
        labels = labels or item.names
    else:
        rel = item
    titles: List[Optional[str]] = list(labels or [None] * rel.k)

    dot = graphviz.Graph(name, node_attr={'fontsize': '10'})
    with dot.subgraph(name='cluster_out') as outer:
        outer.attr(label=f"out {rel.outer}")
        for j in range(rel.outer.n):
            outer.node(f"o{j + 1}", str(j + 1), shape='plaintext')
        if rel.white_dot:
            outer.node('white', ",".join(map(str, rel.white_dot)), shape='diamond')
        for i, shell in enumerate(rel.inner):
            with outer.subgraph(name=f"cluster_{i + 1}") as box:
                box.attr(label=f"{titles[i] or i + 1} {shell}")
                for j in range(shell.n):
                    box.node(f"s{i + 1}_{j + 1}", str(j + 1), shape='plaintext')

    for b, (members, t) in enumerate(zip(rel.blocks, rel.block_types)):
        if len(members) == 2:
            dot.edge(*(_port_node(rel, g) for g in members))
            continue
        dot.node(f"b{b + 1}", shape='point')
        for g in members:
            dot.edge(_port_node(rel, g), f"b{b + 1}", label=str(t))
    return dot


def emit_dot(item: Union[Relation, GraphicalTerm], labels: Optional[Sequence[Optional[str]]] = None,
             name: str = "wiring") -> str:
    """The dot source of wiring_graph"""
    return wiring_graph(item, labels, name).source
