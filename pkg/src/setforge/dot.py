"""Graphviz DOT rendering.

Output is deterministic (sorted nodes, sorted edges) so renders can be
diffed. Membership arrows point from member to container. Nodes
created by completion are shaded darker the later their level; depth
and rank annotations are appended to the label when present.
"""

from __future__ import annotations

from .dred import Dred, DredLeveledUniverse
from .graph import Deficiency, ExtensionalDigraph, NodeId, Seed

_SHADES = ("gray92", "gray84", "gray76", "gray68")


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _label_attr(lines: list[str]) -> str:
    escaped = "\\n".join(
        part.replace("\\", "\\\\").replace('"', '\\"') for part in lines
    )
    return f'"{escaped}"'


def _base_label(g: ExtensionalDigraph, x: NodeId) -> str:
    p = g.provenance[x]
    if isinstance(p, Seed):
        return p.label
    if isinstance(p, Deficiency):
        return f"D{p.level}#{len(p.members)}"
    return p.detail


def to_dot(
    source: ExtensionalDigraph | Dred | DredLeveledUniverse, name: str = "setforge"
) -> str:
    """Render a graph (optionally with depth/rank annotations) as DOT."""
    if isinstance(source, DredLeveledUniverse):
        source = source.dred()
    if isinstance(source, Dred):
        g = source.graph
        depth: dict[NodeId, int] | None = source.depth
        top = max(source.ranks) if source.ranks else None
        top_rank = source.ranks.get(top, {}) if top is not None else {}
    else:
        g = source
        depth = None
        top_rank = {}
    lines = [f"digraph {_quote(name)} {{", "  rankdir=BT;"]
    for x in g.sorted_nodes():
        label_lines = [_base_label(g, x)]
        if depth is not None:
            note = f"d={depth[x]}"
            if x in top_rank:
                note += f" r={top_rank[x]}"
            label_lines.append(note)
        attrs = [f"label={_label_attr(label_lines)}"]
        p = g.provenance[x]
        if isinstance(p, Deficiency):
            shade = _SHADES[min(p.level - 1, len(_SHADES) - 1)]
            attrs.append("style=filled")
            attrs.append(f"fillcolor={_quote(shade)}")
        lines.append(f"  {_quote(x)} [{', '.join(attrs)}];")
    for member, container in sorted(g.edges):
        lines.append(f"  {_quote(member)} -> {_quote(container)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
