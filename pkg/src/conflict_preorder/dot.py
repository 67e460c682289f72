"""Graphviz export of pair graphs annotated with LC levels."""

from __future__ import annotations

from .determinization import SINK, PairGraph, format_pair
from .lc import LcLevelMap


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _level(lc: LcLevelMap, node) -> str:
    level = lc[node]
    return "LC^inf" if level == float("inf") else f"LC^{level}"


def pair_graph_dot(graph: PairGraph, lc: LcLevelMap, full: bool = False) -> str:
    """Deterministic DOT text; parallel arrows are merged into one edge with a label list."""
    lines = ["digraph pairs {", "  rankdir=LR;", '  node [shape=box, fontname="monospace"];']
    ids = {i: f"n{i}" for i in range(len(graph))}
    sink_used = False
    for i, node in enumerate(graph.nodes):
        label = f"{format_pair(node)} : {_level(lc, node)}"
        style = ", peripheries=2" if lc[node] != float("inf") else ""
        lines.append(f"  {ids[i]} [label={_quote(label)}{style}];")
    for k, i in enumerate(graph.seed_ids):
        lines.append(f"  init{k} [shape=point];")
        lines.append(f"  init{k} -> {ids[i]};")
    for i, row in enumerate(graph.succ):
        grouped: dict[int, list[str]] = {}
        for k, j in enumerate(row):
            if j < 0 and not full:
                continue
            grouped.setdefault(j, []).append(graph.labels[k])
        for j in sorted(grouped):
            if j < 0:
                sink_used = True
            target = "sink" if j < 0 else ids[j]
            lines.append(f"  {ids[i]} -> {target} [label={_quote(','.join(grouped[j]))}];")
    if full and sink_used:
        label = f"{format_pair(SINK)} : {_level(lc, SINK)}"
        lines.append(f"  sink [label={_quote(label)}, style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dot_export(graph: PairGraph, lc: LcLevelMap, path, full: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(pair_graph_dot(graph, lc, full))
