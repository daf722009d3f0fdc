"""Edge-list, partition and DOT formats.

Edge lists hold one edge per line, ``u<TAB>v[<TAB>weight]``; partition files
hold ``vertex<TAB>class``. ``#`` starts a comment. Fields are split on tabs
when a line contains one (country names such as ``Hong Kong`` carry spaces)
and on whitespace otherwise.
"""

from __future__ import annotations

from pathlib import Path
from typing import Hashable, Iterable

from .csp import CORE, PERIPHERY, SEMIPERIPHERY
from .graph import Graph, PartitionedGraph


class FormatError(ValueError):
    pass


def _records(text: str, source: str) -> Iterable[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split("\t")] if "\t" in line else line.split()
        yield lineno, [f for f in fields if f]


def parse_edge_list(text: str, source: str = "<string>") -> tuple[list[tuple[str, str]], dict[tuple[str, str], float]]:
    """Edges in file order plus weights for the lines that carry one."""
    edges: list[tuple[str, str]] = []
    weights: dict[tuple[str, str], float] = {}
    for lineno, fields in _records(text, source):
        if len(fields) not in (2, 3):
            raise FormatError(f"{source}:{lineno}: expected 'u<TAB>v[<TAB>weight]'")
        u, v = fields[0], fields[1]
        if u == v:
            raise FormatError(f"{source}:{lineno}: self-loop on {u!r}")
        edges.append((u, v))
        if len(fields) == 3:
            try:
                w = float(fields[2])
            except ValueError:
                raise FormatError(f"{source}:{lineno}: bad weight {fields[2]!r}") from None
            weights[(u, v)] = int(w) if w.is_integer() else w
    return edges, weights


def read_edge_list(path: str | Path) -> tuple[Graph, dict[tuple[str, str], float]]:
    path = Path(path)
    edges, weights = parse_edge_list(path.read_text(encoding="utf-8"), str(path))
    return Graph.from_edges(edges), weights


def parse_partition(text: str, source: str = "<string>") -> dict[str, str]:
    mapping: dict[str, str] = {}
    for lineno, fields in _records(text, source):
        if len(fields) != 2:
            raise FormatError(f"{source}:{lineno}: expected 'vertex<TAB>class'")
        if fields[0] in mapping:
            raise FormatError(f"{source}:{lineno}: vertex {fields[0]!r} listed twice")
        mapping[fields[0]] = fields[1]
    return mapping


def read_partition(path: str | Path) -> dict[str, str]:
    path = Path(path)
    return parse_partition(path.read_text(encoding="utf-8"), str(path))


def format_edge_list(g: Graph, weights: dict | None = None) -> str:
    lines = []
    for i, j in g.edges():
        a, b = g.label(i), g.label(j)
        w = None if weights is None else weights.get((i, j))
        lines.append(f"{a}\t{b}" if w is None else f"{a}\t{b}\t{w}")
    return "\n".join(lines) + ("\n" if lines else "")


_FILL = {CORE: "black", SEMIPERIPHERY: "grey", PERIPHERY: "white"}
_FONT = {CORE: "white", SEMIPERIPHERY: "black", PERIPHERY: "black"}


def _quote(x: Hashable) -> str:
    s = str(x).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{s}"'


def to_dot(obj: Graph | PartitionedGraph, name: str = "G") -> str:
    """DOT text; CSP classes are painted black, grey and white."""
    if isinstance(obj, PartitionedGraph):
        g, classes = obj.graph, obj.classes
    else:
        g, classes = obj, None
    lines = [f"graph {_quote(name)} {{", "  node [shape=circle, style=filled];"]
    for v in range(g.order):
        if classes is None:
            lines.append(f"  {_quote(g.label(v))} [fillcolor=white];")
        else:
            c = classes[v]
            fill = _FILL.get(c, "white")
            font = _FONT.get(c, "black")
            lines.append(f"  {_quote(g.label(v))} [class={_quote(c)}, fillcolor={fill}, fontcolor={font}];")
    for i, j in g.edges():
        lines.append(f"  {_quote(g.label(i))} -- {_quote(g.label(j))};")
    lines.append("}")
    return "\n".join(lines) + "\n"
