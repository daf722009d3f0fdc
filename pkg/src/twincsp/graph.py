"""Finite simple undirected graphs stored as per-vertex bit sets.

Vertices are dense indices ``0..n-1``. Every graph also carries a tuple of
labels (country names, integers, ...) so that results can be reported with
external names; ``Graph.index`` maps a label back to its index.

Vertex sets are passed around as ``frozenset`` of indices at the public
surface and as integer bit masks internally.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

DEFAULT_CANONICAL_BOUND = 10


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def from_mask(mask: int) -> frozenset[int]:
    return frozenset(iter_bits(mask))


class Graph:
    """Immutable simple graph.

    ``adjacency[i]`` is the bit mask of the neighbours of vertex ``i``.
    """

    __slots__ = ("_adj", "_labels", "_index")

    def __init__(self, adjacency: Sequence[int], labels: Sequence[Hashable] | None = None):
        adj = tuple(int(a) for a in adjacency)
        n = len(adj)
        full = (1 << n) - 1
        for i, a in enumerate(adj):
            if a & ~full:
                raise ValueError(f"vertex {i} has a neighbour outside 0..{n - 1}")
            if a >> i & 1:
                raise ValueError(f"self-loop at vertex {i}")
            for j in iter_bits(a):
                if not adj[j] >> i & 1:
                    raise ValueError(f"adjacency not symmetric between {i} and {j}")
        if labels is None:
            labels = tuple(range(n))
        else:
            labels = tuple(labels)
            if len(labels) != n:
                raise ValueError("one label per vertex is required")
        index = {lab: i for i, lab in enumerate(labels)}
        if len(index) != n:
            raise ValueError("vertex labels must be unique")
        self._adj = adj
        self._labels = labels
        self._index = index

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[Hashable, Hashable]],
        vertices: Iterable[Hashable] | None = None,
    ) -> "Graph":
        """Build a graph from labelled edges.

        Vertex order is ``vertices`` (if given) followed by labels in order of
        first appearance in ``edges``. Repeated edges are merged; self-loops
        are rejected.
        """
        labels: list[Hashable] = []
        index: dict[Hashable, int] = {}

        def idx(lab):
            if lab not in index:
                index[lab] = len(labels)
                labels.append(lab)
            return index[lab]

        for v in vertices or ():
            idx(v)
        pairs = [(idx(a), idx(b)) for a, b in edges]
        adj = [0] * len(labels)
        for i, j in pairs:
            if i == j:
                raise ValueError(f"self-loop at {labels[i]!r}")
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        return cls(adj, labels)

    # -- basic accessors -------------------------------------------------

    @property
    def order(self) -> int:
        return len(self._adj)

    def __len__(self) -> int:
        return len(self._adj)

    @property
    def size(self) -> int:
        return sum(a.bit_count() for a in self._adj) // 2

    @property
    def adjacency(self) -> tuple[int, ...]:
        return self._adj

    @property
    def labels(self) -> tuple[Hashable, ...]:
        return self._labels

    @property
    def vertex_mask(self) -> int:
        return (1 << len(self._adj)) - 1

    def label(self, v: int) -> Hashable:
        return self._labels[v]

    def index(self, label: Hashable) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"unknown vertex {label!r}") from None

    def labels_of(self, vertices: Iterable[int]) -> list[Hashable]:
        return [self._labels[v] for v in sorted(vertices)]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self._adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self._adj[v].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, a in enumerate(self._adj) for j in iter_bits(a >> (i + 1) << (i + 1))]

    def check_vertex(self, v: int) -> None:
        if not (isinstance(v, int) and 0 <= v < len(self._adj)):
            raise KeyError(f"unknown vertex {v!r}")

    def mask_of(self, vertices: Iterable[int]) -> int:
        mask = 0
        for v in vertices:
            self.check_vertex(v)
            mask |= 1 << v
        return mask

    # -- derived graphs --------------------------------------------------

    def induced(self, vertices: Iterable[int]) -> "Graph":
        """Induced subgraph; vertices are re-indexed in increasing order."""
        keep = sorted(set(vertices))
        for v in keep:
            self.check_vertex(v)
        pos = {v: i for i, v in enumerate(keep)}
        adj = [to_mask(pos[w] for w in iter_bits(self._adj[v]) if w in pos) for v in keep]
        return Graph(adj, [self._labels[v] for v in keep])

    def relabel(self, labels: Sequence[Hashable] | Mapping[Hashable, Hashable]) -> "Graph":
        if isinstance(labels, Mapping):
            labels = [labels.get(lab, lab) for lab in self._labels]
        return Graph(self._adj, labels)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._adj == other._adj and self._labels == other._labels

    def __hash__(self) -> int:
        return hash((self._adj, self._labels))

    def __repr__(self) -> str:
        return f"Graph(order={self.order}, size={self.size})"


# -- neighbourhoods and distances ---------------------------------------


def neighbors(g: Graph, u: int) -> frozenset[int]:
    g.check_vertex(u)
    return from_mask(g.adjacency[u])


def closed_neighbors(g: Graph, u: int) -> frozenset[int]:
    g.check_vertex(u)
    return from_mask(g.adjacency[u] | 1 << u)


def bfs_distances(g: Graph, source: int) -> list[int | None]:
    """Distances from ``source``; ``None`` marks unreachable vertices."""
    g.check_vertex(source)
    dist: list[int | None] = [None] * g.order
    dist[source] = 0
    queue = deque([source])
    adj = g.adjacency
    while queue:
        u = queue.popleft()
        for w in iter_bits(adj[u]):
            if dist[w] is None:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def distance(g: Graph, u: int, v: int) -> int | None:
    """Shortest-path length between ``u`` and ``v``, or ``None`` if unreachable."""
    g.check_vertex(v)
    return bfs_distances(g, u)[v]


def subgraph_distance(g: Graph, a: Iterable[int], b: Iterable[int]) -> int:
    """Minimum distance between two disjoint vertex sets of one component."""
    ma, mb = g.mask_of(a), g.mask_of(b)
    if not ma or not mb:
        raise ValueError("vertex sets must be non-empty")
    if ma & mb:
        raise ValueError("vertex sets overlap")
    best = None
    for u in iter_bits(ma):
        dist = bfs_distances(g, u)
        for v in iter_bits(mb):
            d = dist[v]
            if d is None:
                raise ValueError("vertex sets lie in different components")
            if best is None or d < best:
                best = d
    return best


def eccentricity(g: Graph, u: int) -> int:
    dist = bfs_distances(g, u)
    if any(d is None for d in dist):
        raise ValueError("eccentricity is undefined on a disconnected graph")
    return max(dist)


def connected_components(g: Graph) -> list[frozenset[int]]:
    """Components ordered by their smallest member."""
    seen = 0
    comps = []
    adj = g.adjacency
    for v in range(g.order):
        if seen >> v & 1:
            continue
        comp = 1 << v
        frontier = 1 << v
        while frontier:
            nxt = 0
            for w in iter_bits(frontier):
                nxt |= adj[w]
            frontier = nxt & ~comp
            comp |= frontier
        seen |= comp
        comps.append(from_mask(comp))
    return comps


def component_mask(adj: Sequence[int], start: int, within: int) -> int:
    """Bit mask of the component of ``start`` in the subgraph induced by ``within``."""
    comp = frontier = 1 << start
    while frontier:
        nxt = 0
        for w in iter_bits(frontier):
            nxt |= adj[w]
        frontier = nxt & within & ~comp
        comp |= frontier
    return comp


def is_connected(g: Graph) -> bool:
    if g.order == 0:
        return True
    return component_mask(g.adjacency, 0, g.vertex_mask) == g.vertex_mask


# -- constructions -------------------------------------------------------


def complement(g: Graph) -> Graph:
    full = g.vertex_mask
    return Graph([full & ~a & ~(1 << i) for i, a in enumerate(g.adjacency)], g.labels)


def disjoint_union(g1: Graph, g2: Graph) -> Graph:
    if set(g1.labels) & set(g2.labels):
        raise ValueError("graphs share vertex labels")
    n1 = g1.order
    adj = list(g1.adjacency) + [a << n1 for a in g2.adjacency]
    return Graph(adj, g1.labels + g2.labels)


def join(g1: Graph, g2: Graph) -> Graph:
    """Disjoint union plus every edge between the two vertex sets."""
    if set(g1.labels) & set(g2.labels):
        raise ValueError("graphs share vertex labels")
    n1, n2 = g1.order, g2.order
    left = (1 << n1) - 1
    right = ((1 << n2) - 1) << n1
    adj = [a | right for a in g1.adjacency] + [(a << n1) | left for a in g2.adjacency]
    return Graph(adj, g1.labels + g2.labels)


def complete_graph(n: int, start: int = 0) -> Graph:
    if n < 0:
        raise ValueError("order must be non-negative")
    full = (1 << n) - 1
    return Graph([full & ~(1 << i) for i in range(n)], range(start, start + n))


def empty_graph(n: int, start: int = 0) -> Graph:
    if n < 1:
        raise ValueError("empty graphs E_n need n >= 1")
    return Graph([0] * n, range(start, start + n))


def path_graph(n: int, start: int = 0) -> Graph:
    if n < 1:
        raise ValueError("paths need n >= 1")
    return Graph.from_edges(((start + i, start + i + 1) for i in range(n - 1)), range(start, start + n))


def cycle_graph(n: int, start: int = 0) -> Graph:
    if n < 3:
        raise ValueError("cycles need n >= 3")
    return Graph.from_edges(((start + i, start + (i + 1) % n) for i in range(n)), range(start, start + n))


def star_graph(n: int, start: int = 0) -> Graph:
    """S_n = K_1 + E_{n-1}; vertex ``start`` is the centre."""
    if n < 1:
        raise ValueError("stars need n >= 1")
    return Graph.from_edges(((start, start + i) for i in range(1, n)), range(start, start + n))


_STANDARD = {
    "complete": complete_graph,
    "empty": empty_graph,
    "path": path_graph,
    "cycle": cycle_graph,
    "star": star_graph,
}


def standard_graph(kind: str, n: int = 0, start: int = 0) -> Graph:
    """Named graph families: complete, empty, path, cycle, star, null (K_0)."""
    if kind == "null":
        if n != 0:
            raise ValueError("the null graph has order 0")
        return Graph([])
    try:
        build = _STANDARD[kind]
    except KeyError:
        raise ValueError(f"unknown graph kind {kind!r}") from None
    return build(n, start)


def parse_graph_name(name: str, start: int = 0) -> Graph:
    """Short names such as ``K3``, ``E2``, ``P4``, ``C6``, ``S4``, ``K0``."""
    kinds = {"K": "complete", "E": "empty", "P": "path", "C": "cycle", "S": "star"}
    if len(name) < 2 or name[0] not in kinds or not name[1:].isdigit():
        raise ValueError(f"cannot parse graph name {name!r}")
    n = int(name[1:])
    if name[0] == "K" and n == 0:
        return standard_graph("null")
    return standard_graph(kinds[name[0]], n, start)


# -- partitioned graphs --------------------------------------------------


@dataclass(frozen=True)
class PartitionedGraph:
    """A graph plus one class label per vertex (``classes[i]`` labels vertex i)."""

    graph: Graph
    classes: tuple

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        if len(self.classes) != self.graph.order:
            raise ValueError("every vertex needs exactly one class")

    @classmethod
    def from_mapping(cls, graph: Graph, mapping: Mapping[Hashable, Hashable]) -> "PartitionedGraph":
        """Classes keyed by vertex label; missing labels are an error."""
        missing = [lab for lab in graph.labels if lab not in mapping]
        if missing:
            raise ValueError(f"no class given for vertices {missing!r}")
        return cls(graph, tuple(mapping[lab] for lab in graph.labels))

    @property
    def class_labels(self) -> list:
        """Distinct class labels in order of first appearance."""
        return list(dict.fromkeys(self.classes))

    @property
    def k(self) -> int:
        return len(set(self.classes))

    def members(self, cls_label) -> frozenset[int]:
        return frozenset(i for i, c in enumerate(self.classes) if c == cls_label)

    def mask(self, cls_label) -> int:
        return to_mask(i for i, c in enumerate(self.classes) if c == cls_label)

    def mapping(self) -> dict:
        return dict(zip(self.graph.labels, self.classes))

    def induced(self, vertices: Iterable[int]) -> "PartitionedGraph":
        keep = sorted(set(vertices))
        return PartitionedGraph(self.graph.induced(keep), tuple(self.classes[v] for v in keep))


def quotient(pg: PartitionedGraph) -> Graph:
    """One vertex per class (labelled by the class), adjacent iff a cross edge exists."""
    labels = pg.class_labels
    pos = {c: i for i, c in enumerate(labels)}
    adj = [0] * len(labels)
    for i, j in pg.graph.edges():
        a, b = pos[pg.classes[i]], pos[pg.classes[j]]
        if a != b:
            adj[a] |= 1 << b
            adj[b] |= 1 << a
    return Graph(adj, labels)


# -- canonical forms -----------------------------------------------------


@dataclass(frozen=True, order=True)
class CanonicalForm:
    """Isomorphism invariant that is complete for graphs up to the search bound.

    ``bits`` packs the upper triangle of the canonically ordered adjacency
    matrix row by row, first pair in the most significant position.
    ``classes`` lists the class label of each canonical position for
    partitioned graphs and is ``None`` otherwise.
    """

    order: int
    bits: int
    classes: tuple | None = None

    def to_graph(self) -> Graph:
        n = self.order
        adj = [0] * n
        pos = len(_pairs(n))
        for i, j in _pairs(n):
            pos -= 1
            if self.bits >> pos & 1:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
        return Graph(adj)

    def to_partitioned(self) -> PartitionedGraph:
        if self.classes is None:
            raise ValueError("form carries no partition")
        return PartitionedGraph(self.to_graph(), self.classes)


_PAIRS_CACHE: dict[int, list[tuple[int, int]]] = {}


def _pairs(n: int) -> list[tuple[int, int]]:
    pairs = _PAIRS_CACHE.get(n)
    if pairs is None:
        pairs = _PAIRS_CACHE[n] = list(combinations(range(n), 2))
    return pairs


def _rank(keys: Sequence) -> list[int]:
    order = {k: r for r, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


def _refine(adj: Sequence[int], colors: list[int]) -> list[int]:
    """Colour refinement to the coarsest equitable partition finer than ``colors``."""
    cells = len(set(colors))
    while True:
        keys = [(colors[v], tuple(sorted(colors[w] for w in iter_bits(adj[v])))) for v in range(len(adj))]
        new = _rank(keys)
        new_cells = len(set(new))
        if new_cells == cells:
            return new
        colors, cells = new, new_cells


def _leaf_bits(adj: Sequence[int], colors: list[int]) -> int:
    order = sorted(range(len(adj)), key=colors.__getitem__)
    bits = 0
    for i, j in _pairs(len(adj)):
        bits = bits << 1 | (adj[order[i]] >> order[j] & 1)
    return bits


def _search(adj: Sequence[int], colors: list[int]) -> int:
    colors = _refine(adj, colors)
    n = len(adj)
    counts: dict[int, int] = {}
    for c in colors:
        counts[c] = counts.get(c, 0) + 1
    target = min((c for c, k in counts.items() if k > 1), default=None)
    if target is None:
        return _leaf_bits(adj, colors)
    best = None
    tried: list[int] = []
    for v in range(n):
        if colors[v] != target:
            continue
        # swapping twins is an automorphism, so their subtrees coincide
        if any((adj[v] & ~(1 << w)) == (adj[w] & ~(1 << v)) for w in tried):
            continue
        tried.append(v)
        split = [2 * c for c in colors]
        split[v] -= 1
        bits = _search(adj, _rank(split))
        if best is None or bits < best:
            best = bits
    return best


def canonical_form(
    g: Graph,
    partition: Sequence | PartitionedGraph | None = None,
    max_order: int = DEFAULT_CANONICAL_BOUND,
) -> CanonicalForm:
    """Canonical form of ``g`` (class-preserving when ``partition`` is given).

    The minimum is taken over vertex orders compatible with an
    isomorphism-invariant colour refinement, with individualisation of
    one vertex at a time to break ties.
    """
    if g.order > max_order:
        raise ValueError(f"canonical form search is bounded to order {max_order}, got {g.order}")
    if isinstance(partition, PartitionedGraph):
        partition = partition.classes
    if partition is None:
        colors = [0] * g.order
        class_seq = None
    else:
        partition = tuple(partition)
        if len(partition) != g.order:
            raise ValueError("partition must label every vertex")
        colors = _rank(partition)
    bits = _search(g.adjacency, colors) if g.order else 0
    if partition is not None:
        ranked = sorted(set(partition))
        class_seq = tuple(ranked[c] for c in sorted(colors))
    return CanonicalForm(g.order, bits, class_seq)


def is_isomorphic(g1: Graph, g2: Graph, max_order: int = DEFAULT_CANONICAL_BOUND) -> bool:
    return g1.order == g2.order and canonical_form(g1, max_order=max_order) == canonical_form(g2, max_order=max_order)
