"""Twin vertices and twin subgraphs.

Two induced subgraphs on ``V1`` and ``V2`` are F-twins when some isomorphism
``phi: V1 -> V2`` satisfies ``N(u) - V1 == N(phi(u)) - V2`` for every
``u`` in ``V1``, and T-twins when ``N(u) | V1 == N(phi(u)) | V2`` instead.
On single vertices these are false and true twins.

Witness searches bucket the vertices of both sets by their external
signature, so ``phi`` can only pair vertices from matching buckets, and then
backtrack over the buckets to preserve adjacency inside the sets. When a
partition is supplied, the class label joins the signature and witnesses are
class preserving.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Literal, Mapping, Sequence

from .graph import (
    Graph,
    PartitionedGraph,
    canonical_form,
    complement,
    from_mask,
    iter_bits,
    to_mask,
)

Kind = Literal["F", "T"]


def _kind(kind: str) -> Kind:
    k = kind.upper()
    if k not in ("F", "T"):
        raise ValueError(f"twin kind must be 'F' or 'T', got {kind!r}")
    return k  # type: ignore[return-value]


def _sorted_key(vs: frozenset[int]) -> tuple[int, ...]:
    return tuple(sorted(vs))


@dataclass(frozen=True)
class TwinWitness:
    kind: Kind
    v1: frozenset[int]
    v2: frozenset[int]
    phi: Mapping[int, int] = field(hash=False, compare=True)

    @property
    def is_proper(self) -> bool:
        return self.v1 != self.v2

    def inverse(self) -> "TwinWitness":
        return TwinWitness(self.kind, self.v2, self.v1, {b: a for a, b in self.phi.items()})

    def then(self, other: "TwinWitness") -> "TwinWitness":
        """Composite witness ``other.phi o self.phi`` from ``v1`` to ``other.v2``."""
        if other.v1 != self.v2 or other.kind != self.kind:
            raise ValueError("witnesses do not compose")
        return TwinWitness(self.kind, self.v1, other.v2, {u: other.phi[w] for u, w in self.phi.items()})


@dataclass(frozen=True)
class TwinClass:
    """Pairwise-twin vertex sets; members sorted by their sorted vertex list."""

    kind: Kind
    members: tuple[frozenset[int], ...]

    @property
    def representative(self) -> frozenset[int]:
        return self.members[0]

    def __len__(self) -> int:
        return len(self.members)


def _make_class(kind: Kind, members: Iterable[frozenset[int]]) -> TwinClass:
    return TwinClass(kind, tuple(sorted(members, key=_sorted_key)))


# -- vertex twins ----------------------------------------------------------


def _vertex_classes(g: Graph, kind: Kind, closed: bool) -> list[TwinClass]:
    groups: dict[int, list[int]] = {}
    for v, a in enumerate(g.adjacency):
        groups.setdefault(a | (1 << v if closed else 0), []).append(v)
    classes = [_make_class(kind, (frozenset([v]) for v in vs)) for vs in groups.values() if len(vs) > 1]
    return sorted(classes, key=lambda c: _sorted_key(c.representative))


def false_twin_vertices(g: Graph) -> list[TwinClass]:
    """Classes of vertices with equal open neighbourhoods (singletons omitted)."""
    return _vertex_classes(g, "F", closed=False)


def true_twin_vertices(g: Graph) -> list[TwinClass]:
    """Classes of vertices with equal closed neighbourhoods (singletons omitted)."""
    return _vertex_classes(g, "T", closed=True)


def has_true_twins(g: Graph) -> bool:
    seen = set()
    for v, a in enumerate(g.adjacency):
        key = a | 1 << v
        if key in seen:
            return True
        seen.add(key)
    return False


# -- subgraph witnesses ------------------------------------------------------


def _signature(adj: Sequence[int], kind: Kind, u: int, mask: int) -> int:
    return adj[u] & ~mask if kind == "F" else adj[u] | mask


def find_witness_masks(
    adj: Sequence[int],
    kind: Kind,
    m1: int,
    m2: int,
    classes: Sequence | None = None,
) -> dict[int, int] | None:
    """Return a twin isomorphism between the vertex masks, or ``None``."""
    if m1.bit_count() != m2.bit_count():
        return None
    if m1 == m2:
        return {u: u for u in iter_bits(m1)}
    buckets: dict[tuple, list[int]] = {}
    for v in iter_bits(m2):
        key = (_signature(adj, kind, v, m2), None if classes is None else classes[v])
        buckets.setdefault(key, []).append(v)
    left = list(iter_bits(m1))
    cand: list[list[int]] = []
    need: dict[tuple, int] = {}
    for u in left:
        key = (_signature(adj, kind, u, m1), None if classes is None else classes[u])
        if key not in buckets:
            return None
        need[key] = need.get(key, 0) + 1
        cand.append(buckets[key])
    if any(len(buckets[k]) != c for k, c in need.items()):
        return None
    phi: dict[int, int] = {}
    used = 0
    k = len(left)

    def backtrack(i: int) -> bool:
        nonlocal used
        if i == k:
            return True
        u = left[i]
        au = adj[u]
        for v in cand[i]:
            if used >> v & 1:
                continue
            av = adj[v]
            if all((au >> x & 1) == (av >> phi[x] & 1) for x in left[:i]):
                phi[u] = v
                used |= 1 << v
                if backtrack(i + 1):
                    return True
                used &= ~(1 << v)
                del phi[u]
        return False

    return dict(phi) if backtrack(0) else None


def _classes_of(partition: Sequence | PartitionedGraph | None):
    if isinstance(partition, PartitionedGraph):
        return partition.classes
    return partition


def _check(g: Graph, kind: Kind, v1: Iterable[int], v2: Iterable[int], partition) -> TwinWitness | None:
    s1, s2 = frozenset(v1), frozenset(v2)
    m1, m2 = g.mask_of(s1), g.mask_of(s2)
    phi = find_witness_masks(g.adjacency, kind, m1, m2, _classes_of(partition))
    return None if phi is None else TwinWitness(kind, s1, s2, phi)


def check_f_twin(g: Graph, v1: Iterable[int], v2: Iterable[int], partition=None) -> TwinWitness | None:
    """F-twin witness for the subgraphs induced by ``v1`` and ``v2``, if any."""
    return _check(g, "F", v1, v2, partition)


def check_t_twin(g: Graph, v1: Iterable[int], v2: Iterable[int], partition=None) -> TwinWitness | None:
    """T-twin witness for the subgraphs induced by ``v1`` and ``v2``, if any."""
    return _check(g, "T", v1, v2, partition)


def check_twin(g: Graph, kind: str, v1, v2, partition=None) -> TwinWitness | None:
    return _check(g, _kind(kind), v1, v2, partition)


def is_valid_witness(g: Graph, w: TwinWitness) -> bool:
    """Verify a witness directly against the definition."""
    adj = g.adjacency
    m1, m2 = to_mask(w.v1), to_mask(w.v2)
    if sorted(w.phi) != sorted(w.v1) or sorted(w.phi.values()) != sorted(w.v2):
        return False
    for u, x in combinations(sorted(w.v1), 2):
        if g.has_edge(u, x) != g.has_edge(w.phi[u], w.phi[x]):
            return False
    return all(_signature(adj, w.kind, u, m1) == _signature(adj, w.kind, w.phi[u], m2) for u in w.v1)


# -- enumeration of twin structures --------------------------------------------


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _classes_from_pairs(masks: list[int], linked: Iterable[tuple[int, int]], kind: Kind) -> list[TwinClass]:
    uf = _UnionFind(len(masks))
    for i, j in linked:
        uf.union(i, j)
    groups: dict[int, list[frozenset[int]]] = {}
    for i, m in enumerate(masks):
        groups.setdefault(uf.find(i), []).append(from_mask(m))
    classes = [_make_class(kind, ms) for ms in groups.values()]
    return sorted(classes, key=lambda c: _sorted_key(c.representative))


def induced_copies(g: Graph, pattern: Graph) -> list[frozenset[int]]:
    """Vertex sets of ``g`` inducing a subgraph isomorphic to ``pattern``."""
    k = pattern.order
    if k > g.order:
        return []
    target = canonical_form(pattern)
    size = pattern.size
    degrees = sorted(pattern.degree(v) for v in range(k))
    adj = g.adjacency
    out = []
    for combo in combinations(range(g.order), k):
        m = to_mask(combo)
        degs = sorted((adj[v] & m).bit_count() for v in combo)
        if sum(degs) != 2 * size or degs != degrees:
            continue
        if canonical_form(g.induced(combo)) == target:
            out.append(frozenset(combo))
    return out


def twin_classes(g: Graph, kind: str, pattern: Graph, partition=None) -> list[TwinClass]:
    """Partition the induced copies of ``pattern`` into twin classes.

    Singleton classes are kept, so every induced copy appears exactly once.
    """
    kind = _kind(kind)
    copies = induced_copies(g, pattern)
    masks = [to_mask(c) for c in copies]
    classes = _classes_of(partition)
    adj = g.adjacency
    linked = [
        (i, j)
        for i, j in combinations(range(len(masks)), 2)
        if find_witness_masks(adj, kind, masks[i], masks[j], classes) is not None
    ]
    return _classes_from_pairs(masks, linked, kind)


def connected_subsets(adj: Sequence[int], within: int, max_size: int) -> list[int]:
    """Masks of all connected induced subgraphs inside ``within`` with at most ``max_size`` vertices."""
    out: list[int] = []
    if max_size < 1:
        return out
    for v in iter_bits(within):
        allowed = within & ~((1 << (v + 1)) - 1)
        start = 1 << v
        seen = {start}
        stack = [(start, adj[v] & allowed)]
        while stack:
            s, frontier = stack.pop()
            out.append(s)
            if s.bit_count() >= max_size:
                continue
            f = frontier
            while f:
                b = f & -f
                f ^= b
                t = s | b
                if t in seen:
                    continue
                seen.add(t)
                stack.append((t, (frontier | adj[b.bit_length() - 1] & allowed) & ~t))
    return out


def _subset_key(adj: Sequence[int], m: int, classes) -> tuple:
    degs = tuple(sorted((adj[v] & m).bit_count() for v in iter_bits(m)))
    cls = None if classes is None else tuple(sorted(map(str, (classes[v] for v in iter_bits(m)))))
    return (m.bit_count(), degs, cls)


def connected_twin_classes(
    g: Graph,
    kind: str,
    order: int,
    within: Iterable[int] | None = None,
    partition=None,
) -> list[TwinClass]:
    """Twin classes among connected induced subgraphs of one order.

    Connectivity is taken in ``g`` for F-twins and in the complement for
    T-twins. ``within`` restricts the candidate vertices; the twin condition
    is always checked in the whole graph. Every proper twin pair decomposes
    into matched pairs of such connected twins, so these classes detect all
    proper twins. Only classes with two or more members are returned.
    """
    kind = _kind(kind)
    host = g if kind == "F" else complement(g)
    within_mask = g.vertex_mask if within is None else g.mask_of(within)
    classes = _classes_of(partition)
    masks = [m for m in connected_subsets(host.adjacency, within_mask, order) if m.bit_count() == order]
    masks.sort(key=lambda m: _sorted_key(from_mask(m)))
    buckets: dict[tuple, list[int]] = {}
    for i, m in enumerate(masks):
        buckets.setdefault(_subset_key(g.adjacency, m, classes), []).append(i)
    linked = []
    for idx in buckets.values():
        for a, b in combinations(idx, 2):
            if masks[a] & masks[b]:
                continue
            if find_witness_masks(g.adjacency, kind, masks[a], masks[b], classes) is not None:
                linked.append((a, b))
    return [c for c in _classes_from_pairs(masks, linked, kind) if len(c) > 1]


def proper_twin_witness(
    g: Graph,
    kind: str,
    max_order: int | None = None,
    within: Iterable[int] | None = None,
    partition=None,
) -> TwinWitness | None:
    """Some proper twin pair of connected subgraphs, smallest order first."""
    kind = _kind(kind)
    host = g if kind == "F" else complement(g)
    within_mask = g.vertex_mask if within is None else g.mask_of(within)
    n = within_mask.bit_count()
    limit = n // 2 if max_order is None else min(max_order, n // 2)
    classes = _classes_of(partition)
    masks = connected_subsets(host.adjacency, within_mask, limit)
    buckets: dict[tuple, list[int]] = {}
    for m in masks:
        buckets.setdefault(_subset_key(g.adjacency, m, classes), []).append(m)
    for key in sorted(buckets, key=lambda k: k[0]):
        group = sorted(buckets[key], key=lambda m: _sorted_key(from_mask(m)))
        for a, b in combinations(group, 2):
            if a & b:
                continue
            phi = find_witness_masks(g.adjacency, kind, a, b, classes)
            if phi is not None:
                return TwinWitness(kind, from_mask(a), from_mask(b), phi)
    return None


def has_proper_twin(g: Graph, kind: str, max_order: int | None = None, partition=None) -> bool:
    """Whether two distinct induced subgraphs of order <= ``max_order`` are twins.

    ``max_order=None`` means any order.
    """
    if max_order is not None and max_order < 1:
        return False
    return proper_twin_witness(g, kind, max_order, partition=partition) is not None


# -- induced 6-cycles from overlapping twin edges ---------------------------------


def find_c6_witness(
    g: Graph,
    e1: Iterable[int],
    e2: Iterable[int],
    f1: Iterable[int],
    f2: Iterable[int],
) -> frozenset[int]:
    """Six vertices inducing C6 built from two overlapping F-twin edge pairs.

    ``(e1, e2)`` and ``(f1, f2)`` must be proper F-twin edges from different
    classes with ``e1`` and ``f1`` sharing one vertex ``v``. With ``u`` and
    ``w`` the other ends of ``e1`` and ``f1`` the cycle is
    ``u, v, w, phi(v), phi(u), psi(v)``.
    """
    e1, e2, f1, f2 = (frozenset(x) for x in (e1, e2, f1, f2))
    for e in (e1, e2, f1, f2):
        if len(e) != 2 or not g.has_edge(*sorted(e)):
            raise ValueError("all four arguments must be edges of the graph")
    if e1 == e2 or f1 == f2:
        raise ValueError("twin edge pairs must be proper")
    shared = e1 & f1
    if len(shared) != 1:
        raise ValueError("e1 and f1 must share exactly one vertex")
    phi = check_f_twin(g, e1, e2)
    psi = check_f_twin(g, f1, f2)
    if phi is None or psi is None:
        raise ValueError("arguments are not F-twin edge pairs")
    if check_f_twin(g, e1, f1) is not None:
        raise ValueError("e1 and f1 belong to the same F-twin class")
    (v,) = shared
    (u,) = e1 - shared
    (w,) = f1 - shared
    cycle = [u, v, w, phi.phi[v], phi.phi[u], psi.phi[v]]
    vertices = frozenset(cycle)
    if len(vertices) != 6:
        raise RuntimeError("twin edge pairs do not span six vertices")
    induced_edges = {frozenset(e) for e in combinations(cycle, 2) if g.has_edge(*e)}
    expected = {frozenset((cycle[i], cycle[(i + 1) % 6])) for i in range(6)}
    if induced_edges != expected:
        raise RuntimeError("constructed vertices do not induce C6")
    return vertices
