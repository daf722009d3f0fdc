"""Core-semiperiphery-periphery (CSP) networks and structures.

A CSP network is a connected 3-partitioned graph whose cores have
eccentricity at most two, whose semiperipheries each sit between a core and
a periphery that are not adjacent, and whose peripheries are leaves. A CSP
structure is a CSP network with no pair of true-twin cores and no pair of
class-preserving F-twin subgraphs inside the semiperiphery-periphery part.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from .graph import (
    Graph,
    PartitionedGraph,
    bfs_distances,
    complete_graph,
    from_mask,
    is_connected,
    iter_bits,
    join,
    to_mask,
)
from .twin import (
    connected_twin_classes,
    find_witness_masks,
    has_true_twins,
    proper_twin_witness,
)

CORE = "core"
SEMIPERIPHERY = "semiperiphery"
PERIPHERY = "periphery"
CSP_CLASSES = (CORE, SEMIPERIPHERY, PERIPHERY)


class CspError(ValueError):
    """Input is not a CSP network (or structure) as required."""


@dataclass
class CspValidationReport:
    is_csp_network: bool
    is_csp_structure: bool
    violations: list[tuple[Hashable, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "is_csp_network": self.is_csp_network,
            "is_csp_structure": self.is_csp_structure,
            "violations": [[_jsonable(where), what] for where, what in self.violations],
        }


def _jsonable(x):
    if isinstance(x, (tuple, list, frozenset, set)):
        return [_jsonable(y) for y in (sorted(x, key=str) if isinstance(x, (set, frozenset)) else x)]
    return x


def _check_labels(pg: PartitionedGraph) -> None:
    bad = sorted({c for c in pg.classes if c not in CSP_CLASSES}, key=str)
    if bad:
        raise CspError(f"unexpected class labels {bad!r}; expected {CSP_CLASSES}")


def _network_violations(pg: PartitionedGraph) -> list[tuple[Hashable, str]]:
    g = pg.graph
    adj = g.adjacency
    labels = g.labels
    core, semi, peri = (pg.mask(c) for c in CSP_CLASSES)
    out: list[tuple[Hashable, str]] = []
    for name, m in zip(CSP_CLASSES, (core, semi, peri)):
        if not m:
            out.append((name, "class is empty"))
    if not is_connected(g) or g.order == 0:
        out.append((None, "graph is not connected"))
    else:
        for v in iter_bits(core):
            if max(bfs_distances(g, v)) > 2:
                out.append((labels[v], "core eccentricity exceeds two"))
    for v in iter_bits(semi):
        if not _bridges(adj, v, core, peri):
            out.append((labels[v], "semiperiphery not adjacent to a non-adjacent core-periphery pair"))
    for v in iter_bits(peri):
        if adj[v].bit_count() != 1:
            out.append((labels[v], "periphery degree is not one"))
    return out


def _bridges(adj: Sequence[int], v: int, core: int, peri: int) -> bool:
    for c in iter_bits(adj[v] & core):
        if adj[v] & peri & ~adj[c]:
            return True
    return False


def _twin_violations(pg: PartitionedGraph) -> list[tuple[Hashable, str]]:
    g = pg.graph
    labels = g.labels
    out: list[tuple[Hashable, str]] = []
    core = pg.mask(CORE)
    seen: dict[int, int] = {}
    for v in iter_bits(core):
        key = g.adjacency[v] | 1 << v
        if key in seen:
            out.append(((labels[seen[key]], labels[v]), "true-twin cores"))
        else:
            seen[key] = v
    sp = pg.mask(SEMIPERIPHERY) | pg.mask(PERIPHERY)
    w = proper_twin_witness(g, "F", within=from_mask(sp), partition=pg.classes)
    if w is not None:
        pair = (tuple(g.labels_of(w.v1)), tuple(g.labels_of(w.v2)))
        out.append((pair, "F-twin semiperiphery-periphery subgraphs"))
    return out


def validate(pg: PartitionedGraph) -> CspValidationReport:
    """Check the CSP network conditions and, if they hold, twin-freeness."""
    _check_labels(pg)
    violations = _network_violations(pg)
    network = not violations
    if network:
        violations = _twin_violations(pg)
    return CspValidationReport(network, network and not violations, violations)


def is_csp_structure(pg: PartitionedGraph) -> bool:
    return validate(pg).is_csp_structure


# -- reduction -------------------------------------------------------------------


def _choose(members: Sequence[frozenset[int]], labels: Sequence[Hashable], prefer: Sequence[Hashable]):
    """Representative: first member holding a preferred label, else the smallest."""
    rank = {lab: i for i, lab in enumerate(prefer)}
    best = None
    for m in members:
        hits = [rank[labels[v]] for v in m if labels[v] in rank]
        if hits and (best is None or min(hits) < best[0]):
            best = (min(hits), m)
    return members[0] if best is None else best[1]


def _reduction_step(pg: PartitionedGraph, prefer) -> tuple[frozenset[int], dict[int, int]] | None:
    """One collapse: vertices to delete and where each one is absorbed."""
    g = pg.graph
    adj = g.adjacency
    labels = g.labels
    groups: dict[int, list[int]] = {}
    for v in iter_bits(pg.mask(CORE)):
        groups.setdefault(adj[v] | 1 << v, []).append(v)
    for vs in sorted(groups.values()):
        if len(vs) > 1:
            members = [frozenset([v]) for v in vs]
            (rep,) = _choose(members, labels, prefer)
            return frozenset(v for v in vs if v != rep), {v: rep for v in vs if v != rep}
    sp = from_mask(pg.mask(SEMIPERIPHERY) | pg.mask(PERIPHERY))
    for order in range(1, len(sp) // 2 + 1):
        classes = connected_twin_classes(g, "F", order, within=sp, partition=pg.classes)
        if not classes:
            continue
        members = list(classes[0].members)
        rep = _choose(members, labels, prefer)
        removed: set[int] = set()
        absorbed: dict[int, int] = {}
        for m in members:
            if m == rep:
                continue
            phi = find_witness_masks(adj, "F", to_mask(m), to_mask(rep), pg.classes)
            absorbed.update(phi)
            removed |= m
        return frozenset(removed), absorbed
    return None


def reduce(
    pg: PartitionedGraph,
    prefer: Sequence[Hashable] = (),
) -> tuple[PartitionedGraph, dict[Hashable, Hashable]]:
    """Collapse twin cores and twin semiperiphery-periphery subgraphs to a fixpoint.

    Each pass removes one twin class, keeping its representative: true-twin
    cores first, then F-twin connected subgraphs of the
    semiperiphery-periphery part by increasing order (order one being false
    twin peripheries). Representatives are the member containing the
    earliest label in ``prefer``, else the smallest vertex list.

    Returns the reduced structure and a map from every original vertex label
    to the label of the surviving vertex that absorbed it.
    """
    _check_labels(pg)
    report = validate(pg)
    if not report.is_csp_network:
        raise CspError(f"input is not a CSP network: {report.violations}")
    absorption: dict[Hashable, Hashable] = {lab: lab for lab in pg.graph.labels}
    current = pg
    while True:
        step = _reduction_step(current, prefer)
        if step is None:
            break
        removed, absorbed = step
        labels = current.graph.labels
        moved = {labels[a]: labels[b] for a, b in absorbed.items()}
        for orig, target in absorption.items():
            absorption[orig] = moved.get(target, target)
        current = current.induced(v for v in range(current.graph.order) if v not in removed)
    final = validate(current)
    if not final.is_csp_structure:
        raise RuntimeError(f"reduction did not reach a CSP structure: {final.violations}")
    return current, absorption


# -- decomposition and composition ----------------------------------------------------


@dataclass(frozen=True)
class CspDecomposition:
    """Split of a CSP structure into C0, C1, S and P (vertex indices of ``source``).

    ``attach`` sends every vertex of C0 and S to its periphery leaf.
    """

    source: PartitionedGraph
    c0: frozenset[int]
    c1: frozenset[int]
    s: frozenset[int]
    p: frozenset[int]
    attach: Mapping[int, int] = field(hash=False)

    @property
    def n0(self) -> int:
        return len(self.c0)

    @property
    def n1(self) -> int:
        return len(self.c1)

    @property
    def nc(self) -> int:
        return self.n0 + self.n1

    @property
    def ns(self) -> int:
        return len(self.s)

    @property
    def np(self) -> int:
        return len(self.p)

    def c1_graph(self) -> Graph:
        return self.source.graph.induced(self.c1)

    def s_graph(self) -> Graph:
        return self.source.graph.induced(self.s)

    def to_dict(self) -> dict:
        lab = self.source.graph.labels
        names = lambda vs: sorted((lab[v] for v in vs), key=str)  # noqa: E731
        return {
            "c0": names(self.c0),
            "c1": names(self.c1),
            "s": names(self.s),
            "p": names(self.p),
            "attach": {str(lab[a]): lab[b] for a, b in sorted(self.attach.items())},
            "counts": {"n0": self.n0, "n1": self.n1, "nc": self.nc, "ns": self.ns, "np": self.np},
        }


def _fully_joined(adj: Sequence[int], a: int, b: int) -> bool:
    return all(adj[v] & b == b & ~(1 << v) for v in iter_bits(a))


def decompose(pg: PartitionedGraph) -> CspDecomposition:
    """Decompose a CSP structure and verify every clause of the decomposition."""
    report = validate(pg)
    if not report.is_csp_structure:
        raise CspError(f"input is not a CSP structure: {report.violations}")
    g = pg.graph
    adj = g.adjacency
    core, semi, peri = (pg.mask(c) for c in CSP_CLASSES)
    c0 = to_mask(v for v in iter_bits(core) if adj[v] & peri)
    c1 = core & ~c0
    attach: dict[int, int] = {}
    for p in iter_bits(peri):
        (owner,) = iter_bits(adj[p])
        if owner in attach:
            raise RuntimeError(f"vertex {g.label(owner)!r} carries two peripheries")
        attach[owner] = p
    failures = []
    if set(attach) != set(iter_bits(c0 | semi)):
        failures.append("peripheries are not attached one-to-one to C0 and S")
    if not _fully_joined(adj, c0, c0):
        failures.append("C0 is not complete")
    if not _fully_joined(adj, c0, c1):
        failures.append("C0 and C1 are not joined")
    if not _fully_joined(adj, core, semi):
        failures.append("core and semiperiphery are not joined")
    if any(adj[p] & peri for p in iter_bits(peri)):
        failures.append("periphery is not an empty graph")
    if peri.bit_count() != c0.bit_count() + semi.bit_count():
        failures.append("np != n0 + ns")
    if has_true_twins(g.induced(from_mask(c1))):
        failures.append("C1 has true-twin vertices")
    if proper_twin_witness(g.induced(from_mask(semi)), "F") is not None:
        failures.append("S has proper F-twin subgraphs")
    if not (core and semi and peri):
        failures.append("nc, ns and np must not vanish")
    if failures:
        raise RuntimeError("decomposition clauses violated: " + "; ".join(failures))
    return CspDecomposition(pg, from_mask(c0), from_mask(c1), from_mask(semi), from_mask(peri), attach)


def compose(c1: Graph, s: Graph, n0: int) -> PartitionedGraph:
    """Build the CSP structure ``(K_n0 + c1) + s`` with one leaf per C0 and S vertex.

    Vertices are numbered C0, C1, S, then the peripheries of C0 and of S.
    """
    if n0 < 0:
        raise CspError("n0 must be non-negative")
    if c1.order + n0 < 1:
        raise CspError("the core must not be empty")
    if s.order < 1:
        raise CspError("the semiperiphery must not be empty")
    if has_true_twins(c1):
        raise CspError("C1 must not have true-twin vertices")
    if proper_twin_witness(s, "F") is not None:
        raise CspError("S must not have proper F-twin subgraphs")
    n1, ns = c1.order, s.order
    core = join(complete_graph(n0), c1.relabel(range(n0, n0 + n1)))
    body = join(core, s.relabel(range(n0 + n1, n0 + n1 + ns)))
    adj = list(body.adjacency)
    owners = list(range(n0)) + list(range(n0 + n1, n0 + n1 + ns))
    adj.extend(0 for _ in owners)
    for leaf, owner in enumerate(owners, start=body.order):
        adj[leaf] |= 1 << owner
        adj[owner] |= 1 << leaf
    classes = (CORE,) * (n0 + n1) + (SEMIPERIPHERY,) * ns + (PERIPHERY,) * len(owners)
    return PartitionedGraph(Graph(adj), classes)


def csp_from_edges(
    edges: Iterable[tuple[Hashable, Hashable]],
    classes: Mapping[Hashable, str],
) -> PartitionedGraph:
    """Convenience constructor from labelled edges and a label-to-class map."""
    g = Graph.from_edges(edges, vertices=classes.keys())
    return PartitionedGraph.from_mapping(g, classes)
