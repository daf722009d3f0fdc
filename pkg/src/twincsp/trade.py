"""Positional analysis of the 1994 Asia-Africa-Oceania metal manufactures trade.

Volumes are in thousands of USD, imports and exports already summed. The
pipeline prefilters weak links, clusters countries by a trade threshold
(optionally merging countries with similar trade profiles), builds the
quotient network, attaches CSP class labels and reduces twins.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import resources
from itertools import combinations
from pathlib import Path
from typing import Hashable, Iterable, Mapping, Sequence

from . import csp
from .graph import Graph, PartitionedGraph, connected_components, iter_bits, quotient
from .io import parse_edge_list, parse_partition

DATASET_FILE = "metal_trade_1994.tsv"
DATASET_SHA256 = "c5e57ad0aa1925e57ecd6441168ba74db4ae5fa4ba7f0325a995a003945d7593"

EAST_ASIA = frozenset({"China", "Hong Kong", "Japan", "Thailand", "Korea"})
SOUTHEAST_ASIA = frozenset({"Malaysia", "Singapore", "Indonesia", "Philippines"})
AUSTRALASIA = frozenset({"Australia", "New Zealand"})

# Names for the clusters of the packaged scenarios; other multi-country clusters are named
# by their sorted members joined with "+".
CLUSTER_NAMES = {
    EAST_ASIA | SOUTHEAST_ASIA | AUSTRALASIA: "Core",
    EAST_ASIA | SOUTHEAST_ASIA: "Core",
    EAST_ASIA: "Core",
    SOUTHEAST_ASIA: "Southeast Asia",
    AUSTRALASIA: "Australasia",
}


class DatasetError(RuntimeError):
    pass


def cluster_name(members: Iterable[str]) -> str:
    members = frozenset(members)
    if members in CLUSTER_NAMES:
        return CLUSTER_NAMES[members]
    return "+".join(sorted(members))


def parse_volume(text: str | float) -> float:
    """Trade volume in thousands of USD; ``75M`` and ``4.6B`` are accepted."""
    if isinstance(text, (int, float)):
        return text
    s = text.strip().upper()
    scale = 1
    if s.endswith("M"):
        s, scale = s[:-1], 1_000
    elif s.endswith("B"):
        s, scale = s[:-1], 1_000_000
    elif s.endswith("K"):
        s = s[:-1]
    value = float(s) * scale
    if value < 0:
        raise ValueError("volumes must be non-negative")
    return int(value) if value.is_integer() else value


@dataclass(frozen=True)
class WeightedNetwork:
    """Undirected network with positive edge weights keyed by ``(i, j)``, ``i < j``."""

    graph: Graph
    weights: Mapping[tuple[int, int], float] = field(hash=False)

    def __post_init__(self):
        for i, j in self.graph.edges():
            w = self.weights.get((i, j))
            if w is None or w <= 0:
                raise ValueError(f"edge {self.graph.label(i)}-{self.graph.label(j)} needs a positive weight")
        if len(self.weights) != self.graph.size:
            raise ValueError("weights must be given exactly for the edges")

    @classmethod
    def from_records(cls, records: Iterable[tuple[Hashable, Hashable, float]], vertices: Iterable[Hashable] = ()) -> "WeightedNetwork":
        records = list(records)
        g = Graph.from_edges(((a, b) for a, b, _ in records), vertices=vertices)
        weights: dict[tuple[int, int], float] = {}
        for a, b, w in records:
            i, j = sorted((g.index(a), g.index(b)))
            weights[(i, j)] = weights.get((i, j), 0) + w
        return cls(g, weights)

    def index(self, name: Hashable) -> int:
        return self.graph.index(name)

    def weight(self, u: int, v: int) -> float:
        return self.weights.get((min(u, v), max(u, v)), 0)

    def weight_between(self, a: Hashable, b: Hashable) -> float:
        return self.weight(self.index(a), self.index(b))

    def strength(self, v: int) -> float:
        """Total trade of vertex ``v``."""
        return sum(self.weight(v, w) for w in iter_bits(self.graph.adjacency[v]))

    @property
    def total_weight(self) -> float:
        return sum(self.weights.values())

    def records(self) -> list[tuple[Hashable, Hashable, float]]:
        lab = self.graph.labels
        return [(lab[i], lab[j], w) for (i, j), w in sorted(self.weights.items(), key=lambda kv: (-kv[1], kv[0]))]

    def with_edges(self, keep: Iterable[tuple[int, int]]) -> "WeightedNetwork":
        """Same vertices, only the listed edges."""
        keep = sorted({(min(e), max(e)) for e in keep})
        lab = self.graph.labels
        return WeightedNetwork.from_records(
            [(lab[i], lab[j], self.weights[(i, j)]) for i, j in keep], vertices=lab
        )

    def internal_weight(self, members: Iterable[int]) -> float:
        ms = set(members)
        return sum(w for (i, j), w in self.weights.items() if i in ms and j in ms)


def load_dataset(path: str | Path) -> WeightedNetwork:
    path = Path(path)
    return _network_from_text(path.read_text(encoding="utf-8"), str(path))


def _network_from_text(text: str, source: str) -> WeightedNetwork:
    edges, weights = parse_edge_list(text, source)
    if len(weights) != len(edges):
        raise ValueError(f"{source}: every edge needs a weight")
    return WeightedNetwork.from_records((a, b, weights[(a, b)]) for a, b in edges)


def load_embedded_dataset() -> WeightedNetwork:
    """The 29-country, 69-edge network shipped with the package."""
    raw = resources.files("twincsp.data").joinpath(DATASET_FILE).read_bytes()
    if hashlib.sha256(raw).hexdigest() != DATASET_SHA256:
        raise DatasetError("embedded trade dataset failed its checksum")
    return _network_from_text(raw.decode("utf-8"), DATASET_FILE)


# -- clustering -----------------------------------------------------------------


@dataclass(frozen=True)
class ClusteringConfig:
    """Thresholds in thousands of USD.

    ``dissimilarity_scope`` restricts dissimilarity merging to countries of
    the main cluster obtained at that (coarser) trade threshold; ``None``
    admits every country outside the main cluster that is not a quotient
    leaf. ``dropped_edges`` names quotient edges (cluster pairs) to remove.
    """

    cluster_threshold: float = 75_000
    edge_min: float = 10_000
    vertex_min: float = 25_000
    dissimilarity_threshold: float | None = None
    dissimilarity_scope: float | None = None
    dropped_edges: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        for name in ("cluster_threshold", "edge_min", "vertex_min"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        d = self.dissimilarity_threshold
        if d is not None and not 0 <= d <= 2:
            raise ValueError("dissimilarity threshold must lie in [0, 2]")
        object.__setattr__(self, "dropped_edges", tuple(tuple(e) for e in self.dropped_edges))

    def to_dict(self) -> dict:
        return {
            "cluster_threshold": self.cluster_threshold,
            "edge_min": self.edge_min,
            "vertex_min": self.vertex_min,
            "dissimilarity_threshold": self.dissimilarity_threshold,
            "dissimilarity_scope": self.dissimilarity_scope,
            "dropped_edges": [list(e) for e in self.dropped_edges],
        }


def prefilter(raw: WeightedNetwork, cfg: ClusteringConfig) -> WeightedNetwork:
    """Drop weak edges and edges of low-volume countries, keeping every country attached.

    An edge survives if it reaches ``edge_min`` and both ends reach
    ``vertex_min`` in total trade. A country left without edges keeps its
    heaviest edge; if the result is still disconnected, each smaller
    component regains its heaviest edge to the rest until connected.
    """
    g = raw.graph
    strength = [raw.strength(v) for v in range(g.order)]
    keep = {
        e
        for e, w in raw.weights.items()
        if w >= cfg.edge_min and strength[e[0]] >= cfg.vertex_min and strength[e[1]] >= cfg.vertex_min
    }
    touched = {v for e in keep for v in e}
    for v in range(g.order):
        if v not in touched and g.adjacency[v]:
            keep.add(_heaviest(raw, [v]))
    while True:
        net = raw.with_edges(keep)
        comps = connected_components(net.graph)
        if len(comps) <= 1:
            return net
        comps.sort(key=lambda c: (-len(c), min(c)))
        for comp in comps[1:]:
            e = _heaviest(raw, comp)
            if e is None:
                raise ValueError("input network is disconnected")
            keep.add(e)


def _heaviest(net: WeightedNetwork, group: Iterable[int]) -> tuple[int, int] | None:
    inside = set(group)
    best = None
    for (i, j), w in net.weights.items():
        if (i in inside) != (j in inside):
            key = (w, -i, -j)
            if best is None or key > best[0]:
                best = (key, (i, j))
    return None if best is None else best[1]


def _partition_from_groups(net: WeightedNetwork, groups: Iterable[Iterable[int]]) -> PartitionedGraph:
    lab = net.graph.labels
    classes: list = [None] * net.graph.order
    for grp in groups:
        name = cluster_name(lab[v] for v in grp)
        for v in grp:
            classes[v] = name
    return PartitionedGraph(net.graph, tuple(classes))


def threshold_clusters(net: WeightedNetwork, cluster_threshold: float) -> PartitionedGraph:
    """Classes are the components of the network restricted to edges >= threshold."""
    strong = net.with_edges(e for e, w in net.weights.items() if w >= cluster_threshold)
    return _partition_from_groups(net, connected_components(strong.graph))


def class_groups(pg: PartitionedGraph) -> dict[Hashable, frozenset[int]]:
    return {c: pg.members(c) for c in pg.class_labels}


def main_cluster(net: WeightedNetwork, pg: PartitionedGraph) -> Hashable:
    """Largest class; ties go to the larger internal trade, then the name."""
    groups = class_groups(pg)
    return max(groups, key=lambda c: (len(groups[c]), net.internal_weight(groups[c]), str(c)))


def trade_fractions(net: WeightedNetwork) -> list[list[float]]:
    n = net.graph.order
    frac = [[0.0] * n for _ in range(n)]
    for v in range(n):
        total = net.strength(v)
        if total:
            for w in iter_bits(net.graph.adjacency[v]):
                frac[v][w] = net.weight(v, w) / total
    return frac


def dissimilarity(net: WeightedNetwork, i: int, j: int) -> float:
    """Sum over third countries of the difference in trade shares; lies in [0, 2]."""
    net.graph.check_vertex(i)
    net.graph.check_vertex(j)
    if i == j:
        raise ValueError("dissimilarity needs two distinct vertices")
    ti, tj = net.strength(i), net.strength(j)
    total = 0.0
    for k in range(net.graph.order):
        if k in (i, j):
            continue
        wi = net.weight(i, k) / ti if ti else 0.0
        wj = net.weight(j, k) / tj if tj else 0.0
        total += abs(wi - wj)
    return total


def dissimilarity_clusters(
    net: WeightedNetwork,
    base: PartitionedGraph,
    threshold: float,
    scope: Iterable[Hashable] | None = None,
) -> PartitionedGraph:
    """Merge candidate countries whose pairwise dissimilarities all stay below ``threshold``.

    Candidates are singleton classes outside the main cluster that are not
    leaves of the base quotient, further restricted to the names in
    ``scope`` when given. The closest remaining pair seeds a cluster, which
    then absorbs the candidate with the smallest worst-case dissimilarity to
    its members while every pair stays below the threshold. Ties are broken
    by name.
    """
    g = net.graph
    lab = g.labels
    groups = class_groups(base)
    main = main_cluster(net, base)
    q = quotient(base)
    leaf_classes = {q.label(v) for v in range(q.order) if q.degree(v) == 1}
    allowed = None if scope is None else set(scope)
    pool = sorted(
        (
            next(iter(members))
            for c, members in groups.items()
            if c != main and len(members) == 1 and c not in leaf_classes
        ),
        key=lambda v: lab[v],
    )
    if allowed is not None:
        pool = [v for v in pool if lab[v] in allowed]
    delta = {(a, b): dissimilarity(net, a, b) for a, b in combinations(pool, 2)}
    d = lambda a, b: delta[(a, b)] if (a, b) in delta else delta[(b, a)]  # noqa: E731
    remaining = list(pool)
    merged: list[list[int]] = []
    while True:
        pairs = [(d(a, b), lab[a], lab[b], a, b) for a, b in combinations(remaining, 2) if d(a, b) < threshold]
        if not pairs:
            break
        _, _, _, a, b = min(pairs)
        cluster = [a, b]
        remaining = [v for v in remaining if v not in cluster]
        while True:
            options = [(max(d(x, m) for m in cluster), lab[x], x) for x in remaining]
            options = [o for o in options if o[0] < threshold]
            if not options:
                break
            x = min(options)[2]
            cluster.append(x)
            remaining.remove(x)
        merged.append(cluster)
    taken = {v for c in merged for v in c}
    new_groups = [list(members) for members in groups.values() if not (set(members) & taken)] + merged
    return _partition_from_groups(net, new_groups)


def quotient_network(net: WeightedNetwork, pg: PartitionedGraph) -> WeightedNetwork:
    """Cluster-level network whose edge weights sum the inter-cluster trade."""
    labels = pg.class_labels
    records: dict[tuple[Hashable, Hashable], float] = {}
    pos = {c: i for i, c in enumerate(labels)}
    for (i, j), w in net.weights.items():
        a, b = pg.classes[i], pg.classes[j]
        if a == b:
            continue
        if pos[a] > pos[b]:
            a, b = b, a
        records[(a, b)] = records.get((a, b), 0) + w
    return WeightedNetwork.from_records(((a, b, w) for (a, b), w in records.items()), vertices=labels)


def intra_cluster_weights(net: WeightedNetwork, pg: PartitionedGraph) -> dict[Hashable, float]:
    return {c: net.internal_weight(m) for c, m in class_groups(pg).items()}


def drop_edges(net: WeightedNetwork, pairs: Iterable[tuple[Hashable, Hashable]]) -> tuple[WeightedNetwork, dict[tuple[Hashable, Hashable], float]]:
    """Remove named edges; returns the new network and the weight each removed edge carried."""
    removed: dict[tuple[Hashable, Hashable], float] = {}
    drop = set()
    for a, b in pairs:
        i, j = net.index(a), net.index(b)
        e = (min(i, j), max(i, j))
        if e not in net.weights:
            raise ValueError(f"no edge between {a!r} and {b!r}")
        drop.add(e)
        removed[(a, b)] = net.weights[e]
    return net.with_edges(e for e in net.weights if e not in drop), removed


# -- pipeline ----------------------------------------------------------------------


@dataclass
class PipelineReport:
    config: ClusteringConfig
    network: WeightedNetwork
    partition: PartitionedGraph
    quotient: WeightedNetwork
    stages: list[dict] = field(default_factory=list)
    dropped: dict = field(default_factory=dict)
    labeled: PartitionedGraph | None = None
    validation: csp.CspValidationReport | None = None
    structure: PartitionedGraph | None = None
    absorption: dict | None = None

    @property
    def ok(self) -> bool:
        return self.validation is not None and self.validation.is_csp_network

    def to_dict(self) -> dict:
        out: dict = {
            "config": self.config.to_dict(),
            "stages": self.stages,
            "dropped_edges": [[a, b, w] for (a, b), w in self.dropped.items()],
            "validation": None if self.validation is None else self.validation.to_dict(),
            "structure": None if self.structure is None else partitioned_to_dict(self.structure),
            "absorption": None if self.absorption is None else dict(sorted(self.absorption.items())),
        }
        return out


def partitioned_to_dict(pg: PartitionedGraph) -> dict:
    g = pg.graph
    return {
        "vertices": [{"name": g.label(v), "class": pg.classes[v]} for v in range(g.order)],
        "edges": [[g.label(i), g.label(j)] for i, j in g.edges()],
    }


def _stage(name: str, g: Graph, classes: dict | None = None) -> dict:
    return {"name": name, "vertices": g.order, "edges": g.size, "classes": classes}


def _classes_summary(pg: PartitionedGraph) -> dict:
    lab = pg.graph.labels
    return {str(c): sorted(lab[v] for v in m) for c, m in sorted(class_groups(pg).items(), key=lambda kv: str(kv[0]))}


def run_pipeline(
    cfg: ClusteringConfig,
    labels: Mapping[Hashable, str] | None = None,
    prefer: Sequence[Hashable] = (),
    network: WeightedNetwork | None = None,
) -> PipelineReport:
    """Prefilter, cluster, take the quotient, label, validate and reduce.

    Without ``labels`` the report stops at the quotient. A labelling that is
    not a CSP network is reported through ``validation`` rather than raised.
    """
    raw = load_embedded_dataset() if network is None else network
    net = prefilter(raw, cfg)
    stages = [_stage("raw", raw.graph), _stage("prefiltered", net.graph)]
    pg = threshold_clusters(net, cfg.cluster_threshold)
    stages.append(_stage("threshold_clusters", pg.graph, _classes_summary(pg)))
    if cfg.dissimilarity_threshold is not None:
        scope = None
        if cfg.dissimilarity_scope is not None:
            coarse = threshold_clusters(net, cfg.dissimilarity_scope)
            scope = net.graph.labels_of(coarse.members(main_cluster(net, coarse)))
        pg = dissimilarity_clusters(net, pg, cfg.dissimilarity_threshold, scope)
        stages.append(_stage("dissimilarity_clusters", pg.graph, _classes_summary(pg)))
    qnet = quotient_network(net, pg)
    stages.append(_stage("quotient", qnet.graph))
    dropped: dict = {}
    if cfg.dropped_edges:
        qnet, dropped = drop_edges(qnet, cfg.dropped_edges)
        stages.append(_stage("edge_drop", qnet.graph))
    report = PipelineReport(cfg, net, pg, qnet, stages, dropped)
    if labels is None:
        return report
    labeled = PartitionedGraph.from_mapping(qnet.graph, labels)
    report.labeled = labeled
    report.validation = csp.validate(labeled)
    stages.append(_stage("labeled", labeled.graph, _classes_summary(labeled)))
    if report.validation.is_csp_network:
        structure, absorption = csp.reduce(labeled, prefer)
        report.structure, report.absorption = structure, absorption
        stages.append(_stage("reduced", structure.graph, _classes_summary(structure)))
    return report


# -- packaged scenarios ------------------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    config: ClusteringConfig
    labels_file: str
    prefer: tuple[str, ...]

    def labels(self) -> dict[str, str]:
        text = resources.files("twincsp.data").joinpath("scenarios", self.labels_file).read_text(encoding="utf-8")
        return parse_partition(text, self.labels_file)

    def run(self, network: WeightedNetwork | None = None) -> PipelineReport:
        return run_pipeline(self.config, self.labels(), self.prefer, network)


_PREFER = ("Israel", "Pakistan", "South Africa")

SCENARIOS = {
    "fig5": Scenario("fig5", "trade threshold 75M", ClusteringConfig(75_000), "fig5.tsv", _PREFER),
    "fig6": Scenario("fig6", "trade threshold 125M", ClusteringConfig(125_000), "fig6.tsv", _PREFER),
    "fig7": Scenario(
        "fig7",
        "trade threshold 500M, dissimilarity below 1.0 within the 75M main cluster",
        ClusteringConfig(500_000, dissimilarity_threshold=1.0, dissimilarity_scope=75_000),
        "fig7.tsv",
        _PREFER,
    ),
    "fig8": Scenario(
        "fig8",
        "as fig7 with the Australasia-India quotient edge removed",
        ClusteringConfig(
            500_000,
            dissimilarity_threshold=1.0,
            dissimilarity_scope=75_000,
            dropped_edges=(("Australasia", "India"),),
        ),
        "fig8.tsv",
        ("Australasia",) + _PREFER,
    ),
}


def find_scenario(cfg: ClusteringConfig) -> Scenario | None:
    for sc in SCENARIOS.values():
        if sc.config == cfg:
            return sc
    return None


def scenario_label_path(name: str):
    return resources.files("twincsp.data").joinpath("scenarios", f"{name}.tsv")
