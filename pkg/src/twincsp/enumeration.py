"""Census of small graphs and counts of CSP structures.

``t_n`` counts graphs of order ``n`` without true-twin vertices and ``s_n``
those without proper F-twin subgraphs. CSP structures are counted from them
by the parity-split sums (``x_n``: no core carries a periphery), the
recursion for structures with such cores (``y_n``), and the closed sum over
the number of cores ``z_{n, n_c}``.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

from . import csp
from .graph import CanonicalForm, Graph, canonical_form, is_connected
from .twin import has_true_twins, proper_twin_witness

MAX_GRAPH_ORDER = 7
MAX_S_ORDER = 6
MAX_CSP_ORDER = 6
WORKERS_ENV = "TWINCSP_WORKERS"


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _extensions(form: CanonicalForm) -> set[CanonicalForm]:
    g = form.to_graph()
    n = g.order
    out = set()
    for nbrs in range(1 << n):
        adj = list(g.adjacency) + [nbrs]
        for v in range(n):
            if nbrs >> v & 1:
                adj[v] |= 1 << n
        out.add(canonical_form(Graph(adj), max_order=MAX_GRAPH_ORDER + 1))
    return out


@lru_cache(maxsize=None)
def _census(n: int) -> tuple[CanonicalForm, ...]:
    if n == 0:
        return (canonical_form(Graph([])),)
    parents = _census(n - 1)
    forms: set[CanonicalForm] = set()
    workers = _workers()
    if workers > 1 and len(parents) > 32:
        with ProcessPoolExecutor(workers) as pool:
            for part in pool.map(_extensions, parents, chunksize=8):
                forms |= part
    else:
        for p in parents:
            forms |= _extensions(p)
    return tuple(sorted(forms))


def enumerate_graphs(n: int, max_order: int = MAX_GRAPH_ORDER) -> list[CanonicalForm]:
    """All non-isomorphic simple graphs of order ``n``.

    Every graph of order ``n`` arises from one of order ``n - 1`` by adding a
    vertex, so each order is generated from the previous census with all
    neighbourhood choices for the new vertex and deduplicated by canonical
    form.
    """
    if n < 0 or n > max_order:
        raise ValueError(f"census order must lie in 0..{max_order}, got {n}")
    return list(_census(n))


def census_graphs(n: int, max_order: int = MAX_GRAPH_ORDER) -> list[Graph]:
    return [f.to_graph() for f in enumerate_graphs(n, max_order)]


def count_t(n: int, max_order: int = MAX_GRAPH_ORDER) -> int:
    """Number of graphs of order ``n`` without true-twin vertices."""
    return sum(not has_true_twins(g) for g in census_graphs(n, max_order))


@lru_cache(maxsize=None)
def _count_s(n: int) -> int:
    return sum(proper_twin_witness(g, "F") is None for g in census_graphs(n))


def count_s(n: int, max_order: int = MAX_S_ORDER) -> int:
    """Number of graphs of order ``n`` without proper F-twin subgraphs."""
    if n < 0 or n > max_order:
        raise ValueError(f"s_n is computed for orders 0..{max_order}, got {n}")
    return _count_s(n)


# -- counting formulas ------------------------------------------------------------


@dataclass
class CensusResult:
    n: int
    counts: dict[str, int]
    z_by_core: dict[int, int] = field(default_factory=dict)
    witnesses: list[CanonicalForm] | None = None

    def to_dict(self) -> dict:
        out: dict = {"order": self.n, "counts": dict(self.counts)}
        if self.z_by_core:
            out["z_by_core"] = {str(k): v for k, v in sorted(self.z_by_core.items())}
        if self.witnesses is not None:
            out["witnesses"] = [
                {"bits": w.bits, "classes": list(w.classes) if w.classes else None} for w in self.witnesses
            ]
        return out


class _Table:
    """``t_k`` / ``s_k`` lookup that computes missing entries within bounds."""

    def __init__(self, name: str, given: Mapping[int, int] | None, compute, bound: int):
        self.name = name
        self.values = dict(given or {})
        self.compute = compute
        self.bound = bound

    def __getitem__(self, k: int) -> int:
        if k == 0:
            # the null graph has no twins; needed when C1 is empty
            return self.values.get(0, 1)
        if k not in self.values:
            if self.compute is None or k > self.bound:
                raise ValueError(f"{self.name}_{k} is required but not available")
            self.values[k] = self.compute(k)
        return self.values[k]


def _tables(t, s):
    return (
        _Table("t", t, count_t, MAX_GRAPH_ORDER),
        _Table("s", s, count_s, MAX_S_ORDER),
    )


def x_count(n: int, t, s) -> int:
    """CSP structures of order ``n`` in which no core carries a periphery."""
    if n % 2:
        return sum(t[2 * k - 1] * s[(n + 1) // 2 - k] for k in range(1, (n - 1) // 2 + 1))
    return sum(t[2 * k] * s[n // 2 - k] for k in range(1, (n - 2) // 2 + 1))


def z_count(n: int, t, s) -> int:
    if n < 3:
        return 0
    return x_count(n, t, s) + y_count(n, t, s)


def y_count(n: int, t, s) -> int:
    """CSP structures of order ``n`` with at least one core carrying a periphery."""
    if n < 3:
        return 0
    y = z_count(n - 2, t, s)
    if n % 2 == 0:
        y += s[n // 2 - 1]
    return y


def z_by_cores(n: int, nc: int, t, s) -> int:
    """CSP structures of order ``n`` with exactly ``nc`` cores (``E`` read as floor)."""
    d = n - nc
    if d % 2:
        top = min((nc - 1) // 2, (d - 3) // 2)
        return sum(t[nc - 2 * k - 1] * s[(d - 1) // 2 - k] for k in range(0, top + 1))
    top = min(nc // 2, d // 2 - 1)
    return sum(t[nc - 2 * k] * s[d // 2 - k] for k in range(0, top + 1))


def csp_counts(n: int, t: Mapping[int, int] | None = None, s: Mapping[int, int] | None = None) -> CensusResult:
    """x_n, y_n, z_n and z_{n, n_c} for ``n >= 3``.

    ``t`` and ``s`` may supply the twin-free counts; missing entries are
    computed from the census when within bounds.
    """
    if n < 3:
        raise ValueError("CSP structures need order >= 3")
    tt, ss = _tables(t, s)
    x, y = x_count(n, tt, ss), y_count(n, tt, ss)
    by_core = {nc: z_by_cores(n, nc, tt, ss) for nc in range(1, n - 1)}
    return CensusResult(n, {"x": x, "y": y, "z": x + y}, by_core)


def census(n: int) -> CensusResult:
    """All census-backed counts available at order ``n``."""
    graphs = census_graphs(n)
    counts = {"all_graphs": len(graphs), "t": count_t(n)}
    if n <= MAX_S_ORDER:
        counts["s"] = count_s(n)
    by_core: dict[int, int] = {}
    if n >= 3:
        res = csp_counts(n)
        counts.update(res.counts)
        by_core = res.z_by_core
    return CensusResult(n, counts, by_core)


# -- CSP structure enumeration -----------------------------------------------------


def _labelings(g: Graph):
    """3-labellings of ``g`` that can possibly be CSP networks."""
    n = g.order
    adj = g.adjacency
    degree_one = [adj[v].bit_count() == 1 for v in range(n)]
    labels = [None] * n

    def rec(i):
        if i == n:
            if csp.CORE in labels and csp.SEMIPERIPHERY in labels and csp.PERIPHERY in labels:
                yield tuple(labels)
            return
        for c in csp.CSP_CLASSES:
            if c == csp.PERIPHERY and not degree_one[i]:
                continue
            labels[i] = c
            yield from rec(i + 1)
        labels[i] = None

    yield from rec(0)


def _brute_force_structures(n: int) -> set[CanonicalForm]:
    found = set()
    for g in census_graphs(n):
        if not is_connected(g):
            continue
        for classes in _labelings(g):
            pg = csp.PartitionedGraph(g, classes)
            if csp.validate(pg).is_csp_structure:
                found.add(canonical_form(g, classes))
    return found


def _constructive_structures(n: int) -> set[CanonicalForm]:
    found = set()
    for n0 in range(0, n):
        for ns in range(1, n):
            n1 = n - 2 * n0 - 2 * ns
            if n1 < 0 or n0 + n1 < 1:
                continue
            c1s = [Graph([])] if n1 == 0 else [g for g in census_graphs(n1) if not has_true_twins(g)]
            ss = [g for g in census_graphs(ns) if proper_twin_witness(g, "F") is None]
            for c1 in c1s:
                for s in ss:
                    pg = csp.compose(c1, s, n0)
                    found.add(canonical_form(pg.graph, pg.classes))
    return found


def enumerate_csp_structures(n: int, brute_force: bool = False, max_order: int = MAX_CSP_ORDER) -> list[CanonicalForm]:
    """Non-isomorphic CSP structures of order ``n`` as partitioned canonical forms.

    The default route composes every admissible ``(C1, S, n0)`` triple; the
    brute-force route validates every 3-labelling of every connected census
    graph.
    """
    if n < 0 or n > max_order:
        raise ValueError(f"CSP structures are enumerated for orders 0..{max_order}, got {n}")
    if n < 3:
        return []
    found = _brute_force_structures(n) if brute_force else _constructive_structures(n)
    return sorted(found)
