"""Command line interface: ``twincsp <command> ...``.

Exit codes: 0 on success, 1 when a validation fails (the report is still
written), 2 on usage or input errors. JSON output uses sorted keys, so a
fixed input always produces identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from itertools import combinations
from pathlib import Path
from typing import Sequence

from . import csp, enumeration, trade
from .graph import (
    Graph,
    PartitionedGraph,
    DEFAULT_CANONICAL_BOUND,
    bfs_distances,
    canonical_form,
    connected_components,
    is_connected,
    parse_graph_name,
)
from .io import FormatError, read_edge_list, read_partition, to_dot
from .twin import false_twin_vertices, has_true_twins, proper_twin_witness, true_twin_vertices, twin_classes

EMITS = ("json", "dot", "text")
MAX_Z_ORDER = 8


class UsageError(Exception):
    pass


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj, key=str):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in (v.values() if isinstance(v, dict) else v)):
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, dict) or (isinstance(v, list) and any(isinstance(x, (dict, list)) for x in v)):
                lines.append(f"{pad}-")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(f"{pad}{_scalar(obj)}")
    return "\n".join(line for line in lines if line)


def _scalar(v) -> str:
    if isinstance(v, (list, dict)) and not v:
        return "[]"
    if isinstance(v, list):
        return ", ".join(_scalar(x) for x in v)
    if isinstance(v, dict):
        return ", ".join(f"{k}={_scalar(x)}" for k, x in sorted(v.items(), key=lambda kv: str(kv[0])))
    if v is None:
        return "-"
    return str(v)


def _emit(out, emit: str, doc: dict, dot_obj=None, name: str = "G") -> None:
    if emit == "json":
        out.write(_dump_json(doc))
    elif emit == "dot":
        if dot_obj is None:
            raise UsageError("this command has no DOT output")
        out.write(to_dot(dot_obj, name))
    else:
        out.write(_text(doc) + "\n")


def _load_graph(path: str) -> Graph:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"cannot read {path}")
    g, _ = read_edge_list(p)
    return g


def _load_partition(path: str) -> dict[str, str]:
    p = _resolve_data_file(path)
    return read_partition(p)


def _resolve_data_file(path: str):
    """A readable file, falling back to the packaged scenario label files."""
    p = Path(path)
    if p.is_file():
        return p
    if p.suffix in ("", ".tsv"):
        packaged = trade.scenario_label_path(p.stem)
        if packaged.is_file():
            return packaged
    raise UsageError(f"cannot read {path}")


def _partitioned(g: Graph, mapping: dict[str, str]) -> PartitionedGraph:
    missing = [lab for lab in g.labels if lab not in mapping]
    if missing:
        raise UsageError(f"partition misses vertices {sorted(map(str, missing))}")
    extra = sorted(set(mapping) - set(map(str, g.labels)))
    if extra:
        raise UsageError(f"partition names unknown vertices {extra}")
    return PartitionedGraph.from_mapping(g, mapping)


# -- twins ------------------------------------------------------------------------


def cmd_twins(args, out) -> int:
    g = _load_graph(args.edges)
    classes = None
    if args.partition:
        classes = _partitioned(g, _load_partition(args.partition)).classes
    if args.pattern:
        try:
            patterns = [parse_graph_name(args.pattern)]
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        pattern_doc = args.pattern
    else:
        k = args.pattern_order
        if k < 1 or k > g.order:
            raise UsageError(f"pattern order must lie in 1..{g.order}")
        forms = {canonical_form(g.induced(c), max_order=max(k, 1)) for c in combinations(range(g.order), k)}
        patterns = [f.to_graph() for f in sorted(forms)]
        pattern_doc = {"order": k}
    found = []
    for pat in patterns:
        for tc in twin_classes(g, args.kind, pat, classes):
            if len(tc) > 1 or args.include_singletons:
                found.append([sorted(g.labels_of(m), key=str) for m in tc.members])
    found.sort()
    _emit(out, args.emit, {"kind": args.kind.upper(), "pattern": pattern_doc, "classes": found})
    return 0


# -- csp ----------------------------------------------------------------------------


def cmd_csp(args, out) -> int:
    g = _load_graph(args.edges)
    pg = _partitioned(g, _load_partition(args.partition))
    try:
        report = csp.validate(pg)
    except csp.CspError as exc:
        raise UsageError(str(exc)) from None
    doc: dict = {"validation": report.to_dict()}
    dot_obj = pg
    code = 0
    if args.action == "validate":
        code = 0 if report.is_csp_structure else 1
    elif args.action == "reduce":
        if report.is_csp_network:
            prefer = _split(args.prefer)
            reduced, absorption = csp.reduce(pg, prefer)
            doc["structure"] = trade.partitioned_to_dict(reduced)
            doc["absorption"] = absorption
            dot_obj = reduced
        else:
            code = 1
    else:
        if report.is_csp_structure:
            doc["decomposition"] = csp.decompose(pg).to_dict()
        else:
            code = 1
    _emit(out, args.emit, doc, dot_obj, args.action)
    return code


def _split(text: str | None) -> tuple[str, ...]:
    if not text:
        return ()
    return tuple(x.strip() for x in text.split(",") if x.strip())


# -- enumerate ---------------------------------------------------------------------


def cmd_enumerate(args, out) -> int:
    n, what = args.order, args.what
    if args.emit == "dot":
        raise UsageError("enumerate has no DOT output")
    doc: dict = {"order": n, "what": what}
    try:
        if what == "t":
            doc["counts"] = {"all_graphs": len(enumeration.enumerate_graphs(n)), "t": enumeration.count_t(n)}
        elif what == "s":
            doc["counts"] = {"s": enumeration.count_s(n)}
        elif what == "z":
            if n > MAX_Z_ORDER:
                raise ValueError(f"z_n is computed for orders up to {MAX_Z_ORDER}")
            if n < 3:
                doc["counts"] = {"x": 0, "y": 0, "z": 0}
            else:
                res = enumeration.csp_counts(n)
                doc.update({k: v for k, v in res.to_dict().items() if k != "order"})
        else:
            forms = enumeration.enumerate_csp_structures(n, brute_force=args.brute_force)
            doc["counts"] = {"csp": len(forms)}
            doc["method"] = "brute_force" if args.brute_force else "constructive"
            if args.witnesses:
                doc["witnesses"] = [_form_doc(f) for f in forms]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.witnesses and what in ("t", "s"):
        graphs = enumeration.census_graphs(n)
        if what == "t":
            keep = [g for g in graphs if not has_true_twins(g)]
        else:
            keep = [g for g in graphs if proper_twin_witness(g, "F") is None]
        doc["witnesses"] = [_form_doc(canonical_form(g)) for g in keep]
    _emit(out, args.emit, doc)
    return 0


def _form_doc(form) -> dict:
    g = form.to_graph()
    doc = {"order": form.order, "bits": form.bits, "edges": [list(e) for e in g.edges()]}
    if form.classes is not None:
        doc["classes"] = list(form.classes)
    return doc


# -- trade -------------------------------------------------------------------------


def _volume(text: str) -> float:
    try:
        return trade.parse_volume(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad trade volume {text!r}") from None


def _scope(text: str):
    if text.lower() == "none":
        return "none"
    return _volume(text)


_CONFIG_FLAGS = ("cluster_threshold", "dissimilarity", "dissimilarity_scope", "drop_edge", "edge_min", "vertex_min")


def _trade_config(args) -> trade.ClusteringConfig:
    if args.scenario:
        if any(getattr(args, f) is not None for f in _CONFIG_FLAGS):
            raise UsageError("--scenario cannot be combined with clustering options")
        return trade.SCENARIOS[args.scenario].config
    drops = []
    for item in args.drop_edge or ():
        parts = _split(item)
        if len(parts) != 2:
            raise UsageError(f"--drop-edge expects 'A,B', got {item!r}")
        drops.append(parts)
    scope = args.dissimilarity_scope
    if args.dissimilarity is not None and scope is None:
        scope = 75_000
    if scope == "none":
        scope = None
    defaults = trade.ClusteringConfig()
    try:
        return trade.ClusteringConfig(
            cluster_threshold=defaults.cluster_threshold if args.cluster_threshold is None else args.cluster_threshold,
            edge_min=defaults.edge_min if args.edge_min is None else args.edge_min,
            vertex_min=defaults.vertex_min if args.vertex_min is None else args.vertex_min,
            dissimilarity_threshold=args.dissimilarity,
            dissimilarity_scope=None if args.dissimilarity is None else scope,
            dropped_edges=tuple(drops),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_trade(args, out) -> int:
    cfg = _trade_config(args)
    network = None
    if args.edges:
        p = Path(args.edges)
        if not p.is_file():
            raise UsageError(f"cannot read {args.edges}")
        try:
            network = trade.load_dataset(p)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    scenario = trade.find_scenario(cfg) if network is None else None
    labels = None
    if args.labels:
        labels = _load_partition(args.labels)
    elif scenario is not None:
        labels = scenario.labels()
    if args.prefer is not None:
        prefer = _split(args.prefer)
    else:
        prefer = scenario.prefer if scenario is not None else ()
    try:
        report = trade.run_pipeline(cfg, labels, prefer, network)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"cannot apply configuration or labels: {exc}") from None
    doc = report.to_dict()
    if args.emit == "dot":
        dot_obj = report.structure or report.labeled or report.quotient.graph
        out.write(to_dot(dot_obj, "trade"))
    else:
        _emit(out, args.emit, doc)
    return 0 if labels is None or report.ok else 1


# -- graph info --------------------------------------------------------------------


def cmd_graph(args, out) -> int:
    g = _load_graph(args.edges)
    pg = _partitioned(g, _load_partition(args.partition)) if args.partition else None
    lab = g.labels
    doc: dict = {
        "order": g.order,
        "size": g.size,
        "connected": is_connected(g),
        "components": [sorted((lab[v] for v in c), key=str) for c in connected_components(g)],
        "degrees": {str(lab[v]): g.degree(v) for v in range(g.order)},
        "false_twins": [sorted((lab[next(iter(m))] for m in tc.members), key=str) for tc in false_twin_vertices(g)],
        "true_twins": [sorted((lab[next(iter(m))] for m in tc.members), key=str) for tc in true_twin_vertices(g)],
    }
    if doc["connected"] and g.order:
        doc["eccentricities"] = {str(lab[v]): max(bfs_distances(g, v)) for v in range(g.order)}
    if g.order <= DEFAULT_CANONICAL_BOUND:
        form = canonical_form(g, None if pg is None else pg.classes)
        doc["canonical_form"] = _form_doc(form)
    _emit(out, args.emit, doc, pg or g, "graph")
    return 0


# -- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twincsp", description="Twin subgraphs and core-semiperiphery-periphery structures.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("twins", help="twin classes of induced subgraphs")
    p.add_argument("edges", help="edge list file")
    p.add_argument("--kind", type=str.upper, choices=("F", "T"), required=True)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--pattern-order", type=int, help="all induced patterns with this many vertices")
    grp.add_argument("--pattern", help="a named pattern such as K2, P3, C6 or E2")
    p.add_argument("--partition", help="restrict to class-preserving witnesses")
    p.add_argument("--include-singletons", action="store_true")
    p.add_argument("--emit", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_twins)

    p = sub.add_parser("csp", help="validate, reduce or decompose a labelled network")
    p.add_argument("action", choices=("validate", "reduce", "decompose"))
    p.add_argument("edges", help="edge list file")
    p.add_argument("partition", help="vertex<TAB>class file (core, semiperiphery, periphery)")
    p.add_argument("--prefer", help="comma separated labels to keep as representatives")
    p.add_argument("--emit", choices=EMITS, default="json")
    p.set_defaults(func=cmd_csp)

    p = sub.add_parser("enumerate", help="graph census and CSP structure counts")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--what", choices=("t", "s", "z", "csp"), default="z")
    p.add_argument("--brute-force", action="store_true", help="validate every labelling of the census (csp only)")
    p.add_argument("--witnesses", action="store_true", help="list the canonical forms counted")
    p.add_argument("--emit", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("trade", help="cluster the trade network and reduce it to a CSP structure")
    p.add_argument("--scenario", choices=sorted(trade.SCENARIOS))
    p.add_argument("--cluster-threshold", type=_volume, help="e.g. 75M (thousand USD units otherwise)")
    p.add_argument("--dissimilarity", type=float)
    p.add_argument("--dissimilarity-scope", type=_scope, help="threshold defining the merge candidates, default 75M; 'none' disables")
    p.add_argument("--drop-edge", action="append", metavar="A,B")
    p.add_argument("--edge-min", type=_volume)
    p.add_argument("--vertex-min", type=_volume)
    p.add_argument("--labels", help="quotient vertex<TAB>class file; packaged scenario files are found by name")
    p.add_argument("--prefer", help="comma separated labels to keep as representatives")
    p.add_argument("--edges", help="weighted edge list replacing the embedded dataset")
    p.add_argument("--emit", choices=EMITS, default="json")
    p.set_defaults(func=cmd_trade)

    p = sub.add_parser("graph", help="graph utilities")
    gsub = p.add_subparsers(dest="graph_command", required=True)
    q = gsub.add_parser("info", help="basic invariants of an edge list")
    q.add_argument("edges")
    q.add_argument("--partition")
    q.add_argument("--emit", choices=EMITS, default="json")
    q.set_defaults(func=cmd_graph)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (UsageError, FormatError, OSError) as exc:
        print(f"twincsp: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
