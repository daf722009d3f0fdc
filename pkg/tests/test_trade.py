import pytest

from twincsp import trade
from twincsp.csp import CspError, decompose, validate
from twincsp.graph import PartitionedGraph, canonical_form, distance, eccentricity, neighbors, quotient
from twincsp.trade import (
    AUSTRALASIA,
    EAST_ASIA,
    SCENARIOS,
    SOUTHEAST_ASIA,
    ClusteringConfig,
    WeightedNetwork,
    class_groups,
    dissimilarity,
    dissimilarity_clusters,
    drop_edges,
    load_embedded_dataset,
    main_cluster,
    parse_volume,
    prefilter,
    quotient_network,
    threshold_clusters,
)
from twincsp.twin import check_f_twin, false_twin_vertices

MAIN_75M = EAST_ASIA | SOUTHEAST_ASIA | AUSTRALASIA
CORE_ATTACHED_75M = {
    "Pakistan", "Bangladesh", "Egypt", "Jordan", "Kuwait",
    "Morocco", "Madagascar", "Seychelles", "Sri Lanka", "Fiji",
}


@pytest.fixture(scope="module")
def net():
    return prefilter(load_embedded_dataset(), ClusteringConfig())


@pytest.fixture(scope="module")
def reports():
    return {name: sc.run() for name, sc in SCENARIOS.items()}


def names(pg, members):
    return set(pg.graph.labels_of(members))


def structure_form(pg):
    return canonical_form(pg.graph, pg.classes)


class TestDataset:
    def test_size(self):
        raw = load_embedded_dataset()
        assert raw.graph.order == 29 and raw.graph.size == 69
        assert raw.total_weight == 8_053_437

    def test_oman_trades_only_with_india(self):
        raw = load_embedded_dataset()
        assert set(raw.graph.labels_of(neighbors(raw.graph, raw.index("Oman")))) == {"India"}
        assert raw.weight_between("India", "Oman") == 4151

    def test_checksum_guard(self, monkeypatch):
        monkeypatch.setattr(trade, "DATASET_SHA256", "0" * 64)
        with pytest.raises(trade.DatasetError):
            load_embedded_dataset()


class TestHelpers:
    def test_parse_volume(self):
        assert parse_volume("75M") == 75_000
        assert parse_volume("1.5B") == 1_500_000
        assert parse_volume("20366") == 20_366
        with pytest.raises(ValueError):
            parse_volume("-3M")
        with pytest.raises(ValueError):
            parse_volume("lots")

    def test_weights_required(self):
        with pytest.raises(ValueError):
            WeightedNetwork(trade.Graph([0b10, 0b01]), {})

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ClusteringConfig(dissimilarity_threshold=3.0)
        with pytest.raises(ValueError):
            ClusteringConfig(cluster_threshold=-1)

    def test_cluster_names(self):
        assert trade.cluster_name(EAST_ASIA) == "Core"
        assert trade.cluster_name(["Fiji"]) == "Fiji"
        assert trade.cluster_name(["b", "a"]) == "a+b"


class TestPrefilter:
    def test_embedded_network_is_fixpoint(self, net):
        assert net.graph.size == 69

    def test_weak_edges_dropped_but_vertices_kept(self):
        raw = WeightedNetwork.from_records(
            [("a", "b", 100_000), ("b", "c", 50_000), ("c", "d", 5_000), ("a", "c", 3_000)]
        )
        out = prefilter(raw, ClusteringConfig())
        edges = {frozenset(e[:2]) for e in out.records()}
        # c-d is weak but d would be isolated, a-c is weak and redundant
        assert edges == {frozenset("ab"), frozenset("bc"), frozenset("cd")}

    def test_components_reconnected(self):
        raw = WeightedNetwork.from_records(
            [("a", "b", 100_000), ("c", "d", 100_000), ("b", "c", 2_000), ("a", "d", 1_000)]
        )
        out = prefilter(raw, ClusteringConfig())
        edges = {frozenset(e[:2]) for e in out.records()}
        assert frozenset("bc") in edges and frozenset("ad") not in edges


class TestScenarioA:
    def test_main_cluster(self, net):
        pg = threshold_clusters(net, 75_000)
        main = main_cluster(net, pg)
        assert names(pg, pg.members(main)) == MAIN_75M
        internal = net.internal_weight(pg.members(main))
        assert internal > 7_700_000 and internal > 0.95 * net.total_weight

    def test_quotient_shape(self, reports):
        q = reports["fig5"].quotient.graph
        assert q.order == 19 and q.size == 18
        semis = {"Algeria", "South Africa", "India"}
        attached = {s: {q.label(w) for w in neighbors(q, q.index(s)) if q.degree(w) == 1} for s in semis}
        assert attached == {"Algeria": {"Tunisia"}, "South Africa": {"Israel", "Mauritius", "Reunion"}, "India": {"Oman"}}
        core_leaves = {q.label(w) for w in neighbors(q, q.index("Core")) if q.degree(w) == 1}
        assert core_leaves == CORE_ATTACHED_75M
        assert max(distance(q, q.index("Core"), v) for v in range(q.order)) == 2

    def test_false_twin_classes(self, reports):
        q = reports["fig5"].quotient.graph
        classes = [{q.label(next(iter(m))) for m in c.members} for c in false_twin_vertices(q)]
        assert sorted(classes, key=len) == [{"Israel", "Mauritius", "Reunion"}, CORE_ATTACHED_75M]

    def test_reduced_structure(self, reports):
        r = reports["fig5"]
        s = r.structure
        assert set(s.graph.labels) == {"Core", "Pakistan", "South Africa", "Israel"}
        from twincsp.csp import compose
        from twincsp.graph import complete_graph

        expected = compose(complete_graph(0), complete_graph(1), 1)
        assert structure_form(s) == structure_form(expected)
        assert r.absorption["Algeria"] == "South Africa" and r.absorption["Oman"] == "Israel"


class TestScenarioB:
    def test_australasia_separates(self, reports):
        r = reports["fig6"]
        groups = {c: names(r.partition, m) for c, m in class_groups(r.partition).items()}
        assert groups["Australasia"] == {"Australia", "New Zealand"}
        assert groups["Core"] == EAST_ASIA | SOUTHEAST_ASIA

    def test_australasia_eccentricity(self, reports):
        q = reports["fig6"].quotient.graph
        a = q.index("Australasia")
        assert eccentricity(q, a) == 3
        assert distance(q, a, q.index("Israel")) == 3

    def test_australasia_as_core_rejected(self, reports):
        r = reports["fig6"]
        mapping = dict(r.labeled.mapping())
        mapping["Australasia"] = "core"
        report = validate(PartitionedGraph.from_mapping(r.quotient.graph, mapping))
        assert not report.is_csp_network
        assert ("Australasia", "core eccentricity exceeds two") in report.violations

    def test_structure(self, reports):
        s = reports["fig6"].structure
        assert s.graph.order == 8
        assert set(s.graph.labels) == {"Core", "Pakistan", "South Africa", "Israel", "Australasia", "Fiji", "India", "Oman"}
        d = decompose(s)
        assert (d.n0, d.n1, d.ns, d.np) == (1, 0, 3, 4)


class TestScenarioC:
    def test_east_asia_core(self, reports, net):
        r = reports["fig7"]
        groups = {c: names(r.partition, m) for c, m in class_groups(r.partition).items()}
        assert groups["Core"] == EAST_ASIA
        assert net.internal_weight(r.partition.members("Core")) >= 4_600_000

    def test_southeast_asia_cluster(self, reports, net):
        r = reports["fig7"]
        members = r.partition.members("Southeast Asia")
        assert names(r.partition, members) == SOUTHEAST_ASIA
        assert net.internal_weight(members) == 585_591

    def test_dissimilarities(self, net):
        i = net.index
        assert dissimilarity(net, i("Australia"), i("New Zealand")) == pytest.approx(0.59, abs=0.03)
        assert dissimilarity(net, i("Malaysia"), i("Singapore")) == pytest.approx(0.33, abs=0.05)
        assert dissimilarity(net, i("Singapore"), i("Philippines")) == pytest.approx(0.95, abs=0.05)

    def test_dissimilarity_range_and_symmetry(self, net):
        n = net.graph.order
        for a in range(n):
            for b in range(a + 1, n):
                d = dissimilarity(net, a, b)
                assert 0 <= d <= 2 + 1e-12
                assert d == pytest.approx(dissimilarity(net, b, a))
        with pytest.raises(ValueError):
            dissimilarity(net, 0, 0)

    def test_unscoped_candidates_absorb_india(self, net):
        base = threshold_clusters(net, 500_000)
        pg = dissimilarity_clusters(net, base, 1.0)
        merged = [names(pg, m) for m in class_groups(pg).values() if len(m) > 1]
        assert SOUTHEAST_ASIA not in merged
        assert any("India" in m for m in merged)

    def test_structure(self, reports):
        s = reports["fig7"].structure
        assert set(s.graph.labels) == {
            "Core", "Pakistan", "South Africa", "Israel", "India", "Oman",
            "Australasia", "Fiji", "Southeast Asia", "Sri Lanka",
        }
        d = decompose(s)
        assert (d.n0, d.ns, d.np, s.graph.order) == (1, 4, 5, 10)
        assert s.graph.labels[next(iter(d.c0))] == "Core"


class TestScenarioD:
    def test_dropped_edge_weight(self, reports):
        assert reports["fig8"].dropped == {("Australasia", "India"): 20_366}

    def test_twin_pair_detected(self, reports):
        lab = reports["fig8"].labeled
        g = lab.graph
        a = [g.index("Australasia"), g.index("Fiji")]
        b = [g.index("India"), g.index("Oman")]
        w = check_f_twin(g, a, b, partition=lab.classes)
        assert w is not None
        assert w.phi == {g.index("Australasia"): g.index("India"), g.index("Fiji"): g.index("Oman")}
        # the pair is not twin before the edge is dropped
        lab7 = reports["fig7"].labeled
        g7 = lab7.graph
        a7 = [g7.index("Australasia"), g7.index("Fiji")]
        b7 = [g7.index("India"), g7.index("Oman")]
        assert check_f_twin(g7, a7, b7, partition=lab7.classes) is None

    def test_structure(self, reports):
        r = reports["fig8"]
        assert set(r.structure.graph.labels) == {
            "Core", "Pakistan", "South Africa", "Israel", "Southeast Asia", "Sri Lanka", "Australasia", "Fiji",
        }
        assert r.absorption["India"] == "Australasia" and r.absorption["Oman"] == "Fiji"


class TestPipeline:
    def test_report_schema(self, reports):
        doc = reports["fig7"].to_dict()
        assert [s["name"] for s in doc["stages"]] == [
            "raw", "prefiltered", "threshold_clusters", "dissimilarity_clusters", "quotient", "labeled", "reduced",
        ]
        for stage in doc["stages"]:
            assert set(stage) == {"name", "vertices", "edges", "classes"}
        assert len(doc["structure"]["vertices"]) == 10

    def test_without_labels(self):
        r = trade.run_pipeline(ClusteringConfig())
        assert r.structure is None and r.validation is None and r.quotient.graph.order == 19

    def test_bad_labelling_reported(self, reports):
        r = reports["fig5"]
        mapping = dict(r.labeled.mapping())
        mapping["Israel"] = "semiperiphery"
        out = trade.run_pipeline(ClusteringConfig(), mapping)
        assert not out.ok and out.structure is None
        assert out.validation.violations

    def test_missing_label(self):
        with pytest.raises(ValueError):
            trade.run_pipeline(ClusteringConfig(), {"Core": "core"})

    def test_drop_unknown_edge(self, reports):
        with pytest.raises(ValueError):
            drop_edges(reports["fig5"].quotient, [("Israel", "Oman")])

    def test_quotient_weights_conserve_trade(self, net, reports):
        r = reports["fig7"]
        q = quotient_network(net, r.partition)
        internal = sum(trade.intra_cluster_weights(net, r.partition).values())
        assert q.total_weight + internal == net.total_weight
        assert q.graph == quotient(r.partition)

    def test_scenario_labels_cover_quotients(self, reports):
        for name, r in reports.items():
            assert set(SCENARIOS[name].labels()) == set(r.quotient.graph.labels)

    def test_find_scenario(self):
        assert trade.find_scenario(ClusteringConfig(125_000)).name == "fig6"
        assert trade.find_scenario(ClusteringConfig(90_000)) is None

    def test_reduce_error_type(self):
        assert issubclass(CspError, ValueError)


class TestSpecifiedBehaviour:
    def test_literal_rows(self):
        raw = load_embedded_dataset()
        assert raw.weight_between("China", "Hong Kong") == 1_482_824
        assert raw.weight_between("Japan", "Madagascar") == 2_042
        assert raw.total_weight > 8_000_000

    def test_star_leaf_keeps_weak_edge(self):
        raw = WeightedNetwork.from_records(
            [("hub", "a", 200_000), ("hub", "b", 200_000), ("a", "b", 90_000), ("hub", "leaf", 5_000)]
        )
        out = prefilter(raw, ClusteringConfig())
        assert out.weight_between("hub", "leaf") == 5_000

    def test_weak_edge_between_strong_countries_removed(self):
        raw = WeightedNetwork.from_records(
            [("a", "x", 200_000), ("b", "y", 200_000), ("x", "y", 200_000), ("a", "b", 9_000)]
        )
        out = prefilter(raw, ClusteringConfig())
        assert not out.graph.has_edge(out.index("a"), out.index("b"))

    def test_threshold_refinement(self, net):
        levels = [10_000, 50_000, 75_000, 125_000, 300_000, 500_000, 1_000_000]
        parts = [class_groups(threshold_clusters(net, t)).values() for t in levels]
        for low, high in zip(parts, parts[1:]):
            for cls in high:
                assert any(cls <= other for other in low)

    def test_delta_two_iff_no_shared_contact(self, net):
        g = net.graph
        for a in range(g.order):
            for b in range(a + 1, g.order):
                apart = not g.has_edge(a, b) and not (neighbors(g, a) & neighbors(g, b))
                assert (dissimilarity(net, a, b) == pytest.approx(2.0)) == apart

    def test_identical_profiles_have_zero_delta(self):
        n = WeightedNetwork.from_records([("a", "x", 10), ("a", "y", 30), ("b", "x", 20), ("b", "y", 60)])
        assert dissimilarity(n, n.index("a"), n.index("b")) == pytest.approx(0.0)

    def test_zero_threshold_merges_nothing(self, net):
        base = threshold_clusters(net, 500_000)
        assert dissimilarity_clusters(net, base, 0.0).k == base.k

    def test_main_cluster_never_extended(self, net):
        base = threshold_clusters(net, 75_000)
        pg = dissimilarity_clusters(net, base, 1.0)
        main = main_cluster(net, pg)
        assert names(pg, pg.members(main)) == MAIN_75M

    def test_small_structures_in_census(self, reports):
        from twincsp.enumeration import enumerate_csp_structures

        s = reports["fig5"].structure
        assert validate(s).is_csp_structure
        assert structure_form(s) in enumerate_csp_structures(4)
        for r in reports.values():
            assert validate(r.structure).is_csp_structure
