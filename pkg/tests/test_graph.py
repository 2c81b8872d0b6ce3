import random

import numpy as np
import pytest

from walkalign.alignment import Mapping, MappingSet, Relation
from walkalign.graph import EmptyFrontier, WeightedGraph, merge
from walkalign.projection import OWL_EQUIVALENT_CLASS, RDFS_SUBCLASSOF, ProjectedEdge

from conftest import FOODON_FRUCTOSE, FOODON_SUGAR, FRUCTOSE, SIMPLE_CARBS


def _graph(rows, extra=()):
    return WeightedGraph(rows, extra_vertices=extra)


class TestMerge:
    def test_fig_mapping_becomes_bidirectional_equivalence(self, fragment_graph):
        graph, _ = fragment_graph
        forward = [
            (e.label, e.weight)
            for e in graph.out_edges(graph.index[FRUCTOSE])
            if e.target == FOODON_FRUCTOSE
        ]
        backward = [
            (e.label, e.weight)
            for e in graph.out_edges(graph.index[FOODON_FRUCTOSE])
            if e.target == FRUCTOSE
        ]
        assert forward == [(OWL_EQUIVALENT_CLASS, 0.9)]
        assert backward == [(OWL_EQUIVALENT_CLASS, 0.9)]

    def test_no_mappings_graph_equals_projection(self):
        edges = [ProjectedEdge("http://x/a", "http://x/p", "http://x/b", 1.0)]
        assert merge([edges], None) == merge([edges], MappingSet())
        graph = merge([edges])
        assert graph.vertices == ["http://x/a", "http://x/b"]
        assert graph.edge_count == 1

    def test_duplicate_axiom_and_mapping_edge_keeps_max(self):
        edges = [ProjectedEdge("http://x/a", OWL_EQUIVALENT_CLASS, "http://x/b", 1.0)]
        mappings = MappingSet([Mapping("http://x/a", "http://x/b", Relation.EQUIVALENCE, 0.9)])
        graph = merge([edges], mappings)
        out = graph.out_edges(graph.index["http://x/a"])
        assert [(e.label, e.weight) for e in out] == [(OWL_EQUIVALENT_CLASS, 1.0)]

    def test_subsumption_mapping_stays_directed(self):
        mappings = MappingSet([Mapping("http://x/a", "http://x/b", Relation.SUBSUMPTION, 0.4)])
        graph = merge([[]], mappings)
        assert [(e.label, e.weight) for e in graph.out_edges(graph.index["http://x/a"])] == [
            (RDFS_SUBCLASSOF, 0.4)
        ]
        assert graph.out_degree(graph.index["http://x/b"]) == 0

    def test_isolated_mapping_endpoints_present(self):
        edges = [ProjectedEdge("http://x/a", "http://x/p", "http://x/b", 1.0)]
        mappings = MappingSet([Mapping("http://q/unseen", "http://q/also", Relation.EQUIVALENCE, 0.5)])
        graph = merge([edges], mappings)
        assert "http://q/unseen" in graph
        assert "http://q/also" in graph

    def test_self_loops_dropped(self):
        graph = _graph([("http://x/a", "http://x/p", "http://x/a", 1.0)])
        assert graph.out_degree(graph.index["http://x/a"]) == 0
        assert "http://x/a" in graph

    def test_merge_order_independent(self):
        rng = random.Random(3)
        rows = [
            ProjectedEdge(f"http://x/v{rng.randrange(9)}", f"http://x/p{rng.randrange(3)}", f"http://x/v{rng.randrange(9)}", 1.0)
            for _ in range(60)
        ]
        base = merge([rows])
        for _ in range(5):
            shuffled = rows[:]
            rng.shuffle(shuffled)
            halves = [shuffled[:30], shuffled[30:]]
            assert merge(halves) == base

    def test_weight_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            _graph([("http://x/a", "http://x/p", "http://x/b", 1.5)])
        with pytest.raises(ValueError):
            _graph([("http://x/a", "http://x/p", "http://x/b", 0.0)])


class TestTransitions:
    def test_axiom_and_mapping_mix_probabilities(self, fragment_graph):
        graph, _ = fragment_graph
        # Out of the mapped source entity: one axiom edge (1.0) and one
        # mapping edge (0.9); expected probabilities 1/1.9 and 0.9/1.9.
        dist = {edge.target: p for edge, p in graph.transition_distribution(FRUCTOSE)}
        assert dist[FOODON_FRUCTOSE] == pytest.approx(0.9 / 1.9, abs=1e-15)
        assert dist[SIMPLE_CARBS] == pytest.approx(1.0 / 1.9, abs=1e-15)
        assert abs(sum(dist.values()) - 1.0) < 1e-12

    def test_single_edge_probability_one(self):
        graph = _graph([("http://x/a", "http://x/p", "http://x/b", 0.2)])
        [(edge, p)] = graph.transition_distribution("http://x/a")
        assert p == 1.0
        assert edge.target == "http://x/b"

    def test_equal_weights_uniform(self):
        k = 7
        rows = [("http://x/a", "http://x/p", f"http://x/b{i}", 0.37) for i in range(k)]
        dist = _graph(rows).transition_distribution("http://x/a")
        for _, p in dist:
            assert p == pytest.approx(1.0 / k, abs=1e-15)

    def test_probabilities_sum_to_one_on_random_graphs(self):
        rng = random.Random(17)
        for _ in range(50):
            rows = [
                (f"http://x/v{rng.randrange(6)}", "http://x/p", f"http://x/v{rng.randrange(6)}", rng.uniform(0.01, 1.0))
                for _ in range(25)
            ]
            graph = _graph(rows)
            for u in range(len(graph)):
                if graph.out_degree(u) == 0:
                    continue
                total = sum(p for _, p in graph.transition_distribution(u))
                assert abs(total - 1.0) < 1e-12

    def test_scale_invariance(self):
        rng = random.Random(29)
        weights = [rng.uniform(0.05, 0.9) for _ in range(10)]
        rows = [("http://x/a", "http://x/p", f"http://x/b{i}", w) for i, w in enumerate(weights)]
        base = _graph(rows).transition_distribution("http://x/a")
        for lam in (0.5, 0.125, 1.0 / 3.0):
            scaled_rows = [(s, l, t, w * lam) for (s, l, t), w in zip([(r[0], r[1], r[2]) for r in rows], weights)]
            scaled = _graph(scaled_rows).transition_distribution("http://x/a")
            for (_, p0), (_, p1) in zip(base, scaled):
                assert abs(p0 - p1) < 1e-12

    def test_empty_frontier_raises(self):
        graph = _graph([("http://x/a", "http://x/p", "http://x/b", 1.0)])
        with pytest.raises(EmptyFrontier):
            graph.transition_distribution("http://x/b")

    def test_adjacency_sorted_by_target_then_label(self):
        rows = [
            ("http://x/a", "http://x/p2", "http://x/c", 0.5),
            ("http://x/a", "http://x/p1", "http://x/c", 0.5),
            ("http://x/a", "http://x/p9", "http://x/b", 0.5),
        ]
        out = _graph(rows).out_edges(0)
        assert [(e.target, e.label) for e in out] == [
            ("http://x/b", "http://x/p9"),
            ("http://x/c", "http://x/p1"),
            ("http://x/c", "http://x/p2"),
        ]


class TestSampling:
    def test_guide_table_matches_plain_inverse_cdf(self):
        rng = np.random.default_rng(41)
        degree = 150  # above the guide-table threshold
        weights = rng.uniform(0.001, 1.0, size=degree)
        rows = [("http://x/hub", "http://x/p", f"http://x/t{i:04d}", float(w)) for i, w in enumerate(weights)]
        graph = _graph(rows)
        hub = graph.index["http://x/hub"]
        cum = np.cumsum([e.weight for e in graph.out_edges(hub)])
        uniforms = np.concatenate(
            [
                rng.random(5000),
                np.linspace(0, 1, 1017, endpoint=False),
                (np.arange(degree) / degree),  # exact cell edges
            ]
        )
        for u in uniforms:
            expected = min(int(np.searchsorted(cum, u * cum[-1], side="right")), degree - 1)
            assert graph.sample_step(hub, float(u)) == expected

    def test_small_degree_sampling_matches_distribution(self):
        rows = [
            ("http://x/a", "http://x/p", "http://x/b", 0.2),
            ("http://x/a", "http://x/p", "http://x/c", 0.8),
        ]
        graph = _graph(rows)
        a = graph.index["http://x/a"]
        # adjacency sorted by target: b first (0.2), then c (0.8)
        assert graph.sample_step(a, 0.0) == 0
        assert graph.sample_step(a, 0.19) == 0
        assert graph.sample_step(a, 0.21) == 1
        assert graph.sample_step(a, 0.999999) == 1


class TestSerialization:
    def test_dump_load_round_trip(self, fragment_graph):
        graph, _ = fragment_graph
        import tempfile

        with tempfile.TemporaryDirectory() as tmp:
            path = f"{tmp}/graph.tsv"
            graph.dump_tsv(path)
            assert WeightedGraph.load_tsv(path) == graph

    def test_isolated_vertices_survive_round_trip(self, tmp_path):
        graph = _graph(
            [("http://x/a", "http://x/p", "http://x/b", 0.5)],
            extra=["http://x/alone"],
        )
        path = tmp_path / "g.tsv"
        graph.dump_tsv(path)
        loaded = WeightedGraph.load_tsv(path)
        assert loaded == graph
        assert "http://x/alone" in loaded
