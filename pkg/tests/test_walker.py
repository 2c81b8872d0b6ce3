import random
from collections import Counter

import pytest

from walkalign.graph import WeightedGraph
from walkalign.walker import WalkConfig, generate_walks, read_walks, split_seeds, write_walks

from conftest import FOODON_FRUCTOSE, FOODON_SUGAR, FRUCTOSE


def _random_graph(rng, n_vertices=8, n_edges=16):
    rows = []
    for _ in range(n_edges):
        rows.append(
            (
                f"http://x/v{rng.randrange(n_vertices)}",
                f"http://x/p{rng.randrange(3)}",
                f"http://x/v{rng.randrange(n_vertices)}",
                rng.uniform(0.05, 1.0),
            )
        )
    return WeightedGraph(rows)


def _edge_set(graph):
    edges = set()
    for u, source in enumerate(graph.vertices):
        for e in graph.out_edges(u):
            edges.add((source, e.label, e.target))
    return edges


class TestWalkConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            WalkConfig(walk_depth=0)
        with pytest.raises(ValueError):
            WalkConfig(walk_depth=2, iterations=0)
        WalkConfig(walk_depth=1, iterations=1, rng_seed=2**63)


class TestStructure:
    def test_walk_count_is_iterations_times_present_seeds(self):
        rng = random.Random(1)
        graph = _random_graph(rng)
        seeds = graph.vertices[:4] + ["http://x/not-there"]
        walks = generate_walks(graph, seeds, WalkConfig(walk_depth=3, iterations=5))
        assert len(walks) == 5 * 4

    def test_iteration_major_order(self):
        graph = WeightedGraph(
            [("http://x/a", "http://x/p", "http://x/b", 1.0)],
            extra_vertices=["http://x/c"],
        )
        walks = generate_walks(graph, ["http://x/a", "http://x/c"], WalkConfig(2, iterations=2))
        assert [w[0] for w in walks] == ["http://x/a", "http://x/c", "http://x/a", "http://x/c"]

    def test_seed_without_edges_yields_single_token_walk(self):
        graph = WeightedGraph([], extra_vertices=["http://x/alone"])
        walks = generate_walks(graph, ["http://x/alone"], WalkConfig(walk_depth=4))
        assert walks == [["http://x/alone"]]

    def test_empty_seed_set(self):
        rng = random.Random(2)
        graph = _random_graph(rng)
        assert generate_walks(graph, [], WalkConfig(3)) == []

    def test_structure_invariants_over_random_cases(self):
        # Token parity, seed start, edge validity, and count, over many
        # random graphs and configurations.
        rng = random.Random(99)
        for case in range(100):
            graph = _random_graph(rng, n_vertices=rng.randrange(3, 9), n_edges=rng.randrange(2, 20))
            edges = _edge_set(graph)
            seeds = [v for v in graph.vertices if rng.random() < 0.5]
            cfg = WalkConfig(
                walk_depth=rng.randrange(1, 7),
                iterations=rng.randrange(1, 4),
                rng_seed=case,
            )
            walks = generate_walks(graph, seeds, cfg)
            assert len(walks) == cfg.iterations * len(seeds)
            for index, walk in enumerate(walks):
                assert walk[0] == seeds[index % len(seeds)] if seeds else True
                assert len(walk) % 2 == 1
                vertices_visited = (len(walk) + 1) // 2
                assert 1 <= vertices_visited <= cfg.walk_depth
                for i in range(0, len(walk) - 2, 2):
                    assert (walk[i], walk[i + 1], walk[i + 2]) in edges

    def test_walk_depth_one_yields_seed_only(self):
        rng = random.Random(4)
        graph = _random_graph(rng)
        walks = generate_walks(graph, graph.vertices[:3], WalkConfig(walk_depth=1))
        assert all(len(w) == 1 for w in walks)


class TestDeterminism:
    def test_same_config_same_walks(self):
        rng = random.Random(5)
        graph = _random_graph(rng, 10, 30)
        cfg = WalkConfig(4, iterations=3, rng_seed=1234)
        first = generate_walks(graph, graph.vertices, cfg)
        second = generate_walks(graph, graph.vertices, cfg)
        assert first == second

    def test_worker_count_does_not_change_output(self):
        rng = random.Random(6)
        graph = _random_graph(rng, 12, 40)
        cfg = WalkConfig(5, iterations=4, rng_seed=77)
        serial = generate_walks(graph, graph.vertices, cfg, workers=1)
        for workers in (2, 3, 8):
            assert generate_walks(graph, graph.vertices, cfg, workers=workers) == serial

    def test_different_seed_changes_walks(self):
        rng = random.Random(7)
        graph = _random_graph(rng, 10, 40)
        a = generate_walks(graph, graph.vertices, WalkConfig(5, 5, rng_seed=1))
        b = generate_walks(graph, graph.vertices, WalkConfig(5, 5, rng_seed=2))
        assert a != b


class TestDistribution:
    def test_first_step_frequencies_follow_edge_weights(self, fragment_graph):
        graph, _ = fragment_graph
        n = 20_000
        walks = generate_walks(graph, [FRUCTOSE], WalkConfig(walk_depth=2, iterations=n, rng_seed=3))
        counts = Counter(w[2] for w in walks if len(w) == 3)
        expected = {edge.target: p for edge, p in graph.transition_distribution(FRUCTOSE)}
        for target, p in expected.items():
            assert abs(counts[target] / n - p) < 0.02

    def test_example_walk_reachable(self, fragment_graph):
        graph, _ = fragment_graph
        walks = generate_walks(graph, [FRUCTOSE], WalkConfig(walk_depth=3, iterations=500, rng_seed=11))
        target = [
            FRUCTOSE,
            "http://www.w3.org/2002/07/owl#equivalentClass",
            FOODON_FRUCTOSE,
            "http://www.w3.org/2000/01/rdf-schema#subClassOf",
            FOODON_SUGAR,
        ]
        assert target in walks


class TestIO:
    def test_walk_file_round_trip(self, tmp_path):
        rng = random.Random(8)
        graph = _random_graph(rng)
        walks = generate_walks(graph, graph.vertices, WalkConfig(3, 2, rng_seed=5))
        path = tmp_path / "walks.txt"
        write_walks(walks, path)
        assert read_walks(path) == walks
        content = path.read_bytes()
        assert not content.decode().count("\r")
        assert content.endswith(b"\n")

    def test_split_seeds(self, fragment_graph):
        graph, _ = fragment_graph
        present, missing = split_seeds(graph, [FRUCTOSE, "http://nope/x"])
        assert present == [FRUCTOSE]
        assert missing == ["http://nope/x"]
