"""Confidence-biased random walks from seed entities.

Each walk starts at a seed entity and repeatedly samples an outgoing edge
with probability proportional to its weight, appending the edge IRI and then
the target IRI, until the vertex budget is reached or the frontier is empty.
One walk is produced per (iteration, seed) pair, iteration-major.

Reproducibility: the walk for iteration ``k`` and (present-)seed position
``s`` draws from its own splitmix64 stream seeded with
``derive(rng_seed, k, s)`` (see :mod:`walkalign.rng`), so output is
byte-identical for a fixed seed regardless of worker count.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph import WeightedGraph
from .rng import SplitMix64, derive
from .validation import require_int_at_least

log = logging.getLogger(__name__)

Walk = list[str]


@dataclass(frozen=True, slots=True)
class WalkConfig:
    walk_depth: int
    iterations: int = 1
    rng_seed: int = 0

    def __post_init__(self):
        require_int_at_least("walk_depth", self.walk_depth, 1)
        require_int_at_least("iterations", self.iterations, 1)
        require_int_at_least("rng_seed", self.rng_seed, 0)


def split_seeds(graph: WeightedGraph, seeds: Iterable[str]) -> tuple[list[str], list[str]]:
    """Partition seeds into (present in graph, missing from graph)."""
    present, missing = [], []
    for seed in seeds:
        (present if seed in graph else missing).append(seed)
    return present, missing


def _single_walk(graph: WeightedGraph, seed_index: int, cfg: WalkConfig, k: int, s: int) -> Walk:
    stream = SplitMix64(derive(cfg.rng_seed, k, s))
    tokens: Walk = [graph.vertices[seed_index]]
    focus = seed_index
    for _ in range(cfg.walk_depth - 1):
        if graph.out_degree(focus) == 0:
            break
        j = graph.sample_step(focus, stream.uniform())
        label, focus = graph.edge_at(focus, j)
        tokens.append(label)
        tokens.append(graph.vertices[focus])
    return tokens


def generate_walks(
    graph: WeightedGraph,
    seeds: Sequence[str],
    cfg: WalkConfig,
    workers: int = 1,
) -> list[Walk]:
    """One walk per (iteration, present seed), iteration-major.

    Seeds absent from the graph are skipped with a logged count. Token
    sequences alternate vertex IRI, edge IRI, vertex IRI, ...
    """
    present, missing = split_seeds(graph, seeds)
    if missing:
        log.warning("skipping %d seed(s) not present in the graph", len(missing))
    seed_indices = [graph.index[seed] for seed in present]
    units = [(k, s) for k in range(cfg.iterations) for s in range(len(seed_indices))]

    def run(unit: tuple[int, int]) -> Walk:
        k, s = unit
        return _single_walk(graph, seed_indices[s], cfg, k, s)

    if workers <= 1 or len(units) < 2:
        return [run(unit) for unit in units]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, units, chunksize=256))


def write_walks(walks: Iterable[Walk], path) -> None:
    """One walk per line, IRIs space-separated, LF-terminated."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for walk in walks:
            handle.write(" ".join(walk))
            handle.write("\n")


def read_walks(path) -> list[Walk]:
    walks = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if line:
                walks.append(line.split(" "))
    return walks
