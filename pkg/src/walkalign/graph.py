"""The merged, labeled, weighted graph walked by the random walker.

Projected ontology edges (weight 1.0) and seed-mapping bridge edges
(weight = mapping confidence) are merged into one immutable structure with
dense vertex indices. Construction is canonical: vertices are sorted
lexicographically and adjacency lists are sorted by (target IRI, label IRI),
so merging the same inputs in any order yields an identical graph.

Transition probabilities out of a vertex are its outgoing edge weights
normalized by their sum. Sampling maps one uniform draw through the inverse
CDF of that distribution; vertices with more than ``GUIDE_THRESHOLD``
outgoing edges get a precomputed guide table that accelerates the CDF lookup
while returning bit-identical results for identical draws.
"""

from __future__ import annotations

import sys
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .alignment import MappingSet, Relation
from .projection import OWL_EQUIVALENT_CLASS, RDFS_SUBCLASSOF, ProjectedEdge

GUIDE_THRESHOLD = 64


class EmptyFrontier(Exception):
    """Raised when a transition distribution is requested for a sink vertex."""

    def __init__(self, vertex: str):
        super().__init__(f"vertex has no outgoing edges: {vertex}")
        self.vertex = vertex


class OutEdge(NamedTuple):
    label: str
    target: str
    weight: float


class WeightedGraph:
    def __init__(self, weighted_edges: Iterable[tuple[str, str, str, float]], extra_vertices: Iterable[str] = ()):
        """Build from (source, label, target, weight) rows.

        Self-loops are dropped; duplicate (source, label, target) rows keep
        the maximum weight. ``extra_vertices`` become isolated vertices when
        they do not occur as an endpoint.
        """
        best: dict[tuple[str, str, str], float] = {}
        vertex_set: set[str] = set(extra_vertices)
        for source, label, target, weight in weighted_edges:
            if not 0 < weight <= 1:
                raise ValueError(f"edge weight must be in (0, 1]: {source} -{label}-> {target} = {weight}")
            vertex_set.add(source)
            vertex_set.add(target)
            if source == target:
                continue
            key = (source, sys.intern(label), target)
            old = best.get(key)
            if old is None or weight > old:
                best[key] = weight

        self.vertices: list[str] = sorted(vertex_set)
        self.index: dict[str, int] = {iri: i for i, iri in enumerate(self.vertices)}

        per_vertex: list[list[tuple[str, str, float]]] = [[] for _ in self.vertices]
        for (source, label, target), weight in best.items():
            per_vertex[self.index[source]].append((label, target, weight))

        self._labels: list[list[str]] = []
        self._targets: list[np.ndarray] = []
        self._weights: list[np.ndarray] = []
        self._cum: list[np.ndarray] = []
        self._guides: list[np.ndarray | None] = []
        self.edge_count = 0
        for edges in per_vertex:
            edges.sort(key=lambda e: (e[1], e[0]))  # (target IRI, label IRI)
            self.edge_count += len(edges)
            self._labels.append([label for label, _, _ in edges])
            self._targets.append(np.array([self.index[t] for _, t, _ in edges], dtype=np.int64))
            weights = np.array([w for _, _, w in edges], dtype=np.float64)
            self._weights.append(weights)
            cum = np.cumsum(weights)
            self._cum.append(cum)
            self._guides.append(self._build_guide(cum) if len(edges) > GUIDE_THRESHOLD else None)

    @staticmethod
    def _build_guide(cum: np.ndarray) -> np.ndarray:
        n = len(cum)
        total = cum[-1]
        cell_edges = (np.arange(n, dtype=np.float64) / n) * total
        return np.searchsorted(cum, cell_edges, side="right").astype(np.int64)

    # -- lookups ---------------------------------------------------------

    def __contains__(self, iri: str) -> bool:
        return iri in self.index

    def __len__(self) -> int:
        return len(self.vertices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self.vertices == other.vertices and all(
            self._labels[u] == other._labels[u]
            and np.array_equal(self._targets[u], other._targets[u])
            and np.array_equal(self._weights[u], other._weights[u])
            for u in range(len(self.vertices))
        )

    def out_degree(self, u: int) -> int:
        return len(self._labels[u])

    def out_edges(self, u: int) -> list[OutEdge]:
        labels, targets, weights = self._labels[u], self._targets[u], self._weights[u]
        return [
            OutEdge(labels[j], self.vertices[targets[j]], float(weights[j]))
            for j in range(len(labels))
        ]

    def edge_at(self, u: int, j: int) -> tuple[str, int]:
        """(label, target index) of the j-th outgoing edge of u."""
        return self._labels[u][j], int(self._targets[u][j])

    # -- transitions -----------------------------------------------------

    def transition_distribution(self, u: int | str) -> list[tuple[OutEdge, float]]:
        """Outgoing edges of u with their normalized transition probabilities."""
        if isinstance(u, str):
            u = self.index[u]
        weights = self._weights[u]
        if len(weights) == 0:
            raise EmptyFrontier(self.vertices[u])
        probs = weights / weights.sum()
        return list(zip(self.out_edges(u), probs.tolist()))

    def sample_step(self, u: int, uniform: float) -> int:
        """Map one uniform draw in [0, 1) to an outgoing-edge position of u.

        Inverse CDF over the adjacency order; the guide table fast path is
        draw-for-draw identical to the plain cumulative-sum search.
        """
        cum = self._cum[u]
        n = len(cum)
        if n == 0:
            raise EmptyFrontier(self.vertices[u])
        threshold = uniform * cum[-1]
        guide = self._guides[u]
        if guide is None:
            j = int(np.searchsorted(cum, threshold, side="right"))
            return min(j, n - 1)
        j = int(guide[min(int(uniform * n), n - 1)])
        while j > 0 and cum[j - 1] > threshold:
            j -= 1
        while j < n - 1 and cum[j] <= threshold:
            j += 1
        return j

    # -- serialization ---------------------------------------------------

    def dump_tsv(self, path) -> None:
        """Edge rows ``source \\t label \\t target \\t weight``; isolated
        vertices are kept as rows with empty label, target and weight."""
        in_degree = np.zeros(len(self.vertices), dtype=np.int64)
        for targets in self._targets:
            if len(targets):
                in_degree += np.bincount(targets, minlength=len(self.vertices))
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            for u, source in enumerate(self.vertices):
                if not self._labels[u] and in_degree[u] == 0:
                    handle.write(f"{source}\t\t\t\n")
                    continue
                for j, label in enumerate(self._labels[u]):
                    target = self.vertices[int(self._targets[u][j])]
                    handle.write(f"{source}\t{label}\t{target}\t{float(self._weights[u][j])!r}\n")

    @classmethod
    def load_tsv(cls, path) -> "WeightedGraph":
        rows = []
        extra = []
        with open(path, "r", encoding="utf-8") as handle:
            for line in handle:
                line = line.rstrip("\n")
                if not line:
                    continue
                source, label, target, weight = line.split("\t")
                if label == "" and target == "":
                    extra.append(source)
                else:
                    rows.append((source, label, target, float(weight)))
        return cls(rows, extra_vertices=extra)


def merge(
    projections: Sequence[Sequence[ProjectedEdge]],
    mappings: MappingSet | None = None,
) -> WeightedGraph:
    """Merge ontology projections and seed-mapping bridges into one graph.

    Equivalence mappings become a bidirectional pair of equivalence edges
    weighted by their confidence; subsumption mappings become one directed
    subclass edge. Mapping endpoints missing from every projection still
    become (isolated) vertices.
    """
    rows: list[tuple[str, str, str, float]] = []
    for edges in projections:
        rows.extend((e.source, e.label, e.target, e.weight) for e in edges)
    extra: list[str] = []
    if mappings is not None:
        for m in mappings:
            if m.relation is Relation.EQUIVALENCE:
                rows.append((m.source, OWL_EQUIVALENT_CLASS, m.target, m.confidence))
                rows.append((m.target, OWL_EQUIVALENT_CLASS, m.source, m.confidence))
            else:
                rows.append((m.source, RDFS_SUBCLASSOF, m.target, m.confidence))
            extra.append(m.source)
            extra.append(m.target)
    return WeightedGraph(rows, extra_vertices=extra)
