"""Cosine scoring of candidate mappings and local-ranking metrics.

Each evaluation pool holds a source entity, its correct target, and a fixed
candidate list containing that target. Candidates are ranked by descending
cosine similarity of entity vectors (ties broken by ascending IRI); the
report aggregates mean reciprocal rank and Hits@K over the pools.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .corpus import DEFAULT_TOKENIZER, TokenizerConfig, lexicalize
from .projection import LexicalTable
from .sgns import EmbeddingTable

# Pairs with no usable vectors rank strictly below every real cosine.
ABSENT_SCORE = -2.0

DEFAULT_HITS_AT = (1, 5, 10, 20, 30)


class EmptyPool(ValueError):
    pass


@dataclass(frozen=True)
class CandidatePool:
    source: str
    true_target: str
    candidates: tuple[str, ...]

    def __post_init__(self):
        deduped = tuple(dict.fromkeys(self.candidates))
        object.__setattr__(self, "candidates", deduped)
        if not deduped:
            raise EmptyPool(f"pool for {self.source} has no candidates")
        if self.true_target not in deduped:
            raise ValueError(f"true target {self.true_target} missing from candidates of {self.source}")


def entity_vector(
    iri: str,
    embedding: EmbeddingTable,
    lexicon: LexicalTable,
    cfg: TokenizerConfig = DEFAULT_TOKENIZER,
) -> np.ndarray | None:
    """The IRI's own vector, else the mean of its in-vocabulary label-word
    vectors, else None."""
    if iri in embedding:
        return embedding.vector(iri)
    words = [w for w in lexicalize(iri, lexicon, cfg) if w in embedding]
    if not words:
        return None
    return np.mean([embedding.vector(w) for w in words], axis=0)


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return ABSENT_SCORE
    return float(np.dot(a, b) / (na * nb))


def score(
    source: str,
    target: str,
    embedding: EmbeddingTable,
    lexicon: LexicalTable,
    cfg: TokenizerConfig = DEFAULT_TOKENIZER,
) -> float:
    """Cosine similarity of the two entity vectors, or the absent sentinel."""
    sv = entity_vector(source, embedding, lexicon, cfg)
    tv = entity_vector(target, embedding, lexicon, cfg)
    if sv is None or tv is None:
        return ABSENT_SCORE
    return _cosine(sv, tv)


def rank_candidates(
    pool: CandidatePool,
    embedding: EmbeddingTable,
    lexicon: LexicalTable,
    cfg: TokenizerConfig = DEFAULT_TOKENIZER,
) -> list[tuple[str, float]]:
    """Candidates with scores, best first; ties broken by ascending IRI."""
    source_vec = entity_vector(pool.source, embedding, lexicon, cfg)
    scored = []
    for candidate in pool.candidates:
        if source_vec is None:
            value = ABSENT_SCORE
        else:
            cv = entity_vector(candidate, embedding, lexicon, cfg)
            value = ABSENT_SCORE if cv is None else _cosine(source_vec, cv)
        scored.append((candidate, value))
    scored.sort(key=lambda cs: (-cs[1], cs[0]))
    return scored


@dataclass
class RankingReport:
    mrr: float
    hits: dict[int, float]
    ranks: list[int] = field(default_factory=list)

    def render_table(self) -> str:
        ks = sorted(self.hits)
        header = "MRR" + "".join(f"\tHits@{k}" for k in ks)
        row = f"{self.mrr:.4f}" + "".join(f"\t{self.hits[k]:.4f}" for k in ks)
        return f"{header}\n{row}\n"

    def save_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(f"MRR\t{self.mrr!r}\n")
            for k in sorted(self.hits):
                handle.write(f"Hits@{k}\t{self.hits[k]!r}\n")


def evaluate(
    pools: Sequence[CandidatePool],
    embedding: EmbeddingTable,
    lexicon: LexicalTable,
    ks: Iterable[int] = DEFAULT_HITS_AT,
    cfg: TokenizerConfig = DEFAULT_TOKENIZER,
) -> RankingReport:
    """Rank every pool and aggregate MRR and Hits@K."""
    pools = list(pools)
    if not pools:
        raise EmptyPool("no pools to evaluate")
    ranks = []
    for pool in pools:
        if not pool.candidates:
            raise EmptyPool(f"pool for {pool.source} has no candidates")
        ordered = rank_candidates(pool, embedding, lexicon, cfg)
        position = next(i for i, (c, _) in enumerate(ordered) if c == pool.true_target)
        ranks.append(position + 1)
    mrr = sum(1.0 / r for r in ranks) / len(ranks)
    hits = {k: sum(1 for r in ranks if r <= k) / len(ranks) for k in ks}
    return RankingReport(mrr, hits, ranks)


def load_pools(path) -> list[CandidatePool]:
    """Candidate-pool TSV: ``SrcEntity \\t TgtEntity \\t TgtCandidates`` with
    a comma-separated candidate list; optional header row."""
    pools = []
    with open(path, "r", encoding="utf-8") as handle:
        for row, line in enumerate(handle, start=1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            cells = line.split("\t")
            if row == 1 and cells[0].strip() == "SrcEntity":
                continue
            if len(cells) < 3:
                raise ValueError(f"row {row}: expected source, target and candidate columns")
            candidates = tuple(c.strip() for c in cells[2].split(",") if c.strip())
            try:
                pools.append(CandidatePool(cells[0].strip(), cells[1].strip(), candidates))
            except ValueError as exc:
                raise ValueError(f"row {row}: {exc}") from None
    return pools


def save_pools(pools: Iterable[CandidatePool], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("SrcEntity\tTgtEntity\tTgtCandidates\n")
        for pool in pools:
            handle.write(f"{pool.source}\t{pool.true_target}\t{','.join(pool.candidates)}\n")


def save_ranked_candidates(
    pools: Sequence[CandidatePool],
    embedding: EmbeddingTable,
    lexicon: LexicalTable,
    path,
) -> None:
    """Per-pool ranked candidates: SrcEntity, TgtCandidate, Score, Rank."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("SrcEntity\tTgtCandidate\tScore\tRank\n")
        for pool in pools:
            for position, (candidate, value) in enumerate(rank_candidates(pool, embedding, lexicon), 1):
                handle.write(f"{pool.source}\t{candidate}\t{value!r}\t{position}\n")
