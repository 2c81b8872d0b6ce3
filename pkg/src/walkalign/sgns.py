"""Skip-gram with negative sampling, trained by plain SGD over the corpus.

For a center token c with input vector v_c, a positive context o and
negative samples n_1..n_K with output vectors u, one step minimizes

    loss = -log sigmoid(u_o . v_c) - sum_k log sigmoid(-u_{n_k} . v_c)

by a single simultaneous gradient update of v_c, u_o and the u_{n_k}
(all gradients evaluated at the pre-step parameters).

Training iterates epochs over the corpus in order. Every center occurrence
draws a window radius uniformly in [1, window], pairs the center with each
context inside it, and draws negatives from the unigram^power distribution,
re-drawing up to 16 times when a draw collides with the positive token.
The learning rate decays linearly from ``initial_lr`` to ``final_lr`` over
the total number of processed tokens. Input vectors start uniform in
[-0.5/dim, 0.5/dim), output vectors start at zero, and the published
embedding is the input-vector table.

Single-worker mode is strictly sequential and bit-reproducible. With
``workers > 1`` sentence shards are trained concurrently against the shared
parameter matrices without locking; lost updates are tolerated and parallel
training is not bit-reproducible.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .validation import require_int_at_least, require_positive, require_unit_interval

_MAX_NEGATIVE_ATTEMPTS = 16


class EmptyCorpus(ValueError):
    """No token survived vocabulary construction."""


@dataclass(frozen=True, slots=True)
class TrainConfig:
    dim: int = 100
    epochs: int = 70
    window: int = 5
    negatives: int = 5
    initial_lr: float = 0.025
    final_lr: float = 1e-4
    min_count: int = 1
    unigram_power: float = 0.75
    subsample: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        require_int_at_least("dim", self.dim, 1)
        require_int_at_least("epochs", self.epochs, 1)
        require_int_at_least("window", self.window, 1)
        require_int_at_least("negatives", self.negatives, 0)
        require_int_at_least("min_count", self.min_count, 1)
        require_positive("initial_lr", self.initial_lr)
        require_positive("final_lr", self.final_lr)
        if self.final_lr > self.initial_lr:
            raise ValueError("final_lr must not exceed initial_lr")
        if self.unigram_power < 0:
            raise ValueError("unigram_power must be >= 0")
        if self.subsample < 0:
            raise ValueError("subsample must be >= 0")
        require_int_at_least("rng_seed", self.rng_seed, 0)


class Vocabulary:
    """Token -> (index, count), ordered by descending count then token."""

    def __init__(self, tokens: Sequence[str], counts: Sequence[int]):
        self.tokens = list(tokens)
        self.counts = np.asarray(counts, dtype=np.int64)
        self.index = {token: i for i, token in enumerate(self.tokens)}

    @classmethod
    def from_corpus(cls, sentences: Iterable[Sequence[str]], min_count: int = 1) -> "Vocabulary":
        counter: Counter[str] = Counter()
        for sentence in sentences:
            counter.update(sentence)
        kept = [(t, c) for t, c in counter.items() if c >= min_count]
        if not kept:
            raise EmptyCorpus(f"no token occurs at least {min_count} time(s)")
        kept.sort(key=lambda tc: (-tc[1], tc[0]))
        return cls([t for t, _ in kept], [c for _, c in kept])

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index


class NegativeSampler:
    """Draws token indices with probability count^power / sum count^power."""

    def __init__(self, counts: np.ndarray, power: float = 0.75):
        scaled = np.asarray(counts, dtype=np.float64) ** power
        self.probabilities = scaled / scaled.sum()
        self._cum = np.cumsum(scaled)

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        thresholds = rng.random(n) * self._cum[-1]
        return np.minimum(
            np.searchsorted(self._cum, thresholds, side="right"), len(self._cum) - 1
        )


def negative_table(vocab: Vocabulary, power: float = 0.75) -> NegativeSampler:
    return NegativeSampler(vocab.counts, power)


class EmbeddingTable:
    """Input (published) and output (context) vectors for a vocabulary."""

    def __init__(self, tokens: Sequence[str], vectors: np.ndarray, context_vectors: np.ndarray):
        self.tokens = list(tokens)
        self.index = {token: i for i, token in enumerate(self.tokens)}
        self.vectors = vectors
        self.context_vectors = context_vectors
        self.epoch_losses: list[float] = []

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def vector(self, token: str) -> np.ndarray:
        return self.vectors[self.index[token]]

    def save_word2vec(self, path) -> None:
        """word2vec text format: ``<vocab> <dim>`` header, then one
        ``<token> <floats>`` line per token in vocabulary order, floats with
        6 significant digits."""
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(f"{len(self.tokens)} {self.dim}\n")
            for i, token in enumerate(self.tokens):
                row = " ".join(f"{x:.6g}" for x in self.vectors[i])
                handle.write(f"{token} {row}\n")

    @classmethod
    def load_word2vec(cls, path) -> "EmbeddingTable":
        with open(path, "r", encoding="utf-8") as handle:
            header = handle.readline().split()
            count, dim = int(header[0]), int(header[1])
            tokens = []
            vectors = np.empty((count, dim), dtype=np.float64)
            for i in range(count):
                parts = handle.readline().rstrip("\n").split(" ")
                tokens.append(parts[0])
                vectors[i] = [float(x) for x in parts[1 : dim + 1]]
        return cls(tokens, vectors, np.zeros_like(vectors))


def _log_sigmoid(x: np.ndarray) -> np.ndarray:
    # Stable: log sigmoid(x) = -log1p(exp(-|x|)) + min(x, 0)
    return np.minimum(x, 0.0) - np.log1p(np.exp(-np.abs(x)))


def pair_loss(center_vec: np.ndarray, ctx_matrix: np.ndarray, labels: np.ndarray) -> float:
    """Loss of one (center, positive, negatives) sample at given parameters."""
    scores = ctx_matrix @ center_vec
    signs = 2.0 * labels - 1.0
    return float(-_log_sigmoid(signs * scores).sum())


def pair_gradients(
    center_vec: np.ndarray, ctx_matrix: np.ndarray, labels: np.ndarray
) -> tuple[float, np.ndarray, np.ndarray]:
    """Loss plus analytic gradients w.r.t. the center vector and each row of
    the context matrix."""
    scores = ctx_matrix @ center_vec
    predictions = 1.0 / (1.0 + np.exp(-scores))
    residual = predictions - labels
    grad_center = residual @ ctx_matrix
    grad_ctx = np.outer(residual, center_vec)
    signs = 2.0 * labels - 1.0
    loss = float(-_log_sigmoid(signs * scores).sum())
    return loss, grad_center, grad_ctx


def sgns_step(
    table: EmbeddingTable,
    center: int,
    context: int,
    negatives: Sequence[int],
    lr: float,
) -> float:
    """One simultaneous SGD update for a (center, context, negatives) sample;
    returns the pre-update loss."""
    indices = np.empty(1 + len(negatives), dtype=np.int64)
    indices[0] = context
    indices[1:] = negatives
    labels = np.zeros(len(indices))
    labels[0] = 1.0

    ctx_matrix = table.context_vectors[indices]  # copy: gradients use old values
    center_vec = table.vectors[center]
    loss, grad_center, grad_ctx = pair_gradients(center_vec, ctx_matrix, labels)
    if len(set(indices.tolist())) == len(indices):
        table.context_vectors[indices] -= lr * grad_ctx
    else:
        np.subtract.at(table.context_vectors, indices, lr * grad_ctx)
    table.vectors[center] = center_vec - lr * grad_center
    return loss


def _draw_negatives(
    sampler: NegativeSampler, rng: np.random.Generator, count: int, positive: int
) -> np.ndarray:
    """Draw ``count`` negatives, re-drawing slots that hit the positive token
    (one vectorized first attempt, then per-slot sequential re-draws up to
    16 attempts total; exhausted slots are dropped)."""
    if count == 0:
        return np.empty(0, dtype=np.int64)
    draws = sampler.draw(rng, count)
    if positive not in draws:
        return draws
    kept = []
    for value in draws:
        attempts = 1
        while value == positive and attempts < _MAX_NEGATIVE_ATTEMPTS:
            value = sampler.draw(rng, 1)[0]
            attempts += 1
        if value != positive:
            kept.append(int(value))
    return np.array(kept, dtype=np.int64)


def _discard_probability(counts: np.ndarray, threshold: float) -> np.ndarray:
    frequency = counts / counts.sum()
    keep = np.sqrt(threshold / frequency) + threshold / frequency
    return np.clip(1.0 - keep, 0.0, 1.0)


def _train_span(
    table: EmbeddingTable,
    sentences: list[list[int]],
    cfg: TrainConfig,
    sampler: NegativeSampler,
    rng: np.random.Generator,
    discard: np.ndarray | None,
    lr_base: int,
    lr_total: int,
) -> tuple[float, int]:
    """Sequentially train over ``sentences``; returns (loss sum, pair count).

    ``lr_base`` is the number of tokens processed before this span within
    the whole schedule of ``lr_total`` tokens.
    """
    initial, final = cfg.initial_lr, cfg.final_lr
    span = initial - final
    window = cfg.window
    processed = lr_base
    loss_sum = 0.0
    pairs = 0
    for sentence in sentences:
        length = len(sentence)
        for pos in range(length):
            lr = max(final, initial - span * (processed / lr_total))
            processed += 1
            if discard is not None and rng.random() < discard[sentence[pos]]:
                continue
            center = sentence[pos]
            radius = int(rng.integers(1, window + 1))
            for ctx_pos in range(max(0, pos - radius), min(length, pos + radius + 1)):
                if ctx_pos == pos:
                    continue
                positive = sentence[ctx_pos]
                negatives = _draw_negatives(sampler, rng, cfg.negatives, positive)
                loss_sum += sgns_step(table, center, positive, negatives, lr)
                pairs += 1
    return loss_sum, pairs


def train(
    sentences: Sequence[Sequence[str]],
    cfg: TrainConfig = TrainConfig(),
    workers: int = 1,
) -> EmbeddingTable:
    """Train an embedding table over tokenized sentences."""
    require_int_at_least("workers", workers, 1)
    vocab = Vocabulary.from_corpus(sentences, cfg.min_count)
    encoded = []
    for sentence in sentences:
        ids = [vocab.index[t] for t in sentence if t in vocab.index]
        if ids:
            encoded.append(ids)

    sampler = negative_table(vocab, cfg.unigram_power)
    discard = _discard_probability(vocab.counts, cfg.subsample) if cfg.subsample > 0 else None

    seed_seq = np.random.SeedSequence(cfg.rng_seed)
    init_seq, *worker_seqs = seed_seq.spawn(workers + 1)
    init_rng = np.random.default_rng(init_seq)
    size = (len(vocab), cfg.dim)
    vectors = (init_rng.random(size) - 0.5) / cfg.dim
    table = EmbeddingTable(vocab.tokens, vectors, np.zeros(size))

    tokens_per_epoch = sum(len(s) for s in encoded)
    lr_total = cfg.epochs * tokens_per_epoch

    if workers == 1:
        rng = np.random.default_rng(worker_seqs[0])
        base = 0
        for _ in range(cfg.epochs):
            loss_sum, pairs = _train_span(table, encoded, cfg, sampler, rng, discard, base, lr_total)
            base += tokens_per_epoch
            table.epoch_losses.append(loss_sum / max(pairs, 1))
        return table

    shards = [encoded[i::workers] for i in range(workers)]
    rngs = [np.random.default_rng(seq) for seq in worker_seqs]
    base = 0
    for _ in range(cfg.epochs):
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(
                    lambda i: _train_span(
                        table, shards[i], cfg, sampler, rngs[i], discard, base, lr_total
                    ),
                    range(workers),
                )
            )
        base += tokens_per_epoch
        loss_sum = sum(r[0] for r in results)
        pairs = sum(r[1] for r in results)
        table.epoch_losses.append(loss_sum / max(pairs, 1))
    return table
