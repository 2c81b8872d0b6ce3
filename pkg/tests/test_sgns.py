import math

import numpy as np
import pytest

from walkalign.sgns import (
    EmbeddingTable,
    EmptyCorpus,
    NegativeSampler,
    TrainConfig,
    Vocabulary,
    _draw_negatives,
    negative_table,
    pair_gradients,
    pair_loss,
    sgns_step,
    train,
)


class TestVocabulary:
    def test_counts_and_order(self):
        vocab = Vocabulary.from_corpus([["a", "a", "b"]], min_count=1)
        assert vocab.tokens == ["a", "b"]
        assert vocab.counts.tolist() == [2, 1]

    def test_min_count_filters(self):
        vocab = Vocabulary.from_corpus([["a", "a", "b"]], min_count=2)
        assert vocab.tokens == ["a"]

    def test_ties_break_lexicographically(self):
        vocab = Vocabulary.from_corpus([["b", "a", "a", "b"]], min_count=1)
        assert vocab.tokens == ["a", "b"]

    def test_empty_corpus_raises(self):
        with pytest.raises(EmptyCorpus):
            Vocabulary.from_corpus([], min_count=1)
        with pytest.raises(EmptyCorpus):
            Vocabulary.from_corpus([["a"]], min_count=2)


class TestNegativeTable:
    def test_closed_form_probabilities(self):
        sampler = NegativeSampler(np.array([8, 1]), power=0.75)
        denominator = 8**0.75 + 1
        assert sampler.probabilities[0] == pytest.approx(8**0.75 / denominator, abs=1e-12)
        assert sampler.probabilities[1] == pytest.approx(1 / denominator, abs=1e-12)
        assert sampler.probabilities[0] == pytest.approx(0.8262, abs=1e-4)

    def test_uniform_counts_give_uniform_probabilities(self):
        sampler = NegativeSampler(np.array([3, 3, 3, 3]), power=0.75)
        assert np.allclose(sampler.probabilities, 0.25)

    def test_power_zero_is_uniform(self):
        sampler = NegativeSampler(np.array([100, 1, 7]), power=0.0)
        assert np.allclose(sampler.probabilities, 1 / 3)

    def test_empirical_frequencies(self):
        counts = np.array([50, 10, 5, 1])
        sampler = negative_table(Vocabulary(["a", "b", "c", "d"], counts), power=0.75)
        rng = np.random.default_rng(0)
        draws = sampler.draw(rng, 200_000)
        freq = np.bincount(draws, minlength=4) / len(draws)
        assert np.max(np.abs(freq - sampler.probabilities)) < 0.005

    def test_excluding_positive_by_redraw(self):
        # Token 0 is drawn almost always; with it as the positive, slots
        # exhaust their redraw budget and get dropped rather than kept.
        sampler = NegativeSampler(np.array([10**9, 1]), power=1.0)
        rng = np.random.default_rng(1)
        for _ in range(50):
            negatives = _draw_negatives(sampler, rng, 5, positive=0)
            assert 0 not in negatives


def _zero_table(vocab_size=4, dim=3):
    return EmbeddingTable(
        [f"t{i}" for i in range(vocab_size)],
        np.zeros((vocab_size, dim)),
        np.zeros((vocab_size, dim)),
    )


class TestStep:
    def test_zero_init_positive_loss_is_log_two(self):
        table = _zero_table()
        loss = sgns_step(table, center=0, context=1, negatives=[], lr=0.01)
        assert loss == pytest.approx(-math.log(0.5), abs=1e-12)

    def test_zero_lr_leaves_parameters_unchanged(self):
        rng = np.random.default_rng(3)
        table = EmbeddingTable(["a", "b", "c"], rng.normal(size=(3, 4)), rng.normal(size=(3, 4)))
        before = (table.vectors.copy(), table.context_vectors.copy())
        sgns_step(table, 0, 1, [2, 2], lr=0.0)
        assert np.array_equal(table.vectors, before[0])
        assert np.array_equal(table.context_vectors, before[1])

    def test_update_direction_reduces_loss(self):
        rng = np.random.default_rng(4)
        table = EmbeddingTable(
            ["a", "b", "c", "d"], rng.normal(size=(4, 6)) * 0.1, rng.normal(size=(4, 6)) * 0.1
        )
        indices = np.array([1, 2, 3])
        labels = np.array([1.0, 0.0, 0.0])
        before = pair_loss(table.vectors[0], table.context_vectors[indices], labels)
        sgns_step(table, 0, 1, [2, 3], lr=0.05)
        after = pair_loss(table.vectors[0], table.context_vectors[indices], labels)
        assert after < before

    def test_duplicate_negatives_accumulate(self):
        # A negative drawn twice contributes its gradient twice.
        rng = np.random.default_rng(5)
        table_a = EmbeddingTable(["a", "b", "c"], rng.normal(size=(3, 4)), rng.normal(size=(3, 4)))
        table_b = EmbeddingTable(
            ["a", "b", "c"], table_a.vectors.copy(), table_a.context_vectors.copy()
        )
        sgns_step(table_a, 0, 1, [2, 2], lr=0.1)
        ctx = table_b.context_vectors
        scores = ctx[[1, 2, 2]] @ table_b.vectors[0]
        residual = 1.0 / (1.0 + np.exp(-scores)) - np.array([1.0, 0.0, 0.0])
        expected_c2 = ctx[2] - 0.1 * (residual[1] + residual[2]) * table_b.vectors[0]
        assert np.allclose(table_a.context_vectors[2], expected_c2, atol=1e-12)

    def test_gradients_match_finite_differences(self):
        # Central finite differences (h = 1e-4) on randomized small
        # instances; float64 throughout.
        rng = np.random.default_rng(6)
        h = 1e-4
        for _ in range(20):
            dim = int(rng.integers(2, 9))
            rows = int(rng.integers(1, 6))
            center = rng.normal(size=dim)
            ctx = rng.normal(size=(rows, dim))
            labels = np.zeros(rows)
            labels[0] = 1.0
            _, grad_center, grad_ctx = pair_gradients(center, ctx, labels)
            worst = 0.0
            for i in range(dim):
                bumped = center.copy()
                bumped[i] += h
                up = pair_loss(bumped, ctx, labels)
                bumped[i] -= 2 * h
                down = pair_loss(bumped, ctx, labels)
                numeric = (up - down) / (2 * h)
                scale = max(abs(numeric), abs(grad_center[i]), 1e-8)
                worst = max(worst, abs(numeric - grad_center[i]) / scale)
            for r in range(rows):
                for i in range(dim):
                    bumped = ctx.copy()
                    bumped[r, i] += h
                    up = pair_loss(center, bumped, labels)
                    bumped[r, i] -= 2 * h
                    down = pair_loss(center, bumped, labels)
                    numeric = (up - down) / (2 * h)
                    scale = max(abs(numeric), abs(grad_ctx[r, i]), 1e-8)
                    worst = max(worst, abs(numeric - grad_ctx[r, i]) / scale)
            assert worst < 1e-5


SEM_CORPUS = [["alpha", "beta"]] * 120 + [["gamma"]] * 120
SEM_CFG = TrainConfig(dim=16, epochs=25, window=2, negatives=4, rng_seed=7)


def _cosine(a, b):
    return float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))


class TestTrain:
    def test_co_occurring_tokens_end_up_closer(self):
        table = train(SEM_CORPUS, SEM_CFG)
        a, b, c = (table.vector(t) for t in ("alpha", "beta", "gamma"))
        assert _cosine(a, b) > _cosine(a, c)

    def test_epoch_loss_trend_non_increasing(self):
        table = train(SEM_CORPUS, SEM_CFG)
        losses = table.epoch_losses[:10]
        for previous, current in zip(losses, losses[1:]):
            assert current <= previous * 1.01

    def test_all_vectors_finite_and_bounded(self):
        table = train(SEM_CORPUS, SEM_CFG)
        assert np.all(np.isfinite(table.vectors))
        assert np.all(np.isfinite(table.context_vectors))
        assert np.max(np.abs(table.vectors)) < 1e3

    def test_deterministic_across_runs(self):
        first = train(SEM_CORPUS, SEM_CFG)
        second = train(SEM_CORPUS, SEM_CFG)
        assert np.array_equal(first.vectors, second.vectors)
        assert np.array_equal(first.context_vectors, second.context_vectors)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            TrainConfig(epochs=0)
        with pytest.raises(ValueError):
            TrainConfig(final_lr=0.5, initial_lr=0.1)
        with pytest.raises(ValueError):
            TrainConfig(dim=0)

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            train([], TrainConfig(dim=4, epochs=1))

    def test_min_count_drops_rare_tokens_from_sentences(self):
        corpus = [["a", "rare", "b"]] * 3 + [["a", "b"]] * 3
        table = train(corpus, TrainConfig(dim=4, epochs=2, min_count=4, rng_seed=0))
        assert "rare" not in table
        assert "a" in table

    def test_parallel_mode_trains_all_tokens(self):
        table = train(SEM_CORPUS, SEM_CFG, workers=3)
        assert np.all(np.isfinite(table.vectors))
        assert np.linalg.norm(table.vector("alpha")) > 0

    def test_subsampling_flag_smoke(self):
        cfg = TrainConfig(dim=8, epochs=3, subsample=1e-3, rng_seed=1)
        table = train(SEM_CORPUS, cfg)
        assert np.all(np.isfinite(table.vectors))

    def test_initial_vectors_within_init_range(self):
        cfg = TrainConfig(dim=50, epochs=1, initial_lr=1e-9, final_lr=1e-9, negatives=0, rng_seed=2)
        table = train([["x", "y"]], cfg)
        assert np.max(np.abs(table.vectors)) <= 0.5 / 50 + 1e-6


class TestWordvecFormat:
    def test_header_and_six_significant_digits(self, tmp_path):
        table = EmbeddingTable(["tok1", "tok2"], np.array([[0.123456789, 1e-7], [12345.6789, -0.5]]), np.zeros((2, 2)))
        path = tmp_path / "emb.txt"
        table.save_word2vec(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "2 2"
        assert lines[1] == "tok1 0.123457 1e-07"
        assert lines[2] == "tok2 12345.7 -0.5"

    def test_load_round_trip(self, tmp_path):
        table = train(SEM_CORPUS, TrainConfig(dim=5, epochs=2, rng_seed=3))
        path = tmp_path / "emb.txt"
        table.save_word2vec(path)
        loaded = EmbeddingTable.load_word2vec(path)
        assert loaded.tokens == table.tokens
        assert loaded.dim == 5
        assert np.allclose(loaded.vectors, table.vectors, atol=1e-4, rtol=1e-4)

    def test_save_is_byte_stable(self, tmp_path):
        table = train(SEM_CORPUS, TrainConfig(dim=5, epochs=2, rng_seed=3))
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        table.save_word2vec(p1)
        train(SEM_CORPUS, TrainConfig(dim=5, epochs=2, rng_seed=3)).save_word2vec(p2)
        assert p1.read_bytes() == p2.read_bytes()
