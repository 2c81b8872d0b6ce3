"""Estimator-style entry points for the embedding pipeline.

``SkipGramEmbedder`` wraps the trainer as a fit/transform vectorizer;
``AlignmentEmbedder`` runs the whole pipeline (projection, graph merge,
biased walks, document building, training) in ``fit`` and scores candidate
mappings afterwards. Both follow the scikit-learn parameter conventions, so
``get_params`` / ``set_params`` and ``clone`` work as usual.
"""

from __future__ import annotations

import os
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from . import alignment, corpus, graph, ntriples, projection, ranking, sgns, walker


class SkipGramEmbedder(BaseEstimator):
    """Skip-gram negative-sampling embeddings over tokenized sentences.

    ``fit`` expects an iterable of token lists; ``transform`` maps tokens to
    their learned vectors (zero rows for unseen tokens).
    """

    def __init__(
        self,
        dim=100,
        epochs=70,
        window=5,
        negatives=5,
        initial_lr=0.025,
        final_lr=1e-4,
        min_count=1,
        unigram_power=0.75,
        subsample=0.0,
        rng_seed=0,
        workers=1,
    ):
        self.dim = dim
        self.epochs = epochs
        self.window = window
        self.negatives = negatives
        self.initial_lr = initial_lr
        self.final_lr = final_lr
        self.min_count = min_count
        self.unigram_power = unigram_power
        self.subsample = subsample
        self.rng_seed = rng_seed
        self.workers = workers

    def _train_config(self) -> sgns.TrainConfig:
        return sgns.TrainConfig(
            dim=self.dim,
            epochs=self.epochs,
            window=self.window,
            negatives=self.negatives,
            initial_lr=self.initial_lr,
            final_lr=self.final_lr,
            min_count=self.min_count,
            unigram_power=self.unigram_power,
            subsample=self.subsample,
            rng_seed=self.rng_seed,
        )

    def fit(self, X, y=None):
        self.embedding_ = sgns.train(list(X), self._train_config(), workers=self.workers)
        return self

    def transform(self, X) -> np.ndarray:
        table = self.embedding_
        out = np.zeros((len(X), table.dim))
        for i, token in enumerate(X):
            if token in table:
                out[i] = table.vector(token)
        return out

    def get_vector(self, token: str) -> np.ndarray:
        return self.embedding_.vector(token)


def _as_triples(item) -> list[ntriples.Triple]:
    if isinstance(item, (str, os.PathLike)):
        return ntriples.parse_file(item)
    return list(item)


def _as_mapping_set(mappings) -> alignment.MappingSet:
    if mappings is None:
        return alignment.MappingSet()
    if isinstance(mappings, alignment.MappingSet):
        return mappings
    if isinstance(mappings, (str, os.PathLike)):
        return alignment.load_mappings(mappings)
    return alignment.MappingSet(mappings)


class AlignmentEmbedder(BaseEstimator):
    """End-to-end alignment-tailored embeddings over two or more ontologies.

    ``fit(X, mappings=...)`` takes ontology sources (``.nt`` paths or triple
    iterables) plus optional seed mappings. With mappings, walks start from
    the mapped entities over the bridged graph; without, every vertex seeds
    walks over the disconnected union.
    """

    def __init__(
        self,
        walk_depth=3,
        iterations=1,
        replace_prob=0.5,
        inverse_subclass=True,
        annotation_props=None,
        label_choice="primary",
        dim=100,
        epochs=70,
        window=5,
        negatives=5,
        initial_lr=0.025,
        final_lr=1e-4,
        min_count=1,
        unigram_power=0.75,
        subsample=0.0,
        rng_seed=0,
        workers=1,
    ):
        self.walk_depth = walk_depth
        self.iterations = iterations
        self.replace_prob = replace_prob
        self.inverse_subclass = inverse_subclass
        self.annotation_props = annotation_props
        self.label_choice = label_choice
        self.dim = dim
        self.epochs = epochs
        self.window = window
        self.negatives = negatives
        self.initial_lr = initial_lr
        self.final_lr = final_lr
        self.min_count = min_count
        self.unigram_power = unigram_power
        self.subsample = subsample
        self.rng_seed = rng_seed
        self.workers = workers

    def fit(self, X, y=None, mappings=None):
        mapping_set = _as_mapping_set(mappings)
        annotation_props = (
            list(self.annotation_props)
            if self.annotation_props is not None
            else list(projection.DEFAULT_ANNOTATION_PROPS)
        )

        lexicon = projection.LexicalTable()
        edge_lists = []
        for item in X:
            result = projection.project(
                _as_triples(item),
                annotation_props,
                inverse_subclass=self.inverse_subclass,
            )
            edge_lists.append(result.edges)
            lexicon.merge(result.lexicon)

        merged = graph.merge(edge_lists, mapping_set)
        seeds = alignment.seed_entities(mapping_set) if len(mapping_set) else list(merged.vertices)
        cfg = walker.WalkConfig(self.walk_depth, self.iterations, self.rng_seed)
        walks = walker.generate_walks(merged, seeds, cfg, workers=self.workers)
        documents = corpus.build_documents(
            walks,
            lexicon,
            replace_prob=self.replace_prob,
            rng_seed=self.rng_seed,
            label_choice=self.label_choice,
        )
        train_cfg = sgns.TrainConfig(
            dim=self.dim,
            epochs=self.epochs,
            window=self.window,
            negatives=self.negatives,
            initial_lr=self.initial_lr,
            final_lr=self.final_lr,
            min_count=self.min_count,
            unigram_power=self.unigram_power,
            subsample=self.subsample,
            rng_seed=self.rng_seed,
        )
        self.lexicon_ = lexicon
        self.graph_ = merged
        self.n_walks_ = len(walks)
        self.embedding_ = sgns.train(documents.merged(), train_cfg, workers=self.workers)
        return self

    def transform(self, X) -> np.ndarray:
        """Entity vectors for an iterable of IRIs (zero rows when absent)."""
        entities = list(X)
        out = np.zeros((len(entities), self.embedding_.dim))
        for i, iri in enumerate(entities):
            vec = ranking.entity_vector(iri, self.embedding_, self.lexicon_)
            if vec is not None:
                out[i] = vec
        return out

    def score_pair(self, source: str, target: str) -> float:
        return ranking.score(source, target, self.embedding_, self.lexicon_)

    def predict(self, pools: Sequence[ranking.CandidatePool]) -> list[str]:
        """Top-ranked candidate for each pool."""
        return [
            ranking.rank_candidates(pool, self.embedding_, self.lexicon_)[0][0]
            for pool in pools
        ]

    def evaluate(self, pools: Sequence[ranking.CandidatePool]) -> ranking.RankingReport:
        return ranking.evaluate(pools, self.embedding_, self.lexicon_)

    def score(self, pools: Sequence[ranking.CandidatePool], y=None) -> float:
        """Mean reciprocal rank over the pools."""
        return self.evaluate(pools).mrr
