"""walkalign: alignment-tailored ontology embeddings.

Ontologies are projected to labeled graphs, bridged by confidence-weighted
seed mappings, walked with weight-biased random walks, turned into
structure/lexical/combined documents, embedded with skip-gram negative
sampling, and finally candidate mappings are scored by cosine similarity
under an MRR / Hits@K ranking protocol.
"""

__version__ = "0.1.0"

from .alignment import Mapping, MappingSet, Relation, intersection, load_mappings, seed_entities, union
from .corpus import DocumentSet, TokenizerConfig, build_documents, lexicalize, tokenize_label
from .estimators import AlignmentEmbedder, SkipGramEmbedder
from .graph import WeightedGraph, merge
from .ntriples import IRI, BlankNode, Literal, MalformedLine, Triple, parse_document, parse_file
from .projection import LexicalTable, ProjectedEdge, project
from .ranking import CandidatePool, RankingReport, entity_vector, evaluate, score
from .sgns import EmbeddingTable, TrainConfig, Vocabulary, train
from .walker import WalkConfig, generate_walks

__all__ = [
    "AlignmentEmbedder",
    "BlankNode",
    "CandidatePool",
    "DocumentSet",
    "EmbeddingTable",
    "IRI",
    "LexicalTable",
    "Literal",
    "MalformedLine",
    "Mapping",
    "MappingSet",
    "ProjectedEdge",
    "RankingReport",
    "Relation",
    "SkipGramEmbedder",
    "TokenizerConfig",
    "TrainConfig",
    "Triple",
    "Vocabulary",
    "WalkConfig",
    "WeightedGraph",
    "build_documents",
    "entity_vector",
    "evaluate",
    "generate_walks",
    "intersection",
    "lexicalize",
    "load_mappings",
    "merge",
    "parse_document",
    "parse_file",
    "project",
    "score",
    "seed_entities",
    "tokenize_label",
    "train",
    "union",
]
