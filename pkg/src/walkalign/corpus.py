"""Turn walks into training documents.

Three documents are built from the same walks:

* ``structure``  — the walks verbatim, IRI tokens only;
* ``lexical``    — every IRI replaced by word tokens of its primary label,
  falling back to the IRI's local name and finally to the full IRI itself;
* ``combined``   — each IRI occurrence independently kept or replaced by its
  lexicalization with probability ``replace_prob``.

The merged training corpus is structure + lexical + combined, one sentence
per line. Combined-document randomness uses a per-sentence stream derived
from (rng_seed, sentence index), so building is order-independent and
reproducible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .projection import LexicalTable
from .rng import SplitMix64, derive
from .validation import require_unit_interval

_ALNUM_RUN = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True, slots=True)
class TokenizerConfig:
    """Deterministic label tokenizer settings; splitting is fixed to
    non-alphanumeric boundaries plus lower-to-upper and letter-digit
    transitions."""

    lowercase: bool = True


DEFAULT_TOKENIZER = TokenizerConfig()


def _split_case_runs(run: str) -> list[str]:
    parts = []
    start = 0
    for i in range(1, len(run)):
        prev, cur = run[i - 1], run[i]
        if (prev.islower() and cur.isupper()) or (prev.isdigit() != cur.isdigit()):
            parts.append(run[start:i])
            start = i
    parts.append(run[start:])
    return parts


def tokenize_label(label: str, cfg: TokenizerConfig = DEFAULT_TOKENIZER) -> list[str]:
    """Word tokens of a raw label; an all-separator label yields []."""
    tokens = []
    for run in _ALNUM_RUN.findall(label):
        for part in _split_case_runs(run):
            tokens.append(part.lower() if cfg.lowercase else part)
    return tokens


def local_name(iri: str) -> str:
    """The IRI fragment after the last ``#`` or ``/`` (may be empty)."""
    cut = max(iri.rfind("#"), iri.rfind("/"))
    return iri[cut + 1 :] if cut >= 0 else ""


def lexicalize(iri: str, lexicon: LexicalTable, cfg: TokenizerConfig = DEFAULT_TOKENIZER) -> list[str]:
    """Word tokens standing in for an IRI.

    Primary label tokens when the entity is labeled; otherwise tokens of the
    IRI local name; otherwise the single token equal to the full IRI.
    """
    label = lexicon.primary(iri)
    if label is not None:
        tokens = tokenize_label(label, cfg)
        if tokens:
            return tokens
    tokens = tokenize_label(local_name(iri), cfg)
    if tokens:
        return tokens
    return [iri]


Sentence = list[str]


@dataclass
class DocumentSet:
    structure: list[Sentence]
    lexical: list[Sentence]
    combined: list[Sentence]
    # Occurrences in the lexical document where no label or local name was
    # available and the full IRI was kept as a single token.
    iri_fallbacks: int = 0

    def merged(self) -> list[Sentence]:
        return self.structure + self.lexical + self.combined


def build_documents(
    walks: Sequence[Sentence],
    lexicon: LexicalTable,
    replace_prob: float = 0.5,
    rng_seed: int = 0,
    cfg: TokenizerConfig = DEFAULT_TOKENIZER,
    label_choice: str = "primary",
) -> DocumentSet:
    """Build the structure, lexical and combined documents from walks.

    ``label_choice`` is ``primary`` (default) or ``uniform``; with
    ``uniform`` each combined-document replacement picks uniformly among the
    entity's labels instead of always using the primary one.
    """
    require_unit_interval("replace_prob", replace_prob)
    if label_choice not in ("primary", "uniform"):
        raise ValueError(f"label_choice must be 'primary' or 'uniform', got {label_choice!r}")

    cache: dict[str, list[str]] = {}

    def words(iri: str) -> list[str]:
        hit = cache.get(iri)
        if hit is None:
            hit = cache[iri] = lexicalize(iri, lexicon, cfg)
        return hit

    structure = [list(walk) for walk in walks]
    lexical: list[Sentence] = []
    combined: list[Sentence] = []
    fallbacks = 0
    for sentence_index, walk in enumerate(walks):
        lex_sentence: Sentence = []
        for token in walk:
            replacement = words(token)
            if replacement == [token]:
                fallbacks += 1
            lex_sentence.extend(replacement)
        lexical.append(lex_sentence)

        # One draw per token decides keep-vs-replace; in uniform mode a
        # second draw picks the label, keeping streams aligned across modes.
        stream = SplitMix64(derive(rng_seed, sentence_index))
        mixed: Sentence = []
        for token in walk:
            if stream.uniform() < replace_prob:
                if label_choice == "uniform":
                    labels = lexicon.labels(token)
                    if len(labels) > 1:
                        pick = labels[int(stream.uniform() * len(labels))]
                        mixed.extend(tokenize_label(pick, cfg) or words(token))
                        continue
                mixed.extend(words(token))
            else:
                mixed.append(token)
        combined.append(mixed)

    return DocumentSet(structure, lexical, combined, fallbacks)


def write_sentences(sentences: Iterable[Sentence], path) -> None:
    """Plain text, one sentence per line, tokens space-separated, LF."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for sentence in sentences:
            handle.write(" ".join(sentence))
            handle.write("\n")


def read_sentences(path) -> list[Sentence]:
    sentences = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if line:
                sentences.append(line.split(" "))
    return sentences
