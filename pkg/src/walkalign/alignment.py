"""Seed mapping sets: loading, combining, and deriving seed entities.

A mapping relates one entity from each ontology with a semantic relation
(equivalence or subsumption) and a confidence in (0, 1]. Mapping sets come
from external matcher output as TSV files with ``SrcEntity / TgtEntity /
Score`` columns and an optional relation column.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .validation import require_iri

# Confidences written as 1.0000000001 by sloppy emitters are float noise.
_CLAMP_EPSILON = 1e-9


class Relation(enum.Enum):
    EQUIVALENCE = "="
    SUBSUMPTION = "<"


class MappingError(ValueError):
    """A TSV row that cannot become a valid mapping."""

    def __init__(self, row: int, reason: str):
        super().__init__(f"row {row}: {reason}")
        self.row = row
        self.reason = reason


class BadConfidence(MappingError):
    pass


class BadIri(MappingError):
    pass


@dataclass(frozen=True, slots=True)
class Mapping:
    source: str
    target: str
    relation: Relation = Relation.EQUIVALENCE
    confidence: float = 1.0

    def __post_init__(self):
        require_iri("mapping source", self.source)
        require_iri("mapping target", self.target)
        if self.source == self.target:
            raise ValueError("mapping source and target must be distinct IRIs")
        if not 0 < self.confidence <= 1:
            raise ValueError(f"confidence must be in (0, 1], got {self.confidence}")

    @property
    def key(self) -> tuple[str, str, Relation]:
        return (self.source, self.target, self.relation)


class MappingSet:
    """Ordered mappings, deduplicated on (source, target, relation).

    When the same key occurs more than once the kept confidence is the
    maximum of the occurrences; order follows first occurrence.
    """

    def __init__(self, mappings: Iterable[Mapping] = ()):
        self._by_key: dict[tuple, Mapping] = {}
        for m in mappings:
            old = self._by_key.get(m.key)
            if old is None:
                self._by_key[m.key] = m
            elif m.confidence > old.confidence:
                self._by_key[m.key] = m

    def __iter__(self) -> Iterator[Mapping]:
        return iter(self._by_key.values())

    def __len__(self) -> int:
        return len(self._by_key)

    def __contains__(self, key) -> bool:
        return key in self._by_key

    def __eq__(self, other) -> bool:
        if not isinstance(other, MappingSet):
            return NotImplemented
        return list(self) == list(other)

    def get(self, key) -> Mapping | None:
        return self._by_key.get(key)

    def save_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write("SrcEntity\tTgtEntity\tScore\tRelation\n")
            for m in self:
                handle.write(f"{m.source}\t{m.target}\t{m.confidence!r}\t{m.relation.value}\n")


def _strip_brackets(cell: str) -> str:
    cell = cell.strip()
    if cell.startswith("<") and cell.endswith(">"):
        cell = cell[1:-1]
    return cell


def _parse_confidence(cell: str, row: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise BadConfidence(row, f"unparseable score {cell!r}") from None
    if 1 < value <= 1 + _CLAMP_EPSILON:
        value = 1.0
    if not 0 < value <= 1:
        raise BadConfidence(row, f"score {value} outside (0, 1]")
    return value


_RELATION_TOKENS = {r.value: r for r in Relation}


def load_mappings(path, default_relation: Relation = Relation.EQUIVALENCE) -> MappingSet:
    """Load a mapping TSV; a header row is detected by a first field of
    ``SrcEntity``. Missing score column means confidence 1.0."""
    mappings = []
    with open(path, "r", encoding="utf-8") as handle:
        for row, line in enumerate(handle, start=1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            cells = line.split("\t")
            if row == 1 and cells[0].strip() == "SrcEntity":
                continue
            if len(cells) < 2:
                raise MappingError(row, "expected at least source and target columns")
            source = _strip_brackets(cells[0])
            target = _strip_brackets(cells[1])
            confidence = _parse_confidence(cells[2], row) if len(cells) > 2 and cells[2].strip() else 1.0
            relation = default_relation
            if len(cells) > 3 and cells[3].strip():
                token = cells[3].strip()
                if token not in _RELATION_TOKENS:
                    raise MappingError(row, f"unknown relation {token!r}")
                relation = _RELATION_TOKENS[token]
            try:
                mappings.append(Mapping(source, target, relation, confidence))
            except ValueError as exc:
                raise BadIri(row, str(exc)) from None
    return MappingSet(mappings)


def _mean(a: float, b: float) -> float:
    return (a + b) / 2.0


def union(
    a: MappingSet,
    b: MappingSet,
    combine: Callable[[float, float], float] = max,
) -> MappingSet:
    """Key-wise union; colliding keys keep ``combine`` of both confidences."""
    out: dict[tuple, Mapping] = {m.key: m for m in a}
    for m in b:
        old = out.get(m.key)
        if old is None:
            out[m.key] = m
        else:
            merged = combine(old.confidence, m.confidence)
            if merged != old.confidence:
                out[m.key] = Mapping(old.source, old.target, old.relation, merged)
    return MappingSet(out.values())


def intersection(
    a: MappingSet,
    b: MappingSet,
    combine: Callable[[float, float], float] = _mean,
) -> MappingSet:
    """Keys present in both sets; confidence is ``combine`` of the two."""
    out = []
    for m in a:
        other = b.get(m.key)
        if other is not None:
            out.append(Mapping(m.source, m.target, m.relation, combine(m.confidence, other.confidence)))
    return MappingSet(out)


def seed_entities(mappings: MappingSet) -> list[str]:
    """Source and target IRIs, deduplicated in first-occurrence order."""
    seen: dict[str, None] = {}
    for m in mappings:
        seen.setdefault(m.source)
        seen.setdefault(m.target)
    return list(seen)
