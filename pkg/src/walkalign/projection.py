"""Project OWL-style triples onto a named-entity edge list plus a label table.

The projection keeps only edges between named entities:

* subclass axioms between named classes,
* class equivalences (materialized in both directions),
* one-level existential restrictions ``A subClassOf [onProperty R,
  someValuesFrom D]`` collapsed to the edge ``(A, R, D)``,
* assertions whose predicate is any non-reserved IRI,
* optionally, a reversed companion for every subclass edge so walks can
  descend the taxonomy.

Annotation triples (``rdfs:label`` and any configured synonym properties)
feed the lexical table instead of the edge list. Everything else is skipped
and tallied in the projection report.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .ntriples import IRI, BlankNode, Literal, Triple

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"

RDF_TYPE = RDF_NS + "type"
RDFS_SUBCLASSOF = RDFS_NS + "subClassOf"
RDFS_LABEL = RDFS_NS + "label"
OWL_EQUIVALENT_CLASS = OWL_NS + "equivalentClass"
OWL_RESTRICTION = OWL_NS + "Restriction"
OWL_ON_PROPERTY = OWL_NS + "onProperty"
OWL_SOME_VALUES_FROM = OWL_NS + "someValuesFrom"

# Reversed-subclass edges carry this fixed label.
INVERSE_SUBCLASSOF = "urn:owl2vec4oa:inverseSubClassOf"

RESERVED_NAMESPACES = (RDF_NS, RDFS_NS, OWL_NS)

DEFAULT_ANNOTATION_PROPS = (RDFS_LABEL,)


@dataclass(frozen=True, slots=True)
class ProjectedEdge:
    """A labeled edge between two named entities; axiom edges weigh 1.0."""

    source: str
    label: str
    target: str
    weight: float = 1.0


class LexicalTable:
    """Entity IRI -> label list, primary label first, then synonyms.

    Labels are raw lexical forms. Within one entity, labels are ordered by
    the rank of the annotation property they came from (so ``rdfs:label``
    beats synonym properties) and by first occurrence within a rank;
    duplicates are dropped.
    """

    def __init__(self):
        self._ranked: dict[str, list[tuple[int, int, str]]] = {}
        self._counter = 0

    def add(self, iri: str, label: str, rank: int = 0) -> None:
        entries = self._ranked.setdefault(iri, [])
        if any(text == label for _, _, text in entries):
            return
        entries.append((rank, self._counter, label))
        self._counter += 1

    def labels(self, iri: str) -> list[str]:
        entries = self._ranked.get(iri, [])
        return [text for _, _, text in sorted(entries)]

    def primary(self, iri: str) -> str | None:
        labels = self.labels(iri)
        return labels[0] if labels else None

    def __contains__(self, iri: str) -> bool:
        return iri in self._ranked

    def __len__(self) -> int:
        return len(self._ranked)

    def entities(self) -> list[str]:
        return list(self._ranked)

    def merge(self, other: "LexicalTable") -> None:
        for iri, entries in other._ranked.items():
            for rank, _, text in sorted(entries):
                self.add(iri, text, rank)

    def save_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            for iri in self._ranked:
                for rank, _, text in sorted(self._ranked[iri]):
                    handle.write(f"{iri}\t{rank}\t{_escape_cell(text)}\n")

    @classmethod
    def load_tsv(cls, path) -> "LexicalTable":
        table = cls()
        with open(path, "r", encoding="utf-8") as handle:
            for line in handle:
                line = line.rstrip("\n")
                if not line:
                    continue
                iri, rank, text = line.split("\t", 2)
                table.add(iri, _unescape_cell(text), int(rank))
        return table


def _escape_cell(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n").replace("\r", "\\r")


def _unescape_cell(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        c = text[i]
        if c == "\\" and i + 1 < len(text):
            out.append({"t": "\t", "n": "\n", "r": "\r", "\\": "\\"}.get(text[i + 1], text[i + 1]))
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


@dataclass
class ProjectionReport:
    subclass_edges: int = 0
    equivalence_edges: int = 0
    restriction_edges: int = 0
    assertion_edges: int = 0
    inverse_subclass_edges: int = 0
    annotations: int = 0
    skipped_axioms: int = 0
    labeled_entities: int = 0
    unlabeled_entities: int = 0

    def render(self) -> str:
        lines = [
            "projection report",
            f"  subclass edges:         {self.subclass_edges}",
            f"  equivalence edges:      {self.equivalence_edges}",
            f"  restriction edges:      {self.restriction_edges}",
            f"  assertion edges:        {self.assertion_edges}",
            f"  inverse subclass edges: {self.inverse_subclass_edges}",
            f"  annotations kept:       {self.annotations}",
            f"  skipped axioms:         {self.skipped_axioms}",
            f"  entities with labels:   {self.labeled_entities}",
            f"  entities without labels:{self.unlabeled_entities}",
        ]
        return "\n".join(lines) + "\n"


@dataclass
class ProjectionResult:
    edges: list[ProjectedEdge]
    lexicon: LexicalTable
    report: ProjectionReport = field(default_factory=ProjectionReport)


def _is_reserved(predicate: str) -> bool:
    return predicate.startswith(RESERVED_NAMESPACES)


def project(
    triples: Iterable[Triple],
    annotation_props: Sequence[str] | None = None,
    *,
    inverse_subclass: bool = True,
) -> ProjectionResult:
    """Apply the projection rules to one ontology document.

    Unmatched axiom patterns never raise; they are counted as skipped in the
    report. Restriction bodies are decoded one blank-node level deep only.
    """
    if annotation_props is None:
        annotation_props = DEFAULT_ANNOTATION_PROPS
    ann_rank = {iri: i for i, iri in enumerate(annotation_props)}

    triples = list(triples)

    # Index blank-node-rooted triples so restriction bodies can be decoded.
    bnode_types: dict[str, set[str]] = defaultdict(set)
    bnode_props: dict[str, list[str]] = defaultdict(list)
    bnode_fillers: dict[str, list[str]] = defaultdict(list)
    bnode_triples: dict[str, int] = defaultdict(int)
    for t in triples:
        if isinstance(t.subject, BlankNode):
            key = t.subject.label
            bnode_triples[key] += 1
            if t.predicate.value == RDF_TYPE and isinstance(t.object, IRI):
                bnode_types[key].add(t.object.value)
            elif t.predicate.value == OWL_ON_PROPERTY and isinstance(t.object, IRI):
                bnode_props[key].append(t.object.value)
            elif t.predicate.value == OWL_SOME_VALUES_FROM and isinstance(t.object, IRI):
                bnode_fillers[key].append(t.object.value)

    def decode_restriction(label: str) -> list[tuple[str, str]]:
        if OWL_RESTRICTION not in bnode_types.get(label, ()):
            return []
        return [(p, f) for p in bnode_props.get(label, []) for f in bnode_fillers.get(label, [])]

    report = ProjectionReport()
    lexicon = LexicalTable()
    edges: dict[ProjectedEdge, None] = {}  # insertion-ordered dedup
    consumed_bnodes: set[str] = set()

    def emit(source: str, label: str, target: str) -> bool:
        edge = ProjectedEdge(source, label, target, 1.0)
        if edge in edges:
            return False
        edges[edge] = None
        return True

    for t in triples:
        pred = t.predicate.value
        subj, obj = t.subject, t.object

        if pred in (RDFS_SUBCLASSOF, OWL_EQUIVALENT_CLASS) and isinstance(subj, IRI):
            if isinstance(obj, IRI):
                if pred == RDFS_SUBCLASSOF:
                    report.subclass_edges += emit(subj.value, RDFS_SUBCLASSOF, obj.value)
                    if inverse_subclass:
                        report.inverse_subclass_edges += emit(obj.value, INVERSE_SUBCLASSOF, subj.value)
                else:
                    report.equivalence_edges += emit(subj.value, OWL_EQUIVALENT_CLASS, obj.value)
                    report.equivalence_edges += emit(obj.value, OWL_EQUIVALENT_CLASS, subj.value)
                continue
            if isinstance(obj, BlankNode):
                pairs = decode_restriction(obj.label)
                if pairs:
                    for prop, filler in pairs:
                        report.restriction_edges += emit(subj.value, prop, filler)
                    consumed_bnodes.add(obj.label)
                else:
                    report.skipped_axioms += 1
                continue
            report.skipped_axioms += 1
            continue

        if pred in ann_rank and isinstance(subj, IRI) and isinstance(obj, Literal):
            lexicon.add(subj.value, obj.lexical, ann_rank[pred])
            report.annotations += 1
            continue

        if isinstance(subj, BlankNode):
            # Restriction plumbing; tallied below when the body never
            # produced an edge.
            continue

        if not _is_reserved(pred) and isinstance(subj, IRI) and isinstance(obj, IRI):
            report.assertion_edges += emit(subj.value, pred, obj.value)
            continue

        report.skipped_axioms += 1

    for label, count in bnode_triples.items():
        if label not in consumed_bnodes:
            report.skipped_axioms += count

    edge_list = list(edges)
    vertices = {e.source for e in edge_list} | {e.target for e in edge_list}
    report.labeled_entities = sum(1 for v in vertices if v in lexicon)
    report.unlabeled_entities = len(vertices) - report.labeled_entities
    return ProjectionResult(edge_list, lexicon, report)


def save_edges_tsv(edges: Iterable[ProjectedEdge], path) -> None:
    """Edge list as ``source \\t label \\t target \\t weight`` rows."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for e in edges:
            handle.write(f"{e.source}\t{e.label}\t{e.target}\t{e.weight!r}\n")


def load_edges_tsv(path) -> list[ProjectedEdge]:
    edges = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if not line:
                continue
            source, label, target, weight = line.split("\t")
            edges.append(ProjectedEdge(source, label, target, float(weight)))
    return edges
