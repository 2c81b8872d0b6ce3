"""Line-oriented N-Triples parsing and canonical serialization.

Supports exactly the W3C N-Triples grammar for IRIREF, BLANK_NODE_LABEL and
STRING_LITERAL_QUOTE (with ``@lang`` or ``^^<datatype>``). Input documents
are expected in UTF-8 with LF or CRLF line endings; comments are full lines
starting with ``#`` or trail the terminating ``.`` of a statement.

Parsing is line-independent: every statement lives on one line, so a
document parse equals the concatenation of per-line parses.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

log = logging.getLogger(__name__)

_IRI_FORBIDDEN = re.compile(r'[\s<>"]')

# Raw characters excluded from IRIREF bodies; they round-trip as \u escapes.
_IRI_ESCAPE_RAW = set('<>"{}|^`\\') | {chr(c) for c in range(0x21)}


class MalformedLine(ValueError):
    """A line that is neither blank, a comment, nor a valid triple."""

    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


@dataclass(frozen=True, slots=True)
class IRI:
    """An absolute IRI, stored without surrounding angle brackets."""

    value: str

    def __post_init__(self):
        v = self.value
        if not v:
            raise ValueError("IRI must be non-empty")
        if ":" not in v:
            raise ValueError(f"IRI must contain a scheme separator: {v!r}")
        if _IRI_FORBIDDEN.search(v):
            raise ValueError(f"IRI contains whitespace or <>\": {v!r}")

    def __str__(self) -> str:
        return self.value


_BLANK_LABEL = re.compile(r"[A-Za-z0-9][A-Za-z0-9._\-]*\Z")


@dataclass(frozen=True, slots=True)
class BlankNode:
    """A document-scoped blank node, stored without the ``_:`` prefix."""

    label: str

    def __post_init__(self):
        if not _BLANK_LABEL.match(self.label):
            raise ValueError(f"invalid blank node label: {self.label!r}")


@dataclass(frozen=True, slots=True)
class Literal:
    """A literal with decoded lexical form and optional lang tag or datatype."""

    lexical: str
    language: str | None = None
    datatype: str | None = None


Subject = Union[IRI, BlankNode]
Object = Union[IRI, BlankNode, Literal]


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Subject
    predicate: IRI
    object: Object


# Token patterns. IRIREF admits \u/\U escapes only; string literals admit the
# full ECHAR set plus \u/\U.
_IRIREF = re.compile(r'<((?:[^\x00-\x20<>"{}|^`\\]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*)>')
_BNODE = re.compile(r"_:([A-Za-z0-9][A-Za-z0-9._\-]*)")
_STRING = re.compile(r'"((?:[^"\\\n\r]|\\[tbnrf"\'\\]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*)"')
_LANGTAG = re.compile(r"@([a-zA-Z]+(?:-[a-zA-Z0-9]+)*)")
_WS = re.compile(r"[ \t]*")
_ESCAPE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|.)", re.DOTALL)

_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _decode_escapes(raw: str, line_number: int) -> str:
    def repl(m: re.Match) -> str:
        body = m.group(1)
        if body[0] in "uU":
            code = int(body[1:], 16)
            if code > 0x10FFFF or 0xD800 <= code <= 0xDFFF:
                raise MalformedLine(line_number, f"invalid unicode escape \\{body}")
            return chr(code)
        try:
            return _ECHAR[body]
        except KeyError:
            raise MalformedLine(line_number, f"invalid escape \\{body}") from None

    return _ESCAPE.sub(repl, raw)


def parse_line(line: str, line_number: int = 1) -> Triple | None:
    """Parse one line; returns None for blank and comment-only lines."""
    pos = _WS.match(line).end()
    if pos == len(line) or line[pos] == "#":
        return None

    subject, pos = _parse_subject(line, pos, line_number)
    pos = _WS.match(line, pos).end()
    predicate, pos = _parse_iri(line, pos, line_number, "predicate")
    pos = _WS.match(line, pos).end()
    obj, pos = _parse_object(line, pos, line_number)
    pos = _WS.match(line, pos).end()
    if pos == len(line) or line[pos] != ".":
        raise MalformedLine(line_number, "missing terminator")
    pos = _WS.match(line, pos + 1).end()
    if pos != len(line) and line[pos] != "#":
        raise MalformedLine(line_number, "trailing content after terminator")
    return Triple(subject, predicate, obj)


def _parse_subject(line: str, pos: int, n: int) -> tuple[Subject, int]:
    if line.startswith("_:", pos):
        m = _BNODE.match(line, pos)
        if not m:
            raise MalformedLine(n, "invalid blank node label in subject")
        return BlankNode(m.group(1)), m.end()
    return _parse_iri(line, pos, n, "subject")


def _parse_iri(line: str, pos: int, n: int, role: str) -> tuple[IRI, int]:
    m = _IRIREF.match(line, pos)
    if not m:
        raise MalformedLine(n, f"expected IRI in {role}")
    value = _decode_escapes(m.group(1), n)
    try:
        return IRI(value), m.end()
    except ValueError as exc:
        raise MalformedLine(n, f"invalid IRI in {role}: {exc}") from None


def _parse_object(line: str, pos: int, n: int) -> tuple[Object, int]:
    if line.startswith("_:", pos):
        m = _BNODE.match(line, pos)
        if not m:
            raise MalformedLine(n, "invalid blank node label in object")
        return BlankNode(m.group(1)), m.end()
    if line.startswith("<", pos):
        return _parse_iri(line, pos, n, "object")
    m = _STRING.match(line, pos)
    if not m:
        raise MalformedLine(n, "expected IRI, blank node or literal in object")
    lexical = _decode_escapes(m.group(1), n)
    pos = m.end()
    if line.startswith("@", pos):
        lm = _LANGTAG.match(line, pos)
        if not lm:
            raise MalformedLine(n, "invalid language tag")
        return Literal(lexical, language=lm.group(1).lower()), lm.end()
    if line.startswith("^^", pos):
        dt, pos = _parse_iri(line, pos + 2, n, "datatype")
        return Literal(lexical, datatype=dt.value), pos
    return Literal(lexical), pos


def parse_document(
    source: Union[str, bytes, Iterable[str]],
    *,
    lenient: bool = False,
    error_sink: list[MalformedLine] | None = None,
) -> Iterator[Triple]:
    """Parse a whole document, yielding one Triple per statement line.

    Fail-fast by default: the first malformed line raises MalformedLine.
    With ``lenient=True``, malformed lines are skipped; they are counted into
    ``error_sink`` when given and reported through the module logger.
    """
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        lines: Iterable[str] = source.split("\n")
    else:
        lines = source
    skipped = 0
    for number, line in enumerate(lines, start=1):
        line = line.rstrip("\r\n")
        try:
            triple = parse_line(line, number)
        except MalformedLine as exc:
            if not lenient:
                raise
            skipped += 1
            if error_sink is not None:
                error_sink.append(exc)
            continue
        if triple is not None:
            yield triple
    if skipped:
        log.warning("skipped %d malformed line(s)", skipped)


def parse_file(path, *, lenient: bool = False, error_sink=None) -> list[Triple]:
    """Parse a UTF-8 ``.nt`` file into a triple list."""
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return list(parse_document(handle, lenient=lenient, error_sink=error_sink))


def _escape_iri(value: str) -> str:
    out = []
    for c in value:
        if c in _IRI_ESCAPE_RAW:
            code = ord(c)
            out.append(f"\\u{code:04X}" if code <= 0xFFFF else f"\\U{code:08X}")
        else:
            out.append(c)
    return "".join(out)


def _escape_literal(value: str) -> str:
    out = []
    for c in value:
        if c == "\\":
            out.append("\\\\")
        elif c == '"':
            out.append('\\"')
        elif c == "\n":
            out.append("\\n")
        elif c == "\r":
            out.append("\\r")
        elif c == "\t":
            out.append("\\t")
        elif ord(c) < 0x20:
            out.append(f"\\u{ord(c):04X}")
        else:
            out.append(c)
    return "".join(out)


def _term_text(term: Object) -> str:
    if isinstance(term, IRI):
        return f"<{_escape_iri(term.value)}>"
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    text = f'"{_escape_literal(term.lexical)}"'
    if term.language is not None:
        return f"{text}@{term.language}"
    if term.datatype is not None:
        return f"{text}^^<{_escape_iri(term.datatype)}>"
    return text


def to_ntriples(triple: Triple) -> str:
    """Canonical single-line N-Triples rendering (without trailing newline)."""
    return f"{_term_text(triple.subject)} {_term_text(triple.predicate)} {_term_text(triple.object)} ."


def write_ntriples(triples: Iterable[Triple], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for triple in triples:
            handle.write(to_ntriples(triple))
            handle.write("\n")
