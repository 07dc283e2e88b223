"""Dependency-parsed documents and the enrichable dependency index.

Documents arrive already parsed. The reader accepts a small line format::

    #DOC d1
    #SENT 1
    T 1 température N
    T 2 grimper V
    D SUBJECT 2 1

and the index is written as a canonical TSV (see :func:`serialize_index`).
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Iterable, Union

from .errors import DanglingTokenRef, FormatError, UnknownSentence

POS_TAGS = ("V", "N", "A", "ADV")
PLACEHOLDER = "?"

# Labels allowed to carry a preposition as their middle slot.
PREPOSITIONAL_LABELS = frozenset({"PP", "VMODOBJ", "OBLIQUE"})
CONVERSE_OBLIQUE_PREFIX = "OBLIQUE-"

LABEL_RE = re.compile(r"^[A-Z][A-Z0-9_]*(?:-[A-Z0-9_À-Ý]+)*$")
LEMMA_RE = re.compile(r"^[^\s(),;{}\[\]#=?\t]+$")
_TERM_RE = re.compile(r"^\s*(?P<label>[^\s(]+)\((?P<args>[^()]*)\)\s*$")

Slot = Union[int, str]


def is_prepositional(label: str) -> bool:
    return label in PREPOSITIONAL_LABELS or label.startswith(CONVERSE_OBLIQUE_PREFIX)


def natural_key(value: str) -> tuple:
    """Sort numeric ids numerically and everything else lexically after them."""
    return (0, int(value), "") if value.isdigit() else (1, 0, value)


class Provenance(str, Enum):
    ORIGINAL = "orig"
    LEXICAL = "enr:lex"
    MWE = "enr:mwe"
    CONVERSE = "enr:conv"

    @property
    def rank(self) -> int:
        return list(Provenance).index(self)


@dataclass(frozen=True)
class Token:
    id: int
    lemma: str
    pos: str | None = None

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"token id must be >= 0, got {self.id}")
        if not self.lemma:
            raise ValueError("token lemma must be non-empty")


@dataclass(frozen=True, order=True)
class Dependency:
    """A labelled relation over two argument slots, plus an optional preposition.

    ``args`` holds the two nominal/verbal arguments in written order; a
    three-argument relation such as ``PP(édition,de,manuscrit)`` keeps the
    preposition in ``prep``. Slots are token ids in documents and lemma
    strings (or ``"?"``) in dictionary examples and templates.
    """

    label: str
    args: tuple[Slot, Slot]
    prep: str | None = None

    def __post_init__(self):
        if len(self.args) != 2:
            raise ValueError(f"{self.label}: expected 2 argument slots, got {len(self.args)}")
        if self.prep is not None and not is_prepositional(self.label):
            raise ValueError(f"{self.label} is not a prepositional label; cannot carry {self.prep!r}")

    @property
    def arity(self) -> int:
        return 3 if self.prep is not None else 2

    def has_placeholder(self) -> bool:
        return PLACEHOLDER in self.args

    def __str__(self) -> str:
        a, b = self.args
        middle = f",{self.prep}" if self.prep is not None else ""
        return f"{self.label}({a}{middle},{b})"


def parse_dep_term(text: str) -> Dependency:
    """Parse ``LABEL(a,b)`` or ``LABEL(a,prep,b)`` with lemma slots."""
    m = _TERM_RE.match(text)
    if not m:
        raise ValueError(f"malformed dependency term {text!r}")
    label = m.group("label")
    if not LABEL_RE.match(label):
        raise ValueError(f"malformed dependency label {label!r}")
    parts = [p.strip() for p in m.group("args").split(",")]
    if len(parts) not in (2, 3) or not all(parts):
        raise ValueError(f"{text!r}: expected 2 or 3 non-empty arguments")
    for p in parts:
        if p != PLACEHOLDER and not LEMMA_RE.match(p):
            raise ValueError(f"{text!r}: bad argument {p!r}")
    if len(parts) == 3:
        if parts[1] == PLACEHOLDER:
            raise ValueError(f"{text!r}: the preposition slot cannot be a placeholder")
        return Dependency(label, (parts[0], parts[2]), parts[1])
    return Dependency(label, (parts[0], parts[1]))


@dataclass(frozen=True)
class IndexRecord:
    """One dependency in the index together with where it came from."""

    dep: Dependency
    provenance: Provenance = Provenance.ORIGINAL
    source_sense: tuple[str, int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "provenance", Provenance(self.provenance))
        if self.provenance is Provenance.ORIGINAL and self.source_sense is not None:
            raise ValueError("original records carry no source sense")
        if self.provenance is not Provenance.ORIGINAL and self.source_sense is None:
            raise ValueError("enriched records must name the sense that licensed them")

    @property
    def is_original(self) -> bool:
        return self.provenance is Provenance.ORIGINAL


@dataclass(frozen=True)
class Sentence:
    sent_id: str
    tokens: tuple[Token, ...] = ()
    records: tuple[IndexRecord, ...] = ()

    @cached_property
    def _by_id(self) -> dict[int, Token]:
        return {t.id: t for t in self.tokens}

    def token(self, token_id: int) -> Token:
        return self._by_id[token_id]

    def has_token(self, token_id: int) -> bool:
        return token_id in self._by_id

    def lemma(self, token_id: int) -> str:
        return self._by_id[token_id].lemma

    def lemmas(self, dep: Dependency) -> tuple[str, str | None, str]:
        return (self.lemma(dep.args[0]), dep.prep, self.lemma(dep.args[1]))

    def render(self, dep: Dependency) -> str:
        a, prep, b = self.lemmas(dep)
        middle = f",{prep}" if prep is not None else ""
        return f"{dep.label}({a}{middle},{b})"

    @property
    def originals(self) -> tuple[IndexRecord, ...]:
        return tuple(r for r in self.records if r.is_original)

    @property
    def next_token_id(self) -> int:
        return max((t.id for t in self.tokens), default=0) + 1

    def record_key(self, record: IndexRecord) -> tuple:
        """Identity used for duplicate suppression: label, lemmas and provenance."""
        return (record.dep.label, *self.lemmas(record.dep), record.provenance)


@dataclass(frozen=True)
class DependencyIndex:
    doc_id: str
    sentences: tuple[Sentence, ...] = field(default=())

    def sentence(self, sent_id: str) -> Sentence:
        for s in self.sentences:
            if s.sent_id == sent_id:
                return s
        raise UnknownSentence(f"{self.doc_id}: no sentence {sent_id!r}")

    def with_sentence(self, sentence: Sentence) -> "DependencyIndex":
        sents = tuple(sentence if s.sent_id == sentence.sent_id else s for s in self.sentences)
        return replace(self, sentences=sents)

    def records(self) -> Iterable[tuple[Sentence, IndexRecord]]:
        for s in self.sentences:
            for r in s.records:
                yield s, r

    def original_multiset(self) -> Counter:
        """Originals as a multiset of (sentence id, dependency)."""
        return Counter(
            (s.sent_id, r.dep) for s, r in self.records() if r.is_original
        )

    @property
    def record_count(self) -> int:
        return sum(len(s.records) for s in self.sentences)


def deps_involving(index: DependencyIndex, sentence_id: str, token_id: int) -> list[IndexRecord]:
    sentence = index.sentence(sentence_id)
    return [r for r in sentence.records if token_id in r.dep.args]


# -- document reader ---------------------------------------------------------


def parse_deps(path: str | Path) -> list[DependencyIndex]:
    path = Path(path)
    return parse_deps_text(path.read_text(encoding="utf-8"), source=str(path))


def parse_deps_text(
    text: str, source: str = "<string>", allow_placeholders: bool = False
) -> list[DependencyIndex]:
    """Read the ``#DOC``/``#SENT``/``T``/``D`` document format.

    With ``allow_placeholders`` a ``D`` line may use ``?`` in place of a token
    id; this is how query files are written.
    """
    docs: list[tuple[str, list]] = []
    sent: dict | None = None

    def close_sentence():
        nonlocal sent
        if sent is None:
            return
        tokens = sent["tokens"]
        records = []
        for lineno, dep in sent["deps"]:
            for a in dep.args:
                if a != PLACEHOLDER and a not in tokens:
                    raise DanglingTokenRef(sent["id"], a, lineno, source)
            records.append(IndexRecord(dep))
        docs[-1][1].append(
            Sentence(sent["id"], tuple(tokens[k] for k in sorted(tokens)), tuple(records))
        )
        sent = None

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split()
        head = fields[0]
        if head == "#DOC":
            close_sentence()
            if len(fields) != 2:
                raise FormatError("expected '#DOC <id>'", lineno, source)
            docs.append((fields[1], []))
            continue
        if head == "#SENT":
            close_sentence()
            if not docs:
                raise FormatError("#SENT before any #DOC", lineno, source)
            if len(fields) != 2:
                raise FormatError("expected '#SENT <id>'", lineno, source)
            if any(s.sent_id == fields[1] for s in docs[-1][1]):
                raise FormatError(f"duplicate sentence id {fields[1]!r}", lineno, source)
            sent = {"id": fields[1], "tokens": {}, "deps": []}
            continue
        if head.startswith("#"):
            continue
        if sent is None:
            raise FormatError(f"{head!r} line outside a sentence", lineno, source)
        if head == "T":
            if len(fields) != 4:
                raise FormatError("expected 'T <id> <lemma> <pos>'", lineno, source)
            try:
                tid = int(fields[1])
            except ValueError:
                raise FormatError(f"token id {fields[1]!r} is not an integer", lineno, source) from None
            lemma, pos = fields[2], fields[3]
            if tid < 0:
                raise FormatError("token ids must be >= 0", lineno, source)
            if tid in sent["tokens"]:
                raise FormatError(f"duplicate token id {tid}", lineno, source)
            if not LEMMA_RE.match(lemma):
                raise FormatError(f"bad lemma {lemma!r}", lineno, source)
            if pos not in POS_TAGS:
                raise FormatError(f"unknown POS {pos!r}", lineno, source)
            sent["tokens"][tid] = Token(tid, lemma, pos)
        elif head == "D":
            if len(fields) not in (4, 5):
                raise FormatError("expected 'D <LABEL> <id> [<prep>] <id>'", lineno, source)
            label = fields[1]
            if not LABEL_RE.match(label):
                raise FormatError(f"bad label {label!r}", lineno, source)
            slots = []
            for f in (fields[2], fields[-1]):
                if f == PLACEHOLDER and allow_placeholders:
                    slots.append(PLACEHOLDER)
                    continue
                try:
                    slots.append(int(f))
                except ValueError:
                    raise FormatError(f"token reference {f!r} is not an integer", lineno, source) from None
            prep = fields[3] if len(fields) == 5 else None
            try:
                dep = Dependency(label, tuple(slots), prep)
            except ValueError as exc:
                raise FormatError(str(exc), lineno, source) from None
            sent["deps"].append((lineno, dep))
        else:
            raise FormatError(f"unknown record type {head!r}", lineno, source)
    close_sentence()
    return [DependencyIndex(doc_id, tuple(sents)) for doc_id, sents in docs]


def serialize_document(index: DependencyIndex) -> str:
    """Write the original layer back in the document format (enriched records are dropped)."""
    out = [f"#DOC {index.doc_id}"]
    for s in index.sentences:
        out.append(f"#SENT {s.sent_id}")
        for t in s.tokens:
            out.append(f"T {t.id} {t.lemma} {t.pos}")
        for r in s.originals:
            a, b = r.dep.args
            middle = f" {r.dep.prep}" if r.dep.prep is not None else ""
            out.append(f"D {r.dep.label} {a}{middle} {b}")
    return "\n".join(out) + "\n"


# -- index TSV ---------------------------------------------------------------

INDEX_HEADER = "doc\tsent\tlabel\targ1_lemma\tprep\targ2_lemma\tprovenance\tsource"


def _row(doc_id: str, sentence: Sentence, record: IndexRecord) -> tuple:
    a, prep, b = sentence.lemmas(record.dep)
    src = "-" if record.source_sense is None else f"{record.source_sense[0]}#{record.source_sense[1]}"
    return (doc_id, sentence.sent_id, record.dep.label, a, prep or "-", b, record.provenance, src)


def _row_key(row: tuple) -> tuple:
    doc, sent, label, a, prep, b, prov, src = row
    return (doc, natural_key(sent), label, a, b, prep, prov.rank, src)


def serialize_indexes(indexes: Iterable[DependencyIndex]) -> str:
    rows = [_row(ix.doc_id, s, r) for ix in indexes for s, r in ix.records()]
    rows.sort(key=_row_key)
    lines = [INDEX_HEADER]
    for row in rows:
        lines.append("\t".join((*row[:6], row[6].value, row[7])))
    return "\n".join(lines) + "\n"


def serialize_index(index: DependencyIndex) -> str:
    """Canonical TSV: one line per record, sorted by sentence, label, lemmas and provenance.

    Token ids and POS tags are not part of the TSV, so reading it back gives the
    *normalized* index: one token per distinct lemma in each sentence, and no
    record-less sentences.
    """
    return serialize_indexes([index])


def parse_index(text: str, source: str = "<string>") -> list[DependencyIndex]:
    lines = text.splitlines()
    if not lines or lines[0] != INDEX_HEADER:
        raise FormatError("missing index header", 1, source)
    docs: dict[str, dict[str, list]] = {}
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 8:
            raise FormatError(f"expected 8 columns, got {len(cols)}", lineno, source)
        doc, sent, label, a, prep, b, prov, src = cols
        try:
            provenance = Provenance(prov)
        except ValueError:
            raise FormatError(f"unknown provenance {prov!r}", lineno, source) from None
        if src == "-":
            source_sense = None
        else:
            lemma, _, n = src.rpartition("#")
            if not lemma or not n.isdigit():
                raise FormatError(f"bad source {src!r}", lineno, source)
            source_sense = (lemma, int(n))
        if not LABEL_RE.match(label):
            raise FormatError(f"bad label {label!r}", lineno, source)
        for lem in (a, b):
            if not LEMMA_RE.match(lem):
                raise FormatError(f"bad lemma {lem!r}", lineno, source)
        docs.setdefault(doc, {}).setdefault(sent, []).append(
            (lineno, label, a, None if prep == "-" else prep, b, provenance, source_sense)
        )
    result = []
    for doc_id, sents in docs.items():
        sentences = []
        for sent_id, rows in sents.items():
            ids: dict[str, int] = {}
            records = []
            for lineno, label, a, prep, b, provenance, source_sense in rows:
                for lem in (a, b):
                    ids.setdefault(lem, len(ids) + 1)
                try:
                    dep = Dependency(label, (ids[a], ids[b]), prep)
                    records.append(IndexRecord(dep, provenance, source_sense))
                except ValueError as exc:
                    raise FormatError(str(exc), lineno, source) from None
            tokens = tuple(Token(i, lem) for lem, i in ids.items())
            sentences.append(Sentence(sent_id, tokens, tuple(records)))
        sentences.sort(key=lambda s: natural_key(s.sent_id))
        result.append(DependencyIndex(doc_id, tuple(sentences)))
    return result


def read_index(path: str | Path) -> list[DependencyIndex]:
    path = Path(path)
    return parse_index(path.read_text(encoding="utf-8"), source=str(path))


def normalize_index(index: DependencyIndex) -> DependencyIndex:
    """The form an index takes after a trip through the TSV."""
    parsed = parse_index(serialize_index(index))
    return parsed[0] if parsed else DependencyIndex(index.doc_id)
