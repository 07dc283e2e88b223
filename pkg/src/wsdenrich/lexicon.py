"""Reader, validator and serializer for the line-record dictionary format.

A lexicon file looks like::

    DOMAINS AER LOC MTO
    ENTRY grimper POS=V
    SENSE 1 DOMAIN=MTO
      DEP SUBJECT(grimper,température)
      SYN monter
      SYN augmenter
    CORR D2a D2e SUBJECT=OBLIQUE,OBLIQUE=SUBJECT,OBJECT=OBJECT prep=de

Syntax errors stop the reader at the offending line; invariant violations are
collected over the whole file and reported together.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from types import MappingProxyType
from typing import Iterator, Mapping

from .deps import LEMMA_RE, PLACEHOLDER, POS_TAGS, Dependency, parse_dep_term
from .errors import DuplicateEntryError, EmptyLexiconError, FormatError, ValidationError

ANIMACY = ("human", "animal", "inanimate", "any")
TRANSITIVITY = ("intrans", "trans", "trans-obl")
SUBCAT_ROLES = {"subj": "SUBJECT", "obj": "OBJECT", "obl": "OBLIQUE"}

CLASS_CODE_RE = re.compile(r"^[A-Z][0-9][a-z]$")
DOMAIN_RE = re.compile(r"^[A-Z][A-Z0-9]*$")

SINGLE, MULTI = "single", "multi"


@dataclass(frozen=True)
class SynonymSpec:
    kind: str
    text: str
    template: tuple[Dependency, ...] = ()

    @property
    def lemma(self) -> str:
        return self.text

    def template_lemmas(self) -> set[str]:
        return {a for d in self.template for a in d.args if a != PLACEHOLDER}


@dataclass(frozen=True)
class SubcatPattern:
    transitivity: str
    slot_constraints: tuple[tuple[str, str], ...] = ()
    oblique_prep: str | None = None

    def animacy_of(self, role: str) -> str:
        return dict(self.slot_constraints).get(role, "any")


@dataclass(frozen=True)
class Sense:
    sense_no: int
    domains: frozenset[str] = frozenset()
    example_deps: tuple[Dependency, ...] = ()
    synonyms: tuple[SynonymSpec, ...] = ()
    subcat: SubcatPattern | None = None
    class_code: str | None = None
    freq: int | None = None

    @property
    def single_synonyms(self) -> list[str]:
        return [s.text for s in self.synonyms if s.kind == SINGLE]

    @property
    def multiword_synonyms(self) -> list[SynonymSpec]:
        return [s for s in self.synonyms if s.kind == MULTI]


@dataclass(frozen=True)
class LexEntry:
    lemma: str
    pos: str
    senses: tuple[Sense, ...]
    animacy: str | None = None

    def sense(self, sense_no: int) -> Sense:
        for s in self.senses:
            if s.sense_no == sense_no:
                return s
        raise KeyError(f"{self.lemma} has no sense {sense_no}")

    @property
    def is_polysemous(self) -> bool:
        return len(self.senses) > 1


@dataclass(frozen=True)
class ClassCorrespondence:
    from_class: str
    to_class: str
    role_map: tuple[tuple[str, str], ...]
    prep_for_demoted: str | None = None

    def mapped(self, role: str) -> str | None:
        return dict(self.role_map).get(role)


@dataclass(frozen=True, eq=False)
class Lexicon:
    entries: Mapping[str, tuple[LexEntry, ...]] = field(default_factory=dict)
    domains: frozenset[str] = frozenset()
    correspondences: tuple[ClassCorrespondence, ...] = ()

    def __post_init__(self):
        ordered = {k: tuple(self.entries[k]) for k in sorted(self.entries)}
        object.__setattr__(self, "entries", MappingProxyType(ordered))

    def __contains__(self, lemma: str) -> bool:
        return lemma in self.entries

    def __iter__(self) -> Iterator[LexEntry]:
        for group in self.entries.values():
            yield from group

    def __len__(self) -> int:
        return sum(len(g) for g in self.entries.values())

    def __eq__(self, other):
        return (
            isinstance(other, Lexicon)
            and dict(self.entries) == dict(other.entries)
            and self.domains == other.domains
            and self.correspondences == other.correspondences
        )

    def entry(self, lemma: str, pos: str | None = None) -> LexEntry | None:
        """The entry for ``lemma``; ``pos`` disambiguates lemmas listed under several POS."""
        group = self.entries.get(lemma, ())
        if pos is not None:
            return next((e for e in group if e.pos == pos), None)
        return group[0] if len(group) == 1 else None

    def sense(self, lemma: str, sense_no: int, pos: str | None = None) -> Sense | None:
        candidates = [self.entry(lemma, pos)] if pos else list(self.entries.get(lemma, ()))
        for e in candidates:
            if e is None:
                continue
            for s in e.senses:
                if s.sense_no == sense_no:
                    return s
        return None

    def animacy(self, lemma: str) -> str | None:
        for e in self.entries.get(lemma, ()):
            if e.animacy:
                return e.animacy
        return None

    def ambiguity_class(self, lemma: str) -> frozenset[str]:
        return frozenset(d for e in self.entries.get(lemma, ()) for s in e.senses for d in s.domains)

    def verb_classes(self, lemma: str) -> frozenset[str]:
        return frozenset(
            s.class_code
            for e in self.entries.get(lemma, ())
            if e.pos == "V"
            for s in e.senses
            if s.class_code
        )

    def verbs_with_class(self, class_code: str) -> list[tuple[str, int]]:
        return [
            (e.lemma, s.sense_no)
            for e in self
            if e.pos == "V"
            for s in e.senses
            if s.class_code == class_code
        ]

    def correspondences_from(self, class_code: str) -> list[ClassCorrespondence]:
        return [c for c in self.correspondences if c.from_class == class_code]

    def with_entry(self, entry: LexEntry) -> "Lexicon":
        """A new lexicon with ``entry`` added, or replacing the entry of the same lemma and POS."""
        entries = {k: list(v) for k, v in self.entries.items()}
        group = [e for e in entries.get(entry.lemma, []) if e.pos != entry.pos]
        entries[entry.lemma] = group + [entry]
        return replace(self, entries={k: tuple(v) for k, v in entries.items()})


def ambiguity_class(lexicon: Lexicon, lemma: str) -> frozenset[str]:
    return lexicon.ambiguity_class(lemma)


def polysemy(lexicon: Lexicon) -> Fraction:
    """Average number of senses per entry, exact."""
    n_entries = len(lexicon)
    if n_entries == 0:
        raise EmptyLexiconError("polysemy is undefined for an empty lexicon")
    return Fraction(sum(len(e.senses) for e in lexicon), n_entries)


# -- reading -----------------------------------------------------------------


def parse_lexicon(path: str | Path) -> Lexicon:
    path = Path(path)
    return parse_lexicon_text(path.read_text(encoding="utf-8"), source=str(path))


def _keyvals(fields: list[str], allowed: set[str], lineno: int, source: str) -> dict[str, str]:
    out = {}
    for f in fields:
        key, eq, value = f.partition("=")
        if not eq or key not in allowed or not value:
            raise FormatError(f"unexpected field {f!r}", lineno, source)
        if key in out:
            raise FormatError(f"field {key} given twice", lineno, source)
        out[key] = value
    return out


def _parse_template(text: str, lineno: int, source: str) -> tuple[Dependency, ...]:
    terms = [t for t in text.split(";") if t.strip()]
    try:
        return tuple(parse_dep_term(t) for t in terms)
    except ValueError as exc:
        raise FormatError(str(exc), lineno, source) from None


def parse_lexicon_text(text: str, source: str = "<string>") -> Lexicon:
    problems: list[str] = []
    duplicates: list[str] = []
    declared: set[str] = set()
    correspondences: list[ClassCorrespondence] = []
    raw_entries: list[dict] = []
    entry: dict | None = None
    sense: dict | None = None

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        head = fields[0]

        if head == "DOMAINS":
            for code in fields[1:]:
                if not DOMAIN_RE.match(code):
                    raise FormatError(f"bad domain code {code!r}", lineno, source)
                declared.add(code)

        elif head == "ENTRY":
            if len(fields) < 3:
                raise FormatError("expected 'ENTRY <lemma> POS=<pos>'", lineno, source)
            lemma = fields[1]
            if not LEMMA_RE.match(lemma):
                raise FormatError(f"bad lemma {lemma!r}", lineno, source)
            kv = _keyvals(fields[2:], {"POS", "ANIM"}, lineno, source)
            if "POS" not in kv:
                raise FormatError("ENTRY without POS=", lineno, source)
            if kv["POS"] not in POS_TAGS:
                raise FormatError(f"unknown POS {kv['POS']!r}", lineno, source)
            anim = kv.get("ANIM")
            if anim is not None and anim not in ANIMACY[:3]:
                raise FormatError(f"unknown animacy {anim!r}", lineno, source)
            entry = {"lemma": lemma, "pos": kv["POS"], "anim": anim, "senses": [], "line": lineno}
            raw_entries.append(entry)
            sense = None

        elif head == "SENSE":
            if entry is None:
                raise FormatError("SENSE outside an ENTRY", lineno, source)
            if len(fields) < 2 or not fields[1].isdigit() or int(fields[1]) < 1:
                raise FormatError("expected 'SENSE <positive int>'", lineno, source)
            kv = _keyvals(fields[2:], {"DOMAIN", "CLASS", "FREQ"}, lineno, source)
            domains = frozenset(kv["DOMAIN"].split(",")) if "DOMAIN" in kv else frozenset()
            freq = None
            if "FREQ" in kv:
                if not kv["FREQ"].isdigit():
                    raise FormatError(f"FREQ must be an integer, got {kv['FREQ']!r}", lineno, source)
                freq = int(kv["FREQ"])
            sense = {
                "no": int(fields[1]),
                "domains": domains,
                "class": kv.get("CLASS"),
                "freq": freq,
                "deps": [],
                "syns": [],
                "subcat": None,
                "line": lineno,
            }
            entry["senses"].append(sense)

        elif head in ("DEP", "SYN", "MWE", "SUBCAT"):
            if sense is None:
                raise FormatError(f"{head} outside a SENSE", lineno, source)
            rest = line[len(head):].strip()
            if not rest:
                raise FormatError(f"empty {head} record", lineno, source)
            if head == "DEP":
                try:
                    dep = parse_dep_term(rest)
                except ValueError as exc:
                    raise FormatError(str(exc), lineno, source) from None
                if dep.has_placeholder():
                    raise FormatError("example dependencies cannot contain placeholders", lineno, source)
                sense["deps"].append((lineno, dep))
            elif head == "SYN":
                if any(ch.isspace() for ch in rest):
                    problems.append(f"line {lineno}: single-word synonym {rest!r} contains whitespace")
                sense["syns"].append(SynonymSpec(SINGLE, rest))
            elif head == "MWE":
                phrase, sep, tmpl = rest.partition("::")
                phrase = " ".join(phrase.split())
                if not sep or not phrase:
                    raise FormatError("expected 'MWE <text> :: <template>'", lineno, source)
                template = _parse_template(tmpl, lineno, source)
                if not template:
                    problems.append(f"line {lineno}: multi-word synonym {phrase!r} has an empty template")
                sense["syns"].append(SynonymSpec(MULTI, phrase, template))
            else:
                if sense["subcat"] is not None:
                    raise FormatError("second SUBCAT in one sense", lineno, source)
                sense["subcat"] = (lineno, _parse_subcat(fields[1:], lineno, source))

        elif head == "CORR":
            if len(fields) not in (4, 5):
                raise FormatError("expected 'CORR <class> <class> <role>=<role>[,...] [prep=<p>]'", lineno, source)
            src_cls, dst_cls = fields[1], fields[2]
            for c in (src_cls, dst_cls):
                if not CLASS_CODE_RE.match(c):
                    problems.append(f"line {lineno}: class code {c!r} is not letter+digit+letter")
            pairs = []
            for item in fields[3].split(","):
                a, eq, b = item.partition("=")
                if not eq or not a or not b:
                    raise FormatError(f"bad role mapping {item!r}", lineno, source)
                pairs.append((a, b))
            prep = None
            if len(fields) == 5:
                key, eq, prep = fields[4].partition("=")
                if key != "prep" or not prep:
                    raise FormatError(f"unexpected field {fields[4]!r}", lineno, source)
            sources = [a for a, _ in pairs]
            targets = [b for _, b in pairs]
            if len(set(sources)) != len(sources) or len(set(targets)) != len(targets):
                problems.append(f"line {lineno}: role map {fields[3]!r} is not injective")
            correspondences.append(ClassCorrespondence(src_cls, dst_cls, tuple(pairs), prep))

        else:
            raise FormatError(f"unknown record type {head!r}", lineno, source)

    entries: dict[str, list[LexEntry]] = {}
    seen: dict[tuple[str, str], int] = {}
    for e in raw_entries:
        key = (e["lemma"], e["pos"])
        if key in seen:
            duplicates.append(
                f"line {e['line']}: duplicate entry {e['lemma']} POS={e['pos']} (first at line {seen[key]})"
            )
            continue
        seen[key] = e["line"]
        senses = _build_senses(e, declared, problems)
        if senses is not None:
            entries.setdefault(e["lemma"], []).append(
                LexEntry(e["lemma"], e["pos"], senses, e["anim"])
            )

    if duplicates:
        raise DuplicateEntryError(duplicates + problems, source)
    if problems:
        raise ValidationError(problems, source)
    return Lexicon(
        {k: tuple(v) for k, v in entries.items()}, frozenset(declared), tuple(correspondences)
    )


def _parse_subcat(fields: list[str], lineno: int, source: str) -> SubcatPattern:
    if not fields:
        raise FormatError("SUBCAT without a transitivity", lineno, source)
    trans, _, prep = fields[0].partition(":")
    if trans not in TRANSITIVITY:
        raise FormatError(f"unknown transitivity {trans!r}", lineno, source)
    if prep and trans != "trans-obl":
        raise FormatError("only trans-obl takes a preposition", lineno, source)
    kv = _keyvals(fields[1:], set(SUBCAT_ROLES), lineno, source)
    slots = []
    for key, anim in kv.items():
        if anim not in ANIMACY:
            raise FormatError(f"unknown animacy {anim!r}", lineno, source)
        slots.append((SUBCAT_ROLES[key], anim))
    return SubcatPattern(trans, tuple(sorted(slots)), prep or None)


def _build_senses(e: dict, declared: set[str], problems: list[str]) -> tuple[Sense, ...] | None:
    where = f"line {e['line']}: {e['lemma']}"
    if not e["senses"]:
        problems.append(f"{where} has no senses")
        return None
    numbers = [s["no"] for s in e["senses"]]
    if sorted(numbers) != list(range(1, len(numbers) + 1)):
        problems.append(f"{where}: sense numbers {numbers} are not unique and contiguous from 1")
    senses = []
    for s in sorted(e["senses"], key=lambda s: s["no"]):
        for dom in sorted(s["domains"]):
            if dom not in declared:
                problems.append(f"line {s['line']}: domain {dom!r} is not declared")
        if s["class"] is not None and not CLASS_CODE_RE.match(s["class"]):
            problems.append(f"line {s['line']}: class code {s['class']!r} is not letter+digit+letter")
        for lineno, dep in s["deps"]:
            if e["lemma"] not in dep.args:
                problems.append(f"line {lineno}: example {dep} does not mention {e['lemma']!r}")
        subcat = None
        if s["subcat"] is not None:
            lineno, subcat = s["subcat"]
            if e["pos"] != "V":
                problems.append(f"line {lineno}: subcategorization on non-verb {e['lemma']!r}")
            roles = dict(subcat.slot_constraints)
            if "OBJECT" in roles and subcat.transitivity == "intrans":
                problems.append(f"line {lineno}: obj= given for an intransitive pattern")
            if "OBLIQUE" in roles and subcat.transitivity != "trans-obl":
                problems.append(f"line {lineno}: obl= given without trans-obl")
        senses.append(
            Sense(
                s["no"],
                s["domains"],
                tuple(d for _, d in s["deps"]),
                tuple(s["syns"]),
                subcat,
                s["class"],
                s["freq"],
            )
        )
    return tuple(senses)


# -- writing -----------------------------------------------------------------

_ROLE_KEYS = {v: k for k, v in SUBCAT_ROLES.items()}


def _format_subcat(sc: SubcatPattern) -> str:
    head = sc.transitivity + (f":{sc.oblique_prep}" if sc.oblique_prep else "")
    parts = [head] + [f"{_ROLE_KEYS[role]}={anim}" for role, anim in sc.slot_constraints]
    return " ".join(parts)


def serialize_lexicon(lexicon: Lexicon) -> str:
    """Canonical text form; ``parse_lexicon_text`` reads it back to an equal lexicon."""
    out = []
    if lexicon.domains:
        out.append("DOMAINS " + " ".join(sorted(lexicon.domains)))
    for e in sorted(lexicon, key=lambda e: (e.lemma, e.pos)):
        head = f"ENTRY {e.lemma} POS={e.pos}"
        if e.animacy:
            head += f" ANIM={e.animacy}"
        out.append(head)
        for s in e.senses:
            line = f"SENSE {s.sense_no}"
            if s.domains:
                line += " DOMAIN=" + ",".join(sorted(s.domains))
            if s.class_code:
                line += f" CLASS={s.class_code}"
            if s.freq is not None:
                line += f" FREQ={s.freq}"
            out.append(line)
            out.extend(f"  DEP {d}" for d in s.example_deps)
            if s.subcat:
                out.append(f"  SUBCAT {_format_subcat(s.subcat)}")
            for syn in s.synonyms:
                if syn.kind == SINGLE:
                    out.append(f"  SYN {syn.text}")
                else:
                    out.append(f"  MWE {syn.text} :: " + "; ".join(str(d) for d in syn.template))
    for c in lexicon.correspondences:
        line = f"CORR {c.from_class} {c.to_class} " + ",".join(f"{a}={b}" for a, b in c.role_map)
        if c.prep_for_demoted:
            line += f" prep={c.prep_for_demoted}"
        out.append(line)
    return "\n".join(out) + ("\n" if out else "")
