"""Add contextual synonyms and synonymous expressions to a dependency index.

Every operation returns a new index; original records are never touched and
every added record names the sense that licensed it. Records are compared on
label, argument lemmas and provenance, so re-applying an operation adds
nothing.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable

from .deps import (
    PLACEHOLDER,
    Dependency,
    DependencyIndex,
    IndexRecord,
    Provenance,
    Sentence,
    Token,
    is_prepositional,
)
from .errors import InconsistentInput
from .lexicon import LexEntry, Lexicon, SynonymSpec
from .rulegen import RuleDb
from .wsd import ALL, SenseAssignment, disambiguate_token

LEXICAL, MWE, CONVERSE = "lex", "mwe", "conv"
LEVEL_ORDER = (LEXICAL, MWE, CONVERSE)

# Roles a placeholder may inherit when it is not bound through the anchor head.
ARGUMENT_ROLES = ("SUBJECT", "OBJECT", "OBLIQUE")


@dataclass(frozen=True)
class EnrichmentPlan:
    levels: frozenset[str] = frozenset(LEVEL_ORDER)
    max_additions: int | None = None

    def __post_init__(self):
        levels = frozenset(self.levels)
        object.__setattr__(self, "levels", levels)
        if not levels:
            raise ValueError("an enrichment plan needs at least one level")
        unknown = levels - set(LEVEL_ORDER)
        if unknown:
            raise ValueError(f"unknown enrichment levels {sorted(unknown)}")
        if self.max_additions is not None and self.max_additions < 1:
            raise ValueError("max_additions must be positive")

    @classmethod
    def parse(cls, text: str, max_additions: int | None = None) -> "EnrichmentPlan":
        return cls(frozenset(p for p in text.split(",") if p), max_additions)


@dataclass
class EnrichmentReport:
    additions: Counter = field(default_factory=Counter)
    skipped: list[tuple] = field(default_factory=list)

    def added(self, a: SenseAssignment, level: str, n: int):
        if n:
            self.additions[(a.doc_id, a.sent_id, a.token_id, a.lemma, level)] += n

    def skip(self, a: SenseAssignment, level: str, reason: str):
        self.skipped.append((a.doc_id, a.sent_id, a.token_id, a.lemma, level, reason))

    def total(self, level: str | None = None) -> int:
        return sum(n for k, n in self.additions.items() if level is None or k[4] == level)

    def format(self) -> str:
        per_token: dict[tuple, Counter] = {}
        for (doc, sent, tid, lemma, level), n in self.additions.items():
            per_token.setdefault((doc, sent, tid, lemma), Counter())[level] += n
        lines = []
        for key in sorted(per_token):
            doc, sent, tid, lemma = key
            counts = " ".join(f"{lv}={per_token[key][lv]}" for lv in LEVEL_ORDER)
            lines.append(f"ADD\t{doc}\t{sent}\t{tid}\t{lemma}\t{counts}")
        for doc, sent, tid, lemma, level, reason in self.skipped:
            lines.append(f"SKIP\t{doc}\t{sent}\t{tid}\t{lemma}\t{level}\t{reason}")
        lines.append("TOTAL\t" + " ".join(f"{lv}={self.total(lv)}" for lv in LEVEL_ORDER))
        return "\n".join(lines) + "\n"


class _SentenceEdit:
    """Accumulates additions to one sentence with duplicate suppression."""

    def __init__(self, sentence: Sentence):
        self.base = sentence
        self.tokens = {t.id: t for t in sentence.tokens}
        self.records = list(sentence.records)
        self.keys = {self._key(r, self.tokens) for r in self.records}
        self.per_token: Counter = Counter()

    @staticmethod
    def _key(record: IndexRecord, tokens: dict[int, Token]) -> tuple:
        a, b = record.dep.args
        return (record.dep.label, tokens[a].lemma, record.dep.prep, tokens[b].lemma, record.provenance)

    def new_token(self, lemma: str, pos: str | None, pending: dict[int, Token]) -> Token:
        tid = max([*self.tokens, *pending], default=0) + 1
        tok = Token(tid, lemma, pos)
        pending[tid] = tok
        return tok

    def add(
        self,
        records: list[IndexRecord],
        pending: dict[int, Token],
        limit: int | None = None,
        all_or_nothing: bool = False,
    ) -> int:
        lookup = {**self.tokens, **pending}
        fresh, fresh_keys = [], set()
        for r in records:
            k = self._key(r, lookup)
            if k in self.keys or k in fresh_keys:
                continue
            fresh.append(r)
            fresh_keys.add(k)
        if limit is not None and len(fresh) > limit:
            if all_or_nothing:
                return -1
            fresh = fresh[:limit]
        for r in fresh:
            for a in r.dep.args:
                if a in pending:
                    self.tokens[a] = pending[a]
        self.records.extend(fresh)
        self.keys.update(self._key(r, self.tokens) for r in fresh)
        return len(fresh)

    def build(self) -> Sentence:
        if len(self.records) == len(self.base.records):
            return self.base
        tokens = tuple(self.tokens[k] for k in sorted(self.tokens))
        return replace(self.base, tokens=tokens, records=tuple(self.records))


class _IndexEdit:
    def __init__(self, index: DependencyIndex, max_additions: int | None = None):
        self.index = index
        self.max_additions = max_additions
        self.edits: dict[str, _SentenceEdit] = {}

    def sentence(self, sent_id: str) -> _SentenceEdit:
        if sent_id not in self.edits:
            self.edits[sent_id] = _SentenceEdit(self.index.sentence(sent_id))
        return self.edits[sent_id]

    def remaining(self, edit: _SentenceEdit, token_id: int) -> int | None:
        if self.max_additions is None:
            return None
        return max(0, self.max_additions - edit.per_token[token_id])

    def build(self) -> DependencyIndex:
        sents = tuple(
            self.edits[s.sent_id].build() if s.sent_id in self.edits else s for s in self.index.sentences
        )
        return replace(self.index, sentences=sents)


def _resolve(index: DependencyIndex, a: SenseAssignment, lexicon: Lexicon) -> tuple[Sentence, Token, LexEntry]:
    try:
        sentence = index.sentence(a.sent_id)
    except KeyError:
        raise InconsistentInput(f"assignment for {a.doc_id}/{a.sent_id} names an unknown sentence") from None
    if not sentence.has_token(a.token_id):
        raise InconsistentInput(f"assignment names unknown token {a.token_id} in {a.doc_id}/{a.sent_id}")
    token = sentence.token(a.token_id)
    if token.lemma != a.lemma:
        raise InconsistentInput(
            f"{a.doc_id}/{a.sent_id}/{a.token_id}: assignment lemma {a.lemma!r} != token lemma {token.lemma!r}"
        )
    entry = lexicon.entry(token.lemma, token.pos)
    if entry is None:
        raise InconsistentInput(f"{token.lemma!r} has no lexicon entry")
    for n in a.senses:
        if n not in {s.sense_no for s in entry.senses}:
            raise InconsistentInput(f"{token.lemma!r} has no sense {n}")
    return sentence, token, entry


def _for_doc(index: DependencyIndex, assignments: Iterable[SenseAssignment]) -> list[SenseAssignment]:
    return [a for a in assignments if a.doc_id == index.doc_id]


def _swap(dep: Dependency, old: int, new: int) -> Dependency:
    return replace(dep, args=tuple(new if x == old else x for x in dep.args))


# -- lexical level -----------------------------------------------------------


def _lexical(edit: _IndexEdit, a: SenseAssignment, lexicon: Lexicon, report: EnrichmentReport | None):
    sentence, token, entry = _resolve(edit.index, a, lexicon)
    se = edit.sentence(a.sent_id)
    involved = [r for r in sentence.originals if token.id in r.dep.args]
    seen_syn = set()
    for n in a.senses:
        for syn in entry.sense(n).single_synonyms:
            if syn in seen_syn or syn == token.lemma:
                continue
            seen_syn.add(syn)
            pending: dict[int, Token] = {}
            new_tok = se.new_token(syn, token.pos, pending)
            records = [
                IndexRecord(_swap(r.dep, token.id, new_tok.id), Provenance.LEXICAL, (token.lemma, n))
                for r in involved
            ]
            added = se.add(records, pending, edit.remaining(se, token.id))
            se.per_token[token.id] += added
            if report is not None:
                report.added(a, LEXICAL, added)


def enrich_lexical(
    index: DependencyIndex,
    assignments: Iterable[SenseAssignment],
    lexicon: Lexicon,
    report: EnrichmentReport | None = None,
) -> DependencyIndex:
    """Copy each dependency of a disambiguated word with the word replaced by a synonym of its chosen sense(s)."""
    edit = _IndexEdit(index)
    for a in _for_doc(index, assignments):
        _lexical(edit, a, lexicon, report)
    return edit.build()


# -- lexico-syntactic level --------------------------------------------------


class UnboundPlaceholder(Exception):
    pass


def _role_rank(label: str) -> tuple:
    if label in ARGUMENT_ROLES:
        return (ARGUMENT_ROLES.index(label), label)
    return (len(ARGUMENT_ROLES), label)


def _bind_template(template: tuple[Dependency, ...], sentence: Sentence, token: Token) -> dict[tuple[int, int], int]:
    """Map each placeholder ``(template index, slot)`` to a text token id.

    The anchor is a template dependency sharing its label with a text
    dependency on the replaced word (SUBJECT first, then OBJECT, then
    alphabetical); the template lemma sitting where the word sits in that text
    dependency is the expression's head. Placeholders opposite the head bind to
    the text argument under the same label. Any other placeholder takes over a
    core argument of the word that the head did not absorb, in role order.
    """
    text = [r.dep for r in sentence.originals if token.id in r.dep.args]
    placeholders = [(i, s) for i, d in enumerate(template) for s in (0, 1) if d.args[s] == PLACEHOLDER]
    if not placeholders:
        return {}

    head = None
    text_labels = {d.label for d in text}
    for i, d in sorted(enumerate(template), key=lambda x: (_role_rank(x[1].label), x[0])):
        if d.label not in text_labels:
            continue
        for t in text:
            if t.label != d.label:
                continue
            s = t.args.index(token.id)
            if d.args[s] != PLACEHOLDER:
                head = d.args[s]
                break
        if head is not None:
            break
    if head is None:
        raise UnboundPlaceholder("no anchor dependency shared with the text")

    binding: dict[tuple[int, int], int] = {}
    consumed: set[int] = set()
    leftovers = []
    for i, s in placeholders:
        d = template[i]
        hs = 1 - s
        if d.args[hs] != head:
            leftovers.append((i, s))
            continue
        for k, t in enumerate(text):
            if k not in consumed and t.label == d.label and t.args[hs] == token.id:
                binding[(i, s)] = t.args[s]
                consumed.add(k)
                break
        else:
            leftovers.append((i, s))

    displaced = [
        (k, t)
        for k, t in enumerate(text)
        if k not in consumed and t.label in ARGUMENT_ROLES and t.args[0] == token.id
    ]
    displaced.sort(key=lambda kt: (_role_rank(kt[1].label), kt[0]))
    for (i, s), (_, t) in zip(leftovers, displaced):
        binding[(i, s)] = t.args[1]
    if len(leftovers) > len(displaced):
        i, s = leftovers[len(displaced)]
        raise UnboundPlaceholder(f"no text argument left for the placeholder in {template[i]}")
    return binding


def _template_pos(lexicon: Lexicon, lemma: str) -> str | None:
    group = lexicon.entries.get(lemma, ())
    return group[0].pos if len(group) == 1 else None


def _expand(
    edit: _IndexEdit,
    a: SenseAssignment,
    sense_no: int,
    mwe: SynonymSpec,
    lexicon: Lexicon,
    report: EnrichmentReport | None,
):
    sentence, token, _ = _resolve(edit.index, a, lexicon)
    se = edit.sentence(a.sent_id)
    try:
        binding = _bind_template(mwe.template, sentence, token)
    except UnboundPlaceholder as exc:
        if report is not None:
            report.skip(a, MWE, f"UnboundPlaceholder: {mwe.text!r}: {exc}")
        return
    pending: dict[int, Token] = {}
    internal: dict[str, int] = {}
    records = []
    for i, d in enumerate(mwe.template):
        args = []
        for s, slot in enumerate(d.args):
            if slot == PLACEHOLDER:
                args.append(binding[(i, s)])
            else:
                if slot not in internal:
                    internal[slot] = se.new_token(slot, _template_pos(lexicon, slot), pending).id
                args.append(internal[slot])
        records.append(IndexRecord(Dependency(d.label, tuple(args), d.prep), Provenance.MWE, (a.lemma, sense_no)))
    added = se.add(records, pending, edit.remaining(se, token.id), all_or_nothing=True)
    if added < 0:
        if report is not None:
            report.skip(a, MWE, f"addition limit reached for {mwe.text!r}")
        return
    se.per_token[token.id] += added
    if report is not None:
        report.added(a, MWE, added)


def expand_word_to_mwe(
    index: DependencyIndex,
    assignment: SenseAssignment,
    mwe: SynonymSpec,
    lexicon: Lexicon,
    report: EnrichmentReport | None = None,
) -> DependencyIndex:
    """Add the dependencies of a multi-word synonym, wired to the word's text arguments.

    Either every template dependency is added or, when a placeholder cannot
    be bound, none is and the report records why.
    """
    _, _, entry = _resolve(index, assignment, lexicon)
    sense_no = next(
        (n for n in assignment.senses if mwe in entry.sense(n).synonyms), None
    )
    if sense_no is None:
        raise InconsistentInput(f"{mwe.text!r} is not a synonym of the assigned sense of {entry.lemma!r}")
    edit = _IndexEdit(index)
    _expand(edit, assignment, sense_no, mwe, lexicon, report)
    return edit.build()


def _match_internal(template: tuple[Dependency, ...], sentence: Sentence) -> list[dict[str, int]]:
    """All ways to map the placeholder-free part of ``template`` onto original records."""
    internal = [d for d in template if not d.has_placeholder()]
    results: list[dict[str, int]] = []

    def walk(i: int, binding: dict[str, int]):
        if i == len(internal):
            results.append(dict(binding))
            return
        d = internal[i]
        for r in sentence.originals:
            if r.dep.label != d.label or r.dep.prep != d.prep:
                continue
            new = dict(binding)
            for want, tid in zip(d.args, r.dep.args):
                if sentence.lemma(tid) != want or new.setdefault(want, tid) != tid:
                    break
            else:
                walk(i + 1, new)

    if internal:
        walk(0, {})
    unique = {frozenset(b.items()): b for b in results}
    return list(unique.values())


@dataclass(frozen=True)
class MweOccurrence:
    sent_id: str
    token_ids: frozenset[int]
    synonym: str
    pos: str
    sense_no: int


def find_mwe_occurrences(sentence: Sentence, lexicon: Lexicon) -> list[MweOccurrence]:
    """Spans of the sentence that realize a multi-word synonym listed in the lexicon."""
    lemmas = {t.lemma for t in sentence.tokens}
    found = []
    for entry in lexicon:
        for sense in entry.senses:
            for mwe in sense.multiword_synonyms:
                inner = mwe.template_lemmas()
                if len(inner) < 2 or not inner <= lemmas:
                    continue
                for b in _match_internal(mwe.template, sentence):
                    if set(b) == inner:
                        found.append(
                            MweOccurrence(sentence.sent_id, frozenset(b.values()), entry.lemma, entry.pos, sense.sense_no)
                        )
    return sorted(set(found), key=lambda o: (sorted(o.token_ids), o.synonym, o.sense_no))


def _resolve_contraction_source(
    lexicon: Lexicon, sentence: Sentence, occurrence: frozenset[int], synonym: str, pos: str
) -> tuple[str, int]:
    entry = lexicon.entry(synonym, pos)
    inner = {sentence.lemma(t) for t in occurrence}
    if entry is not None:
        for s in entry.senses:
            if any(m.template_lemmas() <= inner for m in s.multiword_synonyms):
                return (synonym, s.sense_no)
    raise InconsistentInput(f"no sense of {synonym!r} lists an expression over {sorted(inner)}")


def contract_mwe_to_word(
    index: DependencyIndex,
    sent_id: str,
    occurrence: Iterable[int],
    synonym: str,
    pos: str,
    lexicon: Lexicon,
    source_sense: tuple[str, int] | None = None,
) -> DependencyIndex:
    """Replace a multi-word expression by a single-word synonym.

    Only dependencies with exactly one argument inside the expression are
    copied, and only when that argument has the synonym's POS.
    """
    occurrence = frozenset(occurrence)
    sentence = index.sentence(sent_id)
    for t in occurrence:
        if not sentence.has_token(t):
            raise InconsistentInput(f"occurrence token {t} is not in sentence {sent_id!r}")
    if source_sense is None:
        source_sense = _resolve_contraction_source(lexicon, sentence, occurrence, synonym, pos)
    edit = _IndexEdit(index)
    _contract(edit, sentence, occurrence, synonym, pos, source_sense)
    return edit.build()


def _contract(edit, sentence, occurrence, synonym, pos, source_sense) -> int:
    se = edit.sentence(sentence.sent_id)
    pending: dict[int, Token] = {}
    new_tok = None
    records = []
    for r in sentence.originals:
        inside = [a for a in r.dep.args if a in occurrence]
        if len(inside) != 1:
            continue
        if sentence.token(inside[0]).pos != pos:
            continue
        if new_tok is None:
            new_tok = se.new_token(synonym, pos, pending)
        records.append(IndexRecord(_swap(r.dep, inside[0], new_tok.id), Provenance.MWE, source_sense))
    return se.add(records, pending)


# -- semantic level ----------------------------------------------------------


def _converse(edit: _IndexEdit, a: SenseAssignment, lexicon: Lexicon, report: EnrichmentReport | None):
    sentence, token, entry = _resolve(edit.index, a, lexicon)
    se = edit.sentence(a.sent_id)
    heads = [r for r in sentence.originals if r.dep.args[0] == token.id]
    for n in a.senses:
        code = entry.sense(n).class_code
        if not code:
            continue
        for corr in lexicon.correspondences_from(code):
            targets = sorted({lem for lem, _ in lexicon.verbs_with_class(corr.to_class) if lem != token.lemma})
            if not targets:
                if report is not None:
                    report.skip(a, CONVERSE, f"NoConverseTarget: no verb of class {corr.to_class}")
                continue
            for target in targets:
                pending: dict[int, Token] = {}
                verb = se.new_token(target, "V", pending)
                records = []
                for r in heads:
                    role = corr.mapped(r.dep.label)
                    if role is None:
                        continue
                    if role == "OBLIQUE" and corr.prep_for_demoted:
                        label, prep = f"OBLIQUE-{corr.prep_for_demoted.upper()}", corr.prep_for_demoted
                    else:
                        label, prep = role, (r.dep.prep if is_prepositional(role) else None)
                    dep = Dependency(label, (verb.id, r.dep.args[1]), prep)
                    records.append(IndexRecord(dep, Provenance.CONVERSE, (token.lemma, n)))
                added = se.add(records, pending, edit.remaining(se, token.id))
                se.per_token[token.id] += added
                if report is not None:
                    report.added(a, CONVERSE, added)


def converse_enrich(
    index: DependencyIndex,
    assignment: SenseAssignment,
    lexicon: Lexicon,
    report: EnrichmentReport | None = None,
) -> DependencyIndex:
    """Restate the verb's dependencies through a converse verb (offrir -> recevoir)."""
    edit = _IndexEdit(index)
    _converse(edit, assignment, lexicon, report)
    return edit.build()


# -- whole pipeline ----------------------------------------------------------


def enrich_document(
    index: DependencyIndex,
    assignments: Iterable[SenseAssignment],
    lexicon: Lexicon,
    plan: EnrichmentPlan = EnrichmentPlan(),
    report: EnrichmentReport | None = None,
) -> DependencyIndex:
    """Apply the enabled levels in the fixed order lexical, mwe, converse."""
    assignments = _for_doc(index, assignments)
    for a in assignments:
        _resolve(index, a, lexicon)
    edit = _IndexEdit(index, plan.max_additions)
    if LEXICAL in plan.levels:
        for a in assignments:
            _lexical(edit, a, lexicon, report)
    if MWE in plan.levels:
        for a in assignments:
            _, _, entry = _resolve(index, a, lexicon)
            for n in a.senses:
                for mwe in entry.sense(n).multiword_synonyms:
                    _expand(edit, a, n, mwe, lexicon, report)
        for sentence in index.sentences:
            for occ in find_mwe_occurrences(sentence, lexicon):
                n = _contract(edit, sentence, occ.token_ids, occ.synonym, occ.pos, (occ.synonym, occ.sense_no))
                if report is not None and n:
                    key = (index.doc_id, sentence.sent_id, min(occ.token_ids), occ.synonym, MWE)
                    report.additions[key] += n
    if CONVERSE in plan.levels:
        for a in assignments:
            _converse(edit, a, lexicon, report)
    return edit.build()


# -- query side --------------------------------------------------------------


@dataclass(frozen=True)
class QueryMatch:
    doc_id: str
    sent_id: str
    records: tuple[IndexRecord, ...]
    mode: str  # "exact" or "class-fallback"

    def render(self, sentence: Sentence) -> str:
        return " ".join(f"{sentence.render(r.dep)}[{r.provenance.value}]" for r in self.records)


def _query_head_verb(query: Sentence) -> Token | None:
    used = {a for r in query.records for a in r.dep.args if a != PLACEHOLDER}
    for t in query.tokens:
        if t.pos == "V" and t.id in used:
            return t
    return None


def _join(query: Sentence, sentence: Sentence, accept) -> list[tuple[IndexRecord, ...]]:
    deps = [r.dep for r in query.records]
    out: list[tuple[IndexRecord, ...]] = []

    def walk(i: int, binding: dict[int, int], chosen: list[IndexRecord]):
        if i == len(deps):
            out.append(tuple(chosen))
            return
        q = deps[i]
        for r in sentence.records:
            if r.dep.label != q.label or r.dep.prep != q.prep:
                continue
            new = dict(binding)
            for qa, ia in zip(q.args, r.dep.args):
                if qa == PLACEHOLDER:
                    continue
                if not accept(query.token(qa), sentence.lemma(ia)) or new.setdefault(qa, ia) != ia:
                    break
            else:
                walk(i + 1, new, chosen + [r])

    if deps:
        walk(0, {}, [])
    return list(dict.fromkeys(out))


def _query_classes(query: Sentence, verb: Token, lexicon: Lexicon, rules: RuleDb | None) -> frozenset[str]:
    entry = lexicon.entry(verb.lemma, "V")
    if entry is None:
        return frozenset()
    senses = entry.senses
    if rules is not None and entry.is_polysemous:
        closed = replace(query, records=tuple(r for r in query.records if not r.dep.has_placeholder()))
        a = disambiguate_token(rules, lexicon, closed, verb, ALL)
        if a is not None:
            senses = [entry.sense(n) for n in a.senses]
    return frozenset(s.class_code for s in senses if s.class_code)


def match_query(
    indexes: DependencyIndex | Iterable[DependencyIndex],
    query: Sentence,
    lexicon: Lexicon,
    rules: RuleDb | None = None,
) -> list[QueryMatch]:
    """Match every query pattern jointly within a sentence, over original and enriched records.

    When nothing matches exactly, the query's head verb is relaxed to any
    verb sharing its syntactico-semantic class; those matches are flagged
    ``class-fallback``. With ``rules`` a polysemous query verb is first
    disambiguated in the query's own context to pick its class.
    """
    if isinstance(indexes, DependencyIndex):
        indexes = [indexes]
    indexes = list(indexes)

    def exact(qtok: Token, lemma: str) -> bool:
        return qtok.lemma == lemma

    def run(accept, mode):
        found = []
        for ix in indexes:
            for s in ix.sentences:
                for recs in _join(query, s, accept):
                    found.append(QueryMatch(ix.doc_id, s.sent_id, recs, mode))
        return found

    matches = run(exact, "exact")
    if matches:
        return matches
    verb = _query_head_verb(query)
    if verb is None:
        return []
    classes = _query_classes(query, verb, lexicon, rules)
    if not classes:
        return []

    def relaxed(qtok: Token, lemma: str) -> bool:
        if qtok.id == verb.id:
            return lemma != verb.lemma and bool(lexicon.verb_classes(lemma) & classes)
        return qtok.lemma == lemma

    return run(relaxed, "class-fallback")
