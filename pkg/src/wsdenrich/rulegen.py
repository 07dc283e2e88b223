"""Compile sense-selection rules from the lexicon at three abstraction levels.

* word rules constrain the co-arguments of the ambiguous lemma to the exact
  lemmas seen in the dictionary examples;
* domain rules replace each of those lemmas by its ambiguity class;
* subcat rules come from a verb's subcategorization frame and argument animacy.

Rule file, one record per line::

    RULE word décrire 1 :: SUBJECT[1,2]{lemma=avion} ; OBJECT[1,2]{lemma=cercle}
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Union

from .deps import LABEL_RE, LEMMA_RE
from .errors import DuplicateRuleError, FormatError
from .lexicon import ANIMACY, Lexicon

WORD, DOMAIN, SUBCAT = "word", "domain", "subcat"
LEVELS = (WORD, DOMAIN, SUBCAT)

RULES_HEADER = "# wsdenrich rules: RULE <level> <lemma> <sense> :: <LABEL>[t,o][prep=p]{test} ; ..."


@dataclass(frozen=True)
class LemmaEquals:
    lemma: str

    def __str__(self):
        return f"lemma={self.lemma}"


@dataclass(frozen=True)
class DomainIn:
    domains: frozenset[str]

    def __str__(self):
        return "dom=" + ",".join(sorted(self.domains))


@dataclass(frozen=True)
class AnimacyIs:
    animacy: str

    def __str__(self):
        return f"anim={self.animacy}"


@dataclass(frozen=True)
class Unconstrained:
    def __str__(self):
        return "*"


Test = Union[LemmaEquals, DomainIn, AnimacyIs, Unconstrained]

_ALLOWED_TESTS = {
    WORD: (LemmaEquals, Unconstrained),
    DOMAIN: (DomainIn, Unconstrained),
    SUBCAT: (AnimacyIs, Unconstrained),
}


@dataclass(frozen=True)
class Constraint:
    """One dependency the ambiguous word must take part in.

    Slots are 1-based positions among the two arguments of the relation; the
    preposition of a three-argument relation is checked through ``prep``.
    """

    label: str
    target_slot: int
    other_slot: int
    test: Test
    prep: str | None = None

    def __post_init__(self):
        if {self.target_slot, self.other_slot} != {1, 2}:
            raise ValueError(f"slots must be 1 and 2, got [{self.target_slot},{self.other_slot}]")

    def __str__(self):
        prep = f"[prep={self.prep}]" if self.prep is not None else ""
        return f"{self.label}[{self.target_slot},{self.other_slot}]{prep}{{{self.test}}}"


@dataclass(frozen=True)
class Rule:
    level: str
    target_lemma: str
    sense_no: int
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        if self.level not in LEVELS:
            raise ValueError(f"unknown rule level {self.level!r}")
        if not self.constraints:
            raise ValueError("a rule needs at least one constraint")
        allowed = _ALLOWED_TESTS[self.level]
        for c in self.constraints:
            if not isinstance(c.test, allowed):
                raise ValueError(f"{self.level} rule cannot use test {c.test}")

    @property
    def key(self) -> tuple:
        return (self.level, self.target_lemma, self.sense_no, frozenset(self.constraints))

    @property
    def signature(self) -> tuple:
        return (self.target_lemma, self.sense_no, tuple(sorted(c.label for c in self.constraints)))

    def __str__(self):
        body = " ; ".join(str(c) for c in self.constraints)
        return f"RULE {self.level} {self.target_lemma} {self.sense_no} :: {body}"


def _sort_key(rule: Rule) -> tuple:
    return (rule.target_lemma, LEVELS.index(rule.level), rule.sense_no, str(rule))


class RuleDb:
    """Rules indexed by target lemma and partitioned by level. Immutable once built."""

    def __init__(self, rules: Iterable[Rule] = ()):
        self._by_lemma: dict[str, dict[str, list[Rule]]] = {}
        self._keys: set[tuple] = set()
        for r in rules:
            if r.key in self._keys:
                raise DuplicateRuleError(f"duplicate rule: {r}")
            self._keys.add(r.key)
            self._by_lemma.setdefault(r.target_lemma, {lv: [] for lv in LEVELS})[r.level].append(r)

    def rules_for(self, lemma: str, level: str | None = None) -> list[Rule]:
        levels = self._by_lemma.get(lemma)
        if levels is None:
            return []
        if level is not None:
            return list(levels[level])
        return [r for lv in LEVELS for r in levels[lv]]

    def with_rule(self, rule: Rule) -> "RuleDb":
        return RuleDb([*self, rule])

    def __iter__(self) -> Iterator[Rule]:
        rules = [r for levels in self._by_lemma.values() for group in levels.values() for r in group]
        return iter(sorted(rules, key=_sort_key))

    def __len__(self) -> int:
        return len(self._keys)

    def __contains__(self, rule: Rule) -> bool:
        return rule.key in self._keys

    def __eq__(self, other):
        return isinstance(other, RuleDb) and self._keys == other._keys

    def counts(self) -> dict[str, int]:
        c = Counter(r.level for r in self)
        return {lv: c.get(lv, 0) for lv in LEVELS}


@dataclass
class CompileReport:
    counts: dict[str, int] = field(default_factory=dict)
    senses_without_examples: list[tuple[str, int]] = field(default_factory=list)
    dropped_domain_rules: int = 0

    def format(self) -> str:
        lines = [f"{lv}\t{self.counts.get(lv, 0)}" for lv in LEVELS]
        lines.append(f"total\t{sum(self.counts.values())}")
        lines.append(f"senses_without_examples\t{len(self.senses_without_examples)}")
        lines.append(f"dropped_domain_rules\t{self.dropped_domain_rules}")
        return "\n".join(lines) + "\n"


def _dedupe(items):
    seen = set()
    out = []
    for x in items:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return tuple(out)


def compile_word_rules(lexicon: Lexicon, report: CompileReport | None = None) -> list[Rule]:
    rules = []
    for entry in lexicon:
        for sense in entry.senses:
            constraints = []
            for dep in sense.example_deps:
                if entry.lemma not in dep.args or dep.args[0] == dep.args[1]:
                    continue
                t = dep.args.index(entry.lemma)
                other = dep.args[1 - t]
                constraints.append(Constraint(dep.label, t + 1, 2 - t, LemmaEquals(other), dep.prep))
            if not constraints:
                if report is not None:
                    report.senses_without_examples.append((entry.lemma, sense.sense_no))
                continue
            rules.append(Rule(WORD, entry.lemma, sense.sense_no, _dedupe(constraints)))
    return rules


def generalize_domain_rules(
    lexicon: Lexicon, word_rules: Iterable[Rule], report: CompileReport | None = None
) -> list[Rule]:
    rules = []
    for wr in word_rules:
        constraints = []
        for c in wr.constraints:
            test = c.test
            if isinstance(test, LemmaEquals):
                domains = lexicon.ambiguity_class(test.lemma)
                test = DomainIn(domains) if domains else Unconstrained()
            constraints.append(Constraint(c.label, c.target_slot, c.other_slot, test, c.prep))
        if all(isinstance(c.test, Unconstrained) for c in constraints):
            if report is not None:
                report.dropped_domain_rules += 1
            continue
        rules.append(Rule(DOMAIN, wr.target_lemma, wr.sense_no, _dedupe(constraints)))
    return rules


def _presence(label: str, animacy: str, prep: str | None = None) -> Constraint:
    test = Unconstrained() if animacy == "any" else AnimacyIs(animacy)
    return Constraint(label, 1, 2, test, prep)


def compile_subcat_rules(lexicon: Lexicon) -> list[Rule]:
    rules = []
    for entry in lexicon:
        if entry.pos != "V":
            continue
        for sense in entry.senses:
            sc = sense.subcat
            if sc is None:
                continue
            constraints = [_presence("SUBJECT", sc.animacy_of("SUBJECT"))]
            if sc.transitivity in ("trans", "trans-obl"):
                constraints.append(_presence("OBJECT", sc.animacy_of("OBJECT")))
            if sc.transitivity == "trans-obl":
                constraints.append(_presence("OBLIQUE", sc.animacy_of("OBLIQUE"), sc.oblique_prep))
            rules.append(Rule(SUBCAT, entry.lemma, sense.sense_no, tuple(constraints)))
    return rules


def compile_rules(lexicon: Lexicon) -> tuple[RuleDb, CompileReport]:
    report = CompileReport()
    word = compile_word_rules(lexicon, report)
    domain = generalize_domain_rules(lexicon, word, report)
    subcat = compile_subcat_rules(lexicon)
    unique = {}
    for r in word + domain + subcat:
        unique.setdefault(r.key, r)
    db = RuleDb(unique.values())
    report.counts = db.counts()
    return db, report


# -- rule file ---------------------------------------------------------------

_RULE_RE = re.compile(r"^RULE (?P<level>\S+) (?P<lemma>\S+) (?P<sense>\d+) :: (?P<body>.+)$")
_CONSTRAINT_RE = re.compile(
    r"^(?P<label>[^\[\]{};\s]+)\[(?P<t>\d+),(?P<o>\d+)\]"
    r"(?:\[prep=(?P<prep>[^\]\s]+)\])?\{(?P<test>[^{}]*)\}$"
)


def serialize_rules(db: RuleDb) -> str:
    return "\n".join([RULES_HEADER, *(str(r) for r in db)]) + "\n"


def _parse_test(text: str) -> Test:
    if text == "*":
        return Unconstrained()
    key, eq, value = text.partition("=")
    if not eq or not value:
        raise ValueError(f"bad test {text!r}")
    if key == "lemma":
        if not LEMMA_RE.match(value):
            raise ValueError(f"bad lemma {value!r}")
        return LemmaEquals(value)
    if key == "dom":
        return DomainIn(frozenset(value.split(",")))
    if key == "anim":
        if value not in ANIMACY:
            raise ValueError(f"unknown animacy {value!r}")
        return AnimacyIs(value)
    raise ValueError(f"unknown test {key!r}")


def parse_rules(text: str, source: str = "<string>") -> RuleDb:
    rules = []
    seen: dict[tuple, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _RULE_RE.match(line)
        if not m:
            raise FormatError("expected 'RULE <level> <lemma> <sense> :: <constraints>'", lineno, source)
        constraints = []
        for part in m.group("body").split(" ; "):
            cm = _CONSTRAINT_RE.match(part.strip())
            if not cm or not LABEL_RE.match(cm.group("label")):
                raise FormatError(f"bad constraint {part.strip()!r}", lineno, source)
            try:
                constraints.append(
                    Constraint(
                        cm.group("label"),
                        int(cm.group("t")),
                        int(cm.group("o")),
                        _parse_test(cm.group("test")),
                        cm.group("prep"),
                    )
                )
            except ValueError as exc:
                raise FormatError(str(exc), lineno, source) from None
        try:
            rule = Rule(m.group("level"), m.group("lemma"), int(m.group("sense")), tuple(constraints))
        except ValueError as exc:
            raise FormatError(str(exc), lineno, source) from None
        if rule.key in seen:
            raise DuplicateRuleError(f"{source}:{lineno}: duplicate of the rule at line {seen[rule.key]}")
        seen[rule.key] = lineno
        rules.append(rule)
    return RuleDb(rules)


def read_rules(path: str | Path) -> RuleDb:
    path = Path(path)
    return parse_rules(path.read_text(encoding="utf-8"), source=str(path))


def check_rules_against(db: RuleDb, lexicon: Lexicon) -> list[str]:
    """Rules whose (lemma, sense) does not resolve in ``lexicon``."""
    return [str(r) for r in db if lexicon.sense(r.target_lemma, r.sense_no) is None]
