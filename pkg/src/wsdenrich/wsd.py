"""Apply compiled rules to parsed sentences and choose senses.

Word rules are tried first; only when none fires are domain rules scored, and
subcat rules are the last resort. A rule may fire with only part of its
constraints satisfied; candidates are then ordered by the number of satisfied
constraints, the rule score and finally the sense number.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .deps import DependencyIndex, Sentence, Token
from .errors import FormatError
from .lexicon import Lexicon
from .rulegen import DOMAIN, SUBCAT, WORD, AnimacyIs, DomainIn, LemmaEquals, Rule, RuleDb, Unconstrained

MONO = "mono"
ASSIGNMENT_LEVELS = (WORD, DOMAIN, SUBCAT, MONO)
DEFAULT_UNCONSTRAINED = Fraction(1, 2)


def jaccard(a: Iterable[str], b: Iterable[str]) -> Fraction:
    a, b = set(a), set(b)
    union = a | b
    if not union:
        return Fraction(0)
    return Fraction(len(a & b), len(union))


@dataclass(frozen=True)
class Policy:
    """How many of the ranked candidates survive: all, the first, or one drawn at random."""

    kind: str = "all"
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("all", "first", "random"):
            raise ValueError(f"unknown policy {self.kind!r}")
        if (self.kind == "random") != (self.seed is not None):
            raise ValueError("a seed is required for, and only for, the random policy")

    def __str__(self):
        return f"random:{self.seed}" if self.kind == "random" else self.kind

    @classmethod
    def parse(cls, text: str) -> "Policy":
        kind, _, seed = text.partition(":")
        return cls(kind, int(seed) if seed else None)


ALL = Policy("all")
FIRST = Policy("first")


@dataclass(frozen=True)
class MatchResult:
    rule: Rule
    sense_no: int
    satisfied: int
    score: Fraction


@dataclass(frozen=True)
class Candidate:
    sense_no: int
    level: str
    score: Fraction
    satisfied: int = 0


@dataclass(frozen=True)
class SenseAssignment:
    doc_id: str
    sent_id: str
    token_id: int
    lemma: str
    candidates: tuple[Candidate, ...]
    policy: Policy = ALL

    def __post_init__(self):
        if not self.candidates:
            raise ValueError("an assignment needs at least one candidate sense")

    @property
    def senses(self) -> tuple[int, ...]:
        return tuple(c.sense_no for c in self.candidates)

    @property
    def level(self) -> str:
        return self.candidates[0].level

    @property
    def score(self) -> Fraction:
        return self.candidates[0].score


def _contribution(test, other_lemma: str, lexicon: Lexicon, unconstrained: Fraction) -> Fraction:
    if isinstance(test, LemmaEquals):
        return Fraction(1) if other_lemma == test.lemma else Fraction(0)
    if isinstance(test, DomainIn):
        return jaccard(test.domains, lexicon.ambiguity_class(other_lemma))
    if isinstance(test, AnimacyIs):
        return Fraction(1) if lexicon.animacy(other_lemma) == test.animacy else Fraction(0)
    if isinstance(test, Unconstrained):
        return unconstrained
    raise TypeError(f"unknown test {test!r}")


def match_rule(
    rule: Rule,
    sentence: Sentence,
    lexicon: Lexicon,
    token_id: int | None = None,
    unconstrained: Fraction = DEFAULT_UNCONSTRAINED,
) -> MatchResult | None:
    """Score ``rule`` against the original dependencies of ``sentence``.

    Each constraint takes the best contribution over the sentence
    dependencies that fit its label, preposition and target slot; the score
    is the mean over all constraints, unsatisfied ones counting 0. With
    ``token_id`` only dependencies on that token count as target occurrences.
    """
    unconstrained = Fraction(unconstrained)
    total = Fraction(0)
    satisfied = 0
    for c in rule.constraints:
        best = Fraction(0)
        for rec in sentence.originals:
            dep = rec.dep
            if dep.label != c.label:
                continue
            if c.prep is not None and dep.prep != c.prep:
                continue
            target = dep.args[c.target_slot - 1]
            if token_id is not None and target != token_id:
                continue
            if sentence.lemma(target) != rule.target_lemma:
                continue
            other = sentence.lemma(dep.args[c.other_slot - 1])
            best = max(best, _contribution(c.test, other, lexicon, unconstrained))
        if best > 0:
            satisfied += 1
            total += best
    if satisfied == 0:
        return None
    return MatchResult(rule, rule.sense_no, satisfied, total / len(rule.constraints))


def _apply_policy(
    candidates: list[Candidate], policy: Policy, doc_id: str, sent_id: str, token_id: int
) -> tuple[Candidate, ...]:
    if policy.kind == "first":
        return (candidates[0],)
    if policy.kind == "random":
        # Seeded per token so the draw does not depend on processing order.
        rng = random.Random(f"{policy.seed}/{doc_id}/{sent_id}/{token_id}")
        return (rng.choice(candidates),)
    return tuple(candidates)


def rank_candidates(
    db: RuleDb,
    lexicon: Lexicon,
    sentence: Sentence,
    token: Token,
    unconstrained: Fraction = DEFAULT_UNCONSTRAINED,
) -> list[Candidate]:
    """Distinct senses proposed by the highest rule level that fires, best first."""
    entry = lexicon.entry(token.lemma, token.pos)
    valid = {s.sense_no for s in entry.senses} if entry else set()
    for level in (WORD, DOMAIN, SUBCAT):
        best: dict[int, MatchResult] = {}
        for rule in db.rules_for(token.lemma, level):
            if rule.sense_no not in valid:
                continue
            m = match_rule(rule, sentence, lexicon, token.id, unconstrained)
            if m is None:
                continue
            prev = best.get(m.sense_no)
            if prev is None or (m.satisfied, m.score) > (prev.satisfied, prev.score):
                best[m.sense_no] = m
        if best:
            ranked = sorted(best.values(), key=lambda m: (-m.satisfied, -m.score, m.sense_no))
            return [Candidate(m.sense_no, level, m.score, m.satisfied) for m in ranked]
    return []


def disambiguate_token(
    db: RuleDb,
    lexicon: Lexicon,
    sentence: Sentence,
    token: Token | int,
    policy: Policy = ALL,
    doc_id: str = "",
    unconstrained: Fraction = DEFAULT_UNCONSTRAINED,
) -> SenseAssignment | None:
    """Assign a sense to one token, or ``None`` when no rule at any level fires.

    Tokens whose entry has a single sense get it directly with level ``mono``.
    """
    if isinstance(token, int):
        token = sentence.token(token)
    entry = lexicon.entry(token.lemma, token.pos)
    if entry is None:
        return None
    if not entry.is_polysemous:
        cand = (Candidate(entry.senses[0].sense_no, MONO, Fraction(1)),)
        return SenseAssignment(doc_id, sentence.sent_id, token.id, token.lemma, cand, policy)
    ranked = rank_candidates(db, lexicon, sentence, token, unconstrained)
    if not ranked:
        return None
    chosen = _apply_policy(ranked, policy, doc_id, sentence.sent_id, token.id)
    return SenseAssignment(doc_id, sentence.sent_id, token.id, token.lemma, chosen, policy)


def disambiguate_document(
    db: RuleDb,
    lexicon: Lexicon,
    index: DependencyIndex,
    policy: Policy = ALL,
    unconstrained: Fraction = DEFAULT_UNCONSTRAINED,
) -> list[SenseAssignment]:
    out = []
    for sentence in index.sentences:
        for token in sentence.tokens:
            a = disambiguate_token(db, lexicon, sentence, token, policy, index.doc_id, unconstrained)
            if a is not None:
                out.append(a)
    return out


# -- assignment TSV ----------------------------------------------------------

ASSIGNMENT_HEADER = "doc\tsent\ttoken_id\tlemma\tsenses\tlevel\tscore\tpolicy"


def format_score(score: Fraction) -> str:
    d = Decimal(score.numerator) / Decimal(score.denominator)
    return str(d.quantize(Decimal("0.0001"), rounding=ROUND_HALF_UP))


def serialize_assignments(assignments: Iterable[SenseAssignment]) -> str:
    lines = [ASSIGNMENT_HEADER]
    for a in assignments:
        lines.append(
            "\t".join(
                (
                    a.doc_id,
                    a.sent_id,
                    str(a.token_id),
                    a.lemma,
                    ",".join(str(n) for n in a.senses),
                    a.level,
                    format_score(a.score),
                    str(a.policy),
                )
            )
        )
    return "\n".join(lines) + "\n"


def parse_assignments(text: str, source: str = "<string>") -> list[SenseAssignment]:
    """Read an assignment TSV back. Only the head candidate's score survives the trip."""
    lines = text.splitlines()
    if not lines or lines[0] != ASSIGNMENT_HEADER:
        raise FormatError("missing assignment header", 1, source)
    out = []
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 8:
            raise FormatError(f"expected 8 columns, got {len(cols)}", lineno, source)
        doc, sent, tid, lemma, senses, level, score, policy = cols
        try:
            nums = [int(n) for n in senses.split(",")]
            frac = Fraction(Decimal(score))
            pol = Policy.parse(policy)
            token_id = int(tid)
        except (ValueError, ArithmeticError) as exc:
            raise FormatError(str(exc), lineno, source) from None
        if level not in ASSIGNMENT_LEVELS:
            raise FormatError(f"unknown level {level!r}", lineno, source)
        cands = tuple(Candidate(n, level, frac) for n in nums)
        out.append(SenseAssignment(doc, sent, token_id, lemma, cands, pol))
    return out


def read_assignments(path: str | Path) -> list[SenseAssignment]:
    path = Path(path)
    return parse_assignments(path.read_text(encoding="utf-8"), source=str(path))
