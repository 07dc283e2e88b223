"""Score sense assignments against gold annotations.

Ratios are kept as exact fractions and rounded half-up only when printed, so
448/604 is shown as 74.17% and 448/1027 as 43.62%.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .deps import DependencyIndex, Provenance
from .errors import FormatError
from .lexicon import Lexicon
from .wsd import SenseAssignment

CATEGORIES = ("tokenization", "tagging", "parsing", "wsd")
_GOLD_CODES = {"-": None, "tok": "tokenization", "tag": "tagging", "parse": "parsing"}
_ROW_NAMES = {
    "tokenization": "Tokenization mistakes",
    "tagging": "Tagging mistakes",
    "parsing": "Parsing mistakes",
    "wsd": "WSD mistakes",
}
STRICT, UPPER = "strict", "upper"

GOLD_HEADER = "doc\tsent\ttoken_id\tsense_no\tcategory"


@dataclass(frozen=True)
class GoldAnnotation:
    doc_id: str
    sent_id: str
    token_id: int
    sense_no: int
    category: str | None = None

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.doc_id, self.sent_id, self.token_id)


def parse_gold(text: str, source: str = "<string>") -> dict[tuple[str, str, int], GoldAnnotation]:
    gold: dict[tuple[str, str, int], GoldAnnotation] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#") or (lineno == 1 and line == GOLD_HEADER):
            continue
        cols = line.split("\t")
        if len(cols) != 5:
            raise FormatError(f"expected 5 columns, got {len(cols)}", lineno, source)
        doc, sent, tid, sense, cat = cols
        if cat not in _GOLD_CODES:
            raise FormatError(f"unknown error category {cat!r}", lineno, source)
        try:
            g = GoldAnnotation(doc, sent, int(tid), int(sense), _GOLD_CODES[cat])
        except ValueError as exc:
            raise FormatError(str(exc), lineno, source) from None
        if g.key in gold:
            raise FormatError(f"second annotation for token {g.key}", lineno, source)
        gold[g.key] = g
    return gold


def read_gold(path: str | Path) -> dict[tuple[str, str, int], GoldAnnotation]:
    path = Path(path)
    return parse_gold(path.read_text(encoding="utf-8"), source=str(path))


def serialize_gold(gold: Iterable[GoldAnnotation]) -> str:
    codes = {v: k for k, v in _GOLD_CODES.items()}
    lines = [GOLD_HEADER]
    for g in gold:
        lines.append(f"{g.doc_id}\t{g.sent_id}\t{g.token_id}\t{g.sense_no}\t{codes[g.category]}")
    return "\n".join(lines) + "\n"


@dataclass
class EvalReport:
    performed: int = 0
    correct: int = 0
    mistakes: dict[str, int] = field(default_factory=lambda: dict.fromkeys(CATEGORIES, 0))
    possible: int = 0
    mode: str = STRICT
    missing_gold: list[tuple[str, str, int]] = field(default_factory=list)

    def __post_init__(self):
        if self.performed != self.correct + sum(self.mistakes.values()):
            raise ValueError("performed must equal correct plus all mistakes")

    @property
    def precision(self) -> Fraction | None:
        return Fraction(self.correct, self.performed) if self.performed else None

    @property
    def recall(self) -> Fraction:
        return Fraction(self.correct, self.possible) if self.possible else Fraction(0)

    @property
    def noise(self) -> Fraction | None:
        return Fraction(self.performed - self.correct, self.performed) if self.performed else None

    def share(self, category: str) -> Fraction | None:
        return Fraction(self.mistakes[category], self.performed) if self.performed else None


def score_run(
    assignments: Iterable[SenseAssignment],
    gold: dict[tuple[str, str, int], GoldAnnotation],
    mode: str = STRICT,
) -> EvalReport:
    """Count correct and mistaken disambiguations.

    In ``strict`` mode an assignment is right only when it proposes exactly
    the gold sense; ``upper`` accepts any candidate list containing it. Wrong
    answers go to the upstream category recorded in the gold file, else to WSD.
    The recall denominator is the number of gold rows.
    """
    if mode not in (STRICT, UPPER):
        raise ValueError(f"unknown scoring mode {mode!r}")
    mistakes = dict.fromkeys(CATEGORIES, 0)
    correct = performed = 0
    missing = []
    for a in assignments:
        g = gold.get((a.doc_id, a.sent_id, a.token_id))
        if g is None:
            missing.append((a.doc_id, a.sent_id, a.token_id))
            continue
        performed += 1
        ok = g.sense_no in a.senses if mode == UPPER else a.senses == (g.sense_no,)
        if ok:
            correct += 1
        else:
            mistakes[g.category or "wsd"] += 1
    return EvalReport(performed, correct, mistakes, len(gold), mode, missing)


def percent(value: Fraction | None) -> str:
    """Percentage with two decimals, rounding half up on the exact value."""
    if value is None:
        return "n/a"
    hundredths = math.floor(Fraction(value) * 10000 + Fraction(1, 2))
    return f"{hundredths // 100}.{hundredths % 100:02d}%"


def format_report(report: EvalReport) -> str:
    rows = [(_ROW_NAMES[c], str(report.mistakes[c]), percent(report.share(c))) for c in CATEGORIES]
    rows.append(("Precision", str(report.correct), percent(report.precision)))
    rows.append(("Recall", "", percent(report.recall)))
    return "".join(f"{name:<22}{count:>6}  {pct:>8}\n" for name, count, pct in rows)


def report_to_tsv(report: EvalReport) -> str:
    lines = [
        "row\tcount\tpercent",
        f"mode\t{report.mode}\t-",
        f"performed\t{report.performed}\t-",
        f"possible\t{report.possible}\t-",
    ]
    for c in CATEGORIES:
        lines.append(f"{c}\t{report.mistakes[c]}\t{percent(report.share(c))}")
    lines.append(f"precision\t{report.correct}\t{percent(report.precision)}")
    lines.append(f"recall\t-\t{percent(report.recall)}")
    lines.append(f"noise\t{report.performed - report.correct}\t{percent(report.noise)}")
    return "\n".join(lines) + "\n"


def parse_report_tsv(text: str) -> EvalReport:
    rows = {}
    for line in text.splitlines()[1:]:
        if line.strip():
            name, count, pct = line.split("\t")
            rows[name] = (count, pct)
    report = EvalReport(
        performed=int(rows["performed"][0]),
        correct=int(rows["precision"][0]),
        mistakes={c: int(rows[c][0]) for c in CATEGORIES},
        possible=int(rows["possible"][0]),
        mode=rows["mode"][0],
    )
    for c in CATEGORIES:
        if percent(report.share(c)) != rows[c][1]:
            raise ValueError(f"{c}: percentage {rows[c][1]} does not match its count")
    if percent(report.precision) != rows["precision"][1] or percent(report.recall) != rows["recall"][1]:
        raise ValueError("precision/recall percentages do not match the counts")
    return report


@dataclass
class SanityResult:
    value: Fraction
    checked: int
    violations: list[str] = field(default_factory=list)


def enrichment_sanity(
    assignments: Iterable[SenseAssignment],
    indexes: DependencyIndex | Iterable[DependencyIndex],
    lexicon: Lexicon,
    gold: dict[tuple[str, str, int], GoldAnnotation],
) -> SanityResult:
    """Share of correctly disambiguated words whose enrichments all come from the gold sense.

    An enriched record is attributed to a word through its source sense lemma
    within the same sentence. It must name the gold sense, and that sense must
    actually license what was introduced: a synonym or template lemma, or a
    converse verb reached through the sense's class correspondences.
    """
    if isinstance(indexes, DependencyIndex):
        indexes = [indexes]
    by_sentence = {(ix.doc_id, s.sent_id): s for ix in indexes for s in ix.sentences}
    correct = []
    for a in assignments:
        g = gold.get((a.doc_id, a.sent_id, a.token_id))
        if g is not None and a.senses == (g.sense_no,):
            correct.append((a, g))
    if not correct:
        return SanityResult(Fraction(1), 0)
    good = 0
    violations = []
    for a, g in correct:
        sentence = by_sentence.get((a.doc_id, a.sent_id))
        ok = True
        if sentence is not None:
            original = {t for r in sentence.originals for t in r.dep.args}
            for r in sentence.records:
                if r.is_original or r.source_sense[0] != a.lemma:
                    continue
                where = f"{a.doc_id}/{a.sent_id}/{a.token_id} {sentence.render(r.dep)}"
                if r.source_sense[1] != g.sense_no:
                    ok = False
                    violations.append(f"{where}: from sense {r.source_sense[1]}, gold sense is {g.sense_no}")
                    continue
                introduced = {sentence.lemma(t) for t in r.dep.args if t not in original}
                if not introduced <= _licensed(lexicon, a.lemma, g.sense_no, r.provenance):
                    ok = False
                    violations.append(f"{where}: {sorted(introduced)} not licensed by {a.lemma}#{g.sense_no}")
        good += ok
    return SanityResult(Fraction(good, len(correct)), len(correct), violations)


def _licensed(lexicon: Lexicon, lemma: str, sense_no: int, provenance: Provenance) -> set[str]:
    sense = lexicon.sense(lemma, sense_no)
    if sense is None:
        return set()
    if provenance is Provenance.LEXICAL:
        return set(sense.single_synonyms)
    if provenance is Provenance.MWE:
        out = {lemma}
        for m in sense.multiword_synonyms:
            out |= m.template_lemmas()
        return out
    out = set()
    if sense.class_code:
        for c in lexicon.correspondences_from(sense.class_code):
            out |= {lem for lem, _ in lexicon.verbs_with_class(c.to_class)}
    return out
