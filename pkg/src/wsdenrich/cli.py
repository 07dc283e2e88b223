"""Batch entry point: ``wsdenrich compile-rules|disambiguate|enrich|evaluate|query``.

Exit codes: 0 success, 1 bad input, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .deps import DependencyIndex, parse_deps, parse_deps_text, read_index, serialize_indexes
from .enrich import EnrichmentPlan, EnrichmentReport, enrich_document, match_query
from .errors import DuplicateRuleError, FormatError, InconsistentInput, ValidationError
from .evalharness import STRICT, UPPER, format_report, read_gold, report_to_tsv, score_run
from .lexicon import parse_lexicon
from .rulegen import check_rules_against, compile_rules, read_rules, serialize_rules
from .wsd import DEFAULT_UNCONSTRAINED, Policy, disambiguate_document, read_assignments, serialize_assignments

INPUT_ERRORS = (FormatError, ValidationError, InconsistentInput, DuplicateRuleError, OSError, ValueError)


class InvariantViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class Config:
    lexicon: Path | None = None
    rules: Path | None = None
    policy: Policy = Policy()
    levels: EnrichmentPlan = EnrichmentPlan()
    unconstrained: Fraction = DEFAULT_UNCONSTRAINED
    jobs: int = 1
    out: Path | None = None

    def __post_init__(self):
        if not 0 < self.unconstrained <= 1:
            raise ValueError("--unconstrained must lie in (0, 1]")
        if self.jobs < 1:
            raise ValueError("--jobs must be at least 1")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "Config":
        policy = Policy()
        if getattr(args, "policy", None):
            seed = args.seed
            if args.policy != "random" and seed is not None:
                raise ValueError("--seed is only meaningful with --policy random")
            if args.policy == "random" and seed is None:
                raise ValueError("--policy random requires --seed")
            policy = Policy(args.policy, seed)
        levels = EnrichmentPlan()
        if getattr(args, "levels", None) is not None:
            levels = EnrichmentPlan.parse(args.levels, getattr(args, "max_additions", None))
        unconstrained = getattr(args, "unconstrained", None)
        return cls(
            lexicon=getattr(args, "lexicon", None),
            rules=getattr(args, "rules", None),
            policy=policy,
            levels=levels,
            unconstrained=DEFAULT_UNCONSTRAINED if unconstrained is None else Fraction(unconstrained),
            jobs=getattr(args, "jobs", 1) or 1,
            out=getattr(args, "out", None),
        )


def _emit(text: str, path: Path | None):
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8", newline="\n")


def _load_docs(paths: list[Path]) -> list[DependencyIndex]:
    docs = []
    for p in paths:
        docs.extend(parse_deps(p))
    seen = set()
    for d in docs:
        if d.doc_id in seen:
            raise InconsistentInput(f"document id {d.doc_id!r} appears twice")
        seen.add(d.doc_id)
    return docs


def _map(fn, items, jobs: int):
    if jobs == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def cmd_compile(args, cfg: Config) -> int:
    lexicon = parse_lexicon(cfg.lexicon)
    db, report = compile_rules(lexicon)
    _emit(serialize_rules(db), cfg.out)
    text = report.format()
    if args.report:
        args.report.write_text(text, encoding="utf-8", newline="\n")
    else:
        (sys.stdout if cfg.out else sys.stderr).write(text)
    return 0


def cmd_disambiguate(args, cfg: Config) -> int:
    lexicon = parse_lexicon(cfg.lexicon)
    db = read_rules(cfg.rules)
    unknown = check_rules_against(db, lexicon)
    if unknown:
        raise InconsistentInput(f"{len(unknown)} rule(s) name senses missing from the lexicon, e.g. {unknown[0]}")
    docs = _load_docs(args.docs)
    per_doc = _map(lambda d: disambiguate_document(db, lexicon, d, cfg.policy, cfg.unconstrained), docs, cfg.jobs)
    _emit(serialize_assignments(a for group in per_doc for a in group), cfg.out)
    return 0


def cmd_enrich(args, cfg: Config) -> int:
    lexicon = parse_lexicon(cfg.lexicon)
    docs = _load_docs(args.docs)
    assignments = read_assignments(args.assignments)
    known = {d.doc_id for d in docs}
    stray = sorted({a.doc_id for a in assignments} - known)
    if stray:
        raise InconsistentInput(f"assignments refer to unknown documents {stray}")

    def run(doc):
        report = EnrichmentReport()
        enriched = enrich_document(doc, assignments, lexicon, cfg.levels, report)
        if enriched.original_multiset() != doc.original_multiset():
            raise InvariantViolation(f"{doc.doc_id}: enrichment altered original records")
        return enriched, report

    results = _map(run, docs, cfg.jobs)
    _emit(serialize_indexes(ix for ix, _ in results), cfg.out)
    merged = EnrichmentReport()
    for _, rep in results:
        merged.additions.update(rep.additions)
        merged.skipped.extend(rep.skipped)
    if args.report:
        args.report.write_text(merged.format(), encoding="utf-8", newline="\n")
    return 0


def cmd_evaluate(args, cfg: Config) -> int:
    gold = read_gold(args.gold)
    if not gold:
        raise InconsistentInput(f"{args.gold}: gold file has no annotations")
    assignments = read_assignments(args.assignments)
    modes = [STRICT, UPPER] if args.mode == "both" else [args.mode]
    text, tsv = [], []
    for mode in modes:
        report = score_run(assignments, gold, mode)
        if len(modes) > 1:
            text.append(f"[{mode}]\n")
        text.append(format_report(report))
        tsv.append(report_to_tsv(report))
        if mode == modes[0] and report.missing_gold:
            sys.stderr.write(f"warning: {len(report.missing_gold)} assignment(s) without gold annotation\n")
    _emit("".join(text), cfg.out)
    if args.tsv:
        args.tsv.write_text("".join(tsv), encoding="utf-8", newline="\n")
    return 0


def cmd_query(args, cfg: Config) -> int:
    lexicon = parse_lexicon(cfg.lexicon)
    db = read_rules(cfg.rules) if cfg.rules else None
    indexes = read_index(args.index)
    queries = parse_deps_text(args.query.read_text(encoding="utf-8"), str(args.query), allow_placeholders=True)
    sentences = {(ix.doc_id, s.sent_id): s for ix in indexes for s in ix.sentences}
    lines = ["query\tdoc\tsent\tmode\trecords"]
    for q in queries:
        for qs in q.sentences:
            for m in match_query(indexes, qs, lexicon, db):
                rendered = m.render(sentences[(m.doc_id, m.sent_id)])
                lines.append(f"{q.doc_id}/{qs.sent_id}\t{m.doc_id}\t{m.sent_id}\t{m.mode}\t{rendered}")
    _emit("\n".join(lines) + "\n", cfg.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wsdenrich", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile-rules", help="compile the three-level rule database from a lexicon")
    c.add_argument("--lexicon", type=Path, required=True)
    c.add_argument("--out", type=Path)
    c.add_argument("--report", type=Path, help="write the per-level compile report here")
    c.set_defaults(func=cmd_compile)

    d = sub.add_parser("disambiguate", help="assign senses to the tokens of parsed documents")
    d.add_argument("docs", type=Path, nargs="+")
    d.add_argument("--lexicon", type=Path, required=True)
    d.add_argument("--rules", type=Path, required=True)
    d.add_argument("--policy", choices=("all", "first", "random"), default="all")
    d.add_argument("--seed", type=int)
    d.add_argument("--unconstrained", type=Fraction, help="score of an unconstrained constraint (default 1/2)")
    d.add_argument("--jobs", type=int, default=1)
    d.add_argument("--out", type=Path)
    d.set_defaults(func=cmd_disambiguate)

    e = sub.add_parser("enrich", help="add contextual synonyms to the dependency index")
    e.add_argument("docs", type=Path, nargs="+")
    e.add_argument("--lexicon", type=Path, required=True)
    e.add_argument("--assignments", type=Path, required=True)
    e.add_argument("--levels", default="lex,mwe,conv")
    e.add_argument("--max-additions", type=int, dest="max_additions")
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--out", type=Path)
    e.add_argument("--report", type=Path)
    e.set_defaults(func=cmd_enrich)

    v = sub.add_parser("evaluate", help="score assignments against a gold file")
    v.add_argument("gold", type=Path)
    v.add_argument("--assignments", type=Path, required=True)
    v.add_argument("--mode", choices=(STRICT, UPPER, "both"), default=STRICT)
    v.add_argument("--out", type=Path)
    v.add_argument("--tsv", type=Path, help="machine-readable twin of the report")
    v.set_defaults(func=cmd_evaluate)

    q = sub.add_parser("query", help="match dependency patterns against an enriched index")
    q.add_argument("query", type=Path)
    q.add_argument("--index", type=Path, required=True)
    q.add_argument("--lexicon", type=Path, required=True)
    q.add_argument("--rules", type=Path)
    q.add_argument("--out", type=Path)
    q.set_defaults(func=cmd_query)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = Config.from_args(args)
        return args.func(args, cfg)
    except InvariantViolation as exc:
        sys.stderr.write(f"wsdenrich: internal invariant violated: {exc}\n")
        return 2
    except INPUT_ERRORS as exc:
        sys.stderr.write(f"wsdenrich: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
