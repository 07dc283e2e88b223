import time
from pathlib import Path

import pytest

import wsdenrich
from wsdenrich.deps import DependencyIndex, parse_deps, parse_deps_text, serialize_document
from wsdenrich.lexicon import parse_lexicon
from wsdenrich.rulegen import compile_rules
from wsdenrich.wsd import disambiguate_document

GOLDEN = Path(__file__).parent / "golden"

SESSION = {"start": time.perf_counter(), "outcomes": {}, "criteria": []}


def pytest_collection_modifyitems(items):
    # acceptance checks run last so they can see how the rest of the session went
    items.sort(key=lambda item: item.module.__name__ == "test_acceptance")


def pytest_runtest_logreport(report):
    if report.when == "call" or report.outcome != "passed":
        SESSION["outcomes"][report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if SESSION["criteria"]:
        terminalreporter.section("acceptance criteria")
        for line in sorted(SESSION["criteria"], key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def lexicon():
    return parse_lexicon(wsdenrich.MINI_LEXICON)


@pytest.fixture(scope="session")
def rules(lexicon):
    db, _ = compile_rules(lexicon)
    return db


@pytest.fixture(scope="session")
def docs():
    return {d.doc_id: d for d in parse_deps(wsdenrich.SAMPLE_DOCS)}


@pytest.fixture
def assign(lexicon, rules):
    def run(doc: DependencyIndex, **kw):
        return disambiguate_document(rules, lexicon, doc, **kw)

    return run


def one_doc(text: str) -> DependencyIndex:
    (doc,) = parse_deps_text(text)
    return doc


def write_doc(tmp_path: Path, doc: DependencyIndex, name: str = "doc.txt") -> Path:
    path = tmp_path / name
    path.write_text(serialize_document(doc), encoding="utf-8")
    return path


def published_counts_run():
    """Synthetic gold and assignments with 604 answers, 448 right, mistakes 44/19/9/84, 1027 gold rows."""
    from wsdenrich.evalharness import GoldAnnotation
    from wsdenrich.wsd import Candidate, SenseAssignment

    plan = [(None, True)] * 448 + [("tokenization", False)] * 44 + [("tagging", False)] * 19
    plan += [("parsing", False)] * 9 + [(None, False)] * 84
    gold, assignments = [], []
    for i, (category, right) in enumerate(plan):
        gold.append(GoldAnnotation("t1", str(i), 1, 1, category))
        chosen = 1 if right else 2
        assignments.append(SenseAssignment("t1", str(i), 1, "w", (Candidate(chosen, "word", 1),)))
    for i in range(len(plan), 1027):
        gold.append(GoldAnnotation("t1", str(i), 1, 1))
    return gold, assignments
