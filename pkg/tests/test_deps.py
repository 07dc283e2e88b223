import pytest

from wsdenrich.deps import (
    INDEX_HEADER,
    Dependency,
    DependencyIndex,
    IndexRecord,
    Provenance,
    deps_involving,
    normalize_index,
    parse_dep_term,
    parse_deps_text,
    parse_index,
    serialize_document,
    serialize_index,
)
from wsdenrich.errors import DanglingTokenRef, FormatError, UnknownSentence

from conftest import one_doc

TEMPERATURE = """\
#DOC temperature
#SENT 1
T 1 température N
T 2 grimper V
D SUBJECT 2 1
"""


def test_single_subject_sentence_gives_one_original_record():
    doc = one_doc(TEMPERATURE)
    (sent,) = doc.sentences
    (rec,) = sent.records
    assert rec.provenance is Provenance.ORIGINAL
    assert rec.source_sense is None
    assert sent.render(rec.dep) == "SUBJECT(grimper,température)"


def test_empty_document_block():
    doc = one_doc("#DOC empty\n")
    assert doc.sentences == ()
    assert doc.record_count == 0


def test_dangling_reference():
    with pytest.raises(DanglingTokenRef) as err:
        parse_deps_text("#DOC d\n#SENT 1\nT 1 a N\nT 2 b V\nD SUBJECT 2 9\n", source="d.txt")
    assert err.value.token_id == 9
    assert err.value.line == 5


def test_dependency_may_precede_its_tokens():
    doc = one_doc("#DOC d\n#SENT 1\nD SUBJECT 2 1\nT 1 a N\nT 2 b V\n")
    assert doc.record_count == 1


@pytest.mark.parametrize(
    "body, fragment",
    [
        ("T 1 a\n", "expected 'T"),
        ("T x a N\n", "not an integer"),
        ("T 1 a Q\n", "unknown POS"),
        ("T 1 a N\nT 1 b N\n", "duplicate token"),
        ("T 1 a N\nT 2 b N\nD subject 1 2\n", "bad label"),
        ("T 1 a N\nT 2 b N\nD SUBJECT 1 de 2\n", "not a prepositional label"),
        ("T 1 a N\nT 2 b N\nD SUBJECT 1 ?\n", "not an integer"),
        ("X 1\n", "unknown record type"),
    ],
)
def test_malformed_lines(body, fragment):
    with pytest.raises(FormatError, match=fragment):
        parse_deps_text("#DOC d\n#SENT 1\n" + body)


def test_placeholders_only_in_queries():
    (q,) = parse_deps_text("#DOC q\n#SENT 1\nT 1 a V\nD SUBJECT 1 ?\n", allow_placeholders=True)
    assert q.sentences[0].records[0].dep.args == (1, "?")


def test_dep_term_with_preposition():
    dep = parse_dep_term("VMODOBJ(drift,towards,recession)")
    assert dep.args == ("drift", "recession")
    assert dep.prep == "towards"
    assert dep.arity == 3
    assert str(dep) == "VMODOBJ(drift,towards,recession)"


def test_converse_oblique_label_is_prepositional():
    assert Dependency("OBLIQUE-DE", (1, 2), "de").arity == 3
    with pytest.raises(ValueError):
        Dependency("EPITHET", (1, 2), "de")


def test_record_provenance_invariant():
    dep = Dependency("SUBJECT", (2, 1))
    with pytest.raises(ValueError):
        IndexRecord(dep, Provenance.LEXICAL)
    with pytest.raises(ValueError):
        IndexRecord(dep, Provenance.ORIGINAL, ("grimper", 1))


class TestDepsInvolving:
    def test_editer_in_specialist_sentence(self, docs):
        recs = deps_involving(docs["edition"], "1", 2)
        sent = docs["edition"].sentence("1")
        assert [sent.render(r.dep) for r in recs] == ["SUBJECT(éditer,spécialiste)", "OBJECT(éditer,manuscrit)"]

    def test_token_without_dependencies(self):
        doc = one_doc(TEMPERATURE.replace("D SUBJECT", "T 3 vite ADV\nD SUBJECT"))
        assert deps_involving(doc, "1", 3) == []

    def test_second_slot_only(self, docs):
        # société is only ever the object of the preposition in PP(avion,de,société)
        doc = docs["plane"]
        got = deps_involving(doc, "1", 2)
        expected = [r for r in doc.sentence("1").records if 2 in r.dep.args]
        assert got == expected
        assert [doc.sentence("1").render(r.dep) for r in got] == ["PP(avion,de,société)"]

    def test_unknown_sentence(self, docs):
        with pytest.raises(UnknownSentence):
            deps_involving(docs["temperature"], "42", 1)


class TestIndexTsv:
    def test_empty_index_is_header_only(self):
        assert serialize_index(DependencyIndex("d")) == INDEX_HEADER + "\n"

    def test_columns_and_order(self, docs):
        text = serialize_index(docs["plane"])
        lines = text.splitlines()
        assert lines[0] == INDEX_HEADER
        assert lines[1:] == [
            "plane\t1\tEPITHET\tcercle\t-\tlarge\torig\t-",
            "plane\t1\tOBJECT\tdécrire\t-\tcercle\torig\t-",
            "plane\t1\tPP\tavion\tde\tsociété\torig\t-",
            "plane\t1\tSUBJECT\tdécrire\t-\tavion\torig\t-",
        ]

    def test_round_trip_after_normalization(self, docs):
        for doc in docs.values():
            norm = normalize_index(doc)
            assert serialize_index(norm) == serialize_index(doc)
            (again,) = parse_index(serialize_index(norm))
            assert again == norm

    def test_sentences_sort_numerically(self):
        text = INDEX_HEADER + "\n" + "".join(
            f"d\t{s}\tNN\ta\t-\tb\torig\t-\n" for s in ("10", "2", "1")
        )
        (ix,) = parse_index(text)
        assert [s.sent_id for s in ix.sentences] == ["1", "2", "10"]
        assert [line.split("\t")[1] for line in serialize_index(ix).splitlines()[1:]] == ["1", "2", "10"]

    @pytest.mark.parametrize(
        "row",
        [
            "d\t1\tNN\ta\t-\tb\tbogus\t-",
            "d\t1\tNN\ta\t-\tb\tenr:lex\tgrimper",
            "d\t1\tNN\ta\t-\tb",
            "d\t1\tNN\ta\tde\tb\torig\t-",
        ],
    )
    def test_bad_rows(self, row):
        with pytest.raises(FormatError):
            parse_index(INDEX_HEADER + "\n" + row + "\n")

    def test_missing_header(self):
        with pytest.raises(FormatError):
            parse_index("d\t1\tNN\ta\t-\tb\torig\t-\n")


def test_document_writer_round_trip(docs):
    for doc in docs.values():
        assert parse_deps_text(serialize_document(doc)) == [doc]
