from collections import Counter
from dataclasses import replace

import pytest

from wsdenrich.deps import Provenance, deps_involving, parse_deps_text
from wsdenrich.enrich import (
    CONVERSE,
    MWE,
    EnrichmentPlan,
    EnrichmentReport,
    contract_mwe_to_word,
    converse_enrich,
    enrich_document,
    enrich_lexical,
    expand_word_to_mwe,
    find_mwe_occurrences,
    match_query,
)
from wsdenrich.errors import InconsistentInput
from wsdenrich.lexicon import parse_lexicon_text
from wsdenrich.wsd import Candidate, SenseAssignment

from conftest import one_doc


def rendered(index, provenance=None):
    return sorted(
        s.render(r.dep)
        for s, r in index.records()
        if provenance is None or r.provenance is provenance
    )


def added(before, after):
    return Counter(rendered(after)) - Counter(rendered(before))


def pick(assignments, lemma):
    (a,) = [a for a in assignments if a.lemma == lemma]
    return a


def forced(doc, sent_id, token_id, lemma, *senses):
    return SenseAssignment(doc.doc_id, sent_id, token_id, lemma, tuple(Candidate(n, "word", 1) for n in senses))


class TestLexical:
    def test_temperature_synonyms(self, lexicon, docs, assign):
        doc = docs["temperature"]
        out = enrich_lexical(doc, assign(doc), lexicon)
        assert rendered(out, Provenance.LEXICAL) == ["SUBJECT(augmenter,température)", "SUBJECT(monter,température)"]
        assert {r.source_sense for _, r in out.records() if not r.is_original} == {("grimper", 1)}

    def test_sense_without_synonyms(self, lexicon):
        doc = one_doc("#DOC d\n#SENT 1\nT 1 papa N\nT 2 offrir V\nT 3 cadeau N\nD SUBJECT 2 1\nD OBJECT 2 3\n")
        a = forced(doc, "1", 2, "offrir", 1)
        assert enrich_lexical(doc, [a], lexicon) == doc

    def test_additions_are_deps_times_synonyms(self, lexicon, docs):
        # grimper sense 3 has one synonym; the token sits in two dependencies
        doc = docs["climber"]
        a = forced(doc, "1", 2, "grimper", 3)
        out = enrich_lexical(doc, [a], lexicon)
        n_deps = len(deps_involving(doc, "1", 2))
        n_syn = len(lexicon.sense("grimper", 3).single_synonyms)
        assert n_deps * n_syn == 2
        assert sum(added(doc, out).values()) == 2

    def test_synthetic_token_ids_above_originals(self, lexicon, docs, assign):
        doc = docs["temperature"]
        out = enrich_lexical(doc, assign(doc), lexicon)
        s = out.sentence("1")
        new = [t for t in s.tokens if t.id > 2]
        assert sorted(t.lemma for t in new) == ["augmenter", "monter"]
        assert all(t.pos == "V" for t in new)

    def test_wrong_lemma_is_inconsistent(self, lexicon, docs):
        doc = docs["temperature"]
        with pytest.raises(InconsistentInput):
            enrich_lexical(doc, [forced(doc, "1", 2, "décrire", 1)], lexicon)

    def test_missing_sense_is_inconsistent(self, lexicon, docs):
        doc = docs["temperature"]
        with pytest.raises(InconsistentInput):
            enrich_lexical(doc, [forced(doc, "1", 2, "grimper", 9)], lexicon)


class TestExpansion:
    def test_critical_edition(self, lexicon, docs):
        doc = docs["edition"]
        a = forced(doc, "1", 2, "éditer", 1)
        (mwe,) = lexicon.sense("éditer", 1).multiword_synonyms
        out = expand_word_to_mwe(doc, a, mwe, lexicon)
        assert sorted(added(doc, out)) == [
            "EPITHET(édition,critique)",
            "OBJECT(établir,édition)",
            "PP(édition,de,manuscrit)",
            "SUBJECT(établir,spécialiste)",
        ]

    def test_missing_object_skips_everything(self, lexicon, docs):
        doc = docs["edition"]
        s = doc.sentence("1")
        crippled = doc.with_sentence(replace(s, records=tuple(r for r in s.records if r.dep.label != "OBJECT")))
        a = forced(crippled, "1", 2, "éditer", 1)
        (mwe,) = lexicon.sense("éditer", 1).multiword_synonyms
        report = EnrichmentReport()
        out = expand_word_to_mwe(crippled, a, mwe, lexicon, report)
        assert out == crippled
        ((*_, level, reason),) = report.skipped
        assert level == MWE and reason.startswith("UnboundPlaceholder")

    def test_template_without_placeholders(self):
        lex = parse_lexicon_text(
            "ENTRY pleuvoir POS=V\nSENSE 1\n  MWE tomber des cordes :: PP(tomber,de,corde)\n"
        )
        doc = one_doc("#DOC d\n#SENT 1\nT 1 il N\nT 2 pleuvoir V\nD SUBJECT 2 1\n")
        (mwe,) = lex.sense("pleuvoir", 1).multiword_synonyms
        out = expand_word_to_mwe(doc, forced(doc, "1", 2, "pleuvoir", 1), mwe, lex)
        assert list(added(doc, out)) == ["PP(tomber,de,corde)"]
        assert {t.id for t in out.sentence("1").tokens} == {1, 2, 3, 4}

    def test_climbing_expression_takes_displaced_object(self, lexicon, docs):
        doc = docs["climber"]
        (mwe,) = lexicon.sense("grimper", 2).multiword_synonyms
        out = expand_word_to_mwe(doc, forced(doc, "1", 2, "grimper", 2), mwe, lexicon)
        assert sorted(added(doc, out)) == [
            "REFLEXIVE(hisser,se)",
            "SUBJECT(hisser,alpiniste)",
            "VMODOBJ(hisser,sur,mont)",
        ]

    def test_synonym_must_belong_to_assigned_sense(self, lexicon, docs):
        doc = docs["edition"]
        (mwe,) = lexicon.sense("éditer", 1).multiword_synonyms
        with pytest.raises(InconsistentInput):
            expand_word_to_mwe(doc, forced(doc, "1", 2, "éditer", 2), mwe, lexicon)


CONTRACT = """\
#DOC c
#SENT 1
T 1 spécialiste N
T 2 établir V
T 3 édition N
T 4 critique A
T 5 manuscrit N
D SUBJECT 2 1
D OBJECT 2 3
D EPITHET 3 4
D PP 3 de 5
"""


class TestContraction:
    def test_occurrence_is_found(self, lexicon):
        doc = one_doc(CONTRACT)
        (occ,) = find_mwe_occurrences(doc.sentence("1"), lexicon)
        assert occ.token_ids == {2, 3, 4}
        assert (occ.synonym, occ.pos, occ.sense_no) == ("éditer", "V", 1)

    def test_only_external_verb_dependency_copied(self, lexicon):
        doc = one_doc(CONTRACT)
        out = contract_mwe_to_word(doc, "1", {2, 3, 4}, "éditer", "V", lexicon)
        # EPITHET is internal; PP(édition,de,manuscrit) hangs off a noun, not the verb
        assert list(added(doc, out)) == ["SUBJECT(éditer,spécialiste)"]
        (rec,) = [r for _, r in out.records() if not r.is_original]
        assert (rec.provenance, rec.source_sense) == (Provenance.MWE, ("éditer", 1))

    def test_inverse_of_expansion(self, lexicon, docs):
        # expanding edition then contracting the expression recovers SUBJECT(éditer,spécialiste)
        doc = docs["edition"]
        (mwe,) = lexicon.sense("éditer", 1).multiword_synonyms
        out = expand_word_to_mwe(doc, forced(doc, "1", 2, "éditer", 1), mwe, lexicon)
        assert "SUBJECT(éditer,spécialiste)" in rendered(doc)
        assert "SUBJECT(établir,spécialiste)" in rendered(out)

    def test_pos_filter(self, lexicon):
        doc = one_doc(CONTRACT)
        verb = added(doc, contract_mwe_to_word(doc, "1", {2, 3, 4}, "éditer", "V", lexicon))
        assert "PP(éditer,de,manuscrit)" not in verb
        # a noun replacement keeps only what hangs off the inner noun
        noun = added(doc, contract_mwe_to_word(doc, "1", {2, 3, 4}, "x", "N", lexicon, ("éditer", 1)))
        assert list(noun) == ["PP(x,de,manuscrit)"]

    def test_enrich_document_contracts(self, lexicon, assign):
        doc = one_doc(CONTRACT)
        out = enrich_document(doc, assign(doc), lexicon, EnrichmentPlan.parse("mwe"))
        assert list(added(doc, out)) == ["SUBJECT(éditer,spécialiste)"]


class TestConverse:
    def test_gift_to_receive(self, lexicon, docs, assign):
        doc = docs["gift"]
        out = converse_enrich(doc, pick(assign(doc), "offrir"), lexicon)
        assert rendered(out, Provenance.CONVERSE) == [
            "OBJECT(recevoir,cadeau)",
            "OBLIQUE-DE(recevoir,de,papa)",
            "SUBJECT(recevoir,fille)",
        ]

    def test_no_class_code(self, lexicon, docs):
        doc = docs["plane"]
        assert converse_enrich(doc, forced(doc, "1", 3, "décrire", 1), lexicon) == doc

    def test_no_target_verb(self):
        lex = parse_lexicon_text(
            "ENTRY prêter POS=V\nSENSE 1 CLASS=D3a\n"
            "CORR D3a D3e SUBJECT=OBLIQUE,OBLIQUE=SUBJECT,OBJECT=OBJECT prep=de\n"
        )
        doc = one_doc("#DOC d\n#SENT 1\nT 1 a N\nT 2 prêter V\nD SUBJECT 2 1\n")
        report = EnrichmentReport()
        out = converse_enrich(doc, forced(doc, "1", 2, "prêter", 1), lex, report)
        assert out == doc
        ((*_, level, reason),) = report.skipped
        assert level == CONVERSE and reason.startswith("NoConverseTarget")

    def test_sell_buy_with_a_preposition(self):
        lex = parse_lexicon_text(
            "ENTRY vendre POS=V\nSENSE 1 CLASS=D1a\n"
            "ENTRY acheter POS=V\nSENSE 1 CLASS=D1e\n"
            "CORR D1a D1e SUBJECT=OBLIQUE,OBLIQUE=SUBJECT,OBJECT=OBJECT prep=à\n"
        )
        doc = one_doc(
            "#DOC d\n#SENT 1\nT 1 Pierre N\nT 2 vendre V\nT 3 voiture N\nT 4 Marie N\n"
            "D SUBJECT 2 1\nD OBJECT 2 3\nD OBLIQUE 2 à 4\n"
        )
        out = converse_enrich(doc, forced(doc, "1", 2, "vendre", 1), lex)
        assert rendered(out, Provenance.CONVERSE) == [
            "OBJECT(acheter,voiture)",
            "OBLIQUE-À(acheter,à,Pierre)",
            "SUBJECT(acheter,Marie)",
        ]

    def test_reverse_direction(self, lexicon):
        doc = one_doc(
            "#DOC d\n#SENT 1\nT 1 fille N\nT 2 recevoir V\nT 3 cadeau N\nT 4 papa N\n"
            "D SUBJECT 2 1\nD OBJECT 2 3\nD OBLIQUE-DE 2 de 4\n"
        )
        out = converse_enrich(doc, forced(doc, "1", 2, "recevoir", 1), lexicon)
        conv = rendered(out, Provenance.CONVERSE)
        # every D2a verb is a converse of recevoir
        assert "SUBJECT(offrir,papa)" in conv and "SUBJECT(donner,papa)" in conv
        assert "OBLIQUE(offrir,fille)" in conv and "OBJECT(offrir,cadeau)" in conv


class TestPipeline:
    def test_order_and_idempotence(self, lexicon, docs, assign):
        for doc in docs.values():
            a = assign(doc)
            once = enrich_document(doc, a, lexicon)
            assert enrich_document(once, a, lexicon) == once
            assert once.original_multiset() == doc.original_multiset()

    def test_only_the_assigned_sense_contributes(self, lexicon, docs, assign):
        doc = docs["temperature"]
        out = enrich_document(doc, assign(doc), lexicon)
        lemmas = {s.lemma(t) for s, r in out.records() if not r.is_original for t in r.dep.args}
        assert lemmas == {"monter", "augmenter", "température"}

    def test_max_additions_caps_per_token(self, lexicon, docs, assign):
        doc = docs["temperature"]
        out = enrich_document(doc, assign(doc), lexicon, EnrichmentPlan.parse("lex", max_additions=1))
        assert len(rendered(out, Provenance.LEXICAL)) == 1

    def test_plan_validation(self):
        with pytest.raises(ValueError):
            EnrichmentPlan.parse("")
        with pytest.raises(ValueError):
            EnrichmentPlan.parse("lex,morph")

    def test_report(self, lexicon, docs, assign):
        doc = docs["edition"]
        report = EnrichmentReport()
        enrich_document(doc, assign(doc), lexicon, report=report)
        assert report.total(MWE) == 4
        assert "ADD\tedition\t1\t2\téditer\tlex=0 mwe=4 conv=0" in report.format()


def _query(text):
    (q,) = parse_deps_text(text, allow_placeholders=True)
    return q.sentences[0]


class TestQuery:
    def test_enriched_synonym_found(self, lexicon, docs, assign):
        doc = docs["temperature"]
        out = enrich_document(doc, assign(doc), lexicon)
        q = _query("#DOC q\n#SENT 1\nT 1 augmenter V\nT 2 température N\nD SUBJECT 1 2\n")
        (m,) = match_query(out, q, lexicon)
        assert m.mode == "exact"
        assert m.records[0].provenance is Provenance.LEXICAL

    def test_original_index_has_no_augmenter(self, lexicon, docs):
        q = _query("#DOC q\n#SENT 1\nT 1 augmenter V\nT 2 température N\nD SUBJECT 1 2\n")
        assert match_query(docs["temperature"], q, lexicon) == []

    def test_empty_index(self, lexicon):
        q = _query("#DOC q\n#SENT 1\nT 1 augmenter V\nT 2 température N\nD SUBJECT 1 2\n")
        assert match_query([], q, lexicon) == []
        assert match_query(one_doc("#DOC e\n"), q, lexicon) == []

    def test_class_fallback(self, lexicon, docs):
        q = _query("#DOC q\n#SENT 1\nT 1 donner V\nT 2 cadeau N\nD OBJECT 1 2\n")
        got = match_query(list(docs.values()), q, lexicon)
        # exhaustive scan oracle: sentences with an OBJECT(v,cadeau) where v shares a class with donner
        oracle = [
            (ix.doc_id, s.sent_id)
            for ix in docs.values()
            for s in ix.sentences
            for r in s.records
            if r.dep.label == "OBJECT"
            and s.lemma(r.dep.args[1]) == "cadeau"
            and lexicon.verb_classes(s.lemma(r.dep.args[0])) & {"D2a"}
        ]
        assert [(m.doc_id, m.sent_id) for m in got] == oracle == [("gift", "1")]
        assert got[0].mode == "class-fallback"

    def test_placeholder_slot(self, lexicon, docs):
        q = _query("#DOC q\n#SENT 1\nT 1 décrire V\nD SUBJECT 1 ?\n")
        assert sorted(m.doc_id for m in match_query(list(docs.values()), q, lexicon)) == ["plane", "squadron"]

    def test_no_match_no_class(self, lexicon, docs):
        q = _query("#DOC q\n#SENT 1\nT 1 dormir V\nT 2 papa N\nD SUBJECT 1 2\n")
        assert match_query(list(docs.values()), q, lexicon) == []
