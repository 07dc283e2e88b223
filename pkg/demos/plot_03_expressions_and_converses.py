"""
Multi-word synonyms and converse verbs
======================================

Some synonyms are whole expressions. The lexicon stores them as dependency
templates whose ``?`` slots are filled from the replaced word's own
arguments. Verbs linked by a class correspondence, such as giving and
receiving, let the same event be indexed from the other participant's side.
"""
import wsdenrich as wd

lexicon = wd.parse_lexicon(wd.MINI_LEXICON)
rules, _ = wd.compile_rules(lexicon)
docs = {d.doc_id: d for d in wd.parse_deps(wd.SAMPLE_DOCS)}

###############################################################################
# Expanding a word into an expression
# -----------------------------------
# ``éditer`` (sense 1) may be rewritten as "établir l'édition critique de".
# The subject is carried over to ``établir`` and the object becomes the
# complement of ``édition``.

doc = docs["edition"]
assignments = wd.disambiguate_document(rules, lexicon, doc)
report = wd.EnrichmentReport()
out = wd.enrich_document(doc, assignments, lexicon, wd.EnrichmentPlan.parse("mwe"), report)
print(wd.serialize_index(out))
print(report.format())

###############################################################################
# Contracting an expression into a word
# -------------------------------------
# The reverse direction finds the expression in a text and adds the
# single-word synonym, copying only dependencies that leave the expression
# from a verb.

(written,) = wd.parse_deps_text(
    "#DOC w\n#SENT 1\nT 1 spécialiste N\nT 2 établir V\nT 3 édition N\nT 4 critique A\n"
    "T 5 manuscrit N\nD SUBJECT 2 1\nD OBJECT 2 3\nD EPITHET 3 4\nD PP 3 de 5\n"
)
for occ in wd.find_mwe_occurrences(written.sentence("1"), lexicon):
    print(occ)
print(wd.serialize_index(wd.enrich_document(written, [], lexicon, wd.EnrichmentPlan.parse("mwe"))))

###############################################################################
# Converse verbs
# --------------
# ``offrir`` belongs to class D2a, which corresponds to D2e (``recevoir``):
# the giver becomes an oblique introduced by ``de`` and the recipient
# becomes the subject.

doc = docs["gift"]
assignments = wd.disambiguate_document(rules, lexicon, doc)
print(wd.serialize_index(wd.enrich_document(doc, assignments, lexicon, wd.EnrichmentPlan.parse("conv"))))

###############################################################################
# Querying with a class fallback
# ------------------------------
# Nobody "gives" anything in the sample texts, but ``donner`` shares class
# D2a with ``offrir``, so a query on ``donner`` still finds the gift.

(query,) = wd.parse_deps_text("#DOC q\n#SENT 1\nT 1 donner V\nT 2 cadeau N\nD OBJECT 1 2\n")
for m in wd.match_query(list(docs.values()), query.sentence("1"), lexicon, rules):
    print(m.doc_id, m.mode, m.render(docs[m.doc_id].sentence(m.sent_id)))
