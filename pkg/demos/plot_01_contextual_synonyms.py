"""
Contextual synonyms for a polysemous verb
=========================================

``grimper`` has three senses in the bundled mini-lexicon: a rising quantity,
climbing a rock face and climbing into a vehicle. Each sense brings its own
synonyms. Adding all of them to an index would flood it with wrong readings,
so the verb is first disambiguated from its dependencies and only the chosen
sense's synonyms are copied.
"""
import wsdenrich as wd

lexicon = wd.parse_lexicon(wd.MINI_LEXICON)
rules, report = wd.compile_rules(lexicon)
docs = {d.doc_id: d for d in wd.parse_deps(wd.SAMPLE_DOCS)}

for sense in lexicon.entry("grimper").senses:
    print(sense.sense_no, sorted(sense.domains), [s.text for s in sense.synonyms])

###############################################################################
# A temperature that climbs
# -------------------------
# The subject ``température`` matches the word rule of sense 1 exactly.

doc = docs["temperature"]
assignments = wd.disambiguate_document(rules, lexicon, doc)
for a in assignments:
    print(a.lemma, a.senses, a.level, a.score)

enriched = wd.enrich_document(doc, assignments, lexicon, wd.EnrichmentPlan.parse("lex"))
print(wd.serialize_index(enriched))

###############################################################################
# A climber on a mountain
# -----------------------
# Neither ``alpiniste`` nor ``mont`` appears in a dictionary example, so no
# word rule fires. Their domains (SPO and GEO) do match the second sense at
# the domain level, and the enrichment now brings ``escalader`` and the
# multi-word ``se hisser sur`` instead of ``monter``.

doc = docs["climber"]
assignments = wd.disambiguate_document(rules, lexicon, doc)
print([(a.lemma, a.senses, a.level) for a in assignments])
print(wd.serialize_index(wd.enrich_document(doc, assignments, lexicon)))
