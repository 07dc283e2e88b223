"""
Scoring a disambiguation run
============================

A run is compared with gold senses token by token. Wrong answers are charged
to the tool that caused them when the gold file says so (tokenizer, tagger
or parser), otherwise to the disambiguator. Ratios are exact fractions and
only rounded, half up, for display.
"""
from fractions import Fraction

import wsdenrich as wd
from wsdenrich.evalharness import GoldAnnotation, percent
from wsdenrich.wsd import Candidate, SenseAssignment

###############################################################################
# A synthetic run with the published counts
# -----------------------------------------
# 604 answers, 448 right; 44, 19 and 9 errors come from tokenization, tagging
# and parsing, and 84 from disambiguation. There are 1027 gold tokens.

plan = [(None, True)] * 448 + [("tokenization", False)] * 44 + [("tagging", False)] * 19
plan += [("parsing", False)] * 9 + [(None, False)] * 84
gold, run = {}, []
for i, (category, right) in enumerate(plan):
    gold[("t", str(i), 1)] = GoldAnnotation("t", str(i), 1, 1, category)
    run.append(SenseAssignment("t", str(i), 1, "w", (Candidate(1 if right else 2, "word", 1),)))
for i in range(len(plan), 1027):
    gold[("t", str(i), 1)] = GoldAnnotation("t", str(i), 1, 1)

report = wd.score_run(run, gold)
print(wd.format_report(report))
print("precision + noise =", report.precision + report.noise)

###############################################################################
# Rounding
# --------
# 448/1027 is 43.622...%, which prints as 43.62%. No whole number of gold
# tokens turns 448 correct answers into 43.61%.

print(percent(Fraction(448, 1027)), percent(Fraction(448, 1028)))

###############################################################################
# Were the added synonyms right?
# ------------------------------
# On the sample texts every disambiguation is taken as gold, and each enriched
# record must then come from the gold sense and be licensed by it.

lexicon = wd.parse_lexicon(wd.MINI_LEXICON)
rules, _ = wd.compile_rules(lexicon)
docs = wd.parse_deps(wd.SAMPLE_DOCS)
assignments = [a for d in docs for a in wd.disambiguate_document(rules, lexicon, d)]
enriched = [wd.enrich_document(d, assignments, lexicon) for d in docs]
all_right = {
    (a.doc_id, a.sent_id, a.token_id): GoldAnnotation(a.doc_id, a.sent_id, a.token_id, a.senses[0])
    for a in assignments
}
print(wd.enrichment_sanity(assignments, enriched, lexicon, all_right))
