"""
Three levels of sense-selection rules
=====================================

Rules are compiled from the lexicon at three levels of abstraction. Word rules
name the exact co-arguments seen in a dictionary example. Domain rules replace
those words by their domain tags and score a sentence with the Jaccard overlap
of tag sets. Subcat rules only look at the verb frame and argument animacy.
Lower levels are consulted only when nothing fires above them.
"""
from fractions import Fraction

import wsdenrich as wd
from wsdenrich.rulegen import RuleDb

lexicon = wd.parse_lexicon(wd.MINI_LEXICON)
rules, report = wd.compile_rules(lexicon)
print(report.format())
print(wd.serialize_rules(RuleDb(rules.rules_for("décrire"))))

###############################################################################
# Exact co-arguments: the word level
# ----------------------------------

docs = {d.doc_id: d for d in wd.parse_deps(wd.SAMPLE_DOCS)}
plane = docs["plane"].sentence("1")
a = wd.disambiguate_token(rules, lexicon, plane, 3)
print(a.lemma, a.level, a.senses, a.score)

###############################################################################
# Shared domains: the domain level
# --------------------------------
# ``escadrille`` is tagged AER and MIL, so it overlaps the AER subject
# constraint by one half; ``approche`` matches LOC exactly. The rule score is
# the mean, 3/4.

squadron = docs["squadron"].sentence("1")
a = wd.disambiguate_token(rules, lexicon, squadron, 2)
print(a.level, a.senses, a.score)
assert a.score == Fraction(3, 4)

###############################################################################
# Frame and animacy: the subcat level
# -----------------------------------
# With co-arguments that carry no domain at all, only the frame is left. A
# human subject points to the literary sense.

(doc,) = wd.parse_deps_text(
    "#DOC d\n#SENT 1\nT 1 papa N\nT 2 décrire V\nT 3 cadeau N\nD SUBJECT 2 1\nD OBJECT 2 3\n"
)
a = wd.disambiguate_token(rules, lexicon, doc.sentence("1"), 2)
print(a.level, a.senses, a.score)
