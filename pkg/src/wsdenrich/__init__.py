"""Dictionary-driven word sense disambiguation and contextual index enrichment."""

from pathlib import Path

from .deps import (
    Dependency,
    DependencyIndex,
    IndexRecord,
    Provenance,
    Sentence,
    Token,
    deps_involving,
    normalize_index,
    parse_deps,
    parse_deps_text,
    parse_index,
    serialize_index,
    serialize_indexes,
)
from .enrich import (
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
from .evalharness import (
    EvalReport,
    enrichment_sanity,
    format_report,
    parse_gold,
    score_run,
)
from .lexicon import (
    Lexicon,
    ambiguity_class,
    parse_lexicon,
    parse_lexicon_text,
    polysemy,
    serialize_lexicon,
)
from .rulegen import (
    RuleDb,
    compile_rules,
    compile_subcat_rules,
    compile_word_rules,
    generalize_domain_rules,
    parse_rules,
    serialize_rules,
)
from .wsd import Policy, disambiguate_document, disambiguate_token, jaccard, match_rule

__version__ = "0.1.0"

DATA_DIR = Path(__file__).parent / "data"
MINI_LEXICON = DATA_DIR / "mini_lexicon.lex"
SAMPLE_DOCS = DATA_DIR / "sample_sentences.doc"
