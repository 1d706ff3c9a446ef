"""Slogan bias auditing: lexicon matching, relative bias, and KS tests.

The heavy lifting lives in the compiled extension; this package re-exports
its surface. See the project README for the CLI counterpart.
"""

from ._core import (  # noqa: F401
    AnalysisError,
    BiasCell,
    BiasTable,
    ConfigError,
    Corpus,
    CountsTable,
    DemographicCategory,
    EcdfCurve,
    EcdfPoint,
    GenerationError,
    KsResult,
    Lexicon,
    PromptSpec,
    Slogan,
    TargetGroup,
    Taxonomy,
    TermCategory,
    TermHit,
    ValidationError,
    __version__,
    bias_table,
    build_prompt,
    compare_to_baseline,
    count_corpus,
    default_lexicon,
    default_taxonomy,
    ecdf,
    generate_synthetic,
    ks_permutation_pvalue,
    ks_pvalue,
    ks_statistic,
    load_corpus,
    load_lexicon,
    match_terms,
    normalize_text,
    normalized_count,
    relative_bias,
    save_corpus,
)
