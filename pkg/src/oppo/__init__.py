"""Corpus tooling for oppositional-discourse annotation studies.

Modules: model (records and IO), pipeline (filtering and quality ranking),
anonymizer (pseudonymization with offset maps), gold (majority vote and span
merging), agreement (alpha, gamma, pairwise F1), evaluation (binary, span,
presence, crosstab metrics), analysis (lexicon scoring and hypothesis tests),
cli (the `oppo` entry point).
"""

from .reporting import VERSION as __version__
from .model import (
    AnnotationRecord,
    Category,
    CorpusError,
    DegenerateStatistic,
    GoldDocument,
    Klass,
    Lang,
    Message,
    PredictionSet,
    Span,
    parse_corpus,
    write_corpus,
)

__all__ = [
    "__version__",
    "AnnotationRecord",
    "Category",
    "CorpusError",
    "DegenerateStatistic",
    "GoldDocument",
    "Klass",
    "Lang",
    "Message",
    "PredictionSet",
    "Span",
    "parse_corpus",
    "write_corpus",
]
