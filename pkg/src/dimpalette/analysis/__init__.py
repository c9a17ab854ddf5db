from .archives import SessionArchive, load_archive, load_group
from .metrics import SessionMetrics, compute_session_metrics, dimension_frequency
from .report import aggregate_report
from .similarity import FakeEmbeddingProvider, HttpEmbeddingProvider, SimilarityMatrix, embedding_similarity
from .stats import GroupSummary, TestResult, mann_whitney_u, midranks
from .text import (
    TermPipeline,
    TermSet,
    extract_design_terms,
    levenshtein,
    prompt_length,
    session_term_set,
    term_overlap,
    tfidf_rank,
)

__all__ = [
    "SessionArchive",
    "load_archive",
    "load_group",
    "SessionMetrics",
    "compute_session_metrics",
    "dimension_frequency",
    "aggregate_report",
    "FakeEmbeddingProvider",
    "HttpEmbeddingProvider",
    "SimilarityMatrix",
    "embedding_similarity",
    "GroupSummary",
    "TestResult",
    "mann_whitney_u",
    "midranks",
    "TermPipeline",
    "TermSet",
    "extract_design_terms",
    "levenshtein",
    "prompt_length",
    "session_term_set",
    "term_overlap",
    "tfidf_rank",
]
