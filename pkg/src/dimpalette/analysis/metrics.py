"""Per-session metric computation and cross-session dimension frequency."""

from __future__ import annotations

from dataclasses import dataclass

from .archives import SessionArchive
from .similarity import embedding_similarity
from .text import TermPipeline, levenshtein, prompt_length, session_term_set, term_overlap
from ..data import load_json
from ..model import normalize_label


@dataclass
class SessionMetrics:
    session_id: str
    condition: str
    prompt_lengths: list[int]
    unique_terms_per_prompt: list[int]
    total_unique_terms: int
    common_terms: int
    distinct_terms: int
    edit_distances: list[int]
    prompt_similarity: float | None
    image_similarity: float | None
    mean_latency_ms: float | None

    @property
    def mean_prompt_length(self) -> float | None:
        return _mean(self.prompt_lengths)

    @property
    def mean_unique_terms(self) -> float | None:
        return _mean(self.unique_terms_per_prompt)

    @property
    def mean_edit_distance(self) -> float | None:
        return _mean(self.edit_distances)

    def to_json(self) -> dict:
        return {
            "sessionId": self.session_id,
            "condition": self.condition,
            "promptLengths": self.prompt_lengths,
            "meanPromptLength": self.mean_prompt_length,
            "uniqueTermsPerPrompt": self.unique_terms_per_prompt,
            "meanUniqueTerms": self.mean_unique_terms,
            "totalUniqueTerms": self.total_unique_terms,
            "commonTerms": self.common_terms,
            "distinctTerms": self.distinct_terms,
            "editDistances": self.edit_distances,
            "meanEditDistance": self.mean_edit_distance,
            "promptSimilarity": self.prompt_similarity,
            "imageSimilarity": self.image_similarity,
            "meanLatencyMs": self.mean_latency_ms,
        }


def _mean(xs) -> float | None:
    xs = list(xs)
    return sum(xs) / len(xs) if xs else None


def compute_session_metrics(
    archive: SessionArchive,
    pipeline: TermPipeline,
    corpus: list[str] | None = None,
    provider=None,
    granularity: str = "char",
    scores: dict[str, float] | None = None,
    document_terms=None,
) -> SessionMetrics:
    prompts = archive.prompts
    lengths = [prompt_length(p) for p in prompts]
    terms = session_term_set(prompts, pipeline, corpus, scores=scores)
    if document_terms is None and archive.document is not None:
        document_terms = session_term_set([archive.document.body], pipeline, corpus, scores=scores)
    if document_terms is not None:
        common, distinct = term_overlap(terms, document_terms)
    else:
        common, distinct = 0, len(terms)
    distances = [
        levenshtein(prompts[i], prompts[i + 1], granularity) for i in range(len(prompts) - 1)
    ]
    prompt_sim = image_sim = None
    if provider is not None:
        if len(prompts) > 1:
            prompt_sim = embedding_similarity(prompts, provider, kind="text").mean_off_diagonal
        if len(archive.image_bytes) > 1:
            image_sim = embedding_similarity(
                archive.image_bytes, provider, kind="image"
            ).mean_off_diagonal
    return SessionMetrics(
        session_id=archive.session_id,
        condition=archive.condition,
        prompt_lengths=lengths,
        unique_terms_per_prompt=list(terms.per_prompt_counts),
        total_unique_terms=len(terms),
        common_terms=common,
        distinct_terms=distinct,
        edit_distances=distances,
        prompt_similarity=prompt_sim,
        image_similarity=image_sim,
        mean_latency_ms=_mean(archive.latencies),
    )


def load_merge_map() -> dict[str, str]:
    """variant (normalized) -> merged category, from the bundled table."""
    table = load_json("dimension_merge_map.json")
    mapping: dict[str, str] = {}
    for category, variants in table.items():
        mapping[normalize_label(category)] = category
        for variant in variants:
            mapping[normalize_label(variant)] = category
    return mapping


def dimension_frequency(
    archives: list[SessionArchive], merge_map: dict[str, str] | None = None
) -> list[tuple[str, int]]:
    """Counts of participant-created dimensions per merged category.

    Seed dimensions never appear here: archives only report names beyond the
    initial palette. Unmapped names count under their own normalized form.
    Ranked by count descending, then alphabetically.
    """
    mapping = merge_map if merge_map is not None else load_merge_map()
    counts: dict[str, int] = {}
    for archive in archives:
        for name in archive.created_dimensions:
            category = mapping.get(normalize_label(name), normalize_label(name))
            counts[category] = counts.get(category, 0) + 1
    return sorted(counts.items(), key=lambda item: (-item[1], item[0]))
