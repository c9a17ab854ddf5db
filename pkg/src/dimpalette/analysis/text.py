"""Text metrics: prompt length, edit distance, and design-term extraction.

The term pipeline is deliberately dependency-free and deterministic:
lowercase -> stopword/custom-list filter -> table-driven lemmatizer ->
rule-plus-lexicon POS tagger (nouns and adjectives survive) -> TF-IDF ranking
-> design-vocabulary filter (embedding centroid when a provider is configured,
lexical membership otherwise). The rule tagger trades recall on open-domain
text for reproducibility; its suffix heuristics are tuned for design briefs
and prompts, not general prose.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from ..data import load_json, load_lines
from ..errors import MissingVocab

_WORD = re.compile(r"[a-z][a-z0-9]*(?:[-'][a-z0-9]+)*")

ADJ_SUFFIXES = (
    "ive", "ous", "ful", "less", "ish", "able", "ible", "al", "ic",
    "ant", "ent", "ed", "en", "ian", "ary",
)
NOUN_SUFFIXES = (
    "ness", "ment", "tion", "sion", "ity", "ism", "ship", "ance", "ence",
    "ure", "age", "ist", "hood", "wood", "er", "or",
)


def prompt_length(text: str) -> int:
    """Whitespace word count after trimming; repeated spaces collapse."""
    return len(text.split())


def levenshtein(a: str, b: str, granularity: str = "char") -> int:
    """Minimal insert/delete/substitute count between two strings.

    Character granularity by default; ``granularity="word"`` switches to
    whitespace-token edits.
    """
    if granularity == "word":
        return _edit_distance(a.split(), b.split())
    if granularity != "char":
        raise ValueError(f"unknown granularity {granularity!r}")
    return _edit_distance(a, b)


def _edit_distance(a, b) -> int:
    if a == b:
        return 0
    # strip the common prefix and suffix; they never enter the distance
    start = 0
    la, lb = len(a), len(b)
    limit = min(la, lb)
    while start < limit and a[start] == b[start]:
        start += 1
    end = 0
    while end < limit - start and a[la - 1 - end] == b[lb - 1 - end]:
        end += 1
    a = a[start : la - end]
    b = b[start : lb - end]
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    if la < lb:
        a, b, la, lb = b, a, lb, la
    return _edit_distance_bitparallel(b, a)


def _edit_distance_bitparallel(pattern, text) -> int:
    """Bit-parallel Levenshtein: one int operation per text position.

    The pattern's match positions live in per-symbol bitmasks; the vertical
    delta vectors advance through shifted carries, so each step costs a few
    arbitrary-precision int ops regardless of pattern length.
    """
    m = len(pattern)
    peq: dict = {}
    bit = 1
    for symbol in pattern:
        peq[symbol] = peq.get(symbol, 0) | bit
        bit <<= 1
    mask = (1 << m) - 1
    high = 1 << (m - 1)
    pv = mask
    mv = 0
    score = m
    get = peq.get
    for symbol in text:
        eq = get(symbol, 0)
        xv = eq | mv
        xh = (((eq & pv) + pv) ^ pv) | eq
        ph = mv | (~(xh | pv) & mask)
        mh = pv & xh
        if ph & high:
            score += 1
        elif mh & high:
            score -= 1
        ph = ((ph << 1) | 1) & mask
        mh = (mh << 1) & mask
        pv = mh | (~(xv | ph) & mask)
        mv = ph & xv
    return score


@dataclass(frozen=True)
class TermSet:
    """Normalized design terms plus unique-term counts per analyzed prompt."""

    terms: frozenset[str]
    per_prompt_counts: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.terms)


@dataclass
class TermPipeline:
    """Configured extraction pipeline; bundled word lists load by default."""

    stopwords: frozenset[str] = field(default_factory=frozenset)
    nondesign: frozenset[str] = field(default_factory=frozenset)
    lemmas: dict = field(default_factory=dict)
    pos_lexicon: dict = field(default_factory=dict)
    design_vocab: frozenset[str] = field(default_factory=frozenset)
    embedding_provider: object | None = None
    similarity_threshold: float = 0.35
    tfidf_min_score: float = 0.0

    @classmethod
    def bundled(cls, embedding_provider=None, similarity_threshold: float = 0.35) -> "TermPipeline":
        lexicon = load_json("design_lexicon.json")
        return cls(
            stopwords=frozenset(load_lines("stopwords.txt")),
            nondesign=frozenset(load_lines("nondesign_terms.txt")),
            lemmas=load_json("lemmas.json"),
            pos_lexicon=lexicon["pos"],
            design_vocab=frozenset(lexicon["vocab"]),
            embedding_provider=embedding_provider,
            similarity_threshold=similarity_threshold,
        )

    def settings(self) -> dict:
        """Exact configuration echoed into every report for reproducibility."""
        return {
            "stopwords": len(self.stopwords),
            "nondesignTerms": len(self.nondesign),
            "lemmaTable": len(self.lemmas),
            "posLexicon": len(self.pos_lexicon),
            "designVocab": len(self.design_vocab),
            "vocabFilter": "embedding-centroid" if self.embedding_provider else "lexical-membership",
            "similarityThreshold": self.similarity_threshold,
            "idfSmoothing": "log(N/df) + 1",
            "tfidfMinScore": self.tfidf_min_score,
        }

    # --- pipeline stages ---

    def tokenize(self, text: str) -> list[str]:
        return _WORD.findall(text.lower())

    def lemmatize(self, token: str) -> str:
        if token in self.lemmas:
            return self.lemmas[token]
        # plural stripping fallback; table entries take precedence
        if token.endswith("ies") and len(token) > 4:
            return token[:-3] + "y"
        if token.endswith(("ches", "shes", "sses", "xes", "zes")) and len(token) > 4:
            return token[:-2]
        if token.endswith("s") and not token.endswith(("ss", "us", "is")) and len(token) > 3:
            return token[:-1]
        return token

    def pos_tag(self, token: str) -> str:
        if token in self.pos_lexicon:
            return self.pos_lexicon[token]
        head = token.split("-")[-1]
        if head.endswith("ly"):
            return "adv"
        for suffix in NOUN_SUFFIXES:
            if head.endswith(suffix) and len(head) > len(suffix) + 2:
                return "noun"
        for suffix in ADJ_SUFFIXES:
            if head.endswith(suffix) and len(head) > len(suffix) + 1:
                return "adj"
        return "noun"  # prompts and briefs are dominated by noun phrases

    def candidate_terms(self, text: str) -> list[str]:
        """Stages 1-3: filtered, lemmatized noun/adjective tokens in order."""
        out = []
        for token in self.tokenize(text):
            if token in self.stopwords or token in self.nondesign:
                continue
            lemma = self.lemmatize(token)
            if lemma in self.stopwords or lemma in self.nondesign:
                continue
            if self.pos_tag(lemma) in ("noun", "adj"):
                out.append(lemma)
        return out

    def is_design_term(self, term: str) -> bool:
        if self.embedding_provider is not None:
            return self._centroid_similarity(term) >= self.similarity_threshold
        return term in self.design_vocab

    def _centroid_similarity(self, term: str) -> float:
        import numpy as np

        vocab = sorted(self.design_vocab)
        if not vocab:
            raise MissingVocab("design vocabulary is empty")
        if not hasattr(self, "_centroid"):
            vectors = np.asarray(self.embedding_provider.embed_texts(vocab), dtype=float)
            vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
            centroid = vectors.mean(axis=0)
            object.__setattr__(self, "_centroid", centroid / np.linalg.norm(centroid))
        vec = np.asarray(self.embedding_provider.embed_texts([term])[0], dtype=float)
        norm = np.linalg.norm(vec)
        if norm == 0:
            return 0.0
        return float(vec @ self._centroid / norm)


def tfidf_rank(documents: list[list[str]]) -> dict[str, float]:
    """Pooled-corpus TF-IDF with idf = log(N/df) + 1 smoothing.

    A term present in every document bottoms out at idf = 1, so ubiquitous
    boilerplate ranks below distinctive vocabulary but is never zeroed.
    """
    n = len(documents)
    if n == 0:
        return {}
    df: dict[str, int] = {}
    tf: dict[str, int] = {}
    for tokens in documents:
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1
        for term in tokens:
            tf[term] = tf.get(term, 0) + 1
    return {term: tf[term] * (math.log(n / df[term]) + 1.0) for term in tf}


def extract_design_terms(
    text: str,
    pipeline: TermPipeline | None = None,
    corpus: list[str] | None = None,
    scores: dict[str, float] | None = None,
) -> TermSet:
    """Run the full pipeline over one text; see module docstring for stages.

    ``scores`` short-circuits the TF-IDF stage with a precomputed score map so
    batch callers pay for corpus ranking once, not per prompt.
    """
    pipeline = pipeline or TermPipeline.bundled()
    if not pipeline.design_vocab and pipeline.embedding_provider is None:
        raise MissingVocab("no design vocabulary and no embedding provider")
    candidates = pipeline.candidate_terms(text)
    if scores is None:
        corpus_docs = [pipeline.candidate_terms(t) for t in corpus] if corpus else [candidates]
        scores = tfidf_rank(corpus_docs)
    kept = {
        term
        for term in candidates
        if scores.get(term, 0.0) >= pipeline.tfidf_min_score and pipeline.is_design_term(term)
    }
    return TermSet(terms=frozenset(kept), per_prompt_counts=(len(kept),))


def session_term_set(
    prompts: list[str],
    pipeline: TermPipeline | None = None,
    corpus: list[str] | None = None,
    scores: dict[str, float] | None = None,
) -> TermSet:
    """Union term set over a session's prompts with per-prompt unique counts."""
    pipeline = pipeline or TermPipeline.bundled()
    if scores is None:
        corpus = corpus if corpus is not None else prompts
        scores = tfidf_rank([pipeline.candidate_terms(t) for t in corpus])
    counts = []
    union: set[str] = set()
    for prompt in prompts:
        terms = extract_design_terms(prompt, pipeline, scores=scores)
        counts.append(len(terms))
        union.update(terms.terms)
    return TermSet(terms=frozenset(union), per_prompt_counts=tuple(counts))


def term_overlap(session: TermSet, document: TermSet) -> tuple[int, int]:
    """(common, distinct): terms shared with the document vs invented beyond it."""
    common = len(session.terms & document.terms)
    distinct = len(session.terms - document.terms)
    return common, distinct
