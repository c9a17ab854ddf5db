"""Group comparison reports: report.json plus per-figure CSVs, byte-stable.

Determinism contract: identical archive inputs produce identical output bytes.
Sessions are processed in sorted id order, floats are emitted with a fixed
format, and every report embeds the exact pipeline settings used.
"""

from __future__ import annotations

import json
from pathlib import Path

from .archives import SessionArchive
from .metrics import SessionMetrics, compute_session_metrics, dimension_frequency
from .stats import mann_whitney_u
from .text import TermPipeline
from ..errors import DegenerateInput, EmptyGroup

# metric key -> attribute on SessionMetrics (session-level scalars that get tested)
TESTED_METRICS = (
    ("meanPromptLength", "mean_prompt_length"),
    ("meanUniqueTerms", "mean_unique_terms"),
    ("totalUniqueTerms", "total_unique_terms"),
    ("commonTerms", "common_terms"),
    ("distinctTerms", "distinct_terms"),
    ("meanEditDistance", "mean_edit_distance"),
    ("promptSimilarity", "prompt_similarity"),
    ("imageSimilarity", "image_similarity"),
)

DESCRIPTIVE_METRICS = TESTED_METRICS + (("meanLatencyMs", "mean_latency_ms"),)


def _fmt(x: float | int | None) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return f"{x:.6f}"


def _values(sessions: list[SessionMetrics], attr: str) -> list[float]:
    out = []
    for m in sessions:
        value = getattr(m, attr)
        if value is not None:
            out.append(float(value))
    return out


def _summary(values: list[float]) -> dict:
    if not values:
        return {"mean": None, "sd": None, "n": 0}
    from .stats import summarize

    s = summarize(values)
    return {"mean": s.mean, "sd": s.sd, "n": s.n}


def aggregate_report(
    groups: dict[str, list[SessionArchive]],
    out_dir: str | Path,
    pipeline: TermPipeline | None = None,
    provider=None,
    granularity: str = "char",
) -> dict:
    """Compute metrics per session, compare groups pairwise, and emit files.

    Returns the report dict; ``report["degenerate"]`` is True when any
    attempted test had no variance to work with (CLI maps that to exit 2).
    """
    for name, archives in groups.items():
        if not archives:
            raise EmptyGroup(f"group {name!r} has no archives")
    pipeline = pipeline or TermPipeline.bundled()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    # pooled TF-IDF corpus: every prompt in the full input set, ranked once
    corpus = []
    for name in sorted(groups):
        for archive in sorted(groups[name], key=lambda a: a.session_id):
            corpus.extend(archive.prompts)
    from .text import session_term_set, tfidf_rank

    scores = tfidf_rank([pipeline.candidate_terms(t) for t in corpus])
    document_terms: dict[str, object] = {}

    def doc_terms_for(archive):
        if archive.document is None:
            return None
        key = archive.document.id
        if key not in document_terms:
            document_terms[key] = session_term_set(
                [archive.document.body], pipeline, scores=scores
            )
        return document_terms[key]

    per_group: dict[str, list[SessionMetrics]] = {}
    for name in sorted(groups):
        per_group[name] = [
            compute_session_metrics(
                archive,
                pipeline,
                provider=provider,
                granularity=granularity,
                scores=scores,
                document_terms=doc_terms_for(archive),
            )
            for archive in sorted(groups[name], key=lambda a: a.session_id)
        ]

    report: dict = {
        "settings": {
            **pipeline.settings(),
            "levenshteinGranularity": granularity,
            "tfidfCorpus": "pooled-over-all-input-archives",
            "similarityScope": "per-session all-pairs off-diagonal mean",
            "provider": type(provider).__name__ if provider is not None else None,
        },
        "groups": {},
        "tests": {},
        "dimensionFrequency": {},
        "degenerate": False,
    }
    for name, sessions in per_group.items():
        report["groups"][name] = {
            "n": len(sessions),
            "sessions": [m.to_json() for m in sessions],
            "summary": {
                key: _summary(_values(sessions, attr)) for key, attr in DESCRIPTIVE_METRICS
            },
        }
        report["dimensionFrequency"][name] = [
            {"category": category, "count": count}
            for category, count in dimension_frequency(groups[name])
        ]

    names = sorted(per_group)
    if len(names) == 2:
        a_name, b_name = names
        for key, attr in TESTED_METRICS:
            values_a = _values(per_group[a_name], attr)
            values_b = _values(per_group[b_name], attr)
            if not values_a or not values_b:
                continue
            try:
                result = mann_whitney_u(values_a, values_b)
                report["tests"][key] = {
                    "groupA": a_name,
                    "groupB": b_name,
                    **result.to_json(),
                }
            except DegenerateInput as exc:
                report["tests"][key] = {
                    "groupA": a_name,
                    "groupB": b_name,
                    "degenerate": True,
                    "reason": exc.message,
                }
                report["degenerate"] = True

    _write_files(report, per_group, out_dir)
    return report


def _write_files(report: dict, per_group: dict[str, list[SessionMetrics]], out_dir: Path) -> None:
    (out_dir / "report.json").write_text(
        json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )

    lines = ["group,sessionId,iteration,words"]
    for name in sorted(per_group):
        for m in per_group[name]:
            for i, words in enumerate(m.prompt_lengths, start=1):
                lines.append(f"{name},{m.session_id},{i},{words}")
    (out_dir / "prompt_lengths.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    lines = ["group,sessionId,iteration,uniqueTerms"]
    for name in sorted(per_group):
        for m in per_group[name]:
            for i, count in enumerate(m.unique_terms_per_prompt, start=1):
                lines.append(f"{name},{m.session_id},{i},{count}")
    (out_dir / "unique_terms.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    lines = [
        "group,sessionId,meanPromptLength,meanUniqueTerms,totalUniqueTerms,"
        "commonTerms,distinctTerms,meanEditDistance,promptSimilarity,imageSimilarity,meanLatencyMs"
    ]
    for name in sorted(per_group):
        for m in per_group[name]:
            lines.append(
                ",".join(
                    [
                        name,
                        m.session_id,
                        _fmt(m.mean_prompt_length),
                        _fmt(m.mean_unique_terms),
                        _fmt(m.total_unique_terms),
                        _fmt(m.common_terms),
                        _fmt(m.distinct_terms),
                        _fmt(m.mean_edit_distance),
                        _fmt(m.prompt_similarity),
                        _fmt(m.image_similarity),
                        _fmt(m.mean_latency_ms),
                    ]
                )
            )
    (out_dir / "session_summary.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    lines = ["metric,groupA,groupB,uStatistic,pValue,method,meanA,sdA,nA,meanB,sdB,nB,degenerate"]
    for key in sorted(report["tests"]):
        t = report["tests"][key]
        if t.get("degenerate"):
            lines.append(f"{key},{t['groupA']},{t['groupB']},,,,,,,,,,true")
            continue
        ga = t["groupSummaries"]["a"]
        gb = t["groupSummaries"]["b"]
        lines.append(
            ",".join(
                [
                    key,
                    t["groupA"],
                    t["groupB"],
                    _fmt(t["uStatistic"]),
                    _fmt(t["pValue"]),
                    t["method"],
                    _fmt(ga["mean"]),
                    _fmt(ga["sd"]),
                    str(ga["n"]),
                    _fmt(gb["mean"]),
                    _fmt(gb["sd"]),
                    str(gb["n"]),
                    "false",
                ]
            )
        )
    (out_dir / "utests.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
