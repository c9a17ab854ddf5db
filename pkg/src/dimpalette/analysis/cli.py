"""Command line entry points: ``analyze`` (metrics) and ``corpus`` (synthesis).

Exit codes: 0 on success, 2 when a requested statistic was degenerate.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .archives import load_archive, load_group
from .metrics import compute_session_metrics, dimension_frequency
from .report import aggregate_report, _fmt
from .similarity import FakeEmbeddingProvider, HttpEmbeddingProvider
from .text import TermPipeline
from ..errors import PaletteError


def _provider_from_arg(value: str | None):
    if value is None or value == "fake":
        return FakeEmbeddingProvider()
    return HttpEmbeddingProvider(value)


def _write_json(out_dir: Path, name: str, payload) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(
        json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    print(f"wrote {out_dir / name}")


def analyze_main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="analyze", description="Offline session-archive analysis")
    parser.add_argument("--out", default="analysis-out", help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    def out_flag(p):
        # accepted after the subcommand too; SUPPRESS keeps the parent default
        p.add_argument("--out", default=argparse.SUPPRESS, help="output directory")

    p_terms = sub.add_parser("terms", help="design-term extraction per archive")
    p_terms.add_argument("archives", nargs="+")
    out_flag(p_terms)

    p_dist = sub.add_parser("distance", help="consecutive-prompt edit distances")
    p_dist.add_argument("archives", nargs="+")
    p_dist.add_argument("--granularity", choices=["char", "word"], default="char")
    out_flag(p_dist)

    p_sim = sub.add_parser("similarity", help="prompt/image similarity matrices")
    p_sim.add_argument("archives", nargs="+")
    p_sim.add_argument("--provider", default="fake", help="'fake' or an embedding-service URL")
    out_flag(p_sim)

    p_cmp = sub.add_parser("compare", help="two-group metric comparison with U tests")
    p_cmp.add_argument("--group-a", required=True)
    p_cmp.add_argument("--group-b", required=True)
    p_cmp.add_argument("--provider", default="fake")
    p_cmp.add_argument("--granularity", choices=["char", "word"], default="char")
    out_flag(p_cmp)

    p_dim = sub.add_parser("dimensions", help="merged dimension frequency ranking")
    p_dim.add_argument("archives", nargs="+")
    out_flag(p_dim)

    args = parser.parse_args(argv)
    out_dir = Path(args.out)
    try:
        return _dispatch(args, out_dir)
    except PaletteError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return 2 if exc.code == "degenerate-input" else 1


def _dispatch(args, out_dir: Path) -> int:
    if args.command == "terms":
        pipeline = TermPipeline.bundled()
        archives = [load_archive(p) for p in args.archives]
        corpus = [prompt for a in archives for prompt in a.prompts]
        rows = []
        for archive in sorted(archives, key=lambda a: a.session_id):
            metrics = compute_session_metrics(archive, pipeline, corpus)
            from .text import session_term_set

            terms = session_term_set(archive.prompts, pipeline, corpus)
            rows.append(
                {
                    "sessionId": archive.session_id,
                    "terms": sorted(terms.terms),
                    "perPromptCounts": list(terms.per_prompt_counts),
                    "totalUnique": metrics.total_unique_terms,
                    "commonWithDocument": metrics.common_terms,
                    "distinctFromDocument": metrics.distinct_terms,
                }
            )
        _write_json(out_dir, "terms.json", {"settings": pipeline.settings(), "sessions": rows})
        return 0

    if args.command == "distance":
        from .text import levenshtein

        rows = []
        for path in args.archives:
            archive = load_archive(path)
            distances = [
                levenshtein(archive.prompts[i], archive.prompts[i + 1], args.granularity)
                for i in range(len(archive.prompts) - 1)
            ]
            mean = sum(distances) / len(distances) if distances else None
            rows.append(
                {"sessionId": archive.session_id, "distances": distances, "mean": mean}
            )
        rows.sort(key=lambda r: r["sessionId"])
        _write_json(
            out_dir, "distance.json", {"granularity": args.granularity, "sessions": rows}
        )
        return 0

    if args.command == "similarity":
        provider = _provider_from_arg(args.provider)
        from .similarity import embedding_similarity

        rows = []
        for path in args.archives:
            archive = load_archive(path)
            entry = {"sessionId": archive.session_id}
            if len(archive.prompts) > 1:
                entry["prompts"] = embedding_similarity(
                    archive.prompts, provider, kind="text"
                ).to_json()
            if len(archive.image_bytes) > 1:
                labels = [f"image-{i + 1}" for i in range(len(archive.image_bytes))]
                entry["images"] = embedding_similarity(
                    archive.image_bytes, provider, labels=labels, kind="image"
                ).to_json()
            rows.append(entry)
        rows.sort(key=lambda r: r["sessionId"])
        _write_json(out_dir, "similarity.json", {"sessions": rows})
        return 0

    if args.command == "compare":
        group_a = Path(args.group_a)
        group_b = Path(args.group_b)
        groups = {group_a.name: load_group(group_a), group_b.name: load_group(group_b)}
        provider = _provider_from_arg(args.provider)
        report = aggregate_report(
            groups, out_dir, provider=provider, granularity=args.granularity
        )
        print(f"wrote {out_dir / 'report.json'}")
        for metric in sorted(report["tests"]):
            test = report["tests"][metric]
            if test.get("degenerate"):
                print(f"{metric}: degenerate ({test['reason']})")
            else:
                print(f"{metric}: U={_fmt(test['uStatistic'])} p={_fmt(test['pValue'])} ({test['method']})")
        return 2 if report["degenerate"] else 0

    if args.command == "dimensions":
        archives = [load_archive(p) for p in args.archives]
        ranking = dimension_frequency(archives)
        _write_json(
            out_dir,
            "dimensions.json",
            {"frequency": [{"category": c, "count": n} for c, n in ranking]},
        )
        return 0

    raise AssertionError(f"unhandled command {args.command}")


def corpus_main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="corpus", description="Synthetic session corpora")
    parser.add_argument("--out", default="corpus-out", help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)
    p_synth = sub.add_parser("synth", help="generate a two-group synthetic corpus")
    p_synth.add_argument("--profile", help="profile JSON path (bundled defaults when omitted)")
    p_synth.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    args = parser.parse_args(argv)

    if args.command == "synth":
        from .corpus import default_profile, generate_corpus

        profile = default_profile()
        if args.profile:
            profile = json.loads(Path(args.profile).read_text(encoding="utf-8"))
        summary = generate_corpus(profile, args.out)
        for name in sorted(summary["groups"]):
            info = summary["groups"][name]
            print(f"group {name}: {info['sessions']} sessions -> {info['dir']}")
        return 0
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(analyze_main())
