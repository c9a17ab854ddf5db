import json

import pytest

from dimpalette.analysis.cli import analyze_main, corpus_main
from dimpalette.analysis.corpus import default_profile, generate_corpus


@pytest.fixture(scope="module")
def small_corpus(tmp_path_factory):
    """Two tiny groups so every CLI command stays fast."""
    profile = default_profile()
    for name in profile["groups"]:
        profile["groups"][name]["sessions"] = 3
    profile["iterationsPerSession"] = 4
    root = tmp_path_factory.mktemp("corpus")
    generate_corpus(profile, root)
    return root


def archives_of(group_dir):
    return sorted(str(p) for p in group_dir.glob("*.zip"))


def test_corpus_synth_cli(tmp_path):
    profile = default_profile()
    for name in profile["groups"]:
        profile["groups"][name]["sessions"] = 1
    profile["iterationsPerSession"] = 2
    profile_path = tmp_path / "profile.json"
    profile_path.write_text(json.dumps(profile))
    rc = corpus_main(["synth", "--profile", str(profile_path), "--out", str(tmp_path / "out")])
    assert rc == 0
    assert len(list((tmp_path / "out" / "baseline").glob("*.zip"))) == 1
    assert len(list((tmp_path / "out" / "scaffolded").glob("*.zip"))) == 1


def test_analyze_terms(small_corpus, tmp_path):
    rc = analyze_main(
        ["--out", str(tmp_path), "terms"] + archives_of(small_corpus / "scaffolded")
    )
    assert rc == 0
    payload = json.loads((tmp_path / "terms.json").read_text())
    assert payload["settings"]["idfSmoothing"] == "log(N/df) + 1"
    assert len(payload["sessions"]) == 3
    first = payload["sessions"][0]
    assert first["terms"] and first["perPromptCounts"]


def test_analyze_distance(small_corpus, tmp_path):
    rc = analyze_main(
        ["--out", str(tmp_path), "distance"] + archives_of(small_corpus / "baseline")
    )
    assert rc == 0
    payload = json.loads((tmp_path / "distance.json").read_text())
    assert payload["granularity"] == "char"
    assert all(len(s["distances"]) == 3 for s in payload["sessions"])


def test_analyze_distance_word_granularity(small_corpus, tmp_path):
    rc = analyze_main(
        ["--out", str(tmp_path), "distance", "--granularity", "word"]
        + archives_of(small_corpus / "baseline")
    )
    assert rc == 0
    assert json.loads((tmp_path / "distance.json").read_text())["granularity"] == "word"


def test_analyze_similarity_fake_provider(small_corpus, tmp_path):
    rc = analyze_main(
        ["--out", str(tmp_path), "similarity", "--provider", "fake"]
        + archives_of(small_corpus / "scaffolded")[:2]
    )
    assert rc == 0
    payload = json.loads((tmp_path / "similarity.json").read_text())
    session = payload["sessions"][0]
    assert session["prompts"]["meanOffDiagonal"] is not None
    values = session["images"]["values"]
    assert values[0][0] == pytest.approx(1.0, abs=1e-9)


def test_analyze_dimensions(small_corpus, tmp_path):
    rc = analyze_main(
        ["--out", str(tmp_path), "dimensions"] + archives_of(small_corpus / "scaffolded")
    )
    assert rc == 0
    payload = json.loads((tmp_path / "dimensions.json").read_text())
    assert payload["frequency"]
    counts = [entry["count"] for entry in payload["frequency"]]
    assert counts == sorted(counts, reverse=True)


def test_analyze_compare_end_to_end(small_corpus, tmp_path):
    rc = analyze_main(
        [
            "--out", str(tmp_path),
            "compare",
            "--group-a", str(small_corpus / "baseline"),
            "--group-b", str(small_corpus / "scaffolded"),
        ]
    )
    assert rc == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert set(report["groups"]) == {"baseline", "scaffolded"}
    assert report["tests"]
    assert (tmp_path / "utests.csv").exists()


def test_analyze_compare_degenerate_exits_2(small_corpus, tmp_path):
    # one identical archive on each side: every pooled metric is a constant
    source = archives_of(small_corpus / "baseline")[0]
    for side in ("a", "b"):
        (tmp_path / side).mkdir()
        from pathlib import Path

        (tmp_path / side / "session.zip").write_bytes(Path(source).read_bytes())
    rc = analyze_main(
        [
            "--out", str(tmp_path / "rep"),
            "compare",
            "--group-a", str(tmp_path / "a"),
            "--group-b", str(tmp_path / "b"),
        ]
    )
    assert rc == 2
    report = json.loads((tmp_path / "rep" / "report.json").read_text())
    assert report["degenerate"] is True
