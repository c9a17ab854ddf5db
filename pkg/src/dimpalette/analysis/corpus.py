"""Synthetic two-group session corpus generator.

Human-study session data is not redistributable, so the kit grows its own:
real sessions driven through the service with a deterministic provider, with
prompt lengths and iteration-to-iteration edit magnitudes sampled from the
profile's group parameters. The corpus validates pipeline plumbing and
statistical directionality, nothing more.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .metrics import load_merge_map
from .text import levenshtein
from ..data import load_json, sample_brief
from ..gateway import Gateway
from ..model import SessionConfig
from ..service import SessionService

FILLER_WORDS = (
    "overall", "slightly", "somewhat", "gently", "nicely", "simple", "plain",
    "basic", "regular", "general", "usual", "certain", "single", "double",
    "whole", "entire", "visible", "notable", "subtle", "roomy", "casual",
    "friendly", "honest", "quiet", "calm", "tidy", "neat", "smooth", "solid",
    "broad", "narrow", "tall", "short", "round", "square", "flat", "deep",
)


def _design_pool() -> tuple[str, ...]:
    return tuple(load_json("design_lexicon.json")["vocab"])


def default_profile() -> dict:
    return load_json("synth_profile.json")


def _truncated_normal_mean(mu: float, sd: float, floor: float) -> float:
    """E[max(floor, N(mu, sd))] via the standard censored-normal formula."""
    if sd <= 0:
        return max(floor, mu)
    alpha = (floor - mu) / sd
    pdf = math.exp(-0.5 * alpha * alpha) / math.sqrt(2 * math.pi)
    cdf = 0.5 * (1 + math.erf(alpha / math.sqrt(2)))
    return mu + sd * pdf + (floor - mu) * cdf


def _shifted_mean(target: float, sd: float, floor: float) -> float:
    """Draw mean that makes the floor-truncated sample average land on target."""
    lo, hi = target - 4 * sd, target
    for _ in range(60):
        mid = (lo + hi) / 2
        if _truncated_normal_mean(mid, sd, floor) > target:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


class _SessionWriter:
    """Evolves one session's prompt word list with measured, sized edits."""

    def __init__(self, rng: np.random.Generator, design_pool, design_share: float):
        self.rng = rng
        self.design_pool = list(design_pool)
        self.design_share = design_share

    def _word(self) -> str:
        if self.rng.random() < self.design_share:
            return self.design_pool[int(self.rng.integers(len(self.design_pool)))]
        return FILLER_WORDS[int(self.rng.integers(len(FILLER_WORDS)))]

    def fresh(self, length: int) -> list[str]:
        return ["a", "dining", "chair"] + [self._word() for _ in range(max(1, length - 3))]

    def resize(self, words: list[str], length: int) -> list[str]:
        words = list(words)
        length = max(4, length)
        while len(words) > length:
            words.pop(int(self.rng.integers(3, len(words))) if len(words) > 4 else len(words) - 1)
        while len(words) < length:
            words.append(self._word())
        return words

    def evolve(self, words: list[str], target_chars: float, length: int) -> list[str]:
        """Replace words until the measured character distance hits the target."""
        base = " ".join(words)
        words = self.resize(words, length)
        distance = levenshtein(base, " ".join(words))
        attempts = 0
        cap = 4 * len(words)
        while distance < target_chars and attempts < cap:
            position = int(self.rng.integers(3, len(words))) if len(words) > 4 else len(words) - 1
            words[position] = self._word()
            attempts += 1
            if attempts % 2 == 0 or distance >= target_chars - 12:
                distance = levenshtein(base, " ".join(words))
        return words


def generate_corpus(profile: dict | None = None, out_dir: str | Path = "corpus-out") -> dict:
    """Write one archive zip per synthetic session, grouped per condition.

    Returns {"groups": {name: {"sessions": n, "dir": path}}, "seed": seed}.
    """
    profile = profile or default_profile()
    out_dir = Path(out_dir)
    seed = int(profile.get("seed", 0))
    iterations = int(profile.get("iterationsPerSession", 10))
    design_pool = _design_pool()
    merge_map = load_merge_map()
    variants_by_category: dict[str, list[str]] = {}
    for variant, category in merge_map.items():
        variants_by_category.setdefault(category, []).append(variant)
    document = sample_brief()

    summary: dict = {"groups": {}, "seed": seed}
    for group_index, group_name in enumerate(sorted(profile["groups"])):
        spec = profile["groups"][group_name]
        group_dir = out_dir / group_name
        group_dir.mkdir(parents=True, exist_ok=True)
        assigned = _assign_dimensions(
            spec, int(spec["sessions"]), variants_by_category, np.random.default_rng([seed, group_index, 999])
        )
        for session_index in range(int(spec["sessions"])):
            rng = np.random.default_rng([seed, group_index, session_index])
            archive = _generate_session(
                rng,
                spec,
                group_name,
                session_index,
                iterations,
                design_pool,
                assigned[session_index],
                document,
            )
            (group_dir / f"{group_name}-{session_index:03d}.zip").write_bytes(archive)
        summary["groups"][group_name] = {
            "sessions": int(spec["sessions"]),
            "dir": str(group_dir),
        }
    return summary


def _assign_dimensions(
    spec: dict, sessions: int, variants_by_category: dict, rng
) -> list[list[str]]:
    """Deal out dimension names so group totals follow the configured weights.

    Counts are apportioned by largest remainder, which keeps the configured
    frequency ranking stable for any seed; sessions then receive a shuffled
    deal, each instance picking a fresh variant spelling.
    """
    if spec.get("condition") != "scaffolded" or "dimensionsPerSession" not in spec:
        return [[] for _ in range(sessions)]
    count_spec = spec["dimensionsPerSession"]
    per_session = [
        max(0, int(round(rng.normal(count_spec["mean"], count_spec.get("sd", 1.0)))))
        for _ in range(sessions)
    ]
    total = sum(per_session)
    weights = spec.get("dimensionWeights", {})
    categories = sorted(weights)
    raw = np.array([weights[c] for c in categories], dtype=float)
    raw = raw / raw.sum() * total
    counts = np.floor(raw).astype(int)
    remainder = total - int(counts.sum())
    for i in np.argsort(-(raw - counts))[:remainder]:
        counts[i] += 1
    deck: list[str] = []
    for category, count in zip(categories, counts):
        deck.extend([category] * int(count))
    rng.shuffle(deck)
    assigned: list[list[str]] = []
    cursor = 0
    for n in per_session:
        chunk = deck[cursor : cursor + n]
        cursor += n
        names: list[str] = []
        used: set[str] = set()
        for category in chunk:
            variants = [v for v in variants_by_category.get(category, [category]) if v not in used]
            if not variants:
                continue
            name = variants[int(rng.integers(len(variants)))]
            used.add(name)
            names.append(name)
        assigned.append(names)
    return assigned


class _TickClock:
    """Synthetic session time: fixed start, fixed stride, reproducible bytes."""

    def __init__(self, start_ms: int, stride_ms: int = 30_000):
        self.now = start_ms
        self.stride = stride_ms

    def __call__(self) -> int:
        self.now += self.stride
        return self.now


def _generate_session(
    rng,
    spec: dict,
    group_name: str,
    session_index: int,
    iterations: int,
    design_pool,
    dimension_names: list[str],
    document,
) -> bytes:
    condition = spec.get("condition", "scaffolded")
    service = SessionService(gateway=Gateway(mode="deterministic"))
    session = service.create_session(
        document,
        SessionConfig(condition=condition, provider_mode="deterministic"),
        session_id=f"{group_name}-{session_index:03d}",
        clock=_TickClock(1_700_000_000_000 + session_index * 3_600_000),
    )
    writer = _SessionWriter(rng, design_pool, float(spec.get("designShare", 0.5)))

    length_mean = float(spec["promptLength"]["mean"])
    length_sd = float(spec["promptLength"]["sd"])
    append = int(spec.get("appendWordsPerIteration", 1))
    # draw means are shifted so floor-truncated group averages land on target
    session_target = max(
        4.0, float(rng.normal(_shifted_mean(length_mean, length_sd, 4.0), length_sd))
    )
    edit_mean = float(spec["editDistance"]["mean"])
    edit_sd = float(spec["editDistance"]["sd"])
    session_edit_target = max(
        12.0, float(rng.normal(_shifted_mean(edit_mean, edit_sd, 12.0), edit_sd))
    )

    for name in dimension_names:
        try:
            service.add_dimension(session.id, name, [], origin="user")
        except Exception:
            continue  # name collides with a seed dimension; skip

    # symmetric growth around the session target keeps the session mean on it
    lengths = [
        max(4, int(round(session_target + append * (i - (iterations - 1) / 2))))
        for i in range(iterations)
    ]
    words = writer.fresh(lengths[0])
    for i in range(iterations):
        if i > 0:
            jitter = float(rng.normal(0, session_edit_target * 0.15))
            words = writer.evolve(words, max(10.0, session_edit_target + jitter), lengths[i])
        service.edit_prompt(session.id, " ".join(words))
        service.submit_prompt(session.id)

    # a couple of likes and a final pick for schema realism
    all_images = [img.id for it in session.iterations for img in it.images]
    liked = rng.choice(len(all_images), size=min(2, len(all_images)), replace=False)
    for idx in sorted(int(i) for i in liked):
        service.like_image(session.id, all_images[idx])
    service.select_final(session.id, all_images[int(liked[0])])
    return service.export_session(session.id)
