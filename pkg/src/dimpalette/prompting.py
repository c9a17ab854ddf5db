"""Prompt synthesis from tag weights: deterministic templater plus live merge.

The deterministic templater is the reproducible stand-in for the live
prompt-update pipeline: a pure function of the tag snapshot, so property tests
and replay goldens never depend on a model. Live/replay modes delegate to the
gateway and only heuristically check the weight contract (a model may
paraphrase, so misses are warnings, not errors).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import EmptyPrompt
from .model import PromptState

# Base sentence every synthesized prompt opens with; configurable per brief.
DEFAULT_PREAMBLE = (
    "Create a product rendering of a dining room chair that stands out "
    "prominently against a white background."
)

# Fixed continuation used by the deterministic autocomplete stub.
AUTOCOMPLETE_CONTINUATION = (
    "The description continues with the remaining details of the design filled in."
)

TagTriplet = tuple[str, str, int]  # (label, dimensionName, weight)


@dataclass(frozen=True)
class PromptUpdateRequest:
    old_prompt: str
    old_tags: tuple[TagTriplet, ...]
    new_tags: tuple[TagTriplet, ...]
    base_preamble: str = DEFAULT_PREAMBLE

    def __post_init__(self):
        if not self.base_preamble.strip():
            object.__setattr__(self, "base_preamble", DEFAULT_PREAMBLE)


def deterministic_template(tags: tuple[TagTriplet, ...] | list[TagTriplet], base_preamble: str = DEFAULT_PREAMBLE) -> str:
    """Canonical prompt text for a tag snapshot.

    One sentence per dimension holding at least one active tag, dimensions in
    the order they first appear in the snapshot (the palette emits snapshots in
    ordinal order), tags in insertion order:

        "The design features <label>[, <label>]* for <dimensionName>."
    """
    if not base_preamble.strip():
        base_preamble = DEFAULT_PREAMBLE
    by_dimension: dict[str, list[str]] = {}
    order: list[str] = []
    for label, dimension, weight in tags:
        if dimension not in by_dimension:
            by_dimension[dimension] = []
            order.append(dimension)
        if weight == 1:
            by_dimension[dimension].append(label)
    sentences = [
        f"The design features {', '.join(labels)} for {dimension}."
        for dimension in order
        if (labels := by_dimension[dimension])
    ]
    if not sentences:
        return base_preamble
    return base_preamble + " " + " ".join(sentences)


def check_containment(text: str, tags: tuple[TagTriplet, ...] | list[TagTriplet]) -> list[str]:
    """Heuristic weight-contract check for live output; returns warning strings."""
    lowered = text.casefold()
    warnings = []
    for label, _dimension, weight in tags:
        present = label.casefold() in lowered
        if weight == 1 and not present:
            warnings.append(f"missing-active:{label}")
        elif weight == 0 and present:
            warnings.append(f"present-inactive:{label}")
    return warnings


def synthesize_update(
    request: PromptUpdateRequest,
    mode: str = "deterministic",
    gateway=None,
    previous: PromptState | None = None,
    derived_from: tuple[tuple[str, int], ...] = (),
) -> PromptState:
    """Produce the next PromptState for a tag change.

    deterministic mode regenerates the canonical template from new_tags alone;
    live/replay delegate to the gateway's prompt-update pipeline, which merges
    around the old prompt (including manual edits). ``derived_from`` is the
    (tagId, weight) snapshot recorded on the resulting state.
    """
    if mode == "deterministic":
        text = deterministic_template(request.new_tags, request.base_preamble)
    else:
        if gateway is None:
            raise ValueError("live/replay synthesis requires a gateway")
        text = gateway.update_prompt(request)
    revision = previous.revision + 1 if previous else 1
    return PromptState(
        text=text,
        derived_from=derived_from,
        manually_edited=False,
        revision=revision,
    )


def merge_manual_edit(current: PromptState, user_text: str) -> PromptState:
    """Adopt user text as the prompt base; the tag snapshot is retained.

    Merging identical text only bumps the revision. An empty string is an
    explicit clear and still counts as a manual edit.
    """
    if user_text == current.text:
        return replace(current, revision=current.revision + 1)
    return PromptState(
        text=user_text,
        derived_from=current.derived_from,
        manually_edited=True,
        revision=current.revision + 1,
    )


def autocomplete(partial: str, mode: str = "deterministic", gateway=None) -> str:
    """Extend a partial prompt into a complete description."""
    if not partial.strip():
        raise EmptyPrompt("autocomplete needs a non-empty partial prompt")
    if mode == "deterministic":
        return partial.rstrip() + " " + AUTOCOMPLETE_CONTINUATION
    if gateway is None:
        raise ValueError("live/replay autocomplete requires a gateway")
    return gateway.autocomplete(partial)
