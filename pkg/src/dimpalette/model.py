"""Core domain types: palette, prompt, iterations, and the session event stream.

All types are immutable values (frozen dataclasses with tuple fields); mutation
happens only through the palette engine and the session service's per-session
command loop, so instances are safe to share read-only across threads.

Canonical JSON uses lowerCamelCase field names. The event stream serializes as
JSON Lines, one event per line, UTF-8, no BOM.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator

ORIGINS = ("seed", "user", "recommended", "extracted")
HIGHLIGHTS = ("none", "existing-match", "new-suggested")
CONDITIONS = ("baseline", "scaffolded")
PROVIDER_MODES = ("live", "replay", "deterministic")

EVENT_KINDS = (
    "SessionCreated",
    "PaletteInitialized",
    "DimensionAdded",
    "DimensionRemoved",
    "DimensionsReordered",
    "TagAdded",
    "TagRemoved",
    "TagToggled",
    "PromptEdited",
    "PromptSynthesized",
    "ImagesGenerated",
    "ImageLiked",
    "ImageUnliked",
    "InfoRevealed",
    "HighlightsCleared",
    "FinalSelected",
)

# Event kinds that mutate the dimension palette; a baseline session's log must
# contain none of these.
PALETTE_EVENT_KINDS = frozenset(
    {
        "PaletteInitialized",
        "DimensionAdded",
        "DimensionRemoved",
        "DimensionsReordered",
        "TagAdded",
        "TagRemoved",
        "TagToggled",
        "InfoRevealed",
        "HighlightsCleared",
    }
)


def normalize_label(label: str) -> str:
    """Identity key for tag labels and dimension names: trim + case-fold.

    Internal punctuation is preserved ("eco-friendly" != "eco friendly").
    """
    return label.strip().casefold()


@dataclass(frozen=True)
class DesignDocument:
    id: str
    title: str
    body: str
    attachments: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.body.strip():
            raise ValueError("design document body must be non-empty")

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "body": self.body,
            "attachments": list(self.attachments),
        }

    @classmethod
    def from_json(cls, d: dict) -> "DesignDocument":
        return cls(
            id=d["id"],
            title=d.get("title", ""),
            body=d["body"],
            attachments=tuple(d.get("attachments", ())),
        )


@dataclass(frozen=True)
class StyleTag:
    id: str
    label: str
    weight: int = 0
    origin: str = "user"
    highlight: str = "none"

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "label": self.label,
            "weight": self.weight,
            "origin": self.origin,
            "highlight": self.highlight,
        }

    @classmethod
    def from_json(cls, d: dict) -> "StyleTag":
        return cls(
            id=d["id"],
            label=d["label"],
            weight=int(d.get("weight", 0)),
            origin=d.get("origin", "user"),
            highlight=d.get("highlight", "none"),
        )


@dataclass(frozen=True)
class Dimension:
    id: str
    name: str
    ordinal: int
    origin: str = "user"
    tags: tuple[StyleTag, ...] = ()

    def find_tag(self, tag_id: str) -> StyleTag | None:
        for tag in self.tags:
            if tag.id == tag_id:
                return tag
        return None

    def has_label(self, label: str) -> bool:
        key = normalize_label(label)
        return any(normalize_label(t.label) == key for t in self.tags)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "ordinal": self.ordinal,
            "origin": self.origin,
            "tags": [t.to_json() for t in self.tags],
        }

    @classmethod
    def from_json(cls, d: dict) -> "Dimension":
        return cls(
            id=d["id"],
            name=d["name"],
            ordinal=int(d["ordinal"]),
            origin=d.get("origin", "user"),
            tags=tuple(StyleTag.from_json(t) for t in d.get("tags", ())),
        )


@dataclass(frozen=True)
class PaletteState:
    """Ordered dimensions with binary-weight tags plus a revision counter.

    ``next_id`` is the allocator for dimension/tag identifiers; keeping it on
    the state makes id assignment a pure function of command history, which is
    what lets replays reproduce identical logs byte for byte.
    """

    dimensions: tuple[Dimension, ...] = ()
    revision: int = 0
    next_id: int = 1

    def ordered(self) -> tuple[Dimension, ...]:
        return tuple(sorted(self.dimensions, key=lambda d: d.ordinal))

    def find_dimension(self, dimension_id: str) -> Dimension | None:
        for dim in self.dimensions:
            if dim.id == dimension_id:
                return dim
        return None

    def find_dimension_by_name(self, name: str) -> Dimension | None:
        key = normalize_label(name)
        for dim in self.dimensions:
            if normalize_label(dim.name) == key:
                return dim
        return None

    def locate_tag(self, tag_id: str) -> tuple[Dimension, StyleTag] | None:
        for dim in self.dimensions:
            tag = dim.find_tag(tag_id)
            if tag is not None:
                return dim, tag
        return None

    def iter_tags(self) -> Iterator[tuple[Dimension, StyleTag]]:
        for dim in self.ordered():
            for tag in dim.tags:
                yield dim, tag

    def tag_snapshot(self) -> tuple[tuple[str, str, int], ...]:
        """(label, dimensionName, weight) triplets in ordinal + insertion order."""
        return tuple((tag.label, dim.name, tag.weight) for dim, tag in self.iter_tags())

    def bump(self, dimensions: tuple[Dimension, ...], next_id: int | None = None) -> "PaletteState":
        return PaletteState(
            dimensions=dimensions,
            revision=self.revision + 1,
            next_id=self.next_id if next_id is None else next_id,
        )

    def to_json(self) -> dict:
        return {
            "dimensions": [d.to_json() for d in self.ordered()],
            "revision": self.revision,
            "nextId": self.next_id,
        }

    @classmethod
    def from_json(cls, d: dict) -> "PaletteState":
        return cls(
            dimensions=tuple(Dimension.from_json(x) for x in d.get("dimensions", ())),
            revision=int(d.get("revision", 0)),
            next_id=int(d.get("nextId", 1)),
        )


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.code}: {self.detail}" if self.detail else self.code


def validate_palette(palette: PaletteState) -> list[Violation]:
    """Check every palette invariant; an empty list means the state is sound.

    Violations are data, not exceptions: constructors uphold these invariants,
    so a non-empty result indicates hand-built or corrupted state.
    """
    violations: list[Violation] = []
    seen_names: dict[str, str] = {}
    ordinals: list[int] = []
    for dim in palette.dimensions:
        if not dim.name.strip():
            violations.append(Violation("empty-dimension-name", dim.id))
        key = normalize_label(dim.name)
        if key in seen_names:
            violations.append(Violation("duplicate-dimension-name", dim.name))
        else:
            seen_names[key] = dim.id
        ordinals.append(dim.ordinal)
        seen_labels: set[str] = set()
        for tag in dim.tags:
            if not tag.label.strip():
                violations.append(Violation("empty-tag-label", tag.id))
            label_key = normalize_label(tag.label)
            if label_key in seen_labels:
                violations.append(Violation("duplicate-tag-label", f"{dim.name}/{tag.label}"))
            seen_labels.add(label_key)
            if tag.weight not in (0, 1):
                violations.append(Violation("weight-out-of-range", f"{tag.label}={tag.weight}"))
            if tag.origin not in ORIGINS:
                violations.append(Violation("unknown-origin", f"{tag.label}={tag.origin}"))
            if tag.highlight not in HIGHLIGHTS:
                violations.append(Violation("unknown-highlight", f"{tag.label}={tag.highlight}"))
    if sorted(ordinals) != list(range(len(ordinals))):
        violations.append(Violation("ordinal-not-permutation", repr(sorted(ordinals))))
    return violations


@dataclass(frozen=True)
class PromptState:
    text: str = ""
    derived_from: tuple[tuple[str, int], ...] = ()  # (tagId, weight) pairs
    manually_edited: bool = False
    revision: int = 0

    def to_json(self) -> dict:
        return {
            "text": self.text,
            "derivedFrom": [{"tagId": t, "weight": w} for t, w in self.derived_from],
            "manuallyEdited": self.manually_edited,
            "revision": self.revision,
        }

    @classmethod
    def from_json(cls, d: dict) -> "PromptState":
        return cls(
            text=d.get("text", ""),
            derived_from=tuple((p["tagId"], int(p["weight"])) for p in d.get("derivedFrom", ())),
            manually_edited=bool(d.get("manuallyEdited", False)),
            revision=int(d.get("revision", 0)),
        )


@dataclass(frozen=True)
class ImageRecord:
    id: str
    content_ref: str
    prompt: str
    tag_snapshot: tuple[tuple[str, str, int], ...]  # (label, dimensionName, weight)
    liked: bool = False
    extracted_tags: "NewTagProposal | None" = None
    created_at: int = 0  # epoch milliseconds

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "contentRef": self.content_ref,
            "prompt": self.prompt,
            "tagSnapshot": [
                {"label": l, "dimensionName": d, "weight": w} for l, d, w in self.tag_snapshot
            ],
            "liked": self.liked,
            "extractedTags": self.extracted_tags.to_json() if self.extracted_tags else None,
            "createdAt": self.created_at,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ImageRecord":
        extracted = d.get("extractedTags")
        return cls(
            id=d["id"],
            content_ref=d["contentRef"],
            prompt=d.get("prompt", ""),
            tag_snapshot=tuple(
                (t["label"], t["dimensionName"], int(t["weight"]))
                for t in d.get("tagSnapshot", ())
            ),
            liked=bool(d.get("liked", False)),
            extracted_tags=NewTagProposal.from_json(extracted) if extracted else None,
            created_at=int(d.get("createdAt", 0)),
        )


@dataclass(frozen=True)
class Iteration:
    index: int  # 1-based
    request: PromptState
    images: tuple[ImageRecord, ...]
    latency_ms: int

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "request": self.request.to_json(),
            "images": [i.to_json() for i in self.images],
            "latencyMs": self.latency_ms,
        }

    @classmethod
    def from_json(cls, d: dict) -> "Iteration":
        return cls(
            index=int(d["index"]),
            request=PromptState.from_json(d["request"]),
            images=tuple(ImageRecord.from_json(i) for i in d.get("images", ())),
            latency_ms=int(d.get("latencyMs", 0)),
        )


@dataclass(frozen=True)
class SessionConfig:
    condition: str = "scaffolded"
    images_per_iteration: int = 3
    provider_mode: str = "deterministic"
    base_preamble: str = ""  # empty means the engine default

    def __post_init__(self):
        if self.condition not in CONDITIONS:
            raise ValueError(f"unknown condition {self.condition!r}")
        if self.provider_mode not in PROVIDER_MODES:
            raise ValueError(f"unknown provider mode {self.provider_mode!r}")
        if self.images_per_iteration < 1:
            raise ValueError("imagesPerIteration must be >= 1")

    def to_json(self) -> dict:
        return {
            "condition": self.condition,
            "imagesPerIteration": self.images_per_iteration,
            "providerMode": self.provider_mode,
            "basePreamble": self.base_preamble,
        }

    @classmethod
    def from_json(cls, d: dict) -> "SessionConfig":
        return cls(
            condition=d.get("condition", "scaffolded"),
            images_per_iteration=int(d.get("imagesPerIteration", 3)),
            provider_mode=d.get("providerMode", "deterministic"),
            base_preamble=d.get("basePreamble", ""),
        )


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    at: int  # epoch milliseconds at append time; replay preserves recorded values
    kind: str
    payload: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")

    def to_json(self) -> dict:
        return {"seq": self.seq, "at": self.at, "kind": self.kind, "payload": self.payload}

    @classmethod
    def from_json(cls, d: dict) -> "SessionEvent":
        return cls(seq=int(d["seq"]), at=int(d["at"]), kind=d["kind"], payload=d.get("payload", {}))


def dump_event_line(event: SessionEvent) -> str:
    """One event as a canonical JSONL line (sorted keys, compact, no trailing space)."""
    return json.dumps(event.to_json(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def dump_events(events: Iterable[SessionEvent]) -> str:
    return "".join(dump_event_line(e) + "\n" for e in events)


def load_events(text: str) -> list[SessionEvent]:
    events = []
    for line in text.splitlines():
        line = line.strip()
        if line:
            events.append(SessionEvent.from_json(json.loads(line)))
    return events


def check_event_stream(events: list[SessionEvent]) -> None:
    """Raise ValueError unless seq is gapless from 1 and timestamps non-decreasing."""
    last_at = None
    for i, event in enumerate(events, start=1):
        if event.seq != i:
            raise ValueError(f"event seq gap: expected {i}, found {event.seq}")
        if last_at is not None and event.at < last_at:
            raise ValueError(f"event timestamps decrease at seq {event.seq}")
        last_at = event.at


# --- palette-engine exchange types (defined here so ImageRecord can embed one) ---


@dataclass(frozen=True)
class NewTagProposal:
    """Dimension/label suggestions mapped back from one generated image."""

    entries: tuple[tuple[str, tuple[str, ...]], ...]  # (dimensionName, labels)
    source_image_id: str = ""

    def labels(self) -> list[tuple[str, str]]:
        """Flat (dimensionName, label) pairs in proposal order."""
        return [(name, label) for name, labels in self.entries for label in labels]

    def to_json(self) -> dict:
        return {
            "entries": [
                {"dimensionName": name, "labels": list(labels)} for name, labels in self.entries
            ],
            "sourceImageId": self.source_image_id,
        }

    @classmethod
    def from_json(cls, d: dict) -> "NewTagProposal":
        return cls(
            entries=tuple(
                (e["dimensionName"], tuple(e.get("labels", ()))) for e in d.get("entries", ())
            ),
            source_image_id=d.get("sourceImageId", ""),
        )


@dataclass(frozen=True)
class DocumentDigest:
    """Seed palette extracted from a design brief: exactly 3 dimensions, 3-5 tags each."""

    dimensions: tuple[tuple[str, tuple[str, ...]], ...]  # (name, tagLabels)

    def to_json(self) -> dict:
        return {
            "dimensions": [
                {"name": name, "tagLabels": list(labels)} for name, labels in self.dimensions
            ]
        }

    @classmethod
    def from_json(cls, d: dict) -> "DocumentDigest":
        return cls(
            dimensions=tuple(
                (e["name"], tuple(e.get("tagLabels", ()))) for e in d.get("dimensions", ())
            )
        )


@dataclass(frozen=True)
class TagDelta:
    """Net activation effect of a palette mutation; drives prompt updates."""

    activated: tuple[str, ...] = ()
    deactivated: tuple[str, ...] = ()
    added: tuple[str, ...] = ()
    removed: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "activated": list(self.activated),
            "deactivated": list(self.deactivated),
            "added": list(self.added),
            "removed": list(self.removed),
        }

    @classmethod
    def from_json(cls, d: dict) -> "TagDelta":
        return cls(
            activated=tuple(d.get("activated", ())),
            deactivated=tuple(d.get("deactivated", ())),
            added=tuple(d.get("added", ())),
            removed=tuple(d.get("removed", ())),
        )


__all__ = [
    "ORIGINS",
    "HIGHLIGHTS",
    "CONDITIONS",
    "PROVIDER_MODES",
    "EVENT_KINDS",
    "PALETTE_EVENT_KINDS",
    "normalize_label",
    "DesignDocument",
    "StyleTag",
    "Dimension",
    "PaletteState",
    "Violation",
    "validate_palette",
    "PromptState",
    "ImageRecord",
    "Iteration",
    "SessionConfig",
    "SessionEvent",
    "dump_event_line",
    "dump_events",
    "load_events",
    "check_event_stream",
    "NewTagProposal",
    "DocumentDigest",
    "TagDelta",
    "replace",
]
