"""Pure state machine for the dimension palette.

Every operation takes a PaletteState and returns a new one (plus a TagDelta
where activation changes matter to the prompt). Nothing here knows about
sessions, providers, or the baseline/scaffolded condition; the session service
guards condition rules and serializes calls per session.
"""

from __future__ import annotations

from dataclasses import replace

from .errors import (
    DuplicateDimension,
    DuplicateTag,
    InvalidDigest,
    InvalidPermutation,
    UnknownDimension,
    UnknownTag,
)
from .model import (
    Dimension,
    DocumentDigest,
    NewTagProposal,
    PaletteState,
    StyleTag,
    TagDelta,
    normalize_label,
)

SEED_DIMENSIONS = 3
MIN_SEED_TAGS = 3
MAX_SEED_TAGS = 5
MAX_NEW_REVEAL_TAGS = 5


def validate_digest(digest: DocumentDigest) -> None:
    """Raise InvalidDigest unless the digest is exactly 3 dimensions x 3-5 tags."""
    if len(digest.dimensions) != SEED_DIMENSIONS:
        raise InvalidDigest(
            f"digest must have exactly {SEED_DIMENSIONS} dimensions, got {len(digest.dimensions)}"
        )
    seen: set[str] = set()
    for name, labels in digest.dimensions:
        if not name.strip():
            raise InvalidDigest("digest dimension name is empty")
        key = normalize_label(name)
        if key in seen:
            raise InvalidDigest(f"digest repeats dimension {name!r}")
        seen.add(key)
        distinct = {normalize_label(l) for l in labels if l.strip()}
        if not MIN_SEED_TAGS <= len(distinct) <= MAX_SEED_TAGS or len(distinct) != len(labels):
            raise InvalidDigest(
                f"dimension {name!r} must carry {MIN_SEED_TAGS}-{MAX_SEED_TAGS} distinct tags"
            )


def init_palette(digest: DocumentDigest) -> PaletteState:
    """Seed the palette from a document digest: all tags start at weight 0."""
    validate_digest(digest)
    next_id = 1
    dimensions = []
    for ordinal, (name, labels) in enumerate(digest.dimensions):
        tags = []
        for label in labels:
            tags.append(StyleTag(id=f"tag-{next_id}", label=label.strip(), origin="seed"))
            next_id += 1
        dimensions.append(
            Dimension(
                id=f"dim-{next_id}",
                name=name.strip(),
                ordinal=ordinal,
                origin="seed",
                tags=tuple(tags),
            )
        )
        next_id += 1
    return PaletteState(dimensions=tuple(dimensions), revision=1, next_id=next_id)


def toggle_tag(palette: PaletteState, tag_id: str) -> tuple[PaletteState, TagDelta]:
    """Flip a tag's weight 0 <-> 1. Toggling twice restores the original state."""
    located = palette.locate_tag(tag_id)
    if located is None:
        raise UnknownTag(f"no tag {tag_id!r}")
    dim, tag = located
    new_weight = 1 - tag.weight
    new_tag = replace(tag, weight=new_weight)
    new_dim = replace(dim, tags=tuple(new_tag if t.id == tag_id else t for t in dim.tags))
    dims = tuple(new_dim if d.id == dim.id else d for d in palette.dimensions)
    delta = TagDelta(activated=(tag_id,)) if new_weight == 1 else TagDelta(deactivated=(tag_id,))
    return palette.bump(dims), delta


def add_dimension(
    palette: PaletteState, name: str, tag_labels: list[str] | tuple[str, ...] = (), origin: str = "user"
) -> PaletteState:
    name = name.strip()
    if not name:
        raise DuplicateDimension("dimension name must be non-empty")
    if palette.find_dimension_by_name(name) is not None:
        raise DuplicateDimension(f"dimension {name!r} already exists")
    next_id = palette.next_id
    tags = []
    seen: set[str] = set()
    for label in tag_labels:
        key = normalize_label(label)
        if not key or key in seen:
            continue
        seen.add(key)
        tags.append(StyleTag(id=f"tag-{next_id}", label=label.strip(), origin=origin))
        next_id += 1
    dim = Dimension(
        id=f"dim-{next_id}",
        name=name,
        ordinal=len(palette.dimensions),
        origin=origin,
        tags=tuple(tags),
    )
    next_id += 1
    return palette.bump(palette.dimensions + (dim,), next_id=next_id)


def remove_dimension(palette: PaletteState, dimension_id: str) -> tuple[PaletteState, TagDelta]:
    """Drop a dimension, compact ordinals, and report its active tags as deactivated."""
    dim = palette.find_dimension(dimension_id)
    if dim is None:
        raise UnknownDimension(f"no dimension {dimension_id!r}")
    deactivated = tuple(t.id for t in dim.tags if t.weight == 1)
    removed = tuple(t.id for t in dim.tags)
    remaining = [d for d in palette.ordered() if d.id != dimension_id]
    dims = tuple(replace(d, ordinal=i) for i, d in enumerate(remaining))
    return palette.bump(dims), TagDelta(deactivated=deactivated, removed=removed)


def add_tag(palette: PaletteState, dimension_id: str, label: str, origin: str = "user") -> PaletteState:
    dim = palette.find_dimension(dimension_id)
    if dim is None:
        raise UnknownDimension(f"no dimension {dimension_id!r}")
    label = label.strip()
    if not label:
        raise DuplicateTag("tag label must be non-empty")
    if dim.has_label(label):
        raise DuplicateTag(f"tag {label!r} already in {dim.name!r}")
    tag = StyleTag(id=f"tag-{palette.next_id}", label=label, origin=origin)
    new_dim = replace(dim, tags=dim.tags + (tag,))
    dims = tuple(new_dim if d.id == dim.id else d for d in palette.dimensions)
    return palette.bump(dims, next_id=palette.next_id + 1)


def remove_tag(palette: PaletteState, tag_id: str) -> tuple[PaletteState, TagDelta]:
    located = palette.locate_tag(tag_id)
    if located is None:
        raise UnknownTag(f"no tag {tag_id!r}")
    dim, tag = located
    new_dim = replace(dim, tags=tuple(t for t in dim.tags if t.id != tag_id))
    dims = tuple(new_dim if d.id == dim.id else d for d in palette.dimensions)
    delta = TagDelta(
        deactivated=(tag_id,) if tag.weight == 1 else (),
        removed=(tag_id,),
    )
    return palette.bump(dims), delta


def reorder_dimensions(palette: PaletteState, new_order: list[str]) -> PaletteState:
    """Reassign ordinals to follow new_order; never touches weights or labels."""
    current = {d.id for d in palette.dimensions}
    if len(new_order) != len(current) or set(new_order) != current:
        raise InvalidPermutation("newOrder must be a permutation of current dimension ids")
    position = {dim_id: i for i, dim_id in enumerate(new_order)}
    dims = tuple(replace(d, ordinal=position[d.id]) for d in palette.dimensions)
    return palette.bump(dims)


def trim_proposal(
    palette: PaletteState,
    entries: list[tuple[str, list[str]]],
    source_image_id: str = "",
    max_new: int = MAX_NEW_REVEAL_TAGS,
) -> NewTagProposal:
    """Build a proposal from raw (dimension, labels) pairs against the palette.

    Labels already present anywhere in the palette are kept (they become
    existing-match highlights); genuinely new labels are capped at ``max_new``
    in proposal order. Re-listed existing tags therefore never eat the quota.
    """
    present = {normalize_label(t.label) for _, t in palette.iter_tags()}
    new_count = 0
    out: list[tuple[str, tuple[str, ...]]] = []
    seen_pairs: set[tuple[str, str]] = set()
    for name, labels in entries:
        name = name.strip()
        if not name:
            continue
        kept: list[str] = []
        for label in labels:
            label = label.strip()
            key = normalize_label(label)
            if not key or (normalize_label(name), key) in seen_pairs:
                continue
            seen_pairs.add((normalize_label(name), key))
            if key in present:
                kept.append(label)
            elif new_count < max_new:
                kept.append(label)
                new_count += 1
                present.add(key)
        if kept:
            out.append((name, tuple(kept)))
    return NewTagProposal(entries=tuple(out), source_image_id=source_image_id)


def count_new_labels(palette: PaletteState, proposal: NewTagProposal) -> int:
    present = {normalize_label(t.label) for _, t in palette.iter_tags()}
    return sum(1 for _, label in proposal.labels() if normalize_label(label) not in present)


def apply_reveal(palette: PaletteState, proposal: NewTagProposal) -> PaletteState:
    """Surface a proposal onto the palette.

    Labels already present light up as existing-match; new labels materialize
    immediately at weight 0 with a new-suggested highlight (a later toggle
    activates them). Proposal dimensions missing from the palette are appended
    at the end with origin=extracted.
    """
    dims = list(palette.ordered())
    next_id = palette.next_id

    def set_highlight(tag_id: str, value: str) -> None:
        for i, dim in enumerate(dims):
            if dim.find_tag(tag_id) is not None:
                dims[i] = replace(
                    dim,
                    tags=tuple(
                        replace(t, highlight=value) if t.id == tag_id else t for t in dim.tags
                    ),
                )
                return

    for name, labels in proposal.entries:
        target_idx = None
        name_key = normalize_label(name)
        for i, dim in enumerate(dims):
            if normalize_label(dim.name) == name_key:
                target_idx = i
                break
        for label in labels:
            label_key = normalize_label(label)
            match = None
            if target_idx is not None:
                for t in dims[target_idx].tags:
                    if normalize_label(t.label) == label_key:
                        match = t
                        break
            if match is None:
                for dim in dims:
                    for t in dim.tags:
                        if normalize_label(t.label) == label_key:
                            match = t
                            break
                    if match:
                        break
            if match is not None:
                set_highlight(match.id, "existing-match")
                continue
            if target_idx is None:
                dims.append(
                    Dimension(
                        id=f"dim-{next_id}",
                        name=name.strip(),
                        ordinal=len(dims),
                        origin="extracted",
                        tags=(),
                    )
                )
                next_id += 1
                target_idx = len(dims) - 1
            new_tag = StyleTag(
                id=f"tag-{next_id}",
                label=label.strip(),
                weight=0,
                origin="extracted",
                highlight="new-suggested",
            )
            next_id += 1
            dims[target_idx] = replace(
                dims[target_idx], tags=dims[target_idx].tags + (new_tag,)
            )
    return palette.bump(tuple(dims), next_id=next_id)


def clear_highlights(palette: PaletteState) -> PaletteState:
    """Reset every highlight to none; weights and membership are untouched."""
    dims = tuple(
        replace(d, tags=tuple(replace(t, highlight="none") for t in d.tags))
        for d in palette.dimensions
    )
    return palette.bump(dims)
