import random

import pytest
from hypothesis import given, settings, strategies as st

from dimpalette.errors import (
    DuplicateDimension,
    DuplicateTag,
    InvalidDigest,
    InvalidPermutation,
    UnknownDimension,
    UnknownTag,
)
from dimpalette.model import DocumentDigest, NewTagProposal, validate_palette
from dimpalette.palette import (
    add_dimension,
    add_tag,
    apply_reveal,
    clear_highlights,
    init_palette,
    remove_dimension,
    remove_tag,
    reorder_dimensions,
    toggle_tag,
    trim_proposal,
)


def tag_by_label(palette, label):
    for dim, tag in palette.iter_tags():
        if tag.label == label:
            return tag
    raise AssertionError(f"no tag {label}")


def weights(palette):
    return {tag.label: tag.weight for _, tag in palette.iter_tags()}


def test_init_palette_seeds_three_dimensions(digest):
    palette = init_palette(digest)
    assert [d.name for d in palette.ordered()] == ["Aesthetic", "Sustainability", "Functionality"]
    assert [d.ordinal for d in palette.ordered()] == [0, 1, 2]
    assert all(d.origin == "seed" for d in palette.dimensions)
    assert all(t.weight == 0 for _, t in palette.iter_tags())
    assert all(t.origin == "seed" for _, t in palette.iter_tags())
    assert validate_palette(palette) == []


def test_init_palette_rejects_two_dimensions():
    digest = DocumentDigest(dimensions=(("A", ("x", "y", "z")), ("B", ("p", "q", "r"))))
    with pytest.raises(InvalidDigest):
        init_palette(digest)


def test_init_palette_rejects_bad_tag_counts():
    digest = DocumentDigest(
        dimensions=(("A", ("x", "y")), ("B", ("p", "q", "r")), ("C", ("s", "t", "u")))
    )
    with pytest.raises(InvalidDigest):
        init_palette(digest)
    six = ("a", "b", "c", "d", "e", "f")
    digest = DocumentDigest(dimensions=(("A", six), ("B", ("p", "q", "r")), ("C", ("s", "t", "u"))))
    with pytest.raises(InvalidDigest):
        init_palette(digest)


def test_toggle_activates_and_reports_delta(palette):
    tag = tag_by_label(palette, "minimalist")
    after, delta = toggle_tag(palette, tag.id)
    assert weights(after)["minimalist"] == 1
    assert delta.activated == (tag.id,) and delta.deactivated == ()
    assert after.revision == palette.revision + 1


def test_toggle_twice_is_involution(palette):
    tag = tag_by_label(palette, "sturdy")
    once, _ = toggle_tag(palette, tag.id)
    twice, delta = toggle_tag(once, tag.id)
    assert weights(twice) == weights(palette)
    assert delta.deactivated == (tag.id,)


def test_toggle_unknown_tag(palette):
    with pytest.raises(UnknownTag):
        toggle_tag(palette, "tag-999")


def test_add_dimension_appends_with_next_ordinal(palette):
    after = add_dimension(palette, "Comfort", ["cushioned"], origin="user")
    new = after.ordered()[-1]
    assert new.name == "Comfort" and new.ordinal == 3
    assert [t.label for t in new.tags] == ["cushioned"]
    assert all(t.weight == 0 for t in new.tags)
    assert validate_palette(after) == []


def test_add_dimension_duplicate_case_insensitive(palette):
    with pytest.raises(DuplicateDimension):
        add_dimension(palette, "aesthetic", [])


def test_remove_dimension_compacts_and_deactivates(palette):
    tag = tag_by_label(palette, "eco-friendly")
    active, _ = toggle_tag(palette, tag.id)
    dim = active.find_dimension_by_name("Sustainability")
    after, delta = remove_dimension(active, dim.id)
    assert delta.deactivated == (tag.id,)
    assert [d.ordinal for d in after.ordered()] == [0, 1]
    assert validate_palette(after) == []
    with pytest.raises(UnknownDimension):
        remove_dimension(after, dim.id)


def test_add_tag_normalized_duplicate(palette):
    dim = palette.find_dimension_by_name("Sustainability")
    grown = add_tag(palette, dim.id, "stain-resistant")
    assert tag_by_label(grown, "stain-resistant").weight == 0
    with pytest.raises(DuplicateTag):
        add_tag(grown, dim.id, " Stain-Resistant ")
    with pytest.raises(UnknownDimension):
        add_tag(palette, "dim-404", "x")


def test_remove_tag_delta_depends_on_weight(palette):
    tag = tag_by_label(palette, "lightweight")
    removed, delta = remove_tag(palette, tag.id)
    assert delta.deactivated == () and delta.removed == (tag.id,)
    active, _ = toggle_tag(palette, tag.id)
    removed, delta = remove_tag(active, tag.id)
    assert delta.deactivated == (tag.id,)
    with pytest.raises(UnknownTag):
        remove_tag(removed, tag.id)


def test_reorder_reverses_ordinals(palette):
    order = [d.id for d in palette.ordered()][::-1]
    after = reorder_dimensions(palette, order)
    assert [d.id for d in after.ordered()] == order
    assert weights(after) == weights(palette)


def test_reorder_rejects_partial_permutation(palette):
    order = [d.id for d in palette.ordered()][:-1]
    with pytest.raises(InvalidPermutation):
        reorder_dimensions(palette, order)


def test_reorder_identity_only_bumps_revision(palette):
    order = [d.id for d in palette.ordered()]
    after = reorder_dimensions(palette, order)
    assert after.dimensions == palette.dimensions
    assert after.revision == palette.revision + 1


def test_apply_reveal_highlights_existing_and_materializes_new(palette):
    proposal = NewTagProposal(
        entries=(("Aesthetic", ("minimalist", "sculptural")),), source_image_id="img-1"
    )
    after = apply_reveal(palette, proposal)
    existing = tag_by_label(after, "minimalist")
    assert existing.highlight == "existing-match" and existing.weight == 0
    new = tag_by_label(after, "sculptural")
    assert new.highlight == "new-suggested"
    assert new.weight == 0 and new.origin == "extracted"
    assert validate_palette(after) == []


def test_apply_reveal_adds_missing_dimension(palette):
    proposal = NewTagProposal(entries=(("Ergonomics", ("lumbar support",)),))
    after = apply_reveal(palette, proposal)
    dim = after.find_dimension_by_name("Ergonomics")
    assert dim is not None and dim.origin == "extracted"
    assert dim.ordinal == 3
    assert [t.label for t in dim.tags] == ["lumbar support"]


def test_apply_reveal_matches_labels_across_dimensions(palette):
    proposal = NewTagProposal(entries=(("Style", ("minimalist",)),))
    after = apply_reveal(palette, proposal)
    assert after.find_dimension_by_name("Style") is None
    assert tag_by_label(after, "minimalist").highlight == "existing-match"


def test_clear_highlights_keeps_membership(palette):
    proposal = NewTagProposal(entries=(("Aesthetic", ("minimalist", "sculptural")),))
    revealed = apply_reveal(palette, proposal)
    cleared = clear_highlights(revealed)
    assert all(t.highlight == "none" for _, t in cleared.iter_tags())
    assert weights(cleared) == weights(revealed)
    assert tag_by_label(cleared, "sculptural").weight == 0
    again = clear_highlights(cleared)
    assert again.dimensions == cleared.dimensions


def test_trim_proposal_caps_new_labels(palette):
    entries = [("Extras", [f"new-{i}" for i in range(9)])]
    proposal = trim_proposal(palette, entries, source_image_id="img-3")
    assert len(proposal.labels()) == 5
    assert [l for _, l in proposal.labels()] == [f"new-{i}" for i in range(5)]


def test_trim_proposal_keeps_existing_beyond_cap(palette):
    entries = [("Aesthetic", ["minimalist", "contemporary"]), ("Extras", [f"n{i}" for i in range(7)])]
    proposal = trim_proposal(palette, entries)
    kept = [l for _, l in proposal.labels()]
    assert "minimalist" in kept and "contemporary" in kept
    assert len([l for l in kept if l.startswith("n")]) == 5


# --- properties ---


def seed_digest():
    return DocumentDigest(
        dimensions=(
            ("Aesthetic", ("minimalist", "contemporary", "neutral tones")),
            ("Sustainability", ("eco-friendly", "natural wood", "recycled materials")),
            ("Functionality", ("lightweight", "sturdy", "scratch-resistant", "stackable")),
        )
    )


@given(st.lists(st.integers(min_value=0, max_value=9), min_size=1, max_size=30))
@settings(max_examples=60)
def test_toggle_sequences_preserve_membership(seq):
    palette = init_palette(seed_digest())
    tags = [t.id for _, t in palette.iter_tags()]
    for pick in seq:
        palette, _ = toggle_tag(palette, tags[pick % len(tags)])
    assert {t.id for _, t in palette.iter_tags()} == set(tags)
    assert validate_palette(palette) == []


@given(st.randoms(use_true_random=False))
@settings(max_examples=40)
def test_random_mutations_never_violate_invariants(rnd):
    palette = init_palette(seed_digest())
    for step in range(25):
        ops = ["toggle", "add_tag", "add_dim", "reorder", "clear"]
        if len(palette.dimensions) > 1:
            ops += ["remove_dim"]
        tags = [t.id for _, t in palette.iter_tags()]
        if tags:
            ops += ["remove_tag", "toggle", "toggle"]
        op = rnd.choice(ops)
        try:
            if op == "toggle" and tags:
                palette, _ = toggle_tag(palette, rnd.choice(tags))
            elif op == "remove_tag" and tags:
                palette, _ = remove_tag(palette, rnd.choice(tags))
            elif op == "add_tag" and palette.dimensions:
                dim = rnd.choice(palette.dimensions)
                palette = add_tag(palette, dim.id, f"t{step}")
            elif op == "add_dim":
                palette = add_dimension(palette, f"D{step}", [f"s{step}"])
            elif op == "remove_dim":
                palette, _ = remove_dimension(palette, rnd.choice(palette.dimensions).id)
            elif op == "reorder":
                order = [d.id for d in palette.dimensions]
                rnd.shuffle(order)
                palette = reorder_dimensions(palette, order)
            elif op == "clear":
                palette = clear_highlights(palette)
        except (DuplicateTag, DuplicateDimension):
            pass
        assert validate_palette(palette) == []
