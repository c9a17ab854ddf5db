import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from dimpalette.errors import EmptyPrompt
from dimpalette.model import PromptState
from dimpalette.prompting import (
    AUTOCOMPLETE_CONTINUATION,
    DEFAULT_PREAMBLE,
    PromptUpdateRequest,
    autocomplete,
    check_containment,
    deterministic_template,
    merge_manual_edit,
    synthesize_update,
)

PREAMBLE = "Render a studio product shot."


def test_template_empty_is_preamble_alone():
    assert deterministic_template((), PREAMBLE) == PREAMBLE


def test_template_all_weights_zero_is_preamble_alone():
    tags = (("minimalist", "Aesthetic", 0), ("oak", "Material", 0))
    assert deterministic_template(tags, PREAMBLE) == PREAMBLE


def test_template_one_sentence_per_active_dimension():
    tags = (
        ("minimalist", "Aesthetic", 1),
        ("neutral tones", "Aesthetic", 1),
        ("eco-friendly", "Sustainability", 1),
        ("sturdy", "Functionality", 0),
    )
    text = deterministic_template(tags, PREAMBLE)
    assert text == (
        PREAMBLE
        + " The design features minimalist, neutral tones for Aesthetic."
        + " The design features eco-friendly for Sustainability."
    )


def test_template_orders_by_snapshot_dimension_order():
    base = [("a1", "DimA", 1), ("b1", "DimB", 1)]
    forward = deterministic_template(tuple(base), PREAMBLE)
    swapped = deterministic_template(tuple(reversed(base)), PREAMBLE)
    assert forward != swapped
    assert sorted(forward.split(" The design features ")) == sorted(
        swapped.split(" The design features ")
    )


def test_template_permutations_preserve_sentence_content():
    # every ordering of three one-tag dimensions permutes sentences only
    tags = [("alpha", "D1", 1), ("beta", "D2", 1), ("gamma", "D3", 1)]
    sentences = set()
    for perm in itertools.permutations(tags):
        text = deterministic_template(tuple(perm), PREAMBLE)
        body = text[len(PREAMBLE) + 1 :]
        parts = [p.strip() for p in body.split("The design features ") if p.strip()]
        sentences.add(frozenset(parts))
    assert len(sentences) == 1


def test_template_empty_preamble_falls_back_to_default():
    assert deterministic_template((), "  ") == DEFAULT_PREAMBLE


def test_synthesize_deterministic_matches_template():
    tags = (("minimalist", "Aesthetic", 1),)
    request = PromptUpdateRequest(old_prompt="", old_tags=(), new_tags=tags, base_preamble=PREAMBLE)
    state = synthesize_update(request, mode="deterministic", derived_from=(("tag-1", 1),))
    assert state.text == deterministic_template(tags, PREAMBLE)
    assert state.derived_from == (("tag-1", 1),)
    assert state.manually_edited is False
    assert state.revision == 1


def test_synthesize_idempotent_when_tags_unchanged():
    tags = (("minimalist", "Aesthetic", 1), ("oak", "Material", 0))
    first = synthesize_update(
        PromptUpdateRequest("", (), tags, PREAMBLE), mode="deterministic"
    )
    second = synthesize_update(
        PromptUpdateRequest(first.text, tags, tags, PREAMBLE),
        mode="deterministic",
        previous=first,
    )
    assert second.text == first.text
    assert second.revision == first.revision + 1


def test_deactivation_matches_fresh_synthesis():
    # update path vs from-scratch path over randomized tag sets
    rng = random.Random(42)
    dims = ["Aesthetic", "Sustainability", "Functionality", "Comfort"]
    for _ in range(50):
        labels = [f"tok{i}" for i in range(rng.randint(2, 8))]
        tags = [(label, rng.choice(dims), rng.randint(0, 1)) for label in labels]
        victim = rng.randrange(len(tags))
        tags[victim] = (tags[victim][0], tags[victim][1], 1)
        with_active = tuple(tags)
        tags[victim] = (tags[victim][0], tags[victim][1], 0)
        without = tuple(tags)
        base = synthesize_update(
            PromptUpdateRequest("", (), with_active, PREAMBLE), mode="deterministic"
        )
        updated = synthesize_update(
            PromptUpdateRequest(base.text, with_active, without, PREAMBLE),
            mode="deterministic",
            previous=base,
        )
        fresh = synthesize_update(
            PromptUpdateRequest("", (), without, PREAMBLE), mode="deterministic"
        )
        assert updated.text == fresh.text


@given(
    st.lists(
        st.tuples(st.integers(0, 1), st.sampled_from(["D1", "D2", "D3"])),
        min_size=0,
        max_size=10,
    )
)
@settings(max_examples=100)
def test_active_labels_appear_exactly_once(spec):
    tags = tuple((f"uniqtok{i}", dim, w) for i, (w, dim) in enumerate(spec))
    text = deterministic_template(tags, PREAMBLE)
    for label, _dim, weight in tags:
        assert text.count(label) == (1 if weight == 1 else 0)


def test_merge_manual_edit_sets_flag_and_keeps_snapshot():
    current = PromptState(text="old", derived_from=(("tag-1", 1),), revision=2)
    merged = merge_manual_edit(current, "old plus Width is 18 inches.")
    assert merged.manually_edited is True
    assert merged.derived_from == current.derived_from
    assert merged.revision == 3


def test_merge_unchanged_text_only_bumps_revision():
    current = PromptState(text="same", manually_edited=False, revision=5)
    merged = merge_manual_edit(current, "same")
    assert merged.text == "same"
    assert merged.manually_edited is False
    assert merged.revision == 6


def test_merge_empty_string_clears_prompt():
    merged = merge_manual_edit(PromptState(text="x", revision=1), "")
    assert merged.text == ""
    assert merged.manually_edited is True


def test_manual_text_flows_into_next_live_request():
    current = PromptState(text="template text", revision=1)
    merged = merge_manual_edit(current, "template text Width is 18 inches and depth is 16 inches.")

    class StubGateway:
        def update_prompt(self, request):
            self.seen = request
            return "updated"

    gw = StubGateway()
    synthesize_update(
        PromptUpdateRequest(merged.text, (), (("oak", "Material", 1),)),
        mode="live",
        gateway=gw,
        previous=merged,
    )
    assert "Width is 18 inches" in gw.seen.old_prompt


def test_autocomplete_deterministic_appends_marker():
    out = autocomplete("A cozy", mode="deterministic")
    assert out == "A cozy " + AUTOCOMPLETE_CONTINUATION


def test_autocomplete_rejects_empty():
    with pytest.raises(EmptyPrompt):
        autocomplete("   ", mode="deterministic")


def test_check_containment_flags_both_directions():
    warnings = check_containment(
        "has minimalist lines", (("minimalist", "A", 0), ("oak", "B", 1))
    )
    assert "present-inactive:minimalist" in warnings
    assert "missing-active:oak" in warnings
    assert check_containment("oak", (("oak", "B", 1),)) == []
