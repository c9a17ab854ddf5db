import io
import random
import zipfile

import pytest
from fastapi.testclient import TestClient

from conftest import CommandDriver, make_session
from dimpalette.errors import (
    AlreadyFinalized,
    BaselineConditionViolation,
    CorruptArchive,
    EmptyPrompt,
    ProviderError,
    UnknownImage,
)
from dimpalette.gateway import Gateway, FixtureStore
from dimpalette.model import PALETTE_EVENT_KINDS, SessionConfig, dump_events, load_events
from dimpalette.service import SessionService, baseline_purity, create_app, fold_events
from dimpalette.service.storage import DiskStorage


def first_tag(session):
    return session.palette.ordered()[0].tags[0]


def test_create_scaffolded_seeds_palette(service, brief):
    session = make_session(service)
    assert [d.name for d in session.palette.ordered()] == [
        "Aesthetic",
        "Sustainability",
        "Functionality",
    ]
    kinds = [e.kind for e in session.events]
    assert kinds == ["SessionCreated", "PaletteInitialized"]


def test_create_baseline_skips_digestion(service):
    session = make_session(service, condition="baseline")
    assert session.palette.dimensions == ()
    assert [e.kind for e in session.events] == ["SessionCreated"]


def test_create_rejects_invalid_document(service):
    with pytest.raises(ValueError):
        service.create_session({"id": "x", "title": "", "body": "  "}, SessionConfig())


def test_provider_failure_leaves_session_uncreated(brief):
    class FailingBackend:
        name = "failing"

        def chat(self, pipeline, payload, context):
            raise ProviderError("down", pipeline=pipeline)

        def images(self, payload, context):
            raise ProviderError("down", pipeline="imageGen")

    service = SessionService(gateway=Gateway(mode="live", backend=FailingBackend()))
    with pytest.raises(ProviderError):
        service.create_session(brief, SessionConfig(provider_mode="live"))
    assert service.list_sessions() == []


def test_toggle_updates_prompt_and_pairs_events(service):
    session = make_session(service)
    tag = first_tag(session)
    palette, prompt = service.toggle_tag_and_update(session.id, tag.id)
    assert tag.label in prompt.text
    assert [e.kind for e in session.events[-2:]] == ["TagToggled", "PromptSynthesized"]
    # untoggle drops back to the bare preamble, re-toggle restores the exact text
    from dimpalette.prompting import DEFAULT_PREAMBLE

    service.toggle_tag_and_update(session.id, tag.id)
    assert session.prompt.text == DEFAULT_PREAMBLE
    palette2, prompt2 = service.toggle_tag_and_update(session.id, tag.id)
    assert prompt2.text == prompt.text


def test_toggle_rolls_back_on_provider_failure(brief):
    class FlakyBackend:
        name = "flaky"

        def __init__(self):
            self.fail = False

        def chat(self, pipeline, payload, context):
            if self.fail and pipeline == "promptUpdate":
                raise ProviderError("boom", pipeline=pipeline)
            from dimpalette.gateway.backends import DeterministicBackend

            return DeterministicBackend().chat(pipeline, payload, context)

        def images(self, payload, context):
            from dimpalette.gateway.backends import DeterministicBackend

            return DeterministicBackend().images(payload, context)

    backend = FlakyBackend()
    service = SessionService(gateway=Gateway(mode="live", backend=backend))
    session = service.create_session(brief, SessionConfig(provider_mode="live"))
    before_events = len(session.events)
    before_palette = session.palette
    backend.fail = True
    with pytest.raises(ProviderError):
        service.toggle_tag_and_update(session.id, first_tag(session).id)
    assert len(session.events) == before_events
    assert session.palette == before_palette


def test_baseline_guards_every_palette_command(service):
    session = make_session(service, condition="baseline")
    service.edit_prompt(session.id, "a plain chair")
    iteration = service.submit_prompt(session.id)
    image_id = iteration.images[0].id
    calls = [
        lambda: service.toggle_tag_and_update(session.id, "tag-1"),
        lambda: service.add_dimension(session.id, "Comfort", []),
        lambda: service.remove_dimension(session.id, "dim-1"),
        lambda: service.add_tag(session.id, "dim-1", "x"),
        lambda: service.remove_tag(session.id, "tag-1"),
        lambda: service.reorder_dimensions(session.id, []),
        lambda: service.clear_highlights(session.id),
        lambda: service.reveal_info(session.id, image_id),
        lambda: service.recommend_tags(session.id, "dim-1"),
        lambda: service.recommend_dimensions(session.id),
    ]
    for call in calls:
        with pytest.raises(BaselineConditionViolation):
            call()
    assert baseline_purity(session.events)
    assert not any(e.kind in PALETTE_EVENT_KINDS for e in session.events)


def test_submit_requires_nonempty_prompt(service):
    session = make_session(service)
    with pytest.raises(EmptyPrompt):
        service.submit_prompt(session.id)


def test_submit_appends_iteration_atomically(service):
    session = make_session(service)
    # four seed toggles before the first generation
    toggled = 0
    for dim in session.palette.ordered():
        service.toggle_tag_and_update(session.id, dim.tags[0].id)
        toggled += 1
    service.toggle_tag_and_update(session.id, session.palette.ordered()[0].tags[1].id)
    toggled += 1
    iteration = service.submit_prompt(session.id)
    assert iteration.index == 1
    assert len(iteration.images) == 3
    snapshot_weights = [w for _l, _d, w in iteration.images[0].tag_snapshot]
    assert snapshot_weights.count(1) == toggled == 4
    event = session.events[-1]
    assert event.kind == "ImagesGenerated"
    assert event.payload["latencyMs"] >= 0
    assert session.next_image_seq == 4


def test_images_per_iteration_configurable(service, brief):
    session = service.create_session(
        brief, SessionConfig(provider_mode="deterministic", images_per_iteration=2)
    )
    service.edit_prompt(session.id, "a chair")
    iteration = service.submit_prompt(session.id)
    assert len(iteration.images) == session.config.images_per_iteration == 2


def test_iteration_indices_monotone(service):
    session = make_session(service)
    service.edit_prompt(session.id, "chair one")
    for expected in (1, 2, 3):
        iteration = service.submit_prompt(session.id)
        assert iteration.index == expected
    ats = [e.at for e in session.events]
    assert ats == sorted(ats)


def test_like_unlike_idempotent(service):
    session = make_session(service)
    service.edit_prompt(session.id, "chair")
    iteration = service.submit_prompt(session.id)
    image_id = iteration.images[0].id
    assert service.like_image(session.id, image_id) == [image_id]
    assert service.like_image(session.id, image_id) == [image_id]
    like_events = [e for e in session.events if e.kind == "ImageLiked"]
    assert len(like_events) == 1
    assert service.unlike_image(session.id, image_id) == []
    assert service.unlike_image(session.id, image_id) == []
    assert len([e for e in session.events if e.kind == "ImageUnliked"]) == 1
    with pytest.raises(UnknownImage):
        service.like_image(session.id, "img-404")


def test_reveal_caches_extraction(service):
    session = make_session(service)
    service.edit_prompt(session.id, "chair")
    iteration = service.submit_prompt(session.id)
    image_id = iteration.images[0].id
    gateway = service.gateway
    before = gateway.backend_calls
    first = service.reveal_info(session.id, image_id)
    assert gateway.backend_calls == before + 1
    second = service.reveal_info(session.id, image_id)
    assert gateway.backend_calls == before + 1  # served from cache
    assert second == first
    reveal_events = [e for e in session.events if e.kind == "InfoRevealed"]
    assert [e.payload["fromCache"] for e in reveal_events] == [False, True]
    highlighted = [t for _d, t in session.palette.iter_tags() if t.highlight != "none"]
    assert highlighted
    service.clear_highlights(session.id)
    assert all(t.highlight == "none" for _d, t in session.palette.iter_tags())


def test_select_final_freezes_session(service):
    session = make_session(service)
    service.edit_prompt(session.id, "chair")
    iteration = service.submit_prompt(session.id)
    keep = iteration.images[0].id
    service.like_image(session.id, keep)
    service.select_final(session.id, keep)
    assert session.final_selection == keep
    event = session.events[-1]
    assert event.payload["liked"] is True and "warning" not in event.payload
    with pytest.raises(AlreadyFinalized):
        service.select_final(session.id, keep)
    with pytest.raises(AlreadyFinalized):
        service.edit_prompt(session.id, "more")
    with pytest.raises(AlreadyFinalized):
        service.submit_prompt(session.id)


def test_select_unliked_image_warns(service):
    session = make_session(service)
    service.edit_prompt(session.id, "chair")
    iteration = service.submit_prompt(session.id)
    service.select_final(session.id, iteration.images[2].id)
    event = session.events[-1]
    assert event.payload["warning"] == "final-selection-not-liked"


def test_event_fold_matches_state_after_each_command(service):
    from dimpalette.model import validate_palette

    session = make_session(service)
    driver = CommandDriver(service, session, random.Random(99))
    for _ in range(40):
        driver.step()
        folded = fold_events(session.events)
        assert folded.state_snapshot() == session.state_snapshot()
        assert validate_palette(folded.palette) == []


def test_commands_serialize_within_and_across_sessions(brief):
    import concurrent.futures

    service = SessionService(gateway=Gateway(mode="deterministic"))
    sessions = [
        service.create_session(brief, SessionConfig(provider_mode="deterministic"))
        for _ in range(4)
    ]

    def hammer(session, seed):
        rng = random.Random(seed)
        tags = [t.id for d in session.palette.ordered() for t in d.tags]
        for _ in range(12):
            service.toggle_tag_and_update(session.id, rng.choice(tags))
        return session.id

    with concurrent.futures.ThreadPoolExecutor(max_workers=8) as pool:
        # two workers per session: same-session calls must serialize cleanly
        futures = [
            pool.submit(hammer, session, seed)
            for seed, session in enumerate(sessions + sessions)
        ]
        for future in futures:
            future.result()

    for session in sessions:
        assert len(session.events) == 2 + 2 * 24  # created+init, then 24 toggle pairs
        seqs = [e.seq for e in session.events]
        assert seqs == list(range(1, len(seqs) + 1))
        folded = fold_events(session.events)
        assert folded.state_snapshot() == session.state_snapshot()


def test_disk_storage_persists_events(tmp_path, brief):
    storage = DiskStorage(tmp_path / "store")
    service = SessionService(gateway=Gateway(mode="deterministic"), storage=storage)
    session = service.create_session(brief, SessionConfig())
    service.edit_prompt(session.id, "chair")
    service.submit_prompt(session.id)
    reloaded = storage.load_events(session.id)
    assert dump_events(reloaded) == dump_events(session.events)
    record = session.iterations[0].images[0]
    assert storage.load_blob(session.id, record.content_ref).startswith(b"\x89PNG")


# --- export / replay ---


def record_session(tmp_path, iterations=3):
    store = FixtureStore(tmp_path / "fixtures")
    gateway = Gateway.record_mode(store)
    service = SessionService(gateway=gateway)
    session = service.create_session(
        __import__("dimpalette.data", fromlist=["sample_brief"]).sample_brief(),
        SessionConfig(provider_mode="live"),
        session_id="recorded-session",
    )
    tags = [t.id for d in session.palette.ordered() for t in d.tags]
    rng = random.Random(5)
    for i in range(iterations):
        service.toggle_tag_and_update(session.id, rng.choice(tags))
        service.submit_prompt(session.id)
    image_id = session.iterations[0].images[0].id
    service.like_image(session.id, image_id)
    service.reveal_info(session.id, image_id)
    return service, session


def test_export_import_round_trip(tmp_path):
    service, session = record_session(tmp_path)
    archive = service.export_session(session.id)
    names = zipfile.ZipFile(io.BytesIO(archive)).namelist()
    assert "manifest.json" in names and "events.jsonl" in names
    assert any(n.startswith("images/") for n in names)
    assert any(n.startswith("fixtures/") for n in names)

    fresh = SessionService()
    replayed = fresh.replay_import(archive)
    assert replayed.state_snapshot() == session.state_snapshot()
    assert dump_events(replayed.events) == dump_events(session.events)
    assert len(replayed.iterations) == len(session.iterations)
    assert [i.images[0].id for i in replayed.iterations] == [
        i.images[0].id for i in session.iterations
    ]
    gateway = fresh._runtime[replayed.id]["gateway"]
    assert gateway.backend_calls == 0
    # importing the same session id twice must fail loudly
    with pytest.raises(CorruptArchive):
        fresh.replay_import(archive)


def test_replay_import_rejects_seq_gap(tmp_path):
    service, session = record_session(tmp_path, iterations=1)
    archive = service.export_session(session.id)
    with zipfile.ZipFile(io.BytesIO(archive)) as zf:
        entries = {n: zf.read(n) for n in zf.namelist()}
    lines = entries["events.jsonl"].decode().splitlines()
    tampered = "\n".join(lines[:1] + lines[2:]) + "\n"
    entries["events.jsonl"] = tampered.encode()
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w") as zf:
        for name, data in entries.items():
            zf.writestr(name, data)
    with pytest.raises(CorruptArchive):
        SessionService().replay_import(buffer.getvalue())


def test_replay_import_fixture_miss_aborts(tmp_path):
    service, session = record_session(tmp_path, iterations=1)
    archive = service.export_session(session.id)
    with zipfile.ZipFile(io.BytesIO(archive)) as zf:
        entries = {n: zf.read(n) for n in zf.namelist()}
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w") as zf:
        for name, data in entries.items():
            if not name.startswith("fixtures/promptUpdate"):
                zf.writestr(name, data)
    with pytest.raises(Exception) as err:
        SessionService().replay_import(buffer.getvalue())
    assert err.value.__class__.__name__ in ("FixtureMiss", "CorruptArchive")


def test_deterministic_session_replays_without_fixtures(service):
    session = make_session(service)
    service.toggle_tag_and_update(session.id, first_tag(session).id)
    service.submit_prompt(session.id)
    archive = service.export_session(session.id)
    fresh = SessionService()
    replayed = fresh.replay_import(archive)
    assert dump_events(replayed.events) == dump_events(session.events)


def test_replay_twice_identical(tmp_path):
    service, session = record_session(tmp_path, iterations=2)
    archive = service.export_session(session.id)
    one = SessionService().replay_import(archive)
    two = SessionService().replay_import(archive)
    assert one.state_snapshot() == two.state_snapshot()


# --- HTTP API ---


@pytest.fixture
def client():
    service = SessionService(gateway=Gateway(mode="deterministic"))
    app = create_app(service)
    return TestClient(app)


def create_http_session(client, condition="scaffolded"):
    response = client.post(
        "/sessions",
        json={"documentId": "sample-brief", "condition": condition, "providerMode": "deterministic"},
    )
    assert response.status_code == 201, response.text
    return response.json()


def test_http_session_lifecycle(client):
    summary = create_http_session(client)
    sid = summary["id"]
    assert summary["palette"]["dimensions"][0]["name"] == "Aesthetic"

    tag_id = summary["palette"]["dimensions"][0]["tags"][0]["id"]
    toggled = client.post(f"/sessions/{sid}/palette/tags/{tag_id}/toggle")
    assert toggled.status_code == 200
    prompt_text = toggled.json()["prompt"]["text"]
    assert "minimalist" in prompt_text

    state = client.get(f"/sessions/{sid}").json()
    assert state["prompt"]["text"] == prompt_text

    submitted = client.post(f"/sessions/{sid}/prompt/submit")
    assert submitted.status_code == 200
    images = submitted.json()["images"]
    assert len(images) == 3

    image_id = images[0]["imageId"] if "imageId" in images[0] else images[0]["id"]
    raw = client.get(f"/images/{image_id}")
    assert raw.status_code == 200
    assert raw.headers["content-type"] == "image/png"
    assert raw.content.startswith(b"\x89PNG")

    liked = client.post(f"/sessions/{sid}/images/{image_id}/like")
    assert liked.json()["favorites"] == [image_id]
    unliked = client.delete(f"/sessions/{sid}/images/{image_id}/like")
    assert unliked.json()["favorites"] == []

    revealed = client.post(f"/sessions/{sid}/images/{image_id}/reveal")
    assert revealed.status_code == 200
    assert revealed.json()["proposal"]["entries"]

    cleared = client.post(f"/sessions/{sid}/palette/highlights/clear")
    assert cleared.status_code == 200

    recs = client.post(f"/sessions/{sid}/recommendations/dimensions")
    assert recs.status_code == 200 and len(recs.json()["names"]) > 0
    dim_id = summary["palette"]["dimensions"][0]["id"]
    tag_recs = client.post(f"/sessions/{sid}/recommendations/tags", json={"dimensionId": dim_id})
    assert tag_recs.status_code == 200 and tag_recs.json()["labels"]

    final = client.post(f"/sessions/{sid}/final", json={"imageId": image_id})
    assert final.status_code == 200
    assert final.json()["finalSelection"] == image_id

    export = client.get(f"/sessions/{sid}/export")
    assert export.status_code == 200
    assert export.headers["content-type"] == "application/zip"
    with zipfile.ZipFile(io.BytesIO(export.content)) as zf:
        assert "events.jsonl" in zf.namelist()


def test_http_palette_crud(client):
    summary = create_http_session(client)
    sid = summary["id"]
    added = client.post(f"/sessions/{sid}/palette/dimensions", json={"name": "Comfort", "tags": ["cushioned"]})
    assert added.status_code == 200
    dims = added.json()["dimensions"]
    assert dims[-1]["name"] == "Comfort"

    dim_id = dims[-1]["id"]
    tag = client.post(f"/sessions/{sid}/palette/dimensions/{dim_id}/tags", json={"label": "padded"})
    assert tag.status_code == 200

    dup = client.post(f"/sessions/{sid}/palette/dimensions", json={"name": "comfort"})
    assert dup.status_code == 409
    assert dup.json()["error"]["code"] == "duplicate-dimension"

    order = [d["id"] for d in dims][::-1]
    reordered = client.post(f"/sessions/{sid}/palette/reorder", json={"order": order})
    assert reordered.status_code == 200
    assert [d["id"] for d in reordered.json()["dimensions"]] == order

    tag_id = reordered.json()["dimensions"][0]["tags"][0]["id"]
    removed = client.delete(f"/sessions/{sid}/palette/tags/{tag_id}")
    assert removed.status_code == 200
    gone = client.delete(f"/sessions/{sid}/palette/dimensions/{dim_id}")
    assert gone.status_code == 200


def test_http_error_shapes(client):
    missing = client.get("/sessions/nope")
    assert missing.status_code == 404
    body = missing.json()["error"]
    assert body["code"] == "unknown-session" and body["message"]

    summary = create_http_session(client)
    sid = summary["id"]
    empty = client.post(f"/sessions/{sid}/prompt/submit")
    assert empty.status_code == 400
    assert empty.json()["error"]["code"] == "empty-prompt"

    bad_tag = client.post(f"/sessions/{sid}/palette/tags/tag-404/toggle")
    assert bad_tag.status_code == 404
    assert bad_tag.json()["error"]["code"] == "unknown-tag"

    baseline = create_http_session(client, condition="baseline")
    blocked = client.post(f"/sessions/{baseline['id']}/palette/tags/tag-1/toggle")
    assert blocked.status_code == 409
    assert blocked.json()["error"]["code"] == "baseline-condition-violation"


def test_http_inline_document(client):
    response = client.post(
        "/sessions",
        json={
            "document": {"id": "inline-1", "title": "loveseat brief", "body": "a compact oak loveseat"},
            "condition": "scaffolded",
            "providerMode": "deterministic",
        },
    )
    assert response.status_code == 201
    assert response.json()["documentId"] == "inline-1"

    unknown = client.post(
        "/sessions", json={"documentId": "no-such-brief", "condition": "scaffolded"}
    )
    assert unknown.status_code == 400


def test_http_baseline_manual_loop(client):
    summary = create_http_session(client, condition="baseline")
    sid = summary["id"]
    assert summary["palette"]["dimensions"] == []
    edited = client.post(f"/sessions/{sid}/prompt", json={"text": "a cozy wooden chair"})
    assert edited.status_code == 200
    assert edited.json()["manuallyEdited"] is True
    submitted = client.post(f"/sessions/{sid}/prompt/submit")
    assert submitted.status_code == 200
    assert len(submitted.json()["images"]) == 3
