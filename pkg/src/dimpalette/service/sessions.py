"""Session lifecycle and the generate-inspect-refine loop, event-sourced.

Every command appends typed events; folding the event stream alone rebuilds
the exact session state (ids are allocated from counters carried on state, so
a replayed command history reproduces the log byte for byte). Commands execute
on a per-session lock: one logical writer per session, sessions independent.
"""

from __future__ import annotations

import io
import json
import tempfile
import threading
import time
import uuid
import zipfile
from dataclasses import dataclass, field, replace
from pathlib import Path

from .storage import MemoryStorage
from .. import palette as engine
from ..errors import (
    AlreadyFinalized,
    BaselineConditionViolation,
    CorruptArchive,
    EmptyPrompt,
    UnknownImage,
    UnknownSession,
)
from ..gateway import FixtureStore, Gateway
from ..gateway.calls import PipelineCall
from ..model import (
    DesignDocument,
    DocumentDigest,
    ImageRecord,
    Iteration,
    NewTagProposal,
    PALETTE_EVENT_KINDS,
    PaletteState,
    PromptState,
    SessionConfig,
    SessionEvent,
    check_event_stream,
    dump_event_line,
    dump_events,
    load_events,
)
from ..prompting import (
    DEFAULT_PREAMBLE,
    PromptUpdateRequest,
    check_containment,
    merge_manual_edit,
    synthesize_update,
)

PACKAGE_VERSION = "0.1.0"


def _now_ms() -> int:
    return time.time_ns() // 1_000_000


class ReplayClock:
    """Feeds recorded event timestamps back during archive re-execution."""

    def __init__(self, timestamps: list[int]):
        self._queue = list(timestamps)

    def __call__(self) -> int:
        if not self._queue:
            raise CorruptArchive("replay produced more events than the archive holds")
        return self._queue.pop(0)

    def remaining(self) -> int:
        return len(self._queue)


@dataclass
class Session:
    id: str
    config: SessionConfig
    document: DesignDocument
    palette: PaletteState = field(default_factory=PaletteState)
    prompt: PromptState = field(default_factory=PromptState)
    iterations: list[Iteration] = field(default_factory=list)
    favorites: list[str] = field(default_factory=list)
    final_selection: str | None = None
    events: list[SessionEvent] = field(default_factory=list)
    calls: list[PipelineCall] = field(default_factory=list)
    next_image_seq: int = 1

    @property
    def finalized(self) -> bool:
        return self.final_selection is not None

    def find_image(self, image_id: str) -> ImageRecord | None:
        for iteration in self.iterations:
            for record in iteration.images:
                if record.id == image_id:
                    return record
        return None

    def state_snapshot(self) -> dict:
        """The replayable projection of this session, as canonical JSON data."""
        return {
            "palette": self.palette.to_json(),
            "prompt": self.prompt.to_json(),
            "iterations": [i.to_json() for i in self.iterations],
            "favorites": list(self.favorites),
            "finalSelection": self.final_selection,
        }

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "config": self.config.to_json(),
            "document": self.document.to_json(),
            **self.state_snapshot(),
            "eventCount": len(self.events),
        }

    def summary_json(self) -> dict:
        return {
            "id": self.id,
            "config": self.config.to_json(),
            "documentId": self.document.id,
            "palette": self.palette.to_json(),
            "prompt": self.prompt.to_json(),
            "iterationCount": len(self.iterations),
        }


class SessionService:
    """Thread-safe facade: per-session serial commands, concurrent across sessions."""

    def __init__(self, gateway: Gateway | None = None, storage=None, clock=None):
        self.gateway = gateway or Gateway(mode="deterministic")
        self.storage = storage or MemoryStorage()
        self.clock = clock or _now_ms
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.RLock] = {}
        self._runtime: dict[str, dict] = {}  # per-session gateway/clock overrides
        self._images: dict[str, tuple[str, str]] = {}  # imageId -> (sessionId, contentRef)
        self._registry_lock = threading.Lock()
        self._tempdirs: list[tempfile.TemporaryDirectory] = []

    # --- registry plumbing ---

    def _register(self, session: Session, gateway: Gateway, clock) -> None:
        with self._registry_lock:
            if session.id in self._sessions:
                raise CorruptArchive(f"session {session.id} already exists")
            self._sessions[session.id] = session
            self._locks[session.id] = threading.RLock()
            self._runtime[session.id] = {"gateway": gateway, "clock": clock}

    def get_session(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"no session {session_id!r}")
        return session

    def list_sessions(self) -> list[str]:
        with self._registry_lock:
            return sorted(self._sessions)

    def _lock_for(self, session_id: str) -> threading.RLock:
        lock = self._locks.get(session_id)
        if lock is None:
            raise UnknownSession(f"no session {session_id!r}")
        return lock

    def _gateway_for(self, session: Session) -> Gateway:
        return self._runtime[session.id]["gateway"]

    def _next_at(self, session: Session) -> int:
        clock = self._runtime[session.id]["clock"]
        at = clock()
        if session.events and at < session.events[-1].at:
            at = session.events[-1].at
        return at

    def _emit(self, session: Session, kind: str, payload: dict) -> SessionEvent:
        event = SessionEvent(
            seq=len(session.events) + 1,
            at=self._next_at(session),
            kind=kind,
            payload=payload,
        )
        session.events.append(event)
        self.storage.append_event(session.id, dump_event_line(event))
        return event

    def _require_scaffolded(self, session: Session) -> None:
        if session.config.condition != "scaffolded":
            raise BaselineConditionViolation(
                "palette and info operations are disabled in the baseline condition"
            )

    def _require_open(self, session: Session) -> None:
        if session.finalized:
            raise AlreadyFinalized(f"session {session.id} is read-only after final selection")

    def _preamble(self, session: Session) -> str:
        return session.config.base_preamble or DEFAULT_PREAMBLE

    def _synthesize(self, session: Session, new_palette: PaletteState, gateway: Gateway):
        """Build the next PromptState for a palette change; returns (state, payload)."""
        mode = session.config.provider_mode
        request = PromptUpdateRequest(
            old_prompt=session.prompt.text,
            old_tags=session.palette.tag_snapshot(),
            new_tags=new_palette.tag_snapshot(),
            base_preamble=self._preamble(session),
        )
        collector: list[PipelineCall] = []
        engine_mode = "deterministic" if mode == "deterministic" else mode
        if engine_mode == "deterministic":
            prompt = synthesize_update(
                request,
                mode="deterministic",
                previous=session.prompt,
                derived_from=_weight_vector(new_palette),
            )
            warnings: list[str] = []
        else:
            text = gateway.update_prompt(request, collector=collector)
            warnings = check_containment(text, request.new_tags)
            prompt = PromptState(
                text=text,
                derived_from=_weight_vector(new_palette),
                manually_edited=False,
                revision=session.prompt.revision + 1,
            )
        payload = {
            "text": prompt.text,
            "derivedFrom": [{"tagId": t, "weight": w} for t, w in prompt.derived_from],
            "mode": engine_mode,
            "warnings": warnings,
        }
        return prompt, payload, collector

    # --- commands ---

    def create_session(
        self,
        document: DesignDocument | dict,
        config: SessionConfig | dict,
        session_id: str | None = None,
        gateway: Gateway | None = None,
        clock=None,
    ) -> Session:
        if isinstance(document, dict):
            document = DesignDocument.from_json(document)
        if isinstance(config, dict):
            config = SessionConfig.from_json(config)
        gateway = gateway or self.gateway
        clock = clock or self.clock
        session = Session(
            id=session_id or f"session-{uuid.uuid4().hex[:12]}",
            config=config,
            document=document,
        )
        collector: list[PipelineCall] = []
        digest: DocumentDigest | None = None
        if config.condition == "scaffolded":
            # provider failure propagates here and the session stays uncreated
            digest = gateway.digest_document(document, collector=collector)
        self._register(session, gateway, clock)
        session.calls.extend(collector)
        self._emit(
            session,
            "SessionCreated",
            {
                "sessionId": session.id,
                "document": document.to_json(),
                "config": config.to_json(),
            },
        )
        if digest is not None:
            session.palette = engine.init_palette(digest)
            self._emit(session, "PaletteInitialized", {"digest": digest.to_json()})
        return session

    def edit_prompt(self, session_id: str, text: str) -> PromptState:
        session = self.get_session(session_id)
        with self._lock_for(session_id):
            self._require_open(session)
            session.prompt = merge_manual_edit(session.prompt, text)
            self._emit(session, "PromptEdited", {"text": text})
            return session.prompt

    def toggle_tag_and_update(self, session_id: str, tag_id: str) -> tuple[PaletteState, PromptState]:
        session = self.get_session(session_id)
        with self._lock_for(session_id):
            self._require_open(session)
            self._require_scaffolded(session)
            new_palette, delta = engine.toggle_tag(session.palette, tag_id)
            dim, tag = new_palette.locate_tag(tag_id)
            prompt, synth_payload, collector = self._synthesize(
                session, new_palette, self._gateway_for(session)
            )
            # both mutations commit together; a gateway failure above leaves no trace
            session.palette = new_palette
            session.prompt = prompt
            session.calls.extend(collector)
            self._emit(
                session,
                "TagToggled",
                {
                    "tagId": tag_id,
                    "label": tag.label,
                    "dimensionId": dim.id,
                    "newWeight": tag.weight,
                },
            )
            self._emit(session, "PromptSynthesized", synth_payload)
            return session.palette, session.prompt

    def add_dimension(
        self, session_id: str, name: str, tag_labels: list[str] = (), origin: str = "user"
    ) -> PaletteState:
        session = self.get_session(session_id)
        with self._lock_for(session_id):
            self._require_open(session)
            self._require_scaffolded(session)
            new_palette = engine.add_dimension(session.palette, name, tag_labels, origin)
            new_dim = new_palette.ordered()[-1]
            session.palette = new_palette
            self._emit(
                session,
                "DimensionAdded",
                {
                    "dimensionId": new_dim.id,
                    "name": new_dim.name,
                    "origin": origin,
                    "tagIds": [t.id for t in new_dim.tags],
                    "tagLabels": [t.label for t in new_dim.tags],
                },
            )
            return session.palette

    def remove_dimension(self, session_id: str, dimension_id: str) -> PaletteState:
        session = self.get_session(session_id)
        with self._lock_for(session_id):
            self._require_open(session)
            self._require_scaffolded(session)
            dim = session.palette.find_dimension(dimension_id)
            new_palette, delta = engine.remove_dimension(session.palette, dimension_id)
            needs_prompt = bool(delta.deactivated)
            if needs_prompt:
                prompt, synth_payload, collector = self._synthesize(
                    session, new_palette, self._gateway_for(session)
                )
            session.palette = new_palette
            self._emit(
                session,
                "DimensionRemoved",
                {
                    "dimensionId": dimension_id,
                    "name": dim.name,
                    "deactivatedTagIds": list(delta.deactivated),
                },
            )
            if needs_prompt:
                session.prompt = prompt
                session.calls.extend(collector)
                self._emit(session, "PromptSynthesized", synth_payload)
            return session.palette

    def add_tag(self, session_id: str, dimension_id: str, label: str, origin: str = "user") -> PaletteState:
        session = self.get_session(session_id)
        with self._lock_for(session_id):
            self._require_open(session)
            self._require_scaffolded(session)
            new_palette = engine.add_tag(session.palette, dimension_id, label, origin)
            dim = new_palette.find_dimension(dimension_id)
            session.palette = new_palette
            self._emit(
                session,
                "TagAdded",
                {
                    "dimensionId": dimension_id,
                    "tagId": dim.tags[-1].id,
                    "label": dim.tags[-1].label,
                    "origin": origin,
                },
            )
            return session.palette

    def remove_tag(self, session_id: str, tag_id: str) -> PaletteState:
        session = self.get_session(session_id)
        with self._lock_for(session_id):
            self._require_open(session)
            self._require_scaffolded(session)
            dim, tag = session.palette.locate_tag(tag_id) or (None, None)
            new_palette, delta = engine.remove_tag(session.palette, tag_id)
            was_active = bool(delta.deactivated)
            if was_active:
                prompt, synth_payload, collector = self._synthesize(
                    session, new_palette, self._gateway_for(session)
                )
            session.palette = new_palette
            self._emit(
                session,
                "TagRemoved",
                {
                    "tagId": tag_id,
                    "label": tag.label,
                    "dimensionId": dim.id,
                    "wasActive": was_active,
                },
            )
            if was_active:
                session.prompt = prompt
                session.calls.extend(collector)
                self._emit(session, "PromptSynthesized", synth_payload)
            return session.palette

    def reorder_dimensions(self, session_id: str, order: list[str]) -> PaletteState:
        session = self.get_session(session_id)
        with self._lock_for(session_id):
            self._require_open(session)
            self._require_scaffolded(session)
            session.palette = engine.reorder_dimensions(session.palette, order)
            self._emit(session, "DimensionsReordered", {"order": list(order)})
            return session.palette

    def clear_highlights(self, session_id: str) -> PaletteState:
        session = self.get_session(session_id)
        with self._lock_for(session_id):
            self._require_open(session)
            self._require_scaffolded(session)
            session.palette = engine.clear_highlights(session.palette)
            self._emit(session, "HighlightsCleared", {})
            return session.palette

    def submit_prompt(self, session_id: str, latency_override: int | None = None) -> Iteration:
        session = self.get_session(session_id)
        with self._lock_for(session_id):
            self._require_open(session)
            if not session.prompt.text.strip():
                raise EmptyPrompt("cannot generate images from an empty prompt")
            gateway = self._gateway_for(session)
            collector: list[PipelineCall] = []
            started = time.perf_counter()
            generated = gateway.generate_images(
                session.prompt.text, n=session.config.images_per_iteration, collector=collector
            )
            if latency_override is not None:
                latency_ms = latency_override
            elif gateway.mode == "deterministic":
                latency_ms = 0  # stub timing is noise; keep the log reproducible
            else:
                latency_ms = int((time.perf_counter() - started) * 1000)
            at_hint = None  # created_at is stamped from the event time below
            index = len(session.iterations) + 1
            records = []
            image_payloads = []
            for img in generated:
                image_id = f"{session.id}-img-{session.next_image_seq}"
                session.next_image_seq += 1
                content_ref = f"images/{image_id}.png"
                self.storage.save_blob(session.id, content_ref, img.data)
                records.append((image_id, content_ref, img))
                image_payloads.append(
                    {
                        "imageId": image_id,
                        "contentRef": content_ref,
                        "revisedPrompt": img.revised_prompt,
                    }
                )
            session.calls.extend(collector)
            event = self._emit(
                session,
                "ImagesGenerated",
                {
                    "iteration": index,
                    "prompt": session.prompt.text,
                    "latencyMs": latency_ms,
                    "tagSnapshot": [
                        {"label": l, "dimensionName": d, "weight": w}
                        for l, d, w in session.palette.tag_snapshot()
                    ],
                    "images": image_payloads,
                },
            )
            images = tuple(
                ImageRecord(
                    id=image_id,
                    content_ref=content_ref,
                    prompt=session.prompt.text,
                    tag_snapshot=session.palette.tag_snapshot(),
                    created_at=event.at,
                )
                for image_id, content_ref, _img in records
            )
            iteration = Iteration(
                index=index, request=session.prompt, images=images, latency_ms=latency_ms
            )
            session.iterations.append(iteration)
            for record in images:
                self._images[record.id] = (session.id, record.content_ref)
            return iteration

    def like_image(self, session_id: str, image_id: str) -> list[str]:
        session = self.get_session(session_id)
        with self._lock_for(session_id):
            self._require_open(session)
            if session.find_image(image_id) is None:
                raise UnknownImage(f"no image {image_id!r} in session")
            if image_id not in session.favorites:
                session.favorites.append(image_id)
                self._set_liked(session, image_id, True)
                self._emit(session, "ImageLiked", {"imageId": image_id})
            return list(session.favorites)

    def unlike_image(self, session_id: str, image_id: str) -> list[str]:
        session = self.get_session(session_id)
        with self._lock_for(session_id):
            self._require_open(session)
            if session.find_image(image_id) is None:
                raise UnknownImage(f"no image {image_id!r} in session")
            if image_id in session.favorites:
                session.favorites.remove(image_id)
                self._set_liked(session, image_id, False)
                self._emit(session, "ImageUnliked", {"imageId": image_id})
            return list(session.favorites)

    def _set_liked(self, session: Session, image_id: str, liked: bool) -> None:
        for i, iteration in enumerate(session.iterations):
            for j, record in enumerate(iteration.images):
                if record.id == image_id:
                    images = list(iteration.images)
                    images[j] = replace(record, liked=liked)
                    session.iterations[i] = replace(iteration, images=tuple(images))
                    return

    def _set_extracted(self, session: Session, image_id: str, proposal: NewTagProposal) -> None:
        for i, iteration in enumerate(session.iterations):
            for j, record in enumerate(iteration.images):
                if record.id == image_id:
                    images = list(iteration.images)
                    images[j] = replace(record, extracted_tags=proposal)
                    session.iterations[i] = replace(iteration, images=tuple(images))
                    return

    def reveal_info(self, session_id: str, image_id: str) -> NewTagProposal:
        session = self.get_session(session_id)
        with self._lock_for(session_id):
            self._require_open(session)
            self._require_scaffolded(session)
            record = session.find_image(image_id)
            if record is None:
                raise UnknownImage(f"no image {image_id!r} in session")
            from_cache = record.extracted_tags is not None
            if from_cache:
                proposal = record.extracted_tags
            else:
                image_bytes = self.storage.load_blob(session.id, record.content_ref)
                collector: list[PipelineCall] = []
                proposal = self._gateway_for(session).extract_tags(
                    image_bytes, session.palette, source_image_id=image_id, collector=collector
                )
                session.calls.extend(collector)
            session.palette = engine.apply_reveal(session.palette, proposal)
            if not from_cache:
                self._set_extracted(session, image_id, proposal)
            self._emit(
                session,
                "InfoRevealed",
                {"imageId": image_id, "proposal": proposal.to_json(), "fromCache": from_cache},
            )
            return proposal

    def recommend_tags(self, session_id: str, dimension_id: str) -> list[str]:
        session = self.get_session(session_id)
        with self._lock_for(session_id):
            self._require_scaffolded(session)
            collector: list[PipelineCall] = []
            labels = self._gateway_for(session).recommend_tags(
                session.palette, dimension_id, collector=collector
            )
            session.calls.extend(collector)
            return labels

    def recommend_dimensions(self, session_id: str) -> list[str]:
        session = self.get_session(session_id)
        with self._lock_for(session_id):
            self._require_scaffolded(session)
            collector: list[PipelineCall] = []
            names = self._gateway_for(session).recommend_dimensions(
                session.palette, collector=collector
            )
            session.calls.extend(collector)
            return names

    def select_final(self, session_id: str, image_id: str) -> Session:
        session = self.get_session(session_id)
        with self._lock_for(session_id):
            if session.finalized:
                raise AlreadyFinalized("final image already selected")
            if session.find_image(image_id) is None:
                raise UnknownImage(f"no image {image_id!r} in session")
            liked = image_id in session.favorites
            payload = {"imageId": image_id, "liked": liked}
            if not liked:
                # selection procedure prefers liked images; permitted with a warning
                payload["warning"] = "final-selection-not-liked"
            session.final_selection = image_id
            self._emit(session, "FinalSelected", payload)
            return session

    def image_bytes(self, image_id: str) -> bytes:
        located = self._images.get(image_id)
        if located is None:
            raise UnknownImage(f"no image {image_id!r}")
        session_id, content_ref = located
        return self.storage.load_blob(session_id, content_ref)

    # --- export / replay ---

    def export_session(self, session_id: str) -> bytes:
        """Zip archive: manifest.json + events.jsonl + images/ + fixtures/ (if recorded)."""
        session = self.get_session(session_id)
        with self._lock_for(session_id):
            gateway = self._gateway_for(session)
            manifest = {
                "sessionId": session.id,
                "config": session.config.to_json(),
                "document": session.document.to_json(),
                "pipelineCalls": [c.to_json() for c in session.calls],
                "versions": {"dimpalette": PACKAGE_VERSION},
                "settings": {
                    "imageSize": gateway.config.image_size,
                    "imageQuality": gateway.config.image_quality,
                    "models": dict(gateway.config.models),
                },
            }
            stamp = (2020, 1, 1, 0, 0, 0)
            buffer = io.BytesIO()
            with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as archive:

                def add(name: str, data: bytes):
                    info = zipfile.ZipInfo(name, date_time=stamp)
                    info.compress_type = zipfile.ZIP_DEFLATED
                    archive.writestr(info, data)

                add("manifest.json", json.dumps(manifest, sort_keys=True, indent=2).encode("utf-8"))
                add("events.jsonl", dump_events(session.events).encode("utf-8"))
                for iteration in session.iterations:
                    for record in iteration.images:
                        add(
                            record.content_ref,
                            self.storage.load_blob(session.id, record.content_ref),
                        )
                if gateway.store is not None and session.calls:
                    keys = [f"{c.pipeline}:{c.hash}" for c in session.calls]
                    with tempfile.TemporaryDirectory() as tmp:
                        gateway.store.export_to(tmp, keys)
                        for path in sorted(Path(tmp).iterdir()):
                            add(f"fixtures/{path.name}", path.read_bytes())
            return buffer.getvalue()

    def replay_import(self, archive: bytes | str | Path) -> Session:
        """Re-execute an exported session against its fixtures, verifying the log."""
        root = self._extract_archive(archive)
        manifest_path = root / "manifest.json"
        events_path = root / "events.jsonl"
        if not manifest_path.exists() or not events_path.exists():
            raise CorruptArchive("archive is missing manifest.json or events.jsonl")
        try:
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CorruptArchive(f"manifest unreadable: {exc}") from exc
        recorded = load_events(events_path.read_text(encoding="utf-8"))
        try:
            check_event_stream(recorded)
        except ValueError as exc:
            raise CorruptArchive(str(exc)) from exc
        if not recorded or recorded[0].kind != "SessionCreated":
            raise CorruptArchive("event stream must start with SessionCreated")

        config = SessionConfig.from_json(manifest.get("config", {}))
        fixtures_dir = root / "fixtures"
        if fixtures_dir.exists():
            gateway = Gateway.replay_mode(FixtureStore(fixtures_dir))
        elif config.provider_mode == "deterministic":
            gateway = Gateway(mode="deterministic")
        else:
            raise CorruptArchive("archive has no fixtures but the session was not deterministic")

        clock = ReplayClock([e.at for e in recorded])
        session = self._drive_commands(recorded, gateway, clock)
        replayed = dump_events(session.events)
        if replayed != dump_events(recorded):
            raise CorruptArchive(
                f"replay diverged from the recorded log at seq {_first_divergence(session.events, recorded)}"
            )
        if clock.remaining():
            raise CorruptArchive("replay emitted fewer events than the archive holds")
        return session

    def _drive_commands(self, recorded: list[SessionEvent], gateway: Gateway, clock) -> Session:
        session: Session | None = None
        for event in recorded:
            payload = event.payload
            kind = event.kind
            if kind in ("PaletteInitialized", "PromptSynthesized"):
                continue  # companions emitted by the command that precedes them
            if kind == "SessionCreated":
                session = self.create_session(
                    document=payload["document"],
                    config=payload["config"],
                    session_id=payload["sessionId"],
                    gateway=gateway,
                    clock=clock,
                )
            elif session is None:
                raise CorruptArchive("event before SessionCreated")
            elif kind == "DimensionAdded":
                self.add_dimension(
                    session.id,
                    payload["name"],
                    payload.get("tagLabels", []),
                    payload.get("origin", "user"),
                )
            elif kind == "DimensionRemoved":
                self.remove_dimension(session.id, payload["dimensionId"])
            elif kind == "DimensionsReordered":
                self.reorder_dimensions(session.id, payload["order"])
            elif kind == "TagAdded":
                self.add_tag(
                    session.id, payload["dimensionId"], payload["label"], payload.get("origin", "user")
                )
            elif kind == "TagRemoved":
                self.remove_tag(session.id, payload["tagId"])
            elif kind == "TagToggled":
                self.toggle_tag_and_update(session.id, payload["tagId"])
            elif kind == "PromptEdited":
                self.edit_prompt(session.id, payload["text"])
            elif kind == "ImagesGenerated":
                self.submit_prompt(session.id, latency_override=payload["latencyMs"])
            elif kind == "ImageLiked":
                self.like_image(session.id, payload["imageId"])
            elif kind == "ImageUnliked":
                self.unlike_image(session.id, payload["imageId"])
            elif kind == "InfoRevealed":
                self.reveal_info(session.id, payload["imageId"])
            elif kind == "HighlightsCleared":
                self.clear_highlights(session.id)
            elif kind == "FinalSelected":
                self.select_final(session.id, payload["imageId"])
            else:
                raise CorruptArchive(f"cannot replay event kind {kind!r}")
        if session is None:
            raise CorruptArchive("archive holds no events")
        return session

    def _extract_archive(self, archive: bytes | str | Path) -> Path:
        if isinstance(archive, (str, Path)):
            path = Path(archive)
            if path.is_dir():
                return path
            data = path.read_bytes()
        else:
            data = archive
        tmp = tempfile.TemporaryDirectory(prefix="dimpalette-import-")
        self._tempdirs.append(tmp)  # keep alive: fixture stores read lazily
        try:
            with zipfile.ZipFile(io.BytesIO(data)) as zf:
                zf.extractall(tmp.name)
        except zipfile.BadZipFile as exc:
            raise CorruptArchive(f"not a zip archive: {exc}") from exc
        return Path(tmp.name)


def _weight_vector(palette: PaletteState) -> tuple[tuple[str, int], ...]:
    return tuple((tag.id, tag.weight) for _dim, tag in palette.iter_tags())


def _first_divergence(a: list[SessionEvent], b: list[SessionEvent]) -> int:
    for x, y in zip(a, b):
        if x.to_json() != y.to_json():
            return x.seq
    return min(len(a), len(b)) + 1


# --- pure event fold: state reconstruction without a service or gateway ---


@dataclass
class FoldedSession:
    id: str = ""
    config: SessionConfig | None = None
    document: DesignDocument | None = None
    palette: PaletteState = field(default_factory=PaletteState)
    prompt: PromptState = field(default_factory=PromptState)
    iterations: list[Iteration] = field(default_factory=list)
    favorites: list[str] = field(default_factory=list)
    final_selection: str | None = None

    def state_snapshot(self) -> dict:
        return {
            "palette": self.palette.to_json(),
            "prompt": self.prompt.to_json(),
            "iterations": [i.to_json() for i in self.iterations],
            "favorites": list(self.favorites),
            "finalSelection": self.final_selection,
        }


def fold_events(events: list[SessionEvent]) -> FoldedSession:
    """Rebuild session state from the event stream alone.

    Where payloads carry allocated ids, the fold re-runs the engine and checks
    the ids match; a mismatch means the stream was tampered with.
    """
    state = FoldedSession()
    for event in events:
        payload = event.payload
        kind = event.kind
        if kind == "SessionCreated":
            state.id = payload["sessionId"]
            state.config = SessionConfig.from_json(payload["config"])
            state.document = DesignDocument.from_json(payload["document"])
        elif kind == "PaletteInitialized":
            state.palette = engine.init_palette(DocumentDigest.from_json(payload["digest"]))
        elif kind == "DimensionAdded":
            state.palette = engine.add_dimension(
                state.palette, payload["name"], payload.get("tagLabels", []), payload.get("origin", "user")
            )
            new_dim = state.palette.ordered()[-1]
            if new_dim.id != payload["dimensionId"]:
                raise CorruptArchive(
                    f"seq {event.seq}: dimension id drift {new_dim.id} != {payload['dimensionId']}"
                )
        elif kind == "DimensionRemoved":
            state.palette, _ = engine.remove_dimension(state.palette, payload["dimensionId"])
        elif kind == "DimensionsReordered":
            state.palette = engine.reorder_dimensions(state.palette, payload["order"])
        elif kind == "TagAdded":
            state.palette = engine.add_tag(
                state.palette, payload["dimensionId"], payload["label"], payload.get("origin", "user")
            )
        elif kind == "TagRemoved":
            state.palette, _ = engine.remove_tag(state.palette, payload["tagId"])
        elif kind == "TagToggled":
            state.palette, _ = engine.toggle_tag(state.palette, payload["tagId"])
        elif kind == "PromptEdited":
            state.prompt = merge_manual_edit(state.prompt, payload["text"])
        elif kind == "PromptSynthesized":
            state.prompt = PromptState(
                text=payload["text"],
                derived_from=tuple(
                    (p["tagId"], int(p["weight"])) for p in payload.get("derivedFrom", ())
                ),
                manually_edited=False,
                revision=state.prompt.revision + 1,
            )
        elif kind == "ImagesGenerated":
            images = tuple(
                ImageRecord(
                    id=img["imageId"],
                    content_ref=img["contentRef"],
                    prompt=payload["prompt"],
                    tag_snapshot=state.palette.tag_snapshot(),
                    created_at=event.at,
                )
                for img in payload["images"]
            )
            state.iterations.append(
                Iteration(
                    index=payload["iteration"],
                    request=state.prompt,
                    images=images,
                    latency_ms=payload["latencyMs"],
                )
            )
        elif kind == "ImageLiked":
            if payload["imageId"] not in state.favorites:
                state.favorites.append(payload["imageId"])
            _fold_set_liked(state, payload["imageId"], True)
        elif kind == "ImageUnliked":
            if payload["imageId"] in state.favorites:
                state.favorites.remove(payload["imageId"])
            _fold_set_liked(state, payload["imageId"], False)
        elif kind == "InfoRevealed":
            proposal = NewTagProposal.from_json(payload["proposal"])
            state.palette = engine.apply_reveal(state.palette, proposal)
            if not payload.get("fromCache"):
                _fold_set_extracted(state, payload["imageId"], proposal)
        elif kind == "HighlightsCleared":
            state.palette = engine.clear_highlights(state.palette)
        elif kind == "FinalSelected":
            state.final_selection = payload["imageId"]
        else:
            raise CorruptArchive(f"unknown event kind {kind!r}")
    return state


def _fold_set_liked(state: FoldedSession, image_id: str, liked: bool) -> None:
    for i, iteration in enumerate(state.iterations):
        for j, record in enumerate(iteration.images):
            if record.id == image_id:
                images = list(iteration.images)
                images[j] = replace(record, liked=liked)
                state.iterations[i] = replace(iteration, images=tuple(images))
                return


def _fold_set_extracted(state: FoldedSession, image_id: str, proposal: NewTagProposal) -> None:
    for i, iteration in enumerate(state.iterations):
        for j, record in enumerate(iteration.images):
            if record.id == image_id:
                images = list(iteration.images)
                images[j] = replace(record, extracted_tags=proposal)
                state.iterations[i] = replace(iteration, images=tuple(images))
                return


def baseline_purity(events: list[SessionEvent]) -> bool:
    """True when the log holds no palette event kinds (the baseline contract)."""
    return all(e.kind not in PALETTE_EVENT_KINDS for e in events)
