"""Single point of contact with chat/vision/image providers.

Modes:
  live          call the provider, nothing recorded
  record        call the provider and append every response to a fixture store
  replay        serve responses from the store only; a miss is FixtureMiss,
                never a silent live fallback
  deterministic local stub backend, no store needed

Every resolved call lands in ``call_log`` (and an optional per-call collector)
so sessions can export exactly the fixtures they depend on.
"""

from __future__ import annotations

import logging
import threading
import time

from .backends import DeterministicBackend, GatewayConfig, GeneratedImage, LiveBackend
from .calls import PipelineCall, request_hash
from .fixtures import FixtureResponse, FixtureStore
from .parsers import parse_comma_list, parse_dimension_entries, strip_wrapping_quotes
from .prompts import (
    DEFAULT_MODELS,
    build_autocomplete_request,
    build_digest_request,
    build_dimension_recommend_request,
    build_image_request,
    build_prompt_update_request,
    build_tag_extract_request,
    build_tag_recommend_request,
    with_retry_suffix,
)
from ..errors import FixtureMiss, MalformedResponse, ProviderError, UnknownDimension
from ..model import DesignDocument, DocumentDigest, NewTagProposal, PaletteState, normalize_label
from ..palette import MAX_SEED_TAGS, SEED_DIMENSIONS, trim_proposal, validate_digest
from ..prompting import PromptUpdateRequest

logger = logging.getLogger(__name__)

MODES = ("live", "record", "replay", "deterministic")


class Gateway:
    def __init__(
        self,
        mode: str = "deterministic",
        backend=None,
        store: FixtureStore | None = None,
        config: GatewayConfig | None = None,
    ):
        if mode not in MODES:
            raise ValueError(f"unknown gateway mode {mode!r}")
        self.mode = mode
        self.config = config or GatewayConfig()
        self.store = store
        if mode == "replay":
            if store is None:
                raise ValueError("replay mode requires a fixture store")
            store.read_only = True
            self.backend = None
        elif mode == "deterministic":
            self.backend = backend or DeterministicBackend()
        else:
            if mode == "record" and store is None:
                raise ValueError("record mode requires a fixture store")
            self.backend = backend or LiveBackend(self.config)
        self.backend_calls = 0  # instrumentation: must stay 0 through a replay
        self.call_log: list[PipelineCall] = []
        self._lock = threading.Lock()

    # --- constructors matching the three operating modes ---

    @classmethod
    def record_mode(cls, store: FixtureStore, backend=None, config: GatewayConfig | None = None) -> "Gateway":
        return cls(mode="record", backend=backend or DeterministicBackend(), store=store, config=config)

    @classmethod
    def replay_mode(cls, store: FixtureStore, config: GatewayConfig | None = None) -> "Gateway":
        return cls(mode="replay", store=store, config=config)

    @classmethod
    def live_mode(cls, config: GatewayConfig | None = None) -> "Gateway":
        config = config or GatewayConfig.from_env()
        return cls(mode="live", backend=LiveBackend(config), config=config)

    def model_for(self, pipeline: str) -> str:
        return self.config.models.get(pipeline, DEFAULT_MODELS[pipeline])

    # --- transport core ---

    def _log(self, call: PipelineCall, collector: list | None) -> None:
        with self._lock:
            self.call_log.append(call)
        if collector is not None:
            collector.append(call)

    def _chat(
        self,
        pipeline: str,
        payload: dict,
        canonical: str,
        context: dict,
        collector: list | None,
    ) -> str:
        h = request_hash(pipeline, canonical)
        started = time.perf_counter()
        if self.mode == "replay":
            fixture = self.store.get(pipeline, h)
            if fixture is None:
                raise FixtureMiss(pipeline, h)
            text = fixture.text
        else:
            with self._lock:
                self.backend_calls += 1
            text = self.backend.chat(pipeline, payload, context)
            if self.mode == "record":
                self.store.put(
                    pipeline,
                    h,
                    canonical,
                    FixtureResponse(kind="text", text=text),
                    meta=self._meta(payload, started),
                )
        self._log(
            PipelineCall(pipeline, canonical, h, "text", self._meta(payload, started)),
            collector,
        )
        return text

    def _images(
        self, payload: dict, canonical: str, context: dict, collector: list | None
    ) -> list[GeneratedImage]:
        pipeline = "imageGen"
        h = request_hash(pipeline, canonical)
        started = time.perf_counter()
        if self.mode == "replay":
            fixture = self.store.get(pipeline, h)
            if fixture is None:
                raise FixtureMiss(pipeline, h)
            images = [
                GeneratedImage(data=data, revised_prompt=revised)
                for data, revised in zip(fixture.images, fixture.revised_prompts)
            ]
        else:
            with self._lock:
                self.backend_calls += 1
            images = self.backend.images(payload, context)
            if self.mode == "record":
                self.store.put(
                    pipeline,
                    h,
                    canonical,
                    FixtureResponse(
                        kind="images",
                        images=[img.data for img in images],
                        revised_prompts=[img.revised_prompt for img in images],
                    ),
                    meta=self._meta(payload, started),
                )
        self._log(
            PipelineCall(pipeline, canonical, h, "images", self._meta(payload, started)),
            collector,
        )
        return images

    def _meta(self, payload: dict, started: float) -> dict:
        # stub latency is measurement noise; zeroing it keeps deterministic
        # sessions byte-reproducible across runs
        latency = 0 if self.mode == "deterministic" else int((time.perf_counter() - started) * 1000)
        return {
            "model": payload.get("model", ""),
            "mode": self.mode,
            "latencyMs": latency,
        }

    def _chat_with_json_retry(
        self,
        pipeline: str,
        payload: dict,
        canonical: str,
        context: dict,
        collector: list | None,
        parse,
    ):
        """Run a JSON pipeline; on a malformed response, re-ask exactly once."""
        text = self._chat(pipeline, payload, canonical, context, collector)
        try:
            return parse(text)
        except MalformedResponse as first_error:
            retry_payload, retry_canonical = with_retry_suffix(payload)
            try:
                retry_text = self._chat(pipeline, retry_payload, retry_canonical, context, collector)
            except FixtureMiss:
                # replaying a session whose original call never needed a retry:
                # the recorded response itself is malformed, so report that.
                raise first_error from None
            return parse(retry_text)

    # --- the pipelines ---

    def digest_document(self, document: DesignDocument, collector: list | None = None) -> DocumentDigest:
        payload, canonical = build_digest_request(
            self.model_for("digest"), document.title, document.body
        )
        context = {"body": document.body}

        def parse(text: str) -> DocumentDigest:
            entries = parse_dimension_entries(text)
            if len(entries) < SEED_DIMENSIONS:
                raise MalformedResponse(
                    f"digest needs {SEED_DIMENSIONS} dimensions, got {len(entries)}"
                )
            trimmed = [
                (name, tuple(labels[:MAX_SEED_TAGS])) for name, labels in entries[:SEED_DIMENSIONS]
            ]
            digest = DocumentDigest(dimensions=tuple(trimmed))
            try:
                validate_digest(digest)
            except Exception as exc:
                raise MalformedResponse(f"digest shape invalid: {exc}") from exc
            return digest

        return self._chat_with_json_retry("digest", payload, canonical, context, collector, parse)

    def update_prompt(self, request: PromptUpdateRequest, collector: list | None = None) -> str:
        payload, canonical = build_prompt_update_request(self.model_for("promptUpdate"), request)
        text = self._chat("promptUpdate", payload, canonical, {"request": request}, collector)
        return strip_wrapping_quotes(text)

    def generate_images(
        self, prompt: str, n: int = 3, collector: list | None = None
    ) -> list[GeneratedImage]:
        if n < 1:
            raise ValueError("image count must be >= 1")
        payload, canonical = build_image_request(
            self.model_for("imageGen"), prompt, n, self.config.image_size, self.config.image_quality
        )
        return self._images(payload, canonical, {}, collector)

    def extract_tags(
        self,
        image_bytes: bytes,
        palette: PaletteState,
        source_image_id: str = "",
        collector: list | None = None,
    ) -> NewTagProposal:
        payload, canonical = build_tag_extract_request(
            self.model_for("tagExtract"), image_bytes, palette
        )
        context = {"palette": palette, "image_bytes": image_bytes}

        def parse(text: str):
            return parse_dimension_entries(text)

        entries = self._chat_with_json_retry(
            "tagExtract", payload, canonical, context, collector, parse
        )
        return trim_proposal(palette, entries, source_image_id=source_image_id)

    def recommend_tags(
        self, palette: PaletteState, dimension_id: str, collector: list | None = None
    ) -> list[str]:
        dim = palette.find_dimension(dimension_id)
        if dim is None:
            raise UnknownDimension(f"no dimension {dimension_id!r}")
        existing = [t.label for t in dim.tags]
        payload, canonical = build_tag_recommend_request(
            self.model_for("tagRecommend"), dim.name, existing
        )
        context = {"existing": existing}
        text = self._chat("tagRecommend", payload, canonical, context, collector)
        taken = {normalize_label(l) for l in existing}
        labels = [l for l in parse_comma_list(text) if normalize_label(l) not in taken]
        if not labels:
            logger.warning("tag recommendation for %s came back empty", dim.name)
        return labels[:5]

    def recommend_dimensions(self, palette: PaletteState, collector: list | None = None) -> list[str]:
        names = [d.name for d in palette.ordered()]
        payload, canonical = build_dimension_recommend_request(
            self.model_for("dimensionRecommend"), names
        )
        context = {"existing": names}
        text = self._chat("dimensionRecommend", payload, canonical, context, collector)
        taken = {normalize_label(n) for n in names}
        fresh = [n for n in parse_comma_list(text) if normalize_label(n) not in taken]
        if not fresh:
            logger.warning("dimension recommendation came back empty")
        return fresh[:5]

    def autocomplete(self, partial: str, collector: list | None = None) -> str:
        payload, canonical = build_autocomplete_request(self.model_for("autocomplete"), partial)
        text = self._chat("autocomplete", payload, canonical, {"partial": partial}, collector)
        return strip_wrapping_quotes(text)
