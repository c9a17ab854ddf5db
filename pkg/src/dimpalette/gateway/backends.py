"""Provider backends: a live HTTP client and a deterministic local stub.

The deterministic backend is a pure function of the request, which makes
whole-session property tests and fixture recording reproducible without any
network. The live backend speaks the common chat-completions/images wire
shape and is configured entirely from environment variables.
"""

from __future__ import annotations

import base64
import hashlib
import os
from dataclasses import dataclass, field

import httpx

from .calls import bytes_digest
from .png import solid_png
from .prompts import DEFAULT_MODELS
from ..errors import ContentPolicyRejection, ProviderError
from ..prompting import AUTOCOMPLETE_CONTINUATION, deterministic_template
from ..model import normalize_label

ENV_PREFIX = "DIMPALETTE"


@dataclass
class GeneratedImage:
    data: bytes
    revised_prompt: str | None = None


@dataclass
class GatewayConfig:
    api_key: str = ""
    base_url: str = "https://api.openai.com/v1"
    models: dict = field(default_factory=lambda: dict(DEFAULT_MODELS))
    image_size: str = "1024x1024"
    image_quality: str = "standard"
    timeout: float = 120.0

    @classmethod
    def from_env(cls, env=os.environ) -> "GatewayConfig":
        models = dict(DEFAULT_MODELS)
        for pipeline in models:
            override = env.get(f"{ENV_PREFIX}_MODEL_{pipeline.upper()}")
            if override:
                models[pipeline] = override
        return cls(
            api_key=env.get(f"{ENV_PREFIX}_API_KEY", ""),
            base_url=env.get(f"{ENV_PREFIX}_BASE_URL", "https://api.openai.com/v1").rstrip("/"),
            models=models,
            image_size=env.get(f"{ENV_PREFIX}_IMAGE_SIZE", "1024x1024"),
            image_quality=env.get(f"{ENV_PREFIX}_IMAGE_QUALITY", "standard"),
            timeout=float(env.get(f"{ENV_PREFIX}_TIMEOUT", "120")),
        )


class LiveBackend:
    """HTTP client for chat-completions and image-generation endpoints."""

    name = "live"

    def __init__(self, config: GatewayConfig, client: httpx.Client | None = None):
        if not config.api_key:
            raise ProviderError(
                f"live mode needs credentials: set {ENV_PREFIX}_API_KEY"
            )
        self.config = config
        self._client = client or httpx.Client(timeout=config.timeout)

    def _headers(self) -> dict:
        return {"Authorization": f"Bearer {self.config.api_key}"}

    def chat(self, pipeline: str, payload: dict, context: dict) -> str:
        payload = _inline_image_urls(payload, context)
        try:
            response = self._client.post(
                f"{self.config.base_url}/chat/completions",
                json=payload,
                headers=self._headers(),
            )
        except httpx.HTTPError as exc:
            raise ProviderError(f"chat request failed: {exc}", pipeline=pipeline) from exc
        if response.status_code != 200:
            raise ProviderError(
                f"chat request returned {response.status_code}: {response.text[:200]}",
                pipeline=pipeline,
            )
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise ProviderError(f"unexpected chat response shape: {exc}", pipeline=pipeline) from exc

    def images(self, payload: dict, context: dict) -> list[GeneratedImage]:
        request = dict(payload)
        request["response_format"] = "b64_json"
        try:
            response = self._client.post(
                f"{self.config.base_url}/images/generations",
                json=request,
                headers=self._headers(),
            )
        except httpx.HTTPError as exc:
            raise ProviderError(f"image request failed: {exc}", pipeline="imageGen") from exc
        if response.status_code != 200:
            body = response.text[:500]
            if "content_policy" in body or "safety" in body:
                raise ContentPolicyRejection(
                    "image prompt rejected by provider content policy", pipeline="imageGen"
                )
            raise ProviderError(
                f"image request returned {response.status_code}: {body[:200]}",
                pipeline="imageGen",
            )
        out = []
        try:
            for item in response.json()["data"]:
                if "b64_json" in item:
                    data = base64.b64decode(item["b64_json"])
                else:
                    data = self._fetch(item["url"])
                out.append(GeneratedImage(data=data, revised_prompt=item.get("revised_prompt")))
        except (KeyError, ValueError) as exc:
            raise ProviderError(f"unexpected image response shape: {exc}", pipeline="imageGen") from exc
        return out

    def _fetch(self, url: str) -> bytes:
        response = self._client.get(url)
        if response.status_code != 200:
            raise ProviderError(f"image download returned {response.status_code}", pipeline="imageGen")
        return response.content


def _inline_image_urls(payload: dict, context: dict) -> dict:
    """Swap sha256 placeholder image refs for real data URLs before sending."""
    image_bytes: bytes | None = context.get("image_bytes")
    if image_bytes is None:
        return payload
    data_url = "data:image/png;base64," + base64.b64encode(image_bytes).decode("ascii")
    messages = []
    for message in payload["messages"]:
        content = message.get("content")
        if isinstance(content, list):
            parts = []
            for part in content:
                if part.get("type") == "image_url" and str(
                    part.get("image_url", {}).get("url", "")
                ).startswith("sha256:"):
                    part = {
                        "type": "image_url",
                        "image_url": {**part["image_url"], "url": data_url},
                    }
                parts.append(part)
            message = {**message, "content": parts}
        messages.append(message)
    return {**payload, "messages": messages}


# --- deterministic stub backend ---

SEED_DIMENSION_POOLS: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("Aesthetic", ("minimalist", "contemporary", "neutral tones", "clean lines", "bold accents")),
    (
        "Sustainability",
        ("eco-friendly", "natural wood", "recycled materials", "responsibly sourced", "durable build"),
    ),
    (
        "Functionality",
        ("lightweight", "sturdy", "scratch-resistant", "stain-resistant", "easy to assemble"),
    ),
)

EXTRACT_CANDIDATES: tuple[tuple[str, str], ...] = (
    ("Form", "sculptural"),
    ("Ergonomics", "ergonomic"),
    ("Texture", "matte finish"),
    ("Form", "tapered legs"),
    ("Texture", "woven texture"),
    ("Form", "organic curves"),
    ("Ergonomics", "lumbar support"),
    ("Texture", "upholstered"),
    ("Form", "geometric"),
)

TAG_RECOMMEND_POOL = (
    "walnut",
    "bamboo",
    "rattan",
    "steel",
    "cane",
    "velvet",
    "linen",
    "matte black",
    "brushed brass",
    "curved silhouette",
    "modular",
    "stackable",
)

DIMENSION_RECOMMEND_POOL = (
    "Comfort",
    "Material",
    "Durability",
    "Ergonomics",
    "Color",
    "Craftsmanship",
    "Versatility",
    "Shape",
    "Style",
    "Innovation",
)


def _seed_from(payload_text: str) -> int:
    return int(hashlib.sha256(payload_text.encode("utf-8")).hexdigest()[:8], 16)


class DeterministicBackend:
    """Local provider stub: same request, same response, no network."""

    name = "deterministic"

    def chat(self, pipeline: str, payload: dict, context: dict) -> str:
        if pipeline == "digest":
            return self._digest(context["body"])
        if pipeline == "promptUpdate":
            request = context["request"]
            return deterministic_template(request.new_tags, request.base_preamble)
        if pipeline == "tagExtract":
            return self._extract(context)
        if pipeline == "tagRecommend":
            return self._recommend(TAG_RECOMMEND_POOL, context["existing"], payload)
        if pipeline == "dimensionRecommend":
            return self._recommend(DIMENSION_RECOMMEND_POOL, context["existing"], payload)
        if pipeline == "autocomplete":
            return context["partial"].rstrip() + " " + AUTOCOMPLETE_CONTINUATION
        raise ProviderError(f"deterministic backend has no stub for {pipeline}", pipeline=pipeline)

    def images(self, payload: dict, context: dict) -> list[GeneratedImage]:
        prompt = payload.get("prompt", "")
        n = int(payload.get("n", 1))
        out = []
        for i in range(n):
            digest = hashlib.sha256(f"{prompt}#{i}".encode("utf-8")).digest()
            out.append(GeneratedImage(data=solid_png((digest[0], digest[1], digest[2]))))
        return out

    def _digest(self, body: str) -> str:
        lowered = body.casefold()
        dimensions = []
        for name, pool in SEED_DIMENSION_POOLS:
            matched = [t for t in pool if _mentions(lowered, t)]
            tags = list(matched)
            for candidate in pool:
                if len(tags) >= 3:
                    break
                if candidate not in tags:
                    tags.append(candidate)
            dimensions.append({"name": name, "tags": tags[:5]})
        import json

        return json.dumps({"dimensions": dimensions}, ensure_ascii=False)

    def _extract(self, context: dict) -> str:
        import json

        palette = context["palette"]
        present = {normalize_label(t.label) for _, t in palette.iter_tags()}
        seed = _seed_from(bytes_digest(context["image_bytes"]))
        fresh = [
            (dim, label)
            for dim, label in EXTRACT_CANDIDATES
            if normalize_label(label) not in present
        ]
        count = 1 + seed % 3 if fresh else 0
        offset = seed % len(fresh) if fresh else 0
        picked = [fresh[(offset + i) % len(fresh)] for i in range(min(count, len(fresh)))]
        grouped: dict[str, list[str]] = {}
        for dim, label in picked:
            grouped.setdefault(dim, []).append(label)
        # re-list one existing tag so reveal exercises the existing-match path
        for dim in palette.ordered():
            if dim.tags:
                grouped.setdefault(dim.name, []).insert(0, dim.tags[0].label)
                break
        newtags = [{"name": name, "tags": labels} for name, labels in grouped.items()]
        return json.dumps({"newtags": newtags}, ensure_ascii=False)

    def _recommend(self, pool: tuple[str, ...], existing: list[str], payload: dict) -> str:
        taken = {normalize_label(x) for x in existing}
        fresh = [x for x in pool if normalize_label(x) not in taken]
        seed = _seed_from(str(sorted(payload.items()))) % (len(fresh) or 1)
        rotated = fresh[seed:] + fresh[:seed]
        return ", ".join(rotated[:5])


def _mentions(lowered_body: str, term: str) -> bool:
    if term.casefold() in lowered_body:
        return True
    return any(len(word) >= 4 and word in lowered_body for word in term.casefold().replace("-", " ").split())
