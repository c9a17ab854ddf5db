"""Canonical request forms and hashing for pipeline calls.

A request's canonical form is compact JSON with sorted keys; hashing it gives
the content address fixtures are stored under, stable across process restarts
and platforms for equal logical requests. Image payloads enter the canonical
form as their sha256 digest, keeping fixtures compact while preserving
content addressing.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

PIPELINES = (
    "digest",
    "promptUpdate",
    "imageGen",
    "tagExtract",
    "tagRecommend",
    "dimensionRecommend",
    "autocomplete",
)


def canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def request_hash(pipeline: str, request_canonical: str) -> str:
    digest = hashlib.sha256()
    digest.update(pipeline.encode("utf-8"))
    digest.update(b"\n")
    digest.update(request_canonical.encode("utf-8"))
    return digest.hexdigest()


def bytes_digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


@dataclass(frozen=True)
class PipelineCall:
    """One resolved provider interaction, as logged and exported."""

    pipeline: str
    request_canonical: str
    hash: str
    response_kind: str  # "text" or "images"
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "pipeline": self.pipeline,
            "hash": self.hash,
            "responseKind": self.response_kind,
            "meta": self.meta,
        }
