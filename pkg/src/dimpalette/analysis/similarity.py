"""Cosine similarity matrices over pluggable embedding providers.

The fake provider derives a unit-free pseudo-embedding from a content hash:
deterministic, provider-shaped, and meaningless — exactly what plumbing tests
want. Real analyses point the HTTP provider at an embedding service.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from ..errors import ProviderError


@dataclass(frozen=True)
class SimilarityMatrix:
    labels: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]  # symmetric, diagonal 1
    mean_off_diagonal: float | None

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "values": [list(row) for row in self.values],
            "meanOffDiagonal": self.mean_off_diagonal,
        }


class FakeEmbeddingProvider:
    """Hash-seeded pseudo-embeddings; identical input, identical vector."""

    def __init__(self, dim: int = 32):
        self.dim = dim

    def _vector(self, seed_bytes: bytes) -> np.ndarray:
        seed = int.from_bytes(hashlib.sha256(seed_bytes).digest()[:8], "big")
        rng = np.random.default_rng(seed)
        return rng.standard_normal(self.dim)

    def embed_texts(self, items: list[str]) -> np.ndarray:
        return np.stack([self._vector(item.encode("utf-8")) for item in items])

    def embed_images(self, items: list[bytes]) -> np.ndarray:
        return np.stack([self._vector(item) for item in items])


class HttpEmbeddingProvider:
    """Client for an embedding service: POST {url} {"items": [...]} -> {"vectors": [[...]]}."""

    def __init__(self, url: str, timeout: float = 60.0):
        import httpx

        self.url = url
        self._client = httpx.Client(timeout=timeout)

    def embed_texts(self, items: list[str]) -> np.ndarray:
        try:
            response = self._client.post(self.url, json={"items": items})
        except Exception as exc:
            raise ProviderError(f"embedding request failed: {exc}") from exc
        if response.status_code != 200:
            raise ProviderError(f"embedding service returned {response.status_code}")
        return np.asarray(response.json()["vectors"], dtype=float)

    def embed_images(self, items: list[bytes]) -> np.ndarray:
        import base64

        payload = {"images": [base64.b64encode(b).decode("ascii") for b in items]}
        try:
            response = self._client.post(self.url, json=payload)
        except Exception as exc:
            raise ProviderError(f"embedding request failed: {exc}") from exc
        if response.status_code != 200:
            raise ProviderError(f"embedding service returned {response.status_code}")
        return np.asarray(response.json()["vectors"], dtype=float)


def cosine_matrix(vectors: np.ndarray) -> np.ndarray:
    vectors = np.asarray(vectors, dtype=float)
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise ProviderError("provider returned a zero vector; cosine undefined")
    unit = vectors / norms
    values = np.clip(unit @ unit.T, -1.0, 1.0)
    np.fill_diagonal(values, 1.0)
    return values


def embedding_similarity(
    items: list[str] | list[bytes],
    provider,
    labels: list[str] | None = None,
    kind: str = "text",
) -> SimilarityMatrix:
    """All-pairs cosine similarity for text or image items."""
    if kind == "image":
        vectors = provider.embed_images(items)
    else:
        vectors = provider.embed_texts(items)
    values = cosine_matrix(vectors)
    n = len(items)
    if n > 1:
        off = (values.sum() - np.trace(values)) / (n * n - n)
        mean_off = float(off)
    else:
        mean_off = None
    if labels is None:
        labels = [f"item-{i + 1}" for i in range(n)]
    return SimilarityMatrix(
        labels=tuple(labels),
        values=tuple(tuple(float(x) for x in row) for row in values),
        mean_off_diagonal=mean_off,
    )
