"""Content-addressed fixture store for record/replay of provider responses.

Disk layout: one ``<pipeline>-<hash16>.json`` file per call holding
``{pipeline, hash, requestCanonical, response, meta}``; image payloads live
adjacent as ``<pipeline>-<hash16>-<i>.png`` binaries. The store is append-only
while recording and read-only while replaying.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import CorruptArchive


@dataclass
class FixtureResponse:
    kind: str  # "text" | "images"
    text: str = ""
    images: list[bytes] = field(default_factory=list)
    revised_prompts: list[str | None] = field(default_factory=list)


class FixtureStore:
    """Map from (pipeline, request hash) to a recorded response.

    With ``root=None`` the store is memory-only (handy in tests); otherwise
    entries persist under ``root`` and are loaded lazily on first read.
    """

    def __init__(self, root: str | Path | None = None, read_only: bool = False):
        self.root = Path(root) if root is not None else None
        self.read_only = read_only
        self._lock = threading.Lock()
        self._entries: dict[str, dict] = {}
        self._responses: dict[str, FixtureResponse] = {}
        if self.root is not None and self.root.exists():
            self._load()

    def _load(self) -> None:
        for path in sorted(self.root.glob("*.json")):
            try:
                entry = json.loads(path.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise CorruptArchive(f"unreadable fixture {path.name}: {exc}") from exc
            key = f"{entry['pipeline']}:{entry['hash']}"
            self._entries[key] = entry

    def __len__(self) -> int:
        return len(self._entries)

    def keys(self) -> list[str]:
        return sorted(self._entries)

    def get(self, pipeline: str, request_hash: str) -> FixtureResponse | None:
        key = f"{pipeline}:{request_hash}"
        with self._lock:
            if key in self._responses:
                return self._responses[key]
            entry = self._entries.get(key)
            if entry is None:
                return None
            response = self._materialize(entry)
            self._responses[key] = response
            return response

    def _materialize(self, entry: dict) -> FixtureResponse:
        resp = entry["response"]
        if resp["kind"] == "text":
            return FixtureResponse(kind="text", text=resp["text"])
        images = []
        for name in resp.get("imagePaths", ()):
            if self.root is None:
                raise CorruptArchive(f"image fixture {name} has no backing directory")
            payload = self.root / name
            if not payload.exists():
                raise CorruptArchive(f"missing image payload {name}")
            images.append(payload.read_bytes())
        return FixtureResponse(
            kind="images",
            images=images,
            revised_prompts=list(resp.get("revisedPrompts", [None] * len(images))),
        )

    def put(
        self,
        pipeline: str,
        request_hash: str,
        request_canonical: str,
        response: FixtureResponse,
        meta: dict | None = None,
    ) -> None:
        if self.read_only:
            raise CorruptArchive("fixture store is read-only in replay mode")
        key = f"{pipeline}:{request_hash}"
        with self._lock:
            if key in self._entries:
                return  # append-only: identical request, keep the first recording
            stem = f"{pipeline}-{request_hash[:16]}"
            entry: dict = {
                "pipeline": pipeline,
                "hash": request_hash,
                "requestCanonical": request_canonical,
                "meta": meta or {},
            }
            if response.kind == "text":
                entry["response"] = {"kind": "text", "text": response.text}
            else:
                names = [f"{stem}-{i}.png" for i in range(len(response.images))]
                entry["response"] = {
                    "kind": "images",
                    "imagePaths": names,
                    "revisedPrompts": list(response.revised_prompts),
                }
                if self.root is not None:
                    self.root.mkdir(parents=True, exist_ok=True)
                    for name, data in zip(names, response.images):
                        (self.root / name).write_bytes(data)
            self._entries[key] = entry
            self._responses[key] = response
            if self.root is not None:
                self.root.mkdir(parents=True, exist_ok=True)
                (self.root / f"{stem}.json").write_text(
                    json.dumps(entry, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
                    encoding="utf-8",
                )

    def export_to(self, dest: str | Path, keys: list[str] | None = None) -> int:
        """Copy entries (all, or the listed ``pipeline:hash`` keys) into dest."""
        dest_store = FixtureStore(dest)
        selected = self.keys() if keys is None else [k for k in keys if k in self._entries]
        for key in selected:
            entry = self._entries[key]
            response = self.get(entry["pipeline"], entry["hash"])
            dest_store.put(
                entry["pipeline"],
                entry["hash"],
                entry["requestCanonical"],
                response,
                entry.get("meta"),
            )
        return len(selected)
