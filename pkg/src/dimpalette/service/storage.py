"""Pluggable session persistence: in-memory for tests, JSONL + blobs on disk."""

from __future__ import annotations

import threading
from pathlib import Path

from ..model import SessionEvent, load_events


class MemoryStorage:
    """Keeps event lines and blobs in dictionaries; nothing survives the process."""

    def __init__(self):
        self._events: dict[str, list[str]] = {}
        self._blobs: dict[tuple[str, str], bytes] = {}
        self._lock = threading.Lock()

    def append_event(self, session_id: str, line: str) -> None:
        with self._lock:
            self._events.setdefault(session_id, []).append(line)

    def load_events(self, session_id: str) -> list[SessionEvent]:
        with self._lock:
            lines = list(self._events.get(session_id, ()))
        return load_events("\n".join(lines))

    def save_blob(self, session_id: str, name: str, data: bytes) -> None:
        with self._lock:
            self._blobs[(session_id, name)] = data

    def load_blob(self, session_id: str, name: str) -> bytes:
        with self._lock:
            try:
                return self._blobs[(session_id, name)]
            except KeyError:
                raise FileNotFoundError(f"{session_id}/{name}") from None


class DiskStorage:
    """Append-only events.jsonl plus a blob directory per session."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _session_dir(self, session_id: str) -> Path:
        path = self.root / session_id
        path.mkdir(parents=True, exist_ok=True)
        return path

    def append_event(self, session_id: str, line: str) -> None:
        with self._lock:
            with open(self._session_dir(session_id) / "events.jsonl", "a", encoding="utf-8") as f:
                f.write(line + "\n")

    def load_events(self, session_id: str) -> list[SessionEvent]:
        path = self.root / session_id / "events.jsonl"
        if not path.exists():
            return []
        return load_events(path.read_text(encoding="utf-8"))

    def save_blob(self, session_id: str, name: str, data: bytes) -> None:
        path = self._session_dir(session_id) / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)

    def load_blob(self, session_id: str, name: str) -> bytes:
        return (self.root / session_id / name).read_bytes()
