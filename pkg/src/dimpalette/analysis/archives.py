"""Loading exported session archives (zip or directory) for offline analysis."""

from __future__ import annotations

import io
import json
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import CorruptArchive
from ..model import DesignDocument, SessionEvent, check_event_stream, load_events, normalize_label


@dataclass
class SessionArchive:
    session_id: str
    condition: str
    document: DesignDocument | None
    prompts: list[str]  # request prompt per iteration, in order
    latencies: list[int]
    image_bytes: list[bytes]
    created_dimensions: list[str]  # non-seed dimension names, in creation order
    events: list[SessionEvent] = field(default_factory=list)
    manifest: dict = field(default_factory=dict)


def _read_archive_files(path: Path) -> dict[str, bytes]:
    if path.is_dir():
        return {
            str(p.relative_to(path)).replace("\\", "/"): p.read_bytes()
            for p in sorted(path.rglob("*"))
            if p.is_file()
        }
    try:
        with zipfile.ZipFile(io.BytesIO(path.read_bytes())) as zf:
            return {name: zf.read(name) for name in sorted(zf.namelist()) if not name.endswith("/")}
    except zipfile.BadZipFile as exc:
        raise CorruptArchive(f"{path.name}: not a zip archive") from exc


def load_archive(path: str | Path) -> SessionArchive:
    path = Path(path)
    files = _read_archive_files(path)
    if "events.jsonl" not in files:
        raise CorruptArchive(f"{path.name}: missing events.jsonl")
    events = load_events(files["events.jsonl"].decode("utf-8"))
    try:
        check_event_stream(events)
    except ValueError as exc:
        raise CorruptArchive(f"{path.name}: {exc}") from exc
    manifest = {}
    if "manifest.json" in files:
        try:
            manifest = json.loads(files["manifest.json"].decode("utf-8"))
        except json.JSONDecodeError as exc:
            raise CorruptArchive(f"{path.name}: manifest unreadable") from exc

    session_id = manifest.get("sessionId", path.stem)
    condition = manifest.get("config", {}).get("condition", "")
    document = None
    prompts: list[str] = []
    latencies: list[int] = []
    image_refs: list[str] = []
    created: list[str] = []
    known_names: set[str] = set()
    for event in events:
        payload = event.payload
        if event.kind == "SessionCreated":
            session_id = payload.get("sessionId", session_id)
            condition = payload.get("config", {}).get("condition", condition)
            if payload.get("document"):
                document = DesignDocument.from_json(payload["document"])
        elif event.kind == "PaletteInitialized":
            for entry in payload.get("digest", {}).get("dimensions", ()):
                known_names.add(normalize_label(entry["name"]))
        elif event.kind == "DimensionAdded":
            name = payload["name"]
            if normalize_label(name) not in known_names:
                created.append(name)
                known_names.add(normalize_label(name))
        elif event.kind == "InfoRevealed":
            for entry in payload.get("proposal", {}).get("entries", ()):
                name = entry["dimensionName"]
                if normalize_label(name) not in known_names:
                    created.append(name)
                    known_names.add(normalize_label(name))
        elif event.kind == "ImagesGenerated":
            prompts.append(payload["prompt"])
            latencies.append(int(payload["latencyMs"]))
            for img in payload.get("images", ()):
                image_refs.append(img["contentRef"])
    images = [files[ref] for ref in image_refs if ref in files]
    return SessionArchive(
        session_id=session_id,
        condition=condition,
        document=document,
        prompts=prompts,
        latencies=latencies,
        image_bytes=images,
        created_dimensions=created,
        events=events,
        manifest=manifest,
    )


def load_group(directory: str | Path) -> list[SessionArchive]:
    """All archives under a directory (zips and archive dirs), sorted by id."""
    directory = Path(directory)
    archives = []
    for path in sorted(directory.iterdir()):
        if path.suffix == ".zip" or (path.is_dir() and (path / "events.jsonl").exists()):
            archives.append(load_archive(path))
    return sorted(archives, key=lambda a: a.session_id)
