"""Bundled data: the sample client brief, NLP word lists, and replay fixtures."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from ..model import DesignDocument


def data_path(name: str) -> Path:
    return Path(resources.files(__package__) / name)


def load_json(name: str):
    return json.loads(data_path(name).read_text(encoding="utf-8"))


def load_lines(name: str) -> list[str]:
    out = []
    for line in data_path(name).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


def sample_brief() -> DesignDocument:
    """The bundled dining-chair client brief used by demos, tests, and fixtures."""
    return DesignDocument.from_json(load_json("sample_brief.json"))


def fixtures_dir() -> Path:
    return data_path("fixtures")


DOCUMENT_REGISTRY = {"sample-brief": sample_brief}


def resolve_document(document_id: str) -> DesignDocument:
    loader = DOCUMENT_REGISTRY.get(document_id)
    if loader is None:
        raise KeyError(document_id)
    return loader()
