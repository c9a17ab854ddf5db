"""Parsers turning raw model text into domain values.

Every parser is total: arbitrary input yields either a valid value or a typed
MalformedResponse, never an uncaught exception. Models drift from the stated
formats often enough (markdown bullets, stray numbering, single quotes) that
each parser tolerates the common deviations before giving up.
"""

from __future__ import annotations

import ast
import json
import re
import warnings

from ..errors import MalformedResponse

_BULLET = re.compile(r"^\s*(?:[-*•]|\d+[.)])\s*")
_FENCE = re.compile(r"```[a-zA-Z]*\n?|```")


def _strip_fences(text: str) -> str:
    return _FENCE.sub("", text)


def _strip_bullet(line: str) -> str:
    return _BULLET.sub("", line).strip()


def _json_block(text: str) -> str | None:
    """Extract the first balanced {...} or [...] block, if any."""
    for opener, closer in (("{", "}"), ("[", "]")):
        start = text.find(opener)
        if start < 0:
            continue
        depth = 0
        for i in range(start, len(text)):
            ch = text[i]
            if ch == opener:
                depth += 1
            elif ch == closer:
                depth -= 1
                if depth == 0:
                    return text[start : i + 1]
    return None


def _loads_lenient(text: str):
    """json.loads with a literal-eval fallback for single-quoted pseudo-JSON."""
    try:
        return json.loads(text)
    except (json.JSONDecodeError, ValueError):
        pass
    try:
        with warnings.catch_warnings():
            # arbitrary model text is full of "invalid escape" noise
            warnings.simplefilter("ignore")
            value = ast.literal_eval(text)
    except (ValueError, SyntaxError, MemoryError, RecursionError):
        return None
    return value if isinstance(value, (dict, list)) else None


def _labels_from(value) -> list[str]:
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    if isinstance(value, (list, tuple)):
        out = []
        for item in value:
            if isinstance(item, str) and item.strip():
                out.append(item.strip())
            elif isinstance(item, (int, float)):
                out.append(str(item))
        return out
    return []


def _entries_from_obj(obj) -> list[tuple[str, list[str]]]:
    """Coerce assorted JSON shapes into (dimensionName, labels) pairs."""
    entries: list[tuple[str, list[str]]] = []
    if isinstance(obj, dict):
        # unwrap well-known envelope keys
        for key in list(obj):
            if isinstance(key, str) and key.strip().casefold() in (
                "newtags",
                "new_tags",
                "dimensions",
                "tags",
                "result",
            ):
                return _entries_from_obj(obj[key])
        for name, value in obj.items():
            if not isinstance(name, str) or not name.strip():
                continue
            labels = _labels_from(value)
            if labels:
                entries.append((name.strip(), labels))
        return entries
    if isinstance(obj, list):
        for item in obj:
            if isinstance(item, dict):
                name = item.get("name") or item.get("dimension") or item.get("dimensionName")
                labels = _labels_from(
                    item.get("tags", item.get("tagLabels", item.get("labels")))
                )
                if isinstance(name, str) and name.strip() and labels:
                    entries.append((name.strip(), labels))
        return entries
    return []


def parse_dimension_entries(text: str) -> list[tuple[str, list[str]]]:
    """Parse "dimension: tags" structure from JSON or line-oriented text."""
    if not isinstance(text, str) or not text.strip():
        raise MalformedResponse("empty response")
    try:
        cleaned = _strip_fences(text)
        block = _json_block(cleaned)
        if block is not None:
            obj = _loads_lenient(block)
            if obj is not None:
                entries = _entries_from_obj(obj)
                if entries:
                    return entries
        entries = []
        for raw_line in cleaned.splitlines():
            line = _strip_bullet(raw_line)
            if ":" not in line:
                continue
            name, _, rest = line.partition(":")
            name = name.strip().strip("*#").strip()
            labels = [_strip_bullet(p) for p in rest.split(",")]
            labels = [l.strip().strip("\"'") for l in labels if l.strip()]
            if name and labels:
                entries.append((name, labels))
        if entries:
            return entries
    except MalformedResponse:
        raise
    except Exception as exc:  # parser totality: anything unexpected is malformed
        raise MalformedResponse(f"unparseable response: {exc}") from exc
    raise MalformedResponse("no dimension/tag structure found")


def parse_comma_list(text: str) -> list[str]:
    """Parse "a, b, c" (tolerating bullets/newlines) into distinct items."""
    if not isinstance(text, str):
        return []
    try:
        items: list[str] = []
        seen: set[str] = set()
        for chunk in re.split(r"[,\n;]+", _strip_fences(text)):
            item = _strip_bullet(chunk).strip().strip("\"'").strip()
            if not item or len(item) > 80:
                continue
            key = item.casefold()
            if key in seen:
                continue
            seen.add(key)
            items.append(item)
        return items
    except Exception:
        return []


def strip_wrapping_quotes(text: str) -> str:
    """Drop one matching pair of surrounding quotes a chat model may add."""
    stripped = text.strip()
    for quote in ('"', "'", "“"):
        closing = "”" if quote == "“" else quote
        if len(stripped) >= 2 and stripped.startswith(quote) and stripped.endswith(closing):
            return stripped[1:-1].strip()
    return stripped
