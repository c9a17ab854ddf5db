"""Minimal PNG encoder for deterministic stub images (no imaging dependency)."""

from __future__ import annotations

import struct
import zlib


def _chunk(kind: bytes, data: bytes) -> bytes:
    return (
        struct.pack(">I", len(data))
        + kind
        + data
        + struct.pack(">I", zlib.crc32(kind + data) & 0xFFFFFFFF)
    )


def encode_png(width: int, height: int, rgb_rows: bytes) -> bytes:
    """Encode row-major RGB bytes (3 per pixel) as an 8-bit truecolor PNG."""
    if len(rgb_rows) != width * height * 3:
        raise ValueError("rgb_rows length must be width*height*3")
    header = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    stride = width * 3
    raw = b"".join(
        b"\x00" + rgb_rows[y * stride : (y + 1) * stride] for y in range(height)
    )
    return (
        b"\x89PNG\r\n\x1a\n"
        + _chunk(b"IHDR", header)
        + _chunk(b"IDAT", zlib.compress(raw, 9))
        + _chunk(b"IEND", b"")
    )


def solid_png(color: tuple[int, int, int], size: int = 64) -> bytes:
    return encode_png(size, size, bytes(color) * (size * size))
