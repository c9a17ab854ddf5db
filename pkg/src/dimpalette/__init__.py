"""dimpalette: a dimension-palette prompt studio for text-to-image design loops.

Turns a design brief into an evolving dimension/tag palette, synthesizes
prompts from tag weights, orchestrates image generation and image-to-tag
extraction, and records every session as a replayable event log. The
``analysis`` subpackage reproduces the accompanying metric pipeline offline.
"""

__version__ = "0.1.0"

from . import model, palette, prompting
from .errors import PaletteError

__all__ = ["model", "palette", "prompting", "PaletteError", "__version__"]
