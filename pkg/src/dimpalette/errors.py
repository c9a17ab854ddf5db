"""Typed errors shared across the engine, gateway, service, and analysis kit.

Every error carries a stable machine ``code`` so HTTP responses and CLI exit
paths can map errors without string matching on messages.
"""

from __future__ import annotations


class PaletteError(Exception):
    """Base class for all domain errors."""

    code = "palette-error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details


class UnknownTag(PaletteError):
    code = "unknown-tag"


class UnknownDimension(PaletteError):
    code = "unknown-dimension"


class UnknownImage(PaletteError):
    code = "unknown-image"


class UnknownSession(PaletteError):
    code = "unknown-session"


class DuplicateTag(PaletteError):
    code = "duplicate-tag"


class DuplicateDimension(PaletteError):
    code = "duplicate-dimension"


class InvalidDigest(PaletteError):
    code = "invalid-digest"


class InvalidPermutation(PaletteError):
    code = "invalid-permutation"


class BaselineConditionViolation(PaletteError):
    """Raised when a palette or info operation runs in a baseline session."""

    code = "baseline-condition-violation"


class InvalidDocument(PaletteError):
    code = "invalid-document"


class EmptyPrompt(PaletteError):
    code = "empty-prompt"


class AlreadyFinalized(PaletteError):
    code = "already-finalized"


class ProviderError(PaletteError):
    """A provider call failed (network, HTTP status, missing credentials)."""

    code = "provider-error"

    def __init__(self, message: str, pipeline: str | None = None, **details):
        super().__init__(message, pipeline=pipeline, **details)
        self.pipeline = pipeline


class ContentPolicyRejection(ProviderError):
    """Image provider refused the prompt; surfaced distinctly so a UI can explain."""

    code = "content-policy-rejection"


class FixtureMiss(PaletteError):
    """Replay-mode lookup found no recorded response for a request hash."""

    code = "fixture-miss"

    def __init__(self, pipeline: str, request_hash: str):
        super().__init__(
            f"no fixture for pipeline={pipeline} hash={request_hash}",
            pipeline=pipeline,
            request_hash=request_hash,
        )
        self.pipeline = pipeline
        self.request_hash = request_hash


class MalformedResponse(PaletteError):
    """Provider output could not be parsed into the pipeline's contract."""

    code = "malformed-response"


class CorruptArchive(PaletteError):
    code = "corrupt-archive"


class DegenerateInput(PaletteError):
    """Statistic undefined on the given data (e.g. zero variance everywhere)."""

    code = "degenerate-input"


class MissingVocab(PaletteError):
    code = "missing-vocab"


class EmptyGroup(PaletteError):
    code = "empty-group"
