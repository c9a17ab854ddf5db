from .backends import DeterministicBackend, GatewayConfig, GeneratedImage, LiveBackend
from .calls import PIPELINES, PipelineCall, canonical_json, request_hash
from .core import Gateway
from .fixtures import FixtureResponse, FixtureStore

__all__ = [
    "DeterministicBackend",
    "GatewayConfig",
    "GeneratedImage",
    "LiveBackend",
    "PIPELINES",
    "PipelineCall",
    "canonical_json",
    "request_hash",
    "Gateway",
    "FixtureResponse",
    "FixtureStore",
]
