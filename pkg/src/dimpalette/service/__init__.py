from .api import create_app
from .sessions import FoldedSession, ReplayClock, Session, SessionService, baseline_purity, fold_events
from .storage import DiskStorage, MemoryStorage

__all__ = [
    "create_app",
    "FoldedSession",
    "ReplayClock",
    "Session",
    "SessionService",
    "baseline_purity",
    "fold_events",
    "DiskStorage",
    "MemoryStorage",
]
