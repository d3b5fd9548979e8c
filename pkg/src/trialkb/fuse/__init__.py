from .engine import (
    CEO_ROLE_LABEL,
    FusionKind,
    FusionOutcome,
    MERGE_POLICY,
    MergeAction,
    Quarantine,
    apply_change,
    fuse_batch,
    fuse_trial,
    match_trial,
    propose_changes,
)
from .events import ChangeEvent, EventStatus, EventStore, UnknownEventError, dedup_key

__all__ = [
    "CEO_ROLE_LABEL",
    "FusionKind",
    "FusionOutcome",
    "MERGE_POLICY",
    "MergeAction",
    "Quarantine",
    "apply_change",
    "fuse_batch",
    "fuse_trial",
    "match_trial",
    "propose_changes",
    "ChangeEvent",
    "EventStatus",
    "EventStore",
    "UnknownEventError",
    "dedup_key",
]
