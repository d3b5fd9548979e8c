from .models import (
    ClinicalTrialRecord,
    CompanyEntity,
    Entity,
    PersonEntity,
    Phase,
    Provenance,
    StatsReport,
    TrialStatus,
    ValidationError,
    format_timestamp,
    parse_timestamp,
    trial_identity,
    utc_now,
)
from .stats import build_report, compute_stats
from .store import KnowledgeBase, UnknownEntityError, UnknownFieldError

__all__ = [
    "ClinicalTrialRecord",
    "CompanyEntity",
    "Entity",
    "PersonEntity",
    "Phase",
    "Provenance",
    "StatsReport",
    "TrialStatus",
    "ValidationError",
    "format_timestamp",
    "parse_timestamp",
    "trial_identity",
    "utc_now",
    "build_report",
    "compute_stats",
    "KnowledgeBase",
    "UnknownEntityError",
    "UnknownFieldError",
]
