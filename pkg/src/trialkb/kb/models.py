"""Domain types for the company knowledge base.

Entities are immutable values: mutation happens by building a new instance
and upserting it through the store. Timestamps are UTC with seconds
precision; trial update stamps are plain dates.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from datetime import date, datetime, timezone
from enum import Enum

E164_RE = re.compile(r"^\+[0-9]{8,15}$")
COUNTRY_RE = re.compile(r"^[A-Z]{2}$")

TIMESTAMP_FMT = "%Y-%m-%dT%H:%M:%SZ"


class ValidationError(ValueError):
    """Raised when an entity violates a type invariant. Names the field."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def utc_now() -> datetime:
    """Current UTC time truncated to whole seconds."""
    return datetime.now(timezone.utc).replace(microsecond=0)


def format_timestamp(ts: datetime) -> str:
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0).strftime(TIMESTAMP_FMT)


def parse_timestamp(raw: str) -> datetime:
    if raw.endswith("Z"):
        raw = raw[:-1] + "+00:00"
    ts = datetime.fromisoformat(raw)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0)


class Phase(Enum):
    EARLY_PHASE_1 = "EARLY_PHASE_1"
    PHASE_1 = "PHASE_1"
    PHASE_1_2 = "PHASE_1_2"
    PHASE_2 = "PHASE_2"
    PHASE_2_3 = "PHASE_2_3"
    PHASE_3 = "PHASE_3"
    PHASE_4 = "PHASE_4"
    NOT_APPLICABLE = "NOT_APPLICABLE"
    UNKNOWN = "UNKNOWN"


class TrialStatus(Enum):
    RECRUITING = "recruiting"
    ACTIVE = "active"
    COMPLETED = "completed"
    TERMINATED = "terminated"
    WITHDRAWN = "withdrawn"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Provenance:
    """Origin of a fused fact: where it was fetched and by which extractor."""

    source_url: str
    fetched_at: datetime
    extractor: str

    def validate(self) -> None:
        if not self.source_url:
            raise ValidationError("provenance.source_url", "must be present")
        if not isinstance(self.fetched_at, datetime):
            raise ValidationError("provenance.fetched_at", "must be a timestamp")
        if not self.extractor:
            raise ValidationError("provenance.extractor", "must be present")

    def to_dict(self) -> dict:
        return {
            "source_url": self.source_url,
            "fetched_at": format_timestamp(self.fetched_at),
            "extractor": self.extractor,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "Provenance":
        return cls(
            source_url=raw["source_url"],
            fetched_at=parse_timestamp(raw["fetched_at"]),
            extractor=raw["extractor"],
        )


@dataclass(frozen=True)
class CompanyEntity:
    id: str
    canonical_name: str
    aliases: frozenset[str] = frozenset()
    country: str = ""
    website: str | None = None
    personnel: tuple[tuple[str, str], ...] = ()  # (person id, role label)
    phones: tuple[str, ...] = ()
    last_harvested: datetime | None = None
    domain_tags: frozenset[str] = frozenset()

    def validate(self) -> None:
        if not self.canonical_name:
            raise ValidationError("canonical_name", "must be non-empty")
        if "" in self.aliases:
            raise ValidationError("aliases", "must not contain the empty string")
        if self.country and not COUNTRY_RE.match(self.country):
            raise ValidationError("country", f"not an ISO 3166-1 alpha-2 code: {self.country!r}")
        for phone in self.phones:
            if not E164_RE.match(phone):
                raise ValidationError("phones", f"not E.164 (+, 8-15 digits): {phone!r}")

    def with_id(self, new_id: str) -> "CompanyEntity":
        return replace(self, id=new_id)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "canonical_name": self.canonical_name,
            "aliases": sorted(self.aliases),
            "country": self.country,
            "website": self.website,
            "personnel": [list(entry) for entry in self.personnel],
            "phones": list(self.phones),
            "last_harvested": format_timestamp(self.last_harvested) if self.last_harvested else None,
            "domain_tags": sorted(self.domain_tags),
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "CompanyEntity":
        return cls(
            id=raw["id"],
            canonical_name=raw["canonical_name"],
            aliases=frozenset(raw.get("aliases", [])),
            country=raw.get("country", ""),
            website=raw.get("website"),
            personnel=tuple((p, r) for p, r in raw.get("personnel", [])),
            phones=tuple(raw.get("phones", [])),
            last_harvested=parse_timestamp(raw["last_harvested"]) if raw.get("last_harvested") else None,
            domain_tags=frozenset(raw.get("domain_tags", [])),
        )


@dataclass(frozen=True)
class PersonEntity:
    id: str
    full_name: str
    affiliations: tuple[tuple[str, str, str], ...] = ()  # (company id, role label, evidence ref)

    def validate(self) -> None:
        if not self.full_name:
            raise ValidationError("full_name", "must be non-empty")

    def with_id(self, new_id: str) -> "PersonEntity":
        return replace(self, id=new_id)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "full_name": self.full_name,
            "affiliations": [list(entry) for entry in self.affiliations],
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "PersonEntity":
        return cls(
            id=raw["id"],
            full_name=raw["full_name"],
            affiliations=tuple((c, r, e) for c, r, e in raw.get("affiliations", [])),
        )


def trial_identity(source: str, registry_id: str) -> str:
    """Stable trial id derived from the source-scoped identity key."""
    return f"{source}:{registry_id}"


@dataclass(frozen=True)
class ClinicalTrialRecord:
    registry_id: str
    source: str
    title: str = ""
    phase: Phase = Phase.UNKNOWN
    status: TrialStatus = TrialStatus.UNKNOWN
    sponsors: tuple[str, ...] = ()
    sponsor_links: frozenset[str] = frozenset()
    conditions: tuple[str, ...] = ()
    interventions: tuple[str, ...] = ()
    last_update: date | None = None
    provenance: Provenance | None = None

    @property
    def id(self) -> str:
        return trial_identity(self.source, self.registry_id)

    def validate(self) -> None:
        if not self.registry_id:
            raise ValidationError("registry_id", "must be non-empty")
        if not self.source:
            raise ValidationError("source", "must be non-empty")
        if not isinstance(self.phase, Phase):
            raise ValidationError("phase", f"not a Phase member: {self.phase!r}")
        if not isinstance(self.status, TrialStatus):
            raise ValidationError("status", f"not a valid status: {self.status!r}")

    def to_dict(self) -> dict:
        return {
            "registry_id": self.registry_id,
            "source": self.source,
            "title": self.title,
            "phase": self.phase.value,
            "status": self.status.value,
            "sponsors": list(self.sponsors),
            "sponsor_links": sorted(self.sponsor_links),
            "conditions": list(self.conditions),
            "interventions": list(self.interventions),
            "last_update": self.last_update.isoformat() if self.last_update else None,
            "provenance": self.provenance.to_dict() if self.provenance else None,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ClinicalTrialRecord":
        return cls(
            registry_id=raw["registry_id"],
            source=raw["source"],
            title=raw.get("title", ""),
            phase=Phase(raw.get("phase", "UNKNOWN")),
            status=TrialStatus(raw.get("status", "unknown")),
            sponsors=tuple(raw.get("sponsors", [])),
            sponsor_links=frozenset(raw.get("sponsor_links", [])),
            conditions=tuple(raw.get("conditions", [])),
            interventions=tuple(raw.get("interventions", [])),
            last_update=date.fromisoformat(raw["last_update"]) if raw.get("last_update") else None,
            provenance=Provenance.from_dict(raw["provenance"]) if raw.get("provenance") else None,
        )


@dataclass(frozen=True)
class StatsReport:
    total_trials: int
    linked_trials: int
    completed_trials: int
    completed_fraction: float
    crawled_pages: int
    distinct_companies: int
    personnel_records: int

    def completed_percent(self) -> str:
        """Presentation-time rounding of the completed fraction, e.g. '7.4%'."""
        return f"{self.completed_fraction * 100:.1f}%"

    def to_dict(self) -> dict:
        return {
            "total_trials": self.total_trials,
            "linked_trials": self.linked_trials,
            "completed_trials": self.completed_trials,
            "completed_fraction": self.completed_fraction,
            "crawled_pages": self.crawled_pages,
            "distinct_companies": self.distinct_companies,
            "personnel_records": self.personnel_records,
        }


Entity = CompanyEntity | PersonEntity | ClinicalTrialRecord

__all__ = [
    "ValidationError",
    "utc_now",
    "format_timestamp",
    "parse_timestamp",
    "Phase",
    "TrialStatus",
    "Provenance",
    "CompanyEntity",
    "PersonEntity",
    "ClinicalTrialRecord",
    "StatsReport",
    "Entity",
    "trial_identity",
    "E164_RE",
    "TIMESTAMP_FMT",
]
