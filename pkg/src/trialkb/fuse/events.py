"""Change events: proposed modifications to curated fields awaiting review."""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum
from pathlib import Path

from ..kb.models import Provenance, format_timestamp, parse_timestamp


class EventStatus(Enum):
    PENDING = "pending"
    ACCEPTED = "accepted"
    REJECTED = "rejected"


@dataclass(frozen=True)
class ChangeEvent:
    event_id: str
    entity_id: str
    field: str
    old_value: object
    new_value: object
    evidence: Provenance
    excerpt: str = ""
    status: EventStatus = EventStatus.PENDING
    decided_by: str | None = None
    decided_at: datetime | None = None
    created_at: datetime | None = None

    def to_dict(self) -> dict:
        return {
            "event_id": self.event_id,
            "entity_id": self.entity_id,
            "field": self.field,
            "old_value": self.old_value,
            "new_value": self.new_value,
            "evidence": self.evidence.to_dict(),
            "excerpt": self.excerpt,
            "status": self.status.value,
            "decided_by": self.decided_by,
            "decided_at": format_timestamp(self.decided_at) if self.decided_at else None,
            "created_at": format_timestamp(self.created_at) if self.created_at else None,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ChangeEvent":
        return cls(
            event_id=raw["event_id"],
            entity_id=raw["entity_id"],
            field=raw["field"],
            old_value=raw.get("old_value"),
            new_value=raw.get("new_value"),
            evidence=Provenance.from_dict(raw["evidence"]),
            excerpt=raw.get("excerpt", ""),
            status=EventStatus(raw.get("status", "pending")),
            decided_by=raw.get("decided_by"),
            decided_at=parse_timestamp(raw["decided_at"]) if raw.get("decided_at") else None,
            created_at=parse_timestamp(raw["created_at"]) if raw.get("created_at") else None,
        )


def dedup_key(entity_id: str, field: str, new_value: object) -> str:
    return json.dumps([entity_id, field, new_value], sort_keys=True, separators=(",", ":"))


class UnknownEventError(KeyError):
    pass


class EventStore:
    """Ordered event log, persisted one JSON object per line."""

    def __init__(self, path: str | Path | None = None):
        self._lock = threading.RLock()
        self._events: dict[str, ChangeEvent] = {}
        self._order: list[str] = []
        self._seq = 0
        self.path = Path(path) if path is not None else None
        if self.path is not None and self.path.exists():
            with self.path.open(encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    event = ChangeEvent.from_dict(json.loads(line))
                    self._events[event.event_id] = event
                    self._order.append(event.event_id)
            self._seq = len(self._order)

    def _next_id(self) -> str:
        self._seq += 1
        return f"ev-{self._seq:06d}"

    def create(self, event: ChangeEvent) -> ChangeEvent:
        with self._lock:
            if not event.event_id:
                event = replace(event, event_id=self._next_id())
            self._events[event.event_id] = event
            self._order.append(event.event_id)
            self._persist()
            return event

    def update(self, event: ChangeEvent) -> ChangeEvent:
        with self._lock:
            if event.event_id not in self._events:
                raise UnknownEventError(event.event_id)
            self._events[event.event_id] = event
            self._persist()
            return event

    def get(self, event_id: str) -> ChangeEvent:
        with self._lock:
            if event_id not in self._events:
                raise UnknownEventError(event_id)
            return self._events[event_id]

    def all(self) -> list[ChangeEvent]:
        """Creation order (oldest first)."""
        with self._lock:
            return [self._events[eid] for eid in self._order]

    def by_status(self, status: EventStatus) -> list[ChangeEvent]:
        return [e for e in self.all() if e.status is status]

    def counts(self) -> dict[str, int]:
        with self._lock:
            counts = {s.value: 0 for s in EventStatus}
            for event in self._events.values():
                counts[event.status.value] += 1
            return counts

    def pending_keys(self) -> set[str]:
        with self._lock:
            return {
                dedup_key(e.entity_id, e.field, e.new_value)
                for e in self._events.values()
                if e.status is EventStatus.PENDING
            }

    def _persist(self) -> None:
        if self.path is None:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("w", encoding="utf-8") as fh:
            for eid in self._order:
                fh.write(json.dumps(self._events[eid].to_dict(), sort_keys=True))
                fh.write("\n")

    def __len__(self) -> int:
        with self._lock:
            return len(self._events)
