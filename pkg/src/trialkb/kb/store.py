"""Knowledge-base store: single-writer upserts, filtered queries, JSONL persistence.

Entity files are rewritten wholesale on checkpoint; the audit log is
append-only and hash-chained (each line carries the SHA-256 of the
previous line's record).
"""
from __future__ import annotations

import hashlib
import json
import threading
import uuid
from pathlib import Path
from typing import Iterable, Iterator

from .models import (
    ClinicalTrialRecord,
    CompanyEntity,
    Entity,
    PersonEntity,
    ValidationError,
    format_timestamp,
    utc_now,
)

GENESIS_HASH = "0" * 64

KB_FILES = {
    "company": "companies.jsonl",
    "person": "persons.jsonl",
    "trial": "trials.jsonl",
}
AUDIT_FILE = "audit.jsonl"


class UnknownFieldError(ValueError):
    """A query referenced a field the entity kind does not have."""


class UnknownEntityError(KeyError):
    """Lookup for an id that is not in the store."""


def _audit_hash(record: dict) -> str:
    payload = json.dumps(record, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class KnowledgeBase:
    """In-memory KB with optional on-disk JSONL backing.

    All mutations serialize through one lock; reads copy references under
    the same lock so they observe a consistent snapshot. Entities are
    immutable, so handed-out values never change underneath a reader.
    """

    def __init__(self, root: str | Path | None = None):
        self._lock = threading.RLock()
        self._companies: dict[str, CompanyEntity] = {}
        self._persons: dict[str, PersonEntity] = {}
        self._trials: dict[str, ClinicalTrialRecord] = {}
        self._audit: list[dict] = []
        self._audit_seq = 0
        self._audit_prev = GENESIS_HASH
        self.root = Path(root) if root is not None else None

    # -- loading / saving ---------------------------------------------------

    @classmethod
    def load(cls, root: str | Path) -> "KnowledgeBase":
        root = Path(root)
        kb = cls(root)
        loaders = {
            "company": (kb._companies, CompanyEntity),
            "person": (kb._persons, PersonEntity),
            "trial": (kb._trials, ClinicalTrialRecord),
        }
        for kind, (target, model) in loaders.items():
            path = root / KB_FILES[kind]
            if not path.exists():
                continue
            with path.open(encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    entity = model.from_dict(json.loads(line))
                    target[entity.id] = entity
        audit_path = root / AUDIT_FILE
        if audit_path.exists():
            with audit_path.open(encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    kb._audit.append(json.loads(line))
            if kb._audit:
                kb._audit_seq = kb._audit[-1]["seq"]
                kb._audit_prev = kb._audit[-1]["hash"]
        return kb

    def save(self) -> None:
        """Checkpoint: full rewrite of the entity files, rows in id order."""
        if self.root is None:
            raise ValueError("KB has no backing directory")
        with self._lock:
            self.root.mkdir(parents=True, exist_ok=True)
            for kind, entities in (
                ("company", self._companies),
                ("person", self._persons),
                ("trial", self._trials),
            ):
                path = self.root / KB_FILES[kind]
                with path.open("w", encoding="utf-8") as fh:
                    for key in sorted(entities):
                        fh.write(json.dumps(entities[key].to_dict(), sort_keys=True))
                        fh.write("\n")
            audit_path = self.root / AUDIT_FILE
            if not audit_path.exists():
                with audit_path.open("w", encoding="utf-8") as fh:
                    for record in self._audit:
                        fh.write(json.dumps(record, sort_keys=True))
                        fh.write("\n")

    # -- audit --------------------------------------------------------------

    def record_audit(self, action: str, details: dict, actor: str = "pipeline") -> dict:
        with self._lock:
            self._audit_seq += 1
            record = {
                "seq": self._audit_seq,
                "ts": format_timestamp(utc_now()),
                "actor": actor,
                "action": action,
                "details": details,
                "prev": self._audit_prev,
            }
            record["hash"] = _audit_hash(record)
            self._audit_prev = record["hash"]
            self._audit.append(record)
            if self.root is not None:
                self.root.mkdir(parents=True, exist_ok=True)
                with (self.root / AUDIT_FILE).open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(record, sort_keys=True))
                    fh.write("\n")
            return record

    def audit_entries(self, after_seq: int = 0) -> list[dict]:
        with self._lock:
            return [dict(r) for r in self._audit if r["seq"] > after_seq]

    def verify_audit_chain(self) -> bool:
        with self._lock:
            prev = GENESIS_HASH
            for record in self._audit:
                body = {k: v for k, v in record.items() if k != "hash"}
                if body["prev"] != prev or _audit_hash(body) != record["hash"]:
                    return False
                prev = record["hash"]
            return True

    # -- mutation -----------------------------------------------------------

    def upsert(self, entity: Entity, actor: str = "pipeline") -> str:
        """Insert or replace an entity. Returns its id.

        Entities without an id get a fresh one. Replacement is field-wise
        on the identity key (internal id for companies/persons, the
        (source, registry_id) pair for trials).
        """
        with self._lock:
            entity.validate()
            if isinstance(entity, CompanyEntity):
                if not entity.id:
                    entity = entity.with_id(f"c-{uuid.uuid4().hex[:12]}")
                self._check_personnel(entity)
                target: dict = self._companies
            elif isinstance(entity, PersonEntity):
                if not entity.id:
                    entity = entity.with_id(f"p-{uuid.uuid4().hex[:12]}")
                self._check_affiliations(entity)
                target = self._persons
            elif isinstance(entity, ClinicalTrialRecord):
                self._check_sponsor_links(entity)
                target = self._trials
            else:
                raise TypeError(f"not a KB entity: {type(entity).__name__}")
            created = entity.id not in target
            target[entity.id] = entity
            self.record_audit(
                "upsert",
                {"entity_id": entity.id, "kind": _kind_of(entity), "created": created},
                actor=actor,
            )
            return entity.id

    def bulk_load(self, entities: Iterable[Entity]) -> int:
        """Fast path for fixture and replay loads: validates, skips audit."""
        count = 0
        with self._lock:
            for entity in entities:
                entity.validate()
                if isinstance(entity, CompanyEntity):
                    self._companies[entity.id] = entity
                elif isinstance(entity, PersonEntity):
                    self._persons[entity.id] = entity
                elif isinstance(entity, ClinicalTrialRecord):
                    self._trials[entity.id] = entity
                else:
                    raise TypeError(f"not a KB entity: {type(entity).__name__}")
                count += 1
        return count

    def _check_sponsor_links(self, trial: ClinicalTrialRecord) -> None:
        missing = [cid for cid in trial.sponsor_links if cid not in self._companies]
        if missing:
            raise ValidationError("sponsor_links", f"dangling company ids: {sorted(missing)}")

    def _check_affiliations(self, person: PersonEntity) -> None:
        missing = [cid for cid, _, _ in person.affiliations if cid not in self._companies]
        if missing:
            raise ValidationError("affiliations", f"dangling company ids: {sorted(missing)}")

    def _check_personnel(self, company: CompanyEntity) -> None:
        missing = [pid for pid, _ in company.personnel if pid not in self._persons]
        if missing:
            raise ValidationError("personnel", f"dangling person ids: {sorted(missing)}")

    # -- reads --------------------------------------------------------------

    def get(self, entity_id: str) -> Entity:
        with self._lock:
            for table in (self._companies, self._persons, self._trials):
                if entity_id in table:
                    return table[entity_id]
        raise UnknownEntityError(entity_id)

    def has(self, entity_id: str) -> bool:
        with self._lock:
            return any(entity_id in t for t in (self._companies, self._persons, self._trials))

    def companies(self) -> list[CompanyEntity]:
        with self._lock:
            return [self._companies[k] for k in sorted(self._companies)]

    def persons(self) -> list[PersonEntity]:
        with self._lock:
            return [self._persons[k] for k in sorted(self._persons)]

    def trials(self) -> list[ClinicalTrialRecord]:
        with self._lock:
            return [self._trials[k] for k in sorted(self._trials)]

    def query(self, kind: str, **predicates) -> list[Entity]:
        """Entities of `kind` matching every field=value predicate, in id order.

        Enum-valued fields also match their serialized value, so
        query("trial", status="completed") works.
        """
        tables = {"company": self.companies, "person": self.persons, "trial": self.trials}
        if kind not in tables:
            raise UnknownFieldError(f"unknown entity kind: {kind!r}")
        entities = tables[kind]()
        if not predicates:
            return entities
        sample_fields = _field_names(kind)
        for name in predicates:
            if name not in sample_fields:
                raise UnknownFieldError(f"unknown field for {kind}: {name!r}")
        result = []
        for entity in entities:
            if all(_matches(getattr(entity, k), v) for k, v in predicates.items()):
                result.append(entity)
        return result

    def __len__(self) -> int:
        with self._lock:
            return len(self._companies) + len(self._persons) + len(self._trials)


def _kind_of(entity: Entity) -> str:
    if isinstance(entity, CompanyEntity):
        return "company"
    if isinstance(entity, PersonEntity):
        return "person"
    return "trial"


def _field_names(kind: str) -> set[str]:
    model = {"company": CompanyEntity, "person": PersonEntity, "trial": ClinicalTrialRecord}[kind]
    names = set(model.__dataclass_fields__)
    if kind == "trial":
        names.add("id")
    return names


def _matches(value, expected) -> bool:
    if value == expected:
        return True
    if hasattr(value, "value") and value.value == expected:
        return True
    return False


def iter_jsonl(path: str | Path) -> Iterator[dict]:
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)
