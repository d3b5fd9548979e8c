"""Data fusion: merge harvested records and extracted slots into the KB.

Registry-sourced trial facts are authoritative and auto-applied; company
contact and personnel facts are curated and always route through a
ChangeEvent. Invalid records land in a replayable quarantine instead of
the KB.
"""
from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, replace
from datetime import date
from enum import Enum
from pathlib import Path

from ..extract.folding import fold
from ..extract.slots import SlotAssignment, SlotRole
from ..kb.models import (
    ClinicalTrialRecord,
    CompanyEntity,
    PersonEntity,
    Phase,
    Provenance,
    ValidationError,
    utc_now,
)
from ..kb.store import KnowledgeBase, UnknownEntityError
from .events import ChangeEvent, EventStatus, EventStore, dedup_key

logger = logging.getLogger(__name__)

CEO_ROLE_LABEL = "chief executive officer"


class MergeAction(Enum):
    AUTO = "auto"
    CURATED = "curated"


#: Per-role authority policy; every SlotRole has exactly one entry.
MERGE_POLICY: dict[SlotRole, MergeAction] = {
    SlotRole.PERFORMED_BY: MergeAction.AUTO,
    SlotRole.CLINICAL_PHASE_OF: MergeAction.AUTO,
    SlotRole.IS_PHONE_NUMBER_OF: MergeAction.CURATED,
    SlotRole.CHIEF_EXECUTIVE_OFFICER_OF: MergeAction.CURATED,
    SlotRole.HAS_KEY_PERSON: MergeAction.CURATED,
}

_TRIAL_MERGE_FIELDS = ("title", "phase", "status", "conditions", "interventions", "last_update")


class FusionKind(Enum):
    CREATED = "created"
    UPDATED = "updated"
    UNCHANGED = "unchanged"
    QUARANTINED = "quarantined"


@dataclass(frozen=True)
class FusionOutcome:
    kind: FusionKind
    trial_id: str
    fields: tuple[str, ...] = ()
    reason: str = ""


class Quarantine:
    """Replayable sink for records that failed fusion invariants."""

    def __init__(self, path: str | Path | None = None):
        self._lock = threading.Lock()
        self.path = Path(path) if path is not None else None
        self.entries: list[dict] = []

    def put(self, record: ClinicalTrialRecord, reason: str) -> None:
        entry = {"record": record.to_dict(), "reason": reason}
        with self._lock:
            self.entries.append(entry)
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(entry, sort_keys=True))
                    fh.write("\n")

    def __len__(self) -> int:
        with self._lock:
            return len(self.entries)


def match_trial(record: ClinicalTrialRecord, kb: KnowledgeBase) -> str | None:
    """Exact record linkage on the source-scoped registry id."""
    return record.id if kb.has(record.id) else None


def fuse_trial(
    record: ClinicalTrialRecord,
    kb: KnowledgeBase,
    quarantine: Quarantine | None = None,
) -> FusionOutcome:
    existing_id = match_trial(record, kb)
    if existing_id is None:
        try:
            kb.upsert(record)
        except ValidationError as err:
            if quarantine is not None:
                quarantine.put(record, str(err))
            return FusionOutcome(FusionKind.QUARANTINED, record.id, reason=str(err))
        return FusionOutcome(FusionKind.CREATED, record.id)

    stored: ClinicalTrialRecord = kb.get(existing_id)
    merged_links = stored.sponsor_links | record.sponsor_links
    link_gain = merged_links != stored.sponsor_links

    if _newer(record.last_update, stored.last_update):
        changed = [f for f in _TRIAL_MERGE_FIELDS if getattr(record, f) != getattr(stored, f)]
        if link_gain:
            changed.append("sponsor_links")
        if not changed:
            return FusionOutcome(FusionKind.UNCHANGED, existing_id)
        updated = replace(
            record,
            sponsor_links=frozenset(merged_links),
            provenance=record.provenance or stored.provenance,
        )
        try:
            kb.upsert(updated)
        except ValidationError as err:
            if quarantine is not None:
                quarantine.put(record, str(err))
            return FusionOutcome(FusionKind.QUARANTINED, existing_id, reason=str(err))
        return FusionOutcome(FusionKind.UPDATED, existing_id, fields=tuple(changed))

    # stale or same-age data never regresses stored fields
    if link_gain:
        try:
            kb.upsert(replace(stored, sponsor_links=frozenset(merged_links)))
        except ValidationError as err:
            if quarantine is not None:
                quarantine.put(record, str(err))
            return FusionOutcome(FusionKind.QUARANTINED, existing_id, reason=str(err))
        return FusionOutcome(FusionKind.UPDATED, existing_id, fields=("sponsor_links",))
    return FusionOutcome(FusionKind.UNCHANGED, existing_id)


def _newer(incoming: date | None, stored: date | None) -> bool:
    if incoming is None:
        return False
    if stored is None:
        return True
    return incoming > stored


def fuse_batch(
    records: list[ClinicalTrialRecord],
    kb: KnowledgeBase,
    quarantine: Quarantine | None = None,
) -> dict[str, int]:
    """Fuse a batch; the outcome counts always sum to the batch size."""
    counts = {kind.value: 0 for kind in FusionKind}
    for record in records:
        outcome = fuse_trial(record, kb, quarantine)
        counts[outcome.kind.value] += 1
    return counts


# -- curated-change proposals ------------------------------------------------


def propose_changes(
    assignments: list[SlotAssignment],
    kb: KnowledgeBase,
    events: EventStore,
) -> list[ChangeEvent]:
    """Emit pending events for curated-field changes; apply auto facts directly.

    An event is raised only when the proposed value differs from the KB and
    no identical pending event exists (dedup on entity, field, new value).
    """
    created: list[ChangeEvent] = []
    pending = events.pending_keys()
    for assignment in assignments:
        action = MERGE_POLICY[assignment.role]
        if action is MergeAction.AUTO:
            _apply_auto(assignment, kb)
            continue
        proposal = _proposal_for(assignment, kb)
        if proposal is None:
            continue
        entity_id, field, old_value, new_value = proposal
        key = dedup_key(entity_id, field, new_value)
        if key in pending:
            continue
        pending.add(key)
        event = events.create(
            ChangeEvent(
                event_id="",
                entity_id=entity_id,
                field=field,
                old_value=old_value,
                new_value=new_value,
                evidence=Provenance(
                    source_url=assignment.evidence_url,
                    fetched_at=utc_now(),
                    extractor=_EXTRACTOR_ID,
                ),
                excerpt=assignment.evidence_excerpt,
                created_at=utc_now(),
            )
        )
        created.append(event)
    return created


_EXTRACTOR_ID = "trialkb-extract/0.1.0"


def _apply_auto(assignment: SlotAssignment, kb: KnowledgeBase) -> None:
    try:
        trial = kb.get(assignment.subject)
    except UnknownEntityError:
        logger.warning("auto slot for unknown trial %s dropped", assignment.subject)
        return
    if assignment.role is SlotRole.PERFORMED_BY:
        if assignment.object in trial.sponsor_links:
            return
        kb.upsert(replace(trial, sponsor_links=trial.sponsor_links | {assignment.object}))
    elif assignment.role is SlotRole.CLINICAL_PHASE_OF:
        if trial.phase.value == assignment.object:
            return
        kb.upsert(replace(trial, phase=Phase(assignment.object)))


def _proposal_for(
    assignment: SlotAssignment, kb: KnowledgeBase
) -> tuple[str, str, object, object] | None:
    if assignment.role is SlotRole.IS_PHONE_NUMBER_OF:
        company: CompanyEntity = kb.get(assignment.subject)
        if assignment.object in company.phones:
            return None
        return (company.id, "phones", None, assignment.object)

    company = kb.get(assignment.object)
    name = assignment.subject_name or _person_name(kb, assignment.subject)
    person_id = None if assignment.subject.startswith("provisional:") else assignment.subject

    if assignment.role is SlotRole.CHIEF_EXECUTIVE_OFFICER_OF:
        current = _personnel_with_role(kb, company, CEO_ROLE_LABEL)
        if current is not None and _same_person(kb, current[0], person_id, name):
            return None
        old_value = None
        if current is not None:
            old_value = {"person_id": current[0], "name": _person_name(kb, current[0])}
        new_value = {"person_id": person_id, "name": name, "role_label": CEO_ROLE_LABEL}
        return (company.id, "personnel.ceo", old_value, new_value)

    if assignment.role is SlotRole.HAS_KEY_PERSON:
        for pid, _label in company.personnel:
            if _same_person(kb, pid, person_id, name):
                return None
        new_value = {"person_id": person_id, "name": name, "role_label": "key personnel"}
        return (company.id, "personnel", None, new_value)

    raise AssertionError(f"no policy route for role {assignment.role}")


def _personnel_with_role(
    kb: KnowledgeBase, company: CompanyEntity, role_label: str
) -> tuple[str, str] | None:
    for entry in company.personnel:
        if entry[1] == role_label:
            return entry
    return None


def _person_name(kb: KnowledgeBase, person_id: str | None) -> str:
    if person_id is None:
        return ""
    try:
        person = kb.get(person_id)
    except UnknownEntityError:
        return person_id
    return person.full_name if isinstance(person, PersonEntity) else person_id


def _same_person(kb: KnowledgeBase, existing_id: str, person_id: str | None, name: str) -> bool:
    if person_id is not None and existing_id == person_id:
        return True
    return bool(name) and fold(_person_name(kb, existing_id)) == fold(name)


# -- review decisions ---------------------------------------------------------


_DECISION_LOCK = threading.Lock()


def apply_change(
    event_id: str,
    decision: str,
    reviewer: str,
    kb: KnowledgeBase,
    events: EventStore,
) -> ChangeEvent:
    """Accept or reject a pending event. Decisions are idempotent: deciding
    an already-decided event is a no-op that returns its current state."""
    if decision not in ("accept", "reject"):
        raise ValueError(f"decision must be accept or reject, got {decision!r}")
    with _DECISION_LOCK:
        return _apply_change_locked(event_id, decision, reviewer, kb, events)


def _apply_change_locked(
    event_id: str,
    decision: str,
    reviewer: str,
    kb: KnowledgeBase,
    events: EventStore,
) -> ChangeEvent:
    event = events.get(event_id)
    if event.status is not EventStatus.PENDING:
        return event

    if decision == "reject":
        decided = replace(
            event, status=EventStatus.REJECTED, decided_by=reviewer, decided_at=utc_now()
        )
        events.update(decided)
        kb.record_audit(
            "change_rejected",
            {"event_id": event_id, "entity_id": event.entity_id, "field": event.field},
            actor=reviewer,
        )
        return decided

    _apply_accepted_value(event, kb, reviewer)
    decided = replace(
        event, status=EventStatus.ACCEPTED, decided_by=reviewer, decided_at=utc_now()
    )
    events.update(decided)
    kb.record_audit(
        "change_accepted",
        {
            "event_id": event_id,
            "entity_id": event.entity_id,
            "field": event.field,
            "new_value": event.new_value,
            "evidence_url": event.evidence.source_url,
        },
        actor=reviewer,
    )
    return decided


def _apply_accepted_value(event: ChangeEvent, kb: KnowledgeBase, reviewer: str) -> None:
    company: CompanyEntity = kb.get(event.entity_id)
    if event.field == "phones":
        if event.new_value not in company.phones:
            kb.upsert(replace(company, phones=company.phones + (event.new_value,)), actor=reviewer)
        return
    if event.field in ("personnel.ceo", "personnel"):
        value = event.new_value or {}
        person_id = _materialize_person(value, company, event, kb, reviewer)
        role_label = value.get("role_label") or (
            CEO_ROLE_LABEL if event.field == "personnel.ceo" else "key personnel"
        )
        personnel = list(company.personnel)
        if event.field == "personnel.ceo":
            personnel = [p for p in personnel if p[1] != CEO_ROLE_LABEL]
        if (person_id, role_label) not in personnel:
            personnel.append((person_id, role_label))
        kb.upsert(replace(company, personnel=tuple(personnel)), actor=reviewer)
        return
    raise ValueError(f"no apply rule for curated field {event.field!r}")


def _materialize_person(
    value: dict, company: CompanyEntity, event: ChangeEvent, kb: KnowledgeBase, reviewer: str
) -> str:
    person_id = value.get("person_id")
    if person_id and kb.has(person_id):
        return person_id
    name = value.get("name") or person_id or "unknown"
    new_id = "p-" + fold(name).replace(" ", "-")
    if not kb.has(new_id):
        kb.upsert(
            PersonEntity(
                id=new_id,
                full_name=name,
                affiliations=(
                    (company.id, value.get("role_label", ""), event.evidence.source_url),
                ),
            ),
            actor=reviewer,
        )
    return new_id
