"""Curation HTTP service: review queue, entity lookup, stats, audit trail.

Read endpoints are pure functions of store state; decisions funnel through
fusion's apply_change and are idempotent, so retried requests are safe.
"""
from __future__ import annotations

from fastapi import Depends, FastAPI, Header, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from ..crawl.snapshots import SnapshotStore
from ..fuse.engine import apply_change
from ..fuse.events import EventStatus, EventStore, UnknownEventError
from ..kb.stats import compute_stats
from ..kb.store import KnowledgeBase, UnknownEntityError

MAX_LIMIT = 500


class DecisionBody(BaseModel):
    decision: str


def create_app(
    kb: KnowledgeBase,
    events: EventStore,
    tokens: dict[str, str],
    snapshots: SnapshotStore | None = None,
) -> FastAPI:
    app = FastAPI(title="trialkb curation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    def reviewer_from_token(authorization: str | None = Header(default=None)) -> str:
        if not authorization or not authorization.startswith("Bearer "):
            raise HTTPException(status_code=401, detail="missing bearer token")
        token = authorization.removeprefix("Bearer ").strip()
        if token not in tokens:
            raise HTTPException(status_code=401, detail="unknown token")
        return tokens[token]

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/changes")
    def list_changes(
        status: str | None = Query(default=None),
        cursor: str | None = Query(default=None),
        limit: int = Query(default=50),
    ):
        if not 1 <= limit <= MAX_LIMIT:
            raise HTTPException(status_code=400, detail=f"limit must be 1-{MAX_LIMIT}")
        if status is not None:
            try:
                wanted = EventStatus(status)
            except ValueError:
                raise HTTPException(status_code=400, detail=f"unknown status {status!r}")
            ordered = [e for e in events.all() if e.status is wanted]
        else:
            ordered = events.all()
        start = 0
        if cursor:
            ids = [e.event_id for e in ordered]
            if cursor not in ids:
                raise HTTPException(status_code=400, detail=f"bad cursor {cursor!r}")
            start = ids.index(cursor) + 1
        page = ordered[start : start + limit]
        next_cursor = page[-1].event_id if page and (start + limit) < len(ordered) else None
        return {
            "events": [e.to_dict() for e in page],
            "cursor": next_cursor,
            "counts": events.counts(),
        }

    @app.get("/changes/{event_id}")
    def get_change(event_id: str):
        try:
            return events.get(event_id).to_dict()
        except UnknownEventError:
            raise HTTPException(status_code=404, detail=f"no event {event_id!r}")

    @app.post("/changes/{event_id}/decision")
    def decide(event_id: str, body: DecisionBody, reviewer: str = Depends(reviewer_from_token)):
        if body.decision not in ("accept", "reject"):
            raise HTTPException(status_code=400, detail="decision must be accept or reject")
        try:
            # apply_change is linearizable per event and idempotent on repeats
            event = apply_change(event_id, body.decision, reviewer, kb, events)
        except UnknownEventError:
            raise HTTPException(status_code=404, detail=f"no event {event_id!r}")
        return event.to_dict()

    @app.get("/entities/{entity_id}")
    def get_entity(entity_id: str):
        try:
            return kb.get(entity_id).to_dict()
        except UnknownEntityError:
            raise HTTPException(status_code=404, detail=f"no entity {entity_id!r}")

    @app.get("/stats")
    def stats():
        crawled = snapshots.count() if snapshots is not None else 0
        return compute_stats(kb, crawled_pages=crawled).to_dict()

    @app.get("/audit")
    def audit(cursor: str | None = Query(default=None)):
        after = 0
        if cursor:
            try:
                after = int(cursor)
            except ValueError:
                raise HTTPException(status_code=400, detail=f"bad cursor {cursor!r}")
        entries = kb.audit_entries(after_seq=after)
        next_cursor = str(entries[-1]["seq"]) if entries else cursor
        return {"entries": entries, "cursor": next_cursor}

    return app
