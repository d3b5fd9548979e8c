"""Page snapshots and their on-disk store.

One directory per company, one file per canonical URL (named by URL hash),
holding the current snapshot plus exactly one predecessor: change
detection needs one generation back, not a full history.
"""
from __future__ import annotations

import base64
import hashlib
import json
import threading
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from ..kb.models import format_timestamp, parse_timestamp


@dataclass(frozen=True)
class PageSnapshot:
    url: str
    company_id: str
    fetched_at: datetime
    http_status: int
    content_hash: int
    body: bytes
    page_class: str  # team | contact | about | other

    def to_dict(self) -> dict:
        return {
            "url": self.url,
            "company_id": self.company_id,
            "fetched_at": format_timestamp(self.fetched_at),
            "http_status": self.http_status,
            "content_hash": self.content_hash,
            "body": base64.b64encode(self.body).decode("ascii"),
            "page_class": self.page_class,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "PageSnapshot":
        return cls(
            url=raw["url"],
            company_id=raw["company_id"],
            fetched_at=parse_timestamp(raw["fetched_at"]),
            http_status=raw["http_status"],
            content_hash=raw["content_hash"],
            body=base64.b64decode(raw["body"]),
            page_class=raw["page_class"],
        )


def url_file_name(url: str) -> str:
    return hashlib.sha256(url.encode("utf-8")).hexdigest()[:24] + ".json"


class SnapshotStore:
    """Keyed by (company, url); concurrent puts for different keys are safe."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._lock = threading.Lock()

    def _path(self, company_id: str, url: str) -> Path:
        return self.root / company_id / url_file_name(url)

    def put(self, snapshot: PageSnapshot) -> PageSnapshot | None:
        """Store `snapshot` as current; returns the displaced predecessor."""
        path = self._path(snapshot.company_id, snapshot.url)
        with self._lock:
            previous = None
            if path.exists():
                stored = json.loads(path.read_text("utf-8"))
                previous = PageSnapshot.from_dict(stored["current"])
            path.parent.mkdir(parents=True, exist_ok=True)
            payload = {
                "current": snapshot.to_dict(),
                "previous": previous.to_dict() if previous else None,
            }
            path.write_text(json.dumps(payload, sort_keys=True), "utf-8")
            return previous

    def get_current(self, company_id: str, url: str) -> PageSnapshot | None:
        path = self._path(company_id, url)
        if not path.exists():
            return None
        return PageSnapshot.from_dict(json.loads(path.read_text("utf-8"))["current"])

    def get_previous(self, company_id: str, url: str) -> PageSnapshot | None:
        path = self._path(company_id, url)
        if not path.exists():
            return None
        stored = json.loads(path.read_text("utf-8")).get("previous")
        return PageSnapshot.from_dict(stored) if stored else None

    def company_snapshots(self, company_id: str) -> list[PageSnapshot]:
        folder = self.root / company_id
        if not folder.is_dir():
            return []
        snapshots = []
        for path in sorted(folder.glob("*.json")):
            snapshots.append(PageSnapshot.from_dict(json.loads(path.read_text("utf-8"))["current"]))
        return snapshots

    def count(self) -> int:
        if not self.root.is_dir():
            return 0
        return sum(1 for _ in self.root.glob("*/*.json"))
