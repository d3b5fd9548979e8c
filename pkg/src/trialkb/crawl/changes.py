"""Change detection between consecutive snapshots of the same URL."""
from __future__ import annotations

import difflib
from dataclasses import dataclass
from datetime import datetime

from ..kb.models import utc_now
from .snapshots import PageSnapshot
from .textnorm import normalize_lines


@dataclass(frozen=True)
class ChangedRegion:
    company_id: str
    url: str
    old_excerpt: str
    new_excerpt: str
    detected_at: datetime

    def to_dict(self) -> dict:
        return {
            "company_id": self.company_id,
            "url": self.url,
            "old_excerpt": self.old_excerpt,
            "new_excerpt": self.new_excerpt,
            "detected_at": self.detected_at.isoformat(),
        }


def detect_changes(previous: PageSnapshot, current: PageSnapshot) -> list[ChangedRegion]:
    """Line-based diff over normalized text; adjacent changed lines coalesce
    into regions carrying one line of context. Equal hashes short-circuit."""
    if previous.url != current.url:
        raise ValueError("snapshots must share a canonical URL")
    if previous.content_hash == current.content_hash:
        return []
    old_lines = normalize_lines(previous.body.decode("utf-8", errors="replace"))
    new_lines = normalize_lines(current.body.decode("utf-8", errors="replace"))
    matcher = difflib.SequenceMatcher(a=old_lines, b=new_lines, autojunk=False)
    regions: list[ChangedRegion] = []
    detected_at = utc_now()
    for group in matcher.get_grouped_opcodes(n=1):
        a_lo, a_hi = group[0][1], group[-1][2]
        b_lo, b_hi = group[0][3], group[-1][4]
        old_excerpt = "\n".join(old_lines[a_lo:a_hi])
        new_excerpt = "\n".join(new_lines[b_lo:b_hi])
        if old_excerpt == new_excerpt:
            continue
        regions.append(
            ChangedRegion(
                company_id=current.company_id,
                url=current.url,
                old_excerpt=old_excerpt,
                new_excerpt=new_excerpt,
                detected_at=detected_at,
            )
        )
    return regions
