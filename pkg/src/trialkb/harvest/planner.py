"""Query planning: staleness-first ordering over KB companies."""
from __future__ import annotations

from dataclasses import dataclass

from ..kb.store import KnowledgeBase
from .adapters import SourceAdapter


@dataclass(frozen=True)
class QueryTask:
    adapter_id: str
    query_term: str
    priority: int
    created_from: str  # company id


def generate_query_plan(kb: KnowledgeBase, adapter: SourceAdapter) -> list[QueryTask]:
    """One task per company: never-harvested first, then ascending
    last_harvested, ties by ascending company id. Deterministic."""
    def sort_key(company):
        if company.last_harvested is None:
            return (0, "", company.id)
        return (1, company.last_harvested.isoformat(), company.id)

    companies = sorted(kb.companies(), key=sort_key)
    return [
        QueryTask(
            adapter_id=adapter.adapter_id,
            query_term=company.canonical_name,
            priority=index,
            created_from=company.id,
        )
        for index, company in enumerate(companies)
    ]
