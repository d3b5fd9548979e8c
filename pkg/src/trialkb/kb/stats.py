"""Pipeline statistics over the knowledge base."""
from __future__ import annotations

from .models import StatsReport, TrialStatus
from .store import KnowledgeBase


def build_report(
    total_trials: int,
    linked_trials: int,
    completed_trials: int,
    crawled_pages: int = 0,
    distinct_companies: int = 0,
    personnel_records: int = 0,
) -> StatsReport:
    """Assemble a report from raw counts. The fraction stays unrounded;
    rounding happens only at presentation time."""
    fraction = completed_trials / total_trials if total_trials > 0 else 0.0
    return StatsReport(
        total_trials=total_trials,
        linked_trials=linked_trials,
        completed_trials=completed_trials,
        completed_fraction=fraction,
        crawled_pages=crawled_pages,
        distinct_companies=distinct_companies,
        personnel_records=personnel_records,
    )


def compute_stats(kb: KnowledgeBase, crawled_pages: int = 0) -> StatsReport:
    """Counts computed by full enumeration of the KB."""
    trials = kb.trials()
    companies = kb.companies()
    return build_report(
        total_trials=len(trials),
        linked_trials=sum(1 for t in trials if t.sponsor_links),
        completed_trials=sum(1 for t in trials if t.status is TrialStatus.COMPLETED),
        crawled_pages=crawled_pages,
        distinct_companies=len(companies),
        personnel_records=sum(len(c.personnel) for c in companies),
    )
