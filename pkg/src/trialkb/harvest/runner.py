"""Harvest execution: paginate adapter queries, collect parsed records.

Pagination stops at the first empty page or once the declared count is
exhausted. Every successfully fetched URL lands in the seen-set; a URL
already seen is skipped, never refetched.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from ..kb.models import ClinicalTrialRecord
from .adapters import ParseError, ResultPage, SourceAdapter, is_empty_result, parse_result_page, parse_trial_record
from .fetch import Fetcher, TransportError, fetch_with_retries
from .planner import QueryTask
from .urls import SeenSet, canonicalize_url

logger = logging.getLogger(__name__)

MAX_PAGES_GUARD = 500


@dataclass
class QueryOutcome:
    task: QueryTask
    pages: list[ResultPage] = field(default_factory=list)
    records: list[dict] = field(default_factory=list)
    failed: bool = False
    skipped_seen: int = 0
    malformed_pages: int = 0


def execute_query(
    task: QueryTask,
    adapter: SourceAdapter,
    fetcher: Fetcher,
    seen: SeenSet,
    retry_attempts: int = 3,
    backoff_base: float = 0.2,
) -> QueryOutcome:
    outcome = QueryOutcome(task=task)
    declared_total: int | None = None
    collected = 0
    skipped = 0
    page_number = 1
    while page_number <= MAX_PAGES_GUARD:
        url = canonicalize_url(adapter.page_url(task.query_term, page_number))
        if url in seen:
            # a previous (partially failed) pass already mirrored this page;
            # keep walking: the first unseen page either has new data or is
            # the empty page that ends pagination
            outcome.skipped_seen += 1
            skipped += 1
            if (
                declared_total is not None
                and collected + skipped * adapter.page_size >= declared_total
            ):
                break
            page_number += 1
            continue
        try:
            result = fetch_with_retries(fetcher, url, retry_attempts, backoff_base)
        except TransportError as err:
            logger.warning("task %r page %d failed after retries: %s", task.query_term, page_number, err)
            outcome.failed = True
            break
        seen.add(url)
        try:
            page = parse_result_page(url, result.body, adapter)
        except ParseError as err:
            logger.warning("skipping malformed page: %s", err)
            outcome.malformed_pages += 1
            page_number += 1
            continue
        outcome.pages.append(page)
        if is_empty_result(page, adapter):
            break
        outcome.records.extend(page.records)
        collected += len(page.records)
        if page.declared_count is not None:
            declared_total = page.declared_count
            if collected + skipped * adapter.page_size >= declared_total:
                break
        page_number += 1
    return outcome


@dataclass
class HarvestSummary:
    outcomes: list[QueryOutcome] = field(default_factory=list)
    parsed: list[ClinicalTrialRecord] = field(default_factory=list)
    rejected_records: int = 0
    failed_terms: list[str] = field(default_factory=list)


def run_harvest(
    tasks: list[QueryTask],
    adapter: SourceAdapter,
    fetcher: Fetcher,
    seen: SeenSet,
    retry_attempts: int = 3,
    backoff_base: float = 0.2,
) -> HarvestSummary:
    """Execute the plan in order; failed tasks are re-queued exactly once.

    Results keep plan order so downstream fusion is deterministic.
    """
    summary = HarvestSummary()
    requeued: list[QueryTask] = []
    for task in tasks:
        outcome = execute_query(task, adapter, fetcher, seen, retry_attempts, backoff_base)
        summary.outcomes.append(outcome)
        if outcome.failed:
            requeued.append(task)
    for task in requeued:
        outcome = execute_query(task, adapter, fetcher, seen, retry_attempts, backoff_base)
        summary.outcomes.append(outcome)
        if outcome.failed:
            summary.failed_terms.append(task.query_term)
    for outcome in summary.outcomes:
        for page in outcome.pages:
            for raw in page.records:
                try:
                    summary.parsed.append(parse_trial_record(raw, adapter, page.url))
                except ParseError as err:
                    logger.warning("rejected record from %s: %s", page.url, err)
                    summary.rejected_records += 1
    return summary
