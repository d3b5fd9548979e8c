"""End-to-end pipeline wiring: harvest, crawl, extract, fuse, report.

The harvester and crawler never touch the KB directly; parsed records and
slot assignments flow through fusion, which serializes all writes.
"""
from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass, field
from datetime import timedelta

from .config import PipelineConfig
from .crawl.changes import detect_changes
from .crawl.crawler import CrawlLimits, crawl, seed_crawl
from .crawl.snapshots import SnapshotStore
from .crawl.textnorm import normalize_text
from .extract.gazetteer import build_gazetteer
from .extract.linking import coherence_rerank, link_mentions
from .extract.slots import SlotDocument, fill_slots
from .fixtures.loader import load_adapter_config, load_fixture_kb
from .fuse.engine import Quarantine, fuse_batch, propose_changes
from .fuse.events import EventStore
from .harvest.fetch import Fetcher, HttpFetcher, PoliteFetcher
from .harvest.planner import generate_query_plan
from .harvest.runner import run_harvest
from .harvest.urls import SeenSet
from .kb.models import utc_now
from .kb.stats import compute_stats
from .kb.store import KnowledgeBase

logger = logging.getLogger(__name__)


@dataclass
class PipelineState:
    kb: KnowledgeBase
    events: EventStore
    seen: SeenSet
    snapshots: SnapshotStore
    quarantine: Quarantine

    def save(self) -> None:
        self.kb.save()


def open_state(config: PipelineConfig) -> PipelineState:
    """Open (and on first use seed) the pipeline state directory."""
    state_dir = config.state_dir
    state_dir.mkdir(parents=True, exist_ok=True)
    kb_file = state_dir / "companies.jsonl"
    if kb_file.exists():
        kb = KnowledgeBase.load(state_dir)
    elif config.seed_fixture_kb:
        kb = load_fixture_kb(base_url=config.fixture_base_url, root=state_dir)
        kb.save()
    else:
        kb = KnowledgeBase(state_dir)
        kb.save()
    return PipelineState(
        kb=kb,
        events=EventStore(state_dir / "events.jsonl"),
        seen=SeenSet(state_dir / "seen_urls.txt"),
        snapshots=SnapshotStore(state_dir / "snapshots"),
        quarantine=Quarantine(state_dir / "quarantine.jsonl"),
    )


@dataclass
class HarvestReport:
    tasks: int
    fetched_pages: int
    parsed_records: int
    rejected_records: int
    failed_terms: list[str]
    fusion_counts: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failed_terms and self.fusion_counts.get("quarantined", 0) == 0


def link_sponsors(records, kb: KnowledgeBase, nil_threshold: float, margin: float, boost: float):
    """Ground each record's lead sponsor to a KB company where possible."""
    gazetteer = build_gazetteer(kb, include_persons=False)
    linked = []
    for record in records:
        links: set[str] = set()
        for sponsor in record.sponsors:
            mentions = coherence_rerank(
                link_mentions(sponsor, gazetteer, nil_threshold), kb, nil_threshold, margin, boost
            )
            links.update(m.resolved for m in mentions if m.resolved is not None)
        linked.append(dataclasses.replace(record, sponsor_links=frozenset(links)))
    return linked


def run_harvest_pipeline(
    config: PipelineConfig,
    state: PipelineState,
    fetcher: Fetcher | None = None,
    company_id: str | None = None,
    dry_run: bool = False,
):
    adapters = load_adapter_config(config.adapters_path, config.fixture_base_url)
    if config.adapter_id not in adapters:
        raise ValueError(f"adapter {config.adapter_id!r} not in {config.adapters_path}")
    adapter = adapters[config.adapter_id]
    tasks = generate_query_plan(state.kb, adapter)
    if company_id is not None:
        tasks = [t for t in tasks if t.created_from == company_id]
    if config.harvest_horizon_hours is not None:
        # incremental sync: skip terms whose companies were harvested recently
        horizon = utc_now() - timedelta(hours=config.harvest_horizon_hours)
        fresh = {
            c.id for c in state.kb.companies()
            if c.last_harvested is not None and c.last_harvested >= horizon
        }
        tasks = [t for t in tasks if t.created_from not in fresh]
    if dry_run:
        return tasks

    fetcher = fetcher or PoliteFetcher(HttpFetcher(), config.politeness_delay)
    summary = run_harvest(
        tasks, adapter, fetcher, state.seen, config.retry_attempts, config.retry_backoff
    )
    records = link_sponsors(
        summary.parsed, state.kb, config.nil_threshold, config.rerank_margin, config.rerank_boost
    )
    counts = fuse_batch(records, state.kb, state.quarantine)
    harvested_at = utc_now()
    failed = set(summary.failed_terms)
    for task in tasks:
        if task.query_term in failed:
            continue
        company = state.kb.get(task.created_from)
        state.kb.upsert(dataclasses.replace(company, last_harvested=harvested_at))
    state.save()
    return HarvestReport(
        tasks=len(tasks),
        fetched_pages=sum(len(o.pages) for o in summary.outcomes),
        parsed_records=len(summary.parsed),
        rejected_records=summary.rejected_records,
        failed_terms=summary.failed_terms,
        fusion_counts=counts,
    )


@dataclass
class CrawlReport:
    companies: int
    fetched_pages: int
    changed_regions: int
    proposed_events: int
    skipped_no_website: int


def run_crawl_pipeline(
    config: PipelineConfig,
    state: PipelineState,
    fetcher: Fetcher | None = None,
    company_id: str | None = None,
) -> CrawlReport:
    fetcher = fetcher or PoliteFetcher(HttpFetcher(), config.politeness_delay)
    limits = CrawlLimits(max_pages=config.crawl_max_pages, max_depth=config.crawl_max_depth)
    gazetteer = build_gazetteer(state.kb)
    robots_cache: dict = {}
    report = CrawlReport(0, 0, 0, 0, 0)
    regions_path = config.state_dir / "changes.jsonl"

    companies = state.kb.companies()
    if company_id is not None:
        companies = [c for c in companies if c.id == company_id]
    for company in companies:
        if not company.website:
            report.skipped_no_website += 1
            continue
        report.companies += 1
        frontier = seed_crawl(company)
        result = crawl(company, frontier, fetcher, state.snapshots, limits, robots_cache)
        report.fetched_pages += len(result.fetched_urls)

        regions = []
        for snapshot in result.snapshots:
            previous = state.snapshots.get_previous(company.id, snapshot.url)
            if previous is not None:
                regions.extend(detect_changes(previous, snapshot))
        if regions:
            with regions_path.open("a", encoding="utf-8") as fh:
                for region in regions:
                    fh.write(json.dumps(region.to_dict(), sort_keys=True))
                    fh.write("\n")
            report.changed_regions += len(regions)

        assignments = []
        for snapshot in result.snapshots:
            if snapshot.page_class not in ("team", "contact") or snapshot.http_status != 200:
                continue
            text = normalize_text(snapshot.body.decode("utf-8", errors="replace"))
            mentions = coherence_rerank(
                link_mentions(text, gazetteer, config.nil_threshold),
                state.kb, config.nil_threshold, config.rerank_margin, config.rerank_boost,
            )
            doc = SlotDocument(
                kind=snapshot.page_class,
                url=snapshot.url,
                text=text,
                company_id=company.id,
                company_country=company.country or None,
            )
            assignments.extend(fill_slots(doc, mentions, state.kb, proximity=config.proximity_chars))
        created = propose_changes(assignments, state.kb, state.events)
        report.proposed_events += len(created)
    state.save()
    return report


def run_report(state: PipelineState):
    return compute_stats(state.kb, crawled_pages=state.snapshots.count())
