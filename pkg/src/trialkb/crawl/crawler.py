"""Focused crawl of a company website.

Pages are fetched best-first by link score within per-company budgets,
confined to the seed's registrable domain, honoring robots.txt fetched
once per host before the first page fetch.
"""
from __future__ import annotations

import heapq
import itertools
import logging
from dataclasses import dataclass, field
from urllib.parse import urljoin, urlsplit

from ..harvest.fetch import Fetcher, TransportError
from ..harvest.urls import UrlError, canonicalize_url, registrable_domain
from ..kb.models import CompanyEntity, utc_now
from .robots import RobotsRules, rules_for_response
from .scoring import classify_page, score_link
from .snapshots import PageSnapshot, SnapshotStore
from .textnorm import content_hash, extract_links, normalize_text

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FrontierItem:
    url: str
    depth: int
    score: float
    discovered_from: str


class Frontier:
    """Descending score order, ties broken by insertion order."""

    def __init__(self):
        self._heap: list[tuple[float, int, FrontierItem]] = []
        self._counter = itertools.count()
        self._enqueued: set[str] = set()
        self.seed_url: str | None = None

    def push(self, item: FrontierItem) -> bool:
        if item.url in self._enqueued:
            return False
        if self.seed_url is None:
            self.seed_url = item.url
        self._enqueued.add(item.url)
        heapq.heappush(self._heap, (-item.score, next(self._counter), item))
        return True

    def pop(self) -> FrontierItem:
        return heapq.heappop(self._heap)[2]

    def __len__(self) -> int:
        return len(self._heap)

    def __contains__(self, url: str) -> bool:
        return url in self._enqueued


@dataclass
class CrawlLimits:
    max_pages: int = 50
    max_depth: int = 3


def seed_crawl(company: CompanyEntity) -> Frontier:
    """Frontier holding the company homepage, or empty when no website."""
    frontier = Frontier()
    if not company.website:
        logger.info("company %s has no website, skipping crawl", company.id)
        return frontier
    try:
        homepage = canonicalize_url(company.website)
    except UrlError as err:
        logger.warning("company %s website unusable: %s", company.id, err)
        return frontier
    frontier.push(FrontierItem(url=homepage, depth=0, score=1.0, discovered_from=""))
    return frontier


@dataclass
class CrawlResult:
    snapshots: list[PageSnapshot] = field(default_factory=list)
    fetched_urls: list[str] = field(default_factory=list)
    robots_blocked: list[str] = field(default_factory=list)


def _robots_for_host(url: str, fetcher: Fetcher, cache: dict[str, RobotsRules]) -> RobotsRules:
    host = urlsplit(url).netloc.lower()
    if host not in cache:
        robots_url = f"{urlsplit(url).scheme}://{host}/robots.txt"
        try:
            result = fetcher.fetch(robots_url)
            cache[host] = rules_for_response(result.status, result.body.decode("utf-8", "replace"))
        except TransportError:
            cache[host] = rules_for_response(503, "")
    return cache[host]


def crawl(
    company: CompanyEntity,
    frontier: Frontier,
    fetcher: Fetcher,
    store: SnapshotStore | None = None,
    limits: CrawlLimits | None = None,
    robots_cache: dict[str, RobotsRules] | None = None,
) -> CrawlResult:
    limits = limits or CrawlLimits()
    robots_cache = robots_cache if robots_cache is not None else {}
    result = CrawlResult()
    if len(frontier) == 0 or frontier.seed_url is None:
        return result
    seed_url = frontier.seed_url

    while len(frontier) > 0 and len(result.fetched_urls) < limits.max_pages:
        item = frontier.pop()
        rules = _robots_for_host(item.url, fetcher, robots_cache)
        if not rules.is_allowed(urlsplit(item.url).path or "/"):
            result.robots_blocked.append(item.url)
            continue

        snapshot = _fetch_snapshot(company, item.url, fetcher)
        result.fetched_urls.append(item.url)
        if snapshot is None:
            continue
        if store is not None:
            store.put(snapshot)
        result.snapshots.append(snapshot)

        if snapshot.http_status != 200 or item.depth >= limits.max_depth:
            continue
        body_text = snapshot.body.decode("utf-8", errors="replace")
        for href, anchor in extract_links(body_text):
            try:
                target = canonicalize_url(urljoin(item.url, href))
            except UrlError:
                continue
            if registrable_domain(target) != registrable_domain(seed_url):
                continue  # off-domain: never enqueued
            if target in frontier:
                continue
            frontier.push(
                FrontierItem(
                    url=target,
                    depth=item.depth + 1,
                    score=score_link(target, anchor, seed_url),
                    discovered_from=item.url,
                )
            )
    return result


def _fetch_snapshot(company: CompanyEntity, url: str, fetcher: Fetcher) -> PageSnapshot | None:
    attempts = 0
    while True:
        attempts += 1
        try:
            fetched = fetcher.fetch(url)
            break
        except TransportError as err:
            if attempts >= 2:  # one retry, then record the failure
                logger.warning("fetch failed twice for %s: %s", url, err)
                return PageSnapshot(
                    url=url,
                    company_id=company.id,
                    fetched_at=utc_now(),
                    http_status=0,
                    content_hash=content_hash(""),
                    body=b"",
                    page_class="other",
                )
    if fetched.status != 200:
        return PageSnapshot(
            url=url,
            company_id=company.id,
            fetched_at=utc_now(),
            http_status=fetched.status,
            content_hash=content_hash(""),
            body=b"",
            page_class="other",
        )
    try:
        body_text = fetched.body.decode("utf-8")
    except UnicodeDecodeError:
        body_text = ""
    normalized = normalize_text(body_text)
    return PageSnapshot(
        url=url,
        company_id=company.id,
        fetched_at=utc_now(),
        http_status=fetched.status,
        content_hash=content_hash(normalized),
        body=fetched.body,
        page_class=classify_page(url, normalized) if body_text else "other",
    )
