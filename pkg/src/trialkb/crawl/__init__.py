from .changes import ChangedRegion, detect_changes
from .crawler import CrawlLimits, CrawlResult, Frontier, FrontierItem, crawl, seed_crawl
from .robots import ALLOW_ALL, DISALLOW_ALL, RobotsRule, RobotsRules, parse_robots, rules_for_response
from .scoring import FOCUS_KEYWORDS, classify_page, score_link
from .snapshots import PageSnapshot, SnapshotStore
from .textnorm import content_hash, extract_links, normalize_lines, normalize_text

__all__ = [
    "ChangedRegion",
    "detect_changes",
    "CrawlLimits",
    "CrawlResult",
    "Frontier",
    "FrontierItem",
    "crawl",
    "seed_crawl",
    "ALLOW_ALL",
    "DISALLOW_ALL",
    "RobotsRule",
    "RobotsRules",
    "parse_robots",
    "rules_for_response",
    "FOCUS_KEYWORDS",
    "classify_page",
    "score_link",
    "PageSnapshot",
    "SnapshotStore",
    "content_hash",
    "extract_links",
    "normalize_lines",
    "normalize_text",
]
