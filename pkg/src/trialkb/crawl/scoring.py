"""Link scoring and page classification for the focused crawl."""
from __future__ import annotations

import re
from urllib.parse import urlsplit

from ..harvest.urls import registrable_domain

FOCUS_KEYWORDS = (
    "team", "management", "leadership", "about", "contact", "impressum",
    "people", "board",
)
PATH_WEIGHT = 0.6
ANCHOR_WEIGHT = 0.4

_CONTACT_PATH_KEYWORDS = ("contact", "impressum", "kontakt")
_TEAM_PATH_KEYWORDS = ("team", "people", "leadership", "management", "board")
_ABOUT_PATH_KEYWORDS = ("about",)

_TEAM_BODY_KEYWORDS = (
    "chief executive officer", "ceo", "cto", "cfo", "coo", "cso",
    "board member", "management", "leadership", "our team",
)
_CONTACT_BODY_KEYWORDS = ("contact", "phone", "tel", "email", "e-mail", "address", "fax")
_PHONE_HINT_RE = re.compile(r"\+?[0-9][0-9 ()\-./]{6,}[0-9]")

PAGE_CLASSES = ("team", "contact", "about", "other")


def score_link(url: str, anchor_text: str, seed_url: str) -> float:
    """Focus heuristic in [0, 1]: path keyword 0.6 + anchor keyword 0.4,
    capped; off-domain links score 0 and are never enqueued."""
    if registrable_domain(url) != registrable_domain(seed_url):
        return 0.0
    path = urlsplit(url).path.lower()
    anchor = anchor_text.lower()
    score = 0.0
    if any(keyword in path for keyword in FOCUS_KEYWORDS):
        score += PATH_WEIGHT
    if any(keyword in anchor for keyword in FOCUS_KEYWORDS):
        score += ANCHOR_WEIGHT
    return min(score, 1.0)


def classify_page(url: str, text: str) -> str:
    """URL-path keywords first, body-keyword density second, default other."""
    path = urlsplit(url).path.lower()
    if any(k in path for k in _CONTACT_PATH_KEYWORDS):
        return "contact"
    if any(k in path for k in _TEAM_PATH_KEYWORDS):
        return "team"
    if any(k in path for k in _ABOUT_PATH_KEYWORDS):
        return "about"

    lowered = text.lower()
    team_signals = sum(lowered.count(k) for k in _TEAM_BODY_KEYWORDS)
    contact_signals = sum(lowered.count(k) for k in _CONTACT_BODY_KEYWORDS)
    contact_signals += 2 * len(_PHONE_HINT_RE.findall(text))
    if max(team_signals, contact_signals) >= 2:
        return "team" if team_signals >= contact_signals else "contact"
    return "other"
