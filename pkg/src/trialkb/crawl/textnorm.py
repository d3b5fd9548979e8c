"""Visible-text normalization for snapshots and change detection.

Markup is stripped, block boundaries become line breaks, whitespace is
collapsed within lines, case is preserved (names matter). Markup-only
churn therefore never changes the normalized text or its hash.
"""
from __future__ import annotations

import hashlib
from html import unescape
from html.parser import HTMLParser

_BLOCK_TAGS = {
    "p", "div", "br", "li", "ul", "ol", "h1", "h2", "h3", "h4", "h5", "h6",
    "tr", "table", "section", "article", "header", "footer", "title", "hr",
    "blockquote", "pre", "dt", "dd",
}
_SKIP_TAGS = {"script", "style", "noscript"}


class _TextExtractor(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.parts: list[str] = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in _SKIP_TAGS:
            self._skip_depth += 1
        elif tag in _BLOCK_TAGS:
            self.parts.append("\n")

    def handle_endtag(self, tag):
        if tag in _SKIP_TAGS and self._skip_depth > 0:
            self._skip_depth -= 1
        elif tag in _BLOCK_TAGS:
            self.parts.append("\n")

    def handle_data(self, data):
        if self._skip_depth == 0:
            # raw newlines inside markup are insignificant; only block tags
            # produce line boundaries
            self.parts.append(data.replace("\r", " ").replace("\n", " "))


def normalize_lines(body: str) -> list[str]:
    """Normalized visible-text lines of an HTML or plain-text body."""
    if "<" in body and ">" in body:
        parser = _TextExtractor()
        parser.feed(body)
        parser.close()
        text = "".join(parser.parts)
    else:
        text = unescape(body)
    lines = []
    for raw_line in text.split("\n"):
        line = " ".join(raw_line.split())
        if line:
            lines.append(line)
    return lines


def normalize_text(body: str) -> str:
    return "\n".join(normalize_lines(body))


def content_hash(normalized: str) -> int:
    """Deterministic 64-bit hash of normalized text."""
    digest = hashlib.blake2b(normalized.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


class LinkExtractor(HTMLParser):
    """Collects (href, anchor text) pairs from a page."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.links: list[tuple[str, str]] = []
        self._href: str | None = None
        self._anchor: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag == "a":
            href = dict(attrs).get("href")
            if self._href is not None:
                self._finish()
            self._href = href
            self._anchor = []

    def handle_endtag(self, tag):
        if tag == "a" and self._href is not None:
            self._finish()

    def handle_data(self, data):
        if self._href is not None:
            self._anchor.append(data)

    def _finish(self):
        if self._href:
            self.links.append((self._href, " ".join("".join(self._anchor).split())))
        self._href = None
        self._anchor = []


def extract_links(body: str) -> list[tuple[str, str]]:
    parser = LinkExtractor()
    parser.feed(body)
    parser.close()
    return parser.links
