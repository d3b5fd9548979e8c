"""URL canonicalization and the persistent seen-set used for deduplication.

Canonical form: lowercase scheme/host, default ports dropped, dot-segments
resolved, fragment stripped, query keys sorted (stable), percent-encoding
uppercased. Idempotent by construction.
"""
from __future__ import annotations

import re
import threading
from pathlib import Path
from urllib.parse import urlsplit

_PCT_RE = re.compile(r"%([0-9a-fA-F]{2})")
_DEFAULT_PORTS = {"http": "80", "https": "443"}


class UrlError(ValueError):
    """URL could not be parsed as an absolute http(s) URL."""


def _upper_pct(text: str) -> str:
    return _PCT_RE.sub(lambda m: "%" + m.group(1).upper(), text)


def _remove_dot_segments(path: str) -> str:
    # RFC 3986 section 5.2.4
    output: list[str] = []
    while path:
        if path.startswith("../"):
            path = path[3:]
        elif path.startswith("./"):
            path = path[2:]
        elif path.startswith("/./"):
            path = "/" + path[3:]
        elif path == "/.":
            path = "/"
        elif path.startswith("/../"):
            path = "/" + path[4:]
            if output:
                output.pop()
        elif path == "/..":
            path = "/"
            if output:
                output.pop()
        elif path in (".", ".."):
            path = ""
        else:
            cut = path.find("/", 1) if path.startswith("/") else path.find("/")
            if cut == -1:
                output.append(path)
                path = ""
            else:
                output.append(path[:cut])
                path = path[cut:]
    return "".join(output)


def canonicalize_url(url: str) -> str:
    parts = urlsplit(url.strip())
    scheme = parts.scheme.lower()
    if scheme not in ("http", "https"):
        raise UrlError(f"not an absolute http(s) URL: {url!r}")

    netloc = parts.netloc
    userinfo = ""
    if "@" in netloc:
        userinfo, netloc = netloc.rsplit("@", 1)
        userinfo += "@"
    host, port = netloc, ""
    if netloc.count(":") == 1:
        host, port = netloc.split(":")
    elif netloc.startswith("[") and "]:" in netloc:  # IPv6 literal with port
        host, port = netloc.rsplit(":", 1)
    host = host.lower()
    if not host:
        raise UrlError(f"URL has no host: {url!r}")
    if port and port != _DEFAULT_PORTS.get(scheme):
        host = f"{host}:{port}"

    path = _upper_pct(_remove_dot_segments(parts.path)) or "/"

    query = ""
    if parts.query:
        pieces = [_upper_pct(p) for p in parts.query.split("&") if p]
        pieces.sort(key=lambda p: p.split("=", 1)[0])  # stable for equal keys
        query = "&".join(pieces)

    canonical = f"{scheme}://{userinfo}{host}{path}"
    if query:
        canonical += f"?{query}"
    return canonical


def url_host(url: str) -> str:
    """Host (with non-default port) of a canonical URL."""
    return urlsplit(url).netloc.lower()


_IP_RE = re.compile(r"^\d{1,3}(\.\d{1,3}){3}$")


def registrable_domain(url: str) -> str:
    """Domain used for crawl confinement.

    IP literals, localhost and single-label hosts compare by full
    host (including port); otherwise the last two DNS labels.
    """
    netloc = urlsplit(url).netloc.lower()
    host = netloc.rsplit(":", 1)[0] if ":" in netloc else netloc
    if _IP_RE.match(host) or host == "localhost" or "." not in host:
        return netloc
    return ".".join(host.split(".")[-2:])


class SeenSet:
    """Persistent set of canonical URLs with atomic check-and-insert."""

    def __init__(self, path: str | Path | None = None):
        self._lock = threading.Lock()
        self._seen: set[str] = set()
        self._path = Path(path) if path is not None else None
        if self._path is not None and self._path.exists():
            with self._path.open(encoding="utf-8") as fh:
                self._seen.update(line.strip() for line in fh if line.strip())

    def add(self, url: str) -> bool:
        """Insert `url`; True iff it was not seen before."""
        with self._lock:
            if url in self._seen:
                return False
            self._seen.add(url)
            if self._path is not None:
                self._path.parent.mkdir(parents=True, exist_ok=True)
                with self._path.open("a", encoding="utf-8") as fh:
                    fh.write(url + "\n")
            return True

    def __contains__(self, url: str) -> bool:
        with self._lock:
            return url in self._seen

    def __len__(self) -> int:
        with self._lock:
            return len(self._seen)


def dedup(urls: list[str], seen: SeenSet) -> list[str]:
    """URLs whose canonical form is new; adds them to `seen`, keeps order."""
    return [url for url in urls if seen.add(url)]
