"""HTTP fetching with per-host politeness.

PoliteFetcher guarantees a single in-flight request per host and a
minimum gap between consecutive requests to the same host; cross-host
requests proceed in parallel.
"""
from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Protocol

import requests

from .urls import url_host


class TransportError(Exception):
    """Network-level failure (timeout, refused connection, DNS)."""


@dataclass(frozen=True)
class FetchResult:
    url: str
    status: int
    body: bytes


class Fetcher(Protocol):
    def fetch(self, url: str) -> FetchResult: ...


class HttpFetcher:
    def __init__(self, timeout: float = 10.0, user_agent: str = "trialkb/0.1"):
        self.timeout = timeout
        self.session = requests.Session()
        self.session.headers["User-Agent"] = user_agent

    def fetch(self, url: str) -> FetchResult:
        try:
            response = self.session.get(url, timeout=self.timeout)
        except requests.RequestException as err:
            raise TransportError(str(err)) from err
        return FetchResult(url=url, status=response.status_code, body=response.content)


@dataclass
class _HostState:
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_fetch: float = 0.0


class PoliteFetcher:
    """Per-host serialization plus a configurable minimum request gap."""

    def __init__(self, inner: Fetcher, min_delay: float = 0.5):
        self.inner = inner
        self.min_delay = min_delay
        self._hosts: dict[str, _HostState] = {}
        self._registry_lock = threading.Lock()

    def _host_state(self, url: str) -> _HostState:
        host = url_host(url)
        with self._registry_lock:
            if host not in self._hosts:
                self._hosts[host] = _HostState()
            return self._hosts[host]

    def fetch(self, url: str) -> FetchResult:
        state = self._host_state(url)
        with state.lock:
            wait = state.last_fetch + self.min_delay - time.monotonic()
            if wait > 0:
                time.sleep(wait)
            try:
                return self.inner.fetch(url)
            finally:
                state.last_fetch = time.monotonic()


class RecordingFetcher:
    """Instrumentation wrapper: logs (url, monotonic time) per fetch."""

    def __init__(self, inner: Fetcher):
        self.inner = inner
        self.log: list[tuple[str, float]] = []
        self._lock = threading.Lock()

    def fetch(self, url: str) -> FetchResult:
        result = self.inner.fetch(url)
        with self._lock:
            self.log.append((url, time.monotonic()))
        return result

    def fetched_urls(self) -> list[str]:
        with self._lock:
            return [url for url, _ in self.log]


def fetch_with_retries(
    fetcher: Fetcher,
    url: str,
    attempts: int = 3,
    backoff_base: float = 0.2,
) -> FetchResult:
    """Retry transport failures with exponential backoff; re-raises after
    the final attempt."""
    last_error: TransportError | None = None
    for attempt in range(attempts):
        try:
            return fetcher.fetch(url)
        except TransportError as err:
            last_error = err
            if attempt < attempts - 1:
                time.sleep(backoff_base * (2**attempt))
    assert last_error is not None
    raise last_error
