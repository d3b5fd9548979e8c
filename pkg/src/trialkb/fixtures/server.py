"""Fixture HTTP server: a small clinical-trial registry plus static company sites.

Registry endpoint: GET /query?term=<t>&page=<n> returning
{"count": N, "records": [...]} with a fixed page size. Empty results carry
the marker message the fixture adapter is configured with.
"""
from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlsplit

from ..extract.folding import fold

PAGE_SIZE = 10
EMPTY_MARKER = "No studies found"

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".txt": "text/plain; charset=utf-8",
    ".json": "application/json",
}


def term_matches(term: str, sponsor: str) -> bool:
    """Registry search semantics: folded substring in either direction."""
    folded_term = fold(term)
    folded_sponsor = fold(sponsor)
    if not folded_term or not folded_sponsor:
        return False
    return folded_term in folded_sponsor or folded_sponsor in folded_term


class FixtureServer:
    """Threaded server over a registry record list and a static site tree."""

    def __init__(
        self,
        records: list[dict],
        sites_root: str | Path | None = None,
        host: str = "127.0.0.1",
        port: int = 0,
        page_size: int = PAGE_SIZE,
    ):
        self.records = records
        self.sites_root = Path(sites_root) if sites_root else None
        self.page_size = page_size
        handler = _build_handler(self)
        self._httpd = ThreadingHTTPServer((host, port), handler)
        self._thread: threading.Thread | None = None

    @property
    def base_url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def search(self, term: str, page: int) -> dict:
        matches = [r for r in self.records if term_matches(term, r.get("lead_sponsor", ""))]
        count = len(matches)
        start = (page - 1) * self.page_size
        chunk = matches[start : start + self.page_size]
        payload = {"count": count, "records": chunk}
        if count == 0:
            payload["message"] = EMPTY_MARKER
        return payload

    def start(self) -> "FixtureServer":
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)


def _build_handler(server: FixtureServer):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):  # keep test output quiet
            pass

        def do_GET(self):
            parts = urlsplit(self.path)
            if parts.path == "/query":
                params = parse_qs(parts.query)
                term = params.get("term", [""])[0]
                try:
                    page = max(1, int(params.get("page", ["1"])[0]))
                except ValueError:
                    page = 1
                body = json.dumps(server.search(term, page)).encode("utf-8")
                self._send(200, "application/json", body)
                return
            if parts.path == "/robots.txt" and server.sites_root is not None:
                robots = server.sites_root / "robots.txt"
                if robots.exists():
                    self._send(200, "text/plain; charset=utf-8", robots.read_bytes())
                else:
                    self._send(404, "text/plain; charset=utf-8", b"not found")
                return
            if parts.path.startswith("/sites/") and server.sites_root is not None:
                rel = parts.path[len("/sites/"):]
                target = (server.sites_root / rel).resolve()
                if (
                    target.is_file()
                    and server.sites_root.resolve() in target.parents
                ):
                    ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
                    self._send(200, ctype, target.read_bytes())
                    return
                self._send(404, "text/html; charset=utf-8", b"<html><body>not found</body></html>")
                return
            self._send(404, "text/plain; charset=utf-8", b"not found")

        def _send(self, status: int, content_type: str, body: bytes):
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

    return Handler


def load_registry_records(path: str | Path) -> list[dict]:
    records = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records
