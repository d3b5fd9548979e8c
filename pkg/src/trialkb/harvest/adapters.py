"""Registry source adapters: query templates, pagination, record parsing.

Adapters are config, not code: empty-result markers and field mappings
differ per registry and drift over time. Live registry adapters ship as
disabled stubs; the bundled fixture registry drives the test suite.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path
from urllib.parse import parse_qsl, quote_plus, urlencode, urlsplit, urlunsplit

from ..kb.models import ClinicalTrialRecord, Provenance, TrialStatus
from ..extract.phases import normalize_phase

logger = logging.getLogger(__name__)


class ParseError(ValueError):
    """Record blob could not be turned into a ClinicalTrialRecord."""


DEFAULT_RECORD_FIELDS = {
    "registry_id": "nct_id",
    "title": "brief_title",
    "phase": "phase",
    "status": "overall_status",
    "lead_sponsor": "lead_sponsor",
    "conditions": "conditions",
    "interventions": "interventions",
    "last_update": "last_update",
}

STATUS_MAP = {
    "completed": TrialStatus.COMPLETED,
    "recruiting": TrialStatus.RECRUITING,
    "enrolling by invitation": TrialStatus.RECRUITING,
    "active, not recruiting": TrialStatus.ACTIVE,
    "active": TrialStatus.ACTIVE,
    "not yet recruiting": TrialStatus.ACTIVE,
    "terminated": TrialStatus.TERMINATED,
    "withdrawn": TrialStatus.WITHDRAWN,
    "unknown status": TrialStatus.UNKNOWN,
    "unknown": TrialStatus.UNKNOWN,
}


@dataclass(frozen=True)
class SourceAdapter:
    adapter_id: str
    query_url_template: str  # contains {term}
    page_param: str = "page"
    page_size: int = 10
    empty_markers: tuple[str, ...] = ()
    count_field: str = "count"
    records_field: str = "records"
    record_fields: dict = field(default_factory=lambda: dict(DEFAULT_RECORD_FIELDS))
    enabled: bool = True

    def __post_init__(self):
        if not self.adapter_id:
            raise ValueError("adapter_id must be non-empty")
        if self.page_size < 1:
            raise ValueError("page size must be >= 1")

    def page_url(self, term: str, page: int) -> str:
        url = self.query_url_template.format(term=quote_plus(term))
        parts = urlsplit(url)
        params = [(k, v) for k, v in parse_qsl(parts.query, keep_blank_values=True)
                  if k != self.page_param]
        params.append((self.page_param, str(page)))
        return urlunsplit(parts._replace(query=urlencode(params)))

    @classmethod
    def from_dict(cls, raw: dict) -> "SourceAdapter":
        return cls(
            adapter_id=raw["adapter_id"],
            query_url_template=raw["query_url_template"],
            page_param=raw.get("page_param", "page"),
            page_size=int(raw.get("page_size", 10)),
            empty_markers=tuple(raw.get("empty_markers", [])),
            count_field=raw.get("count_field", "count"),
            records_field=raw.get("records_field", "records"),
            record_fields=dict(raw.get("record_fields", DEFAULT_RECORD_FIELDS)),
            enabled=bool(raw.get("enabled", True)),
        )


def load_adapters(path: str | Path, base_url: str | None = None) -> dict[str, SourceAdapter]:
    """Adapter config file: a JSON list, one object per adapter.

    Templates may carry a "{base}" placeholder (the bundled fixture adapter
    does); it resolves against `base_url`, and such adapters are skipped
    entirely when no base URL is available.
    """
    raw = json.loads(Path(path).read_text("utf-8"))
    adapters = {}
    for item in raw:
        template = item.get("query_url_template", "")
        if "{base}" in template:
            if base_url is None:
                continue
            item = dict(item, query_url_template=template.replace("{base}", base_url.rstrip("/")))
        adapter = SourceAdapter.from_dict(item)
        if adapter.adapter_id in adapters:
            raise ValueError(f"duplicate adapter_id {adapter.adapter_id!r}")
        adapters[adapter.adapter_id] = adapter
    return adapters


@dataclass(frozen=True)
class ResultPage:
    url: str
    raw_body: bytes
    declared_count: int | None
    records: tuple[dict, ...]


def parse_result_page(url: str, body: bytes, adapter: SourceAdapter) -> ResultPage:
    try:
        payload = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise ParseError(f"malformed result page at {url}: {err}") from err
    declared = payload.get(adapter.count_field)
    records = payload.get(adapter.records_field, [])
    if not isinstance(records, list):
        raise ParseError(f"malformed result page at {url}: records not a list")
    if declared is not None and len(records) > int(declared):
        raise ParseError(f"malformed result page at {url}: more records than declared count")
    return ResultPage(
        url=url,
        raw_body=body,
        declared_count=int(declared) if declared is not None else None,
        records=tuple(records),
    )


def is_empty_result(page: ResultPage, adapter: SourceAdapter) -> bool:
    if page.declared_count == 0:
        return True
    if not page.records:
        return True
    body_text = page.raw_body.decode("utf-8", errors="replace")
    return any(marker in body_text for marker in adapter.empty_markers)


def parse_trial_record(
    raw: dict,
    adapter: SourceAdapter,
    source_url: str,
    fetched_at: datetime | None = None,
    extractor: str = "trialkb-harvest/0.1.0",
) -> ClinicalTrialRecord:
    fields = adapter.record_fields
    registry_id = raw.get(fields["registry_id"])
    if not registry_id:
        raise ParseError(f"record lacks required field {fields['registry_id']!r}")
    status_raw = (raw.get(fields["status"]) or "").strip().lower()
    sponsor = raw.get(fields["lead_sponsor"])
    last_update_raw = raw.get(fields["last_update"])
    last_update = None
    if last_update_raw:
        try:
            last_update = date.fromisoformat(str(last_update_raw))
        except ValueError:
            logger.warning("unparseable last_update %r on %s", last_update_raw, registry_id)
    return ClinicalTrialRecord(
        registry_id=str(registry_id),
        source=adapter.adapter_id,
        title=raw.get(fields["title"], "") or "",
        phase=normalize_phase(raw.get(fields["phase"])),
        status=STATUS_MAP.get(status_raw, TrialStatus.UNKNOWN),
        sponsors=(str(sponsor),) if sponsor else (),
        conditions=tuple(raw.get(fields["conditions"], []) or []),
        interventions=tuple(raw.get(fields["interventions"], []) or []),
        last_update=last_update,
        provenance=Provenance(
            source_url=source_url,
            fetched_at=fetched_at or datetime.now(timezone.utc).replace(microsecond=0),
            extractor=extractor,
        ),
    )
