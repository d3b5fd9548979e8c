from .adapters import (
    ParseError,
    ResultPage,
    SourceAdapter,
    is_empty_result,
    load_adapters,
    parse_result_page,
    parse_trial_record,
)
from .fetch import (
    FetchResult,
    Fetcher,
    HttpFetcher,
    PoliteFetcher,
    RecordingFetcher,
    TransportError,
    fetch_with_retries,
)
from .planner import QueryTask, generate_query_plan
from .runner import HarvestSummary, QueryOutcome, execute_query, run_harvest
from .urls import SeenSet, UrlError, canonicalize_url, dedup, registrable_domain, url_host

__all__ = [
    "ParseError",
    "ResultPage",
    "SourceAdapter",
    "is_empty_result",
    "load_adapters",
    "parse_result_page",
    "parse_trial_record",
    "FetchResult",
    "Fetcher",
    "HttpFetcher",
    "PoliteFetcher",
    "RecordingFetcher",
    "TransportError",
    "fetch_with_retries",
    "QueryTask",
    "generate_query_plan",
    "HarvestSummary",
    "QueryOutcome",
    "execute_query",
    "run_harvest",
    "SeenSet",
    "UrlError",
    "canonicalize_url",
    "dedup",
    "registrable_domain",
    "url_host",
]
