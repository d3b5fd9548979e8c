from .loader import (
    corpus_docs,
    data_dir,
    fixture_adapter,
    gold_mentions_path,
    gold_slots_path,
    load_adapter_config,
    load_fixture_kb,
    manifest,
    registry_records,
    site_graph,
    sites_root,
)
from .server import EMPTY_MARKER, PAGE_SIZE, FixtureServer, load_registry_records, term_matches

__all__ = [
    "corpus_docs",
    "data_dir",
    "fixture_adapter",
    "gold_mentions_path",
    "gold_slots_path",
    "load_adapter_config",
    "load_fixture_kb",
    "manifest",
    "registry_records",
    "site_graph",
    "sites_root",
    "EMPTY_MARKER",
    "PAGE_SIZE",
    "FixtureServer",
    "load_registry_records",
    "term_matches",
]
