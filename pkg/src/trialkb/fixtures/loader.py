"""Load the bundled fixture data: KB seed, registry records, gold labels."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from ..harvest.adapters import SourceAdapter, load_adapters
from ..kb.models import CompanyEntity, PersonEntity
from ..kb.store import KnowledgeBase


def data_dir() -> Path:
    return Path(str(resources.files("trialkb.fixtures").joinpath("data")))


def load_fixture_kb(base_url: str | None = None, root: str | Path | None = None) -> KnowledgeBase:
    """Fixture companies and persons; `website_path` rows resolve against the
    fixture server's base URL when one is given."""
    kb = KnowledgeBase(root)
    companies = []
    with (data_dir() / "companies.jsonl").open(encoding="utf-8") as fh:
        for line in fh:
            row = json.loads(line)
            website_path = row.pop("website_path", None)
            if website_path and base_url:
                row["website"] = base_url.rstrip("/") + website_path
            companies.append(CompanyEntity.from_dict(row))
    kb.bulk_load(companies)
    persons = []
    with (data_dir() / "persons.jsonl").open(encoding="utf-8") as fh:
        for line in fh:
            persons.append(PersonEntity.from_dict(json.loads(line)))
    kb.bulk_load(persons)
    return kb


def registry_records() -> list[dict]:
    records = []
    with (data_dir() / "registry.jsonl").open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def load_adapter_config(path: str | Path, base_url: str | None = None) -> dict[str, SourceAdapter]:
    """Adapters from a config file; "{base}" templates resolve to the
    fixture server URL."""
    return load_adapters(path, base_url)


def fixture_adapter(base_url: str) -> SourceAdapter:
    return load_adapter_config(data_dir() / "adapters.json", base_url)["fixture-registry"]


def manifest() -> dict:
    return json.loads((data_dir() / "manifest.json").read_text("utf-8"))


def corpus_docs() -> dict[str, str]:
    docs = {}
    for path in sorted((data_dir() / "docs").glob("*.txt")):
        docs[path.stem] = path.read_text("utf-8")
    return docs


def gold_mentions_path() -> Path:
    return data_dir() / "gold_mentions.tsv"


def gold_slots_path() -> Path:
    return data_dir() / "gold_slots.tsv"


def sites_root() -> Path:
    return data_dir() / "sites"


def site_graph() -> list[dict]:
    return json.loads((data_dir() / "site_graph.json").read_text("utf-8"))
