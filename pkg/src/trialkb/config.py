"""Pipeline configuration: one JSON document, every tunable threshold in one place."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    state_dir: Path
    adapters_path: Path
    adapter_id: str = "fixture-registry"
    fixture_base_url: str = "http://127.0.0.1:8765"
    fixture_port: int = 8765
    seed_fixture_kb: bool = True
    politeness_delay_ms: int = 500
    retry_attempts: int = 3
    retry_backoff_ms: int = 200
    harvest_horizon_hours: int | None = None  # None = full re-harvest every run
    crawl_max_pages: int = 50
    crawl_max_depth: int = 3
    nil_threshold: float = 0.6
    rerank_margin: float = 0.1
    rerank_boost: float = 0.5
    proximity_chars: int = 120
    service_port: int = 8080
    tokens: dict[str, str] = field(default_factory=lambda: {"dev-token": "reviewer"})

    _POSITIVE = (
        "fixture_port", "politeness_delay_ms", "retry_attempts", "retry_backoff_ms",
        "crawl_max_pages", "crawl_max_depth", "proximity_chars", "service_port",
    )

    def validate(self) -> None:
        if not self.adapters_path.exists():
            raise ConfigError(f"adapters config not found: {self.adapters_path}")
        if not self.state_dir.parent.exists():
            raise ConfigError(f"state directory parent missing: {self.state_dir.parent}")
        for name in self._POSITIVE:
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("nil_threshold", "rerank_margin", "rerank_boost"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            raw = json.loads(path.read_text("utf-8"))
        except json.JSONDecodeError as err:
            raise ConfigError(f"config file {path} is not valid JSON: {err}") from err
        return cls.from_dict(raw, base=path.parent)

    @classmethod
    def from_dict(cls, raw: dict, base: Path | None = None) -> "PipelineConfig":
        base = base or Path.cwd()

        def resolve(value: str) -> Path:
            p = Path(value)
            return p if p.is_absolute() else (base / p)

        if "state_dir" not in raw:
            raise ConfigError("config requires state_dir")
        adapters_default = Path(__file__).parent / "fixtures" / "data" / "adapters.json"
        known = {f for f in cls.__dataclass_fields__ if not f.startswith("_")}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(raw)
        kwargs["state_dir"] = resolve(raw["state_dir"])
        kwargs["adapters_path"] = (
            resolve(raw["adapters_path"]) if "adapters_path" in raw else adapters_default
        )
        config = cls(**kwargs)
        config.validate()
        return config

    @property
    def politeness_delay(self) -> float:
        return self.politeness_delay_ms / 1000.0

    @property
    def retry_backoff(self) -> float:
        return self.retry_backoff_ms / 1000.0
