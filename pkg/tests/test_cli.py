from __future__ import annotations

import json

import pytest

from trialkb.cli import main
from trialkb.config import PipelineConfig
from trialkb.kb.stats import compute_stats


def write_config(tmp_path, server=None, **overrides) -> str:
    config = {
        "state_dir": str(tmp_path / "state"),
        "politeness_delay_ms": 1,
        "retry_backoff_ms": 1,
    }
    if server is not None:
        config["fixture_base_url"] = server.base_url
    config.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    return str(path)


class TestConfigErrors:
    def test_missing_config_exits_2_with_path(self, tmp_path, capsys):
        code = main(["--config", str(tmp_path / "absent.json"), "report"])
        assert code == 2
        assert "absent.json" in capsys.readouterr().err

    def test_invalid_json_exits_2(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{nope")
        assert main(["--config", str(path), "report"]) == 2

    def test_unknown_subcommand_exits_2(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as err:
            main(["--config", "x", "frobnicate"])
        assert err.value.code == 2


class TestReport:
    def test_report_matches_direct_compute_stats(self, tmp_path, capsys):
        config_path = write_config(tmp_path)
        assert main(["--config", config_path, "report"]) == 0
        out = capsys.readouterr().out
        config = PipelineConfig.from_file(config_path)
        from trialkb.kb.store import KnowledgeBase

        kb = KnowledgeBase.load(config.state_dir)
        stats = compute_stats(kb)
        assert f"total_trials:       {stats.total_trials}" in out
        assert f"distinct_companies: {stats.distinct_companies}" in out
        assert stats.completed_percent() in out

    def test_report_out_file(self, tmp_path, capsys):
        config_path = write_config(tmp_path)
        out_path = tmp_path / "stats.json"
        assert main(["--config", config_path, "report", "--out", str(out_path)]) == 0
        written = json.loads(out_path.read_text())
        assert written["distinct_companies"] == 55


class TestHarvestDryRun:
    def test_dry_run_prints_plan_without_fetching(self, tmp_path, capsys):
        config_path = write_config(tmp_path)
        assert main(["--config", config_path, "harvest", "--dry-run"]) == 0
        out = capsys.readouterr().out
        lines = [l for l in out.splitlines() if l.strip()]
        assert len(lines) == 55  # one per company, no fetches attempted
        assert "c-001" in out

    def test_company_scope_restriction(self, tmp_path, capsys):
        config_path = write_config(tmp_path)
        assert main(["--config", config_path, "harvest", "--dry-run", "--company", "c-007"]) == 0
        lines = [l for l in capsys.readouterr().out.splitlines() if l.strip()]
        assert len(lines) == 1
        assert "c-007" in lines[0]


class TestHarvestAndCrawl:
    def test_full_harvest_exit_zero(self, tmp_path, fixture_server, capsys):
        config_path = write_config(tmp_path, server=fixture_server)
        assert main(["--config", config_path, "harvest"]) == 0
        assert "538 records" in capsys.readouterr().out

    def test_crawl_reports_events(self, tmp_path, fixture_server, capsys):
        config_path = write_config(tmp_path, server=fixture_server)
        main(["--config", config_path, "harvest"])
        assert main(["--config", config_path, "crawl"]) == 0
        out = capsys.readouterr().out
        assert "proposed events" in out
