"""Command-line entry point.

Subcommands: harvest (query plan -> fetch -> parse -> fuse), crawl
(seed -> crawl -> detect changes -> extract -> propose), serve (curation
service), report (stats to stdout), fixtures (fixture registry + sites
server). Exit codes: 0 success, 1 partial failure, 2 config/usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .config import ConfigError, PipelineConfig

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trialkb")
    parser.add_argument("--config", required=True, help="path to the pipeline config (JSON)")
    sub = parser.add_subparsers(dest="command", required=True)

    harvest = sub.add_parser("harvest", help="mirror registry records into the KB")
    harvest.add_argument("--dry-run", action="store_true", help="print the query plan, fetch nothing")
    harvest.add_argument("--company", help="restrict to one company id")

    crawl = sub.add_parser("crawl", help="crawl company sites, extract and propose changes")
    crawl.add_argument("--company", help="restrict to one company id")

    sub.add_parser("serve", help="run the curation review service")

    report = sub.add_parser("report", help="print KB statistics")
    report.add_argument("--out", help="also write the report as JSON to this path")

    sub.add_parser("fixtures", help="run the fixture registry and site server")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = PipelineConfig.from_file(args.config)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2

    if args.command == "harvest":
        return _cmd_harvest(config, args)
    if args.command == "crawl":
        return _cmd_crawl(config, args)
    if args.command == "serve":
        return _cmd_serve(config)
    if args.command == "report":
        return _cmd_report(config, args)
    if args.command == "fixtures":
        return _cmd_fixtures(config)
    parser.print_usage(sys.stderr)
    return 2


def _cmd_harvest(config: PipelineConfig, args) -> int:
    from .pipeline import open_state, run_harvest_pipeline

    state = open_state(config)
    result = run_harvest_pipeline(
        config, state, company_id=args.company, dry_run=args.dry_run
    )
    if args.dry_run:
        for task in result:
            print(f"{task.priority:4d}  {task.created_from}  {task.query_term}")
        return 0
    print(
        f"harvested {result.parsed_records} records over {result.tasks} terms "
        f"({result.fetched_pages} pages); fusion: {result.fusion_counts}"
    )
    if result.rejected_records:
        print(f"rejected records: {result.rejected_records}")
    if result.failed_terms:
        print(f"failed terms: {result.failed_terms}")
    return 0 if result.ok else 1


def _cmd_crawl(config: PipelineConfig, args) -> int:
    from .pipeline import open_state, run_crawl_pipeline

    state = open_state(config)
    report = run_crawl_pipeline(config, state, company_id=args.company)
    print(
        f"crawled {report.companies} companies ({report.fetched_pages} pages), "
        f"{report.changed_regions} changed regions, {report.proposed_events} proposed events, "
        f"{report.skipped_no_website} skipped without website"
    )
    return 0


def _cmd_serve(config: PipelineConfig) -> int:
    import uvicorn

    from .pipeline import open_state
    from .service.app import create_app

    state = open_state(config)
    app = create_app(state.kb, state.events, config.tokens, state.snapshots)
    uvicorn.run(app, host="127.0.0.1", port=config.service_port, log_level="warning")
    return 0


def _cmd_report(config: PipelineConfig, args) -> int:
    from .pipeline import open_state, run_report

    state = open_state(config)
    stats = run_report(state)
    print(f"total_trials:       {stats.total_trials}")
    print(f"linked_trials:      {stats.linked_trials}")
    print(f"completed_trials:   {stats.completed_trials}")
    print(f"completed_fraction: {stats.completed_fraction:.6f} ({stats.completed_percent()})")
    print(f"crawled_pages:      {stats.crawled_pages}")
    print(f"distinct_companies: {stats.distinct_companies}")
    print(f"personnel_records:  {stats.personnel_records}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(stats.to_dict(), fh, indent=2)
        print(f"wrote {args.out}")
    return 0


def _cmd_fixtures(config: PipelineConfig) -> int:
    from .fixtures.loader import registry_records, sites_root
    from .fixtures.server import FixtureServer

    server = FixtureServer(
        registry_records(), sites_root(), port=config.fixture_port
    ).start()
    print(f"fixture server on {server.base_url} (Ctrl-C to stop)")
    try:
        import time

        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        server.stop()
    return 0


if __name__ == "__main__":
    sys.exit(main())
