"""Command-line front end.

One subcommand per pipeline stage plus `run` (everything through labeling),
`report` (tables and figures from metrics files), and `validate` (synthetic
world check of the one-pass estimator). Stage commands share an output
directory; completed stages are cached there and skipped on rerun unless
--force is given.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import AppConfig, ConfigError, load_config
from .pipeline import IngestError, Pipeline, PipelineError, render_json
from .report import ReportError, write_report
from .synth import WorldError, load_world, validate_estimates
from .translator import FixtureMissError, TransportError
from .trie import TrieError

log = logging.getLogger("stepcompress")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None,
                        help="INI config file (defaults apply when omitted)")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="debug logging")


def _add_stage_args(parser: argparse.ArgumentParser, needs_input: bool) -> None:
    _add_common(parser)
    parser.add_argument("--out-dir", type=Path, required=True,
                        help="directory for stage artifacts")
    parser.add_argument("--input", type=Path, default=None,
                        required=needs_input,
                        help="input corpus JSONL (optional once ingested)")
    parser.add_argument("--fixtures", type=Path, default=None,
                        help="recorded-response directory (replay mode)")
    parser.add_argument("--record", action="store_true",
                        help="record live responses into --fixtures")
    parser.add_argument("--force", action="store_true",
                        help="recompute stages even when cached")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stepcompress",
        description="Annotate step-by-step solutions with per-step values "
                    "by merging code-translated steps into a prefix tree.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    stage_help = {
        "ingest": "validate and canonicalize the input corpus",
        "sample": "draw model solutions for problems that have none",
        "filter": "drop problems outside the confidence band",
        "translate": "translate solution steps to tagged code blocks",
        "normalize": "canonicalize code steps into merge keys",
        "compress": "merge solutions into scored prefix trees",
        "label": "emit labeled samples, rejections, and metrics",
        "run": "run every stage through labeling",
    }
    for name, text in stage_help.items():
        sub = subparsers.add_parser(name, help=text)
        _add_stage_args(sub, needs_input=(name in ("ingest", "run")))

    report = subparsers.add_parser(
        "report", help="render tables and figures from metrics files")
    _add_common(report)
    report.add_argument("--metrics", type=Path, nargs="+", required=True,
                        help="one or more metrics.json files")
    report.add_argument("--names", nargs="*", default=None,
                        help="series names matching --metrics order")
    report.add_argument("--out-dir", type=Path, required=True)

    validate = subparsers.add_parser(
        "validate",
        help="check trie estimates against a synthetic world with known "
             "step values",
    )
    _add_common(validate)
    validate.add_argument("--world", type=Path, required=True,
                          help="world definition JSON")
    validate.add_argument("--n", type=int, default=4096,
                          help="solutions to sample (default 4096)")
    validate.add_argument("--seed", type=int, default=0)
    validate.add_argument("--sigma", type=float, default=4.0,
                          help="tolerance in binomial standard deviations")
    validate.add_argument("--min-passes", type=int, default=100,
                          help="only check nodes visited at least this often")
    validate.add_argument("--completions", type=int, default=8,
                          help="per-step completions priced for the Monte "
                               "Carlo cost comparison")
    validate.add_argument("--out", type=Path, default=None,
                          help="optional JSON summary path")
    return parser


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _load_config(path: Path | None) -> AppConfig:
    return load_config(path)


def cmd_stage(args: argparse.Namespace, stage: str) -> int:
    config = _load_config(args.config)
    pipeline = Pipeline(
        config,
        args.out_dir,
        corpus_path=args.input,
        fixtures_dir=args.fixtures,
        record=args.record,
        force=args.force,
    )
    pipeline.run_until("label" if stage == "run" else stage)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    written = write_report(args.metrics, args.out_dir, names=args.names)
    for path in written:
        print(path)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    world = load_world(args.world)
    report = validate_estimates(
        world,
        n=args.n,
        seed=args.seed,
        sigma=args.sigma,
        min_passes=args.min_passes,
        completions_per_step=args.completions,
    )
    for line in report.summary_lines():
        print(line)
    ok = report.within_bound == report.eligible and (
        report.deterministic_exact is not False
    )
    if args.out is not None:
        payload = {
            "world": report.world,
            "n_solutions": report.n_solutions,
            "eligible_nodes": report.eligible,
            "within_bound": report.within_bound,
            "annotator_units": report.annotator_units,
            "mc_units": report.mc_units,
            "ok": ok,
        }
        args.out.write_text(render_json(payload, indent=2) + "\n",
                            encoding="utf-8")
    return 0 if ok else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.verbose)
    try:
        if args.command == "report":
            return cmd_report(args)
        if args.command == "validate":
            return cmd_validate(args)
        return cmd_stage(args, args.command)
    except (ConfigError, IngestError, PipelineError, TrieError, WorldError,
            ReportError, FixtureMissError, TransportError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
