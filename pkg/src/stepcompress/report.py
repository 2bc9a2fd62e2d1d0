"""Run reports: a CSV, an aligned text table, and a compression histogram.

Takes one or more metrics.json files (one per run, e.g. one per comment
strategy) and writes three files into the report directory: report.csv with
one row per problem, report.txt with the same table aligned for reading plus
aggregate lines, and compression_hist.png with one histogram series per run.
Empty input produces the same three files, each carrying a "no data" marker,
so downstream tooling never has to special-case a quiet run.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

log = logging.getLogger(__name__)

_COLUMNS = [
    "run", "problem_id", "retained", "n_solutions", "confidence",
    "raw_steps", "nodes", "compression_rate", "comment_only_keys",
    "solutions_rejected", "labeled_samples", "labeled_weight",
]


@dataclass
class RunMetrics:
    name: str
    strategy: str
    problems: list[dict]
    aggregate: dict


class ReportError(Exception):
    pass


def load_metrics(path: str | Path, name: str | None = None) -> RunMetrics:
    path = Path(path)
    try:
        # parse_float=str keeps the fixed-digit decimal strings exactly as
        # the pipeline wrote them
        data = json.loads(path.read_text(encoding="utf-8"), parse_float=str)
    except (OSError, json.JSONDecodeError) as exc:
        raise ReportError(f"cannot read metrics file {path}: {exc}") from exc
    if not isinstance(data, dict) or "problems" not in data:
        raise ReportError(f"{path} does not look like a metrics file")
    strategy = data.get("config", {}).get("run", {}).get("comment_strategy", "?")
    return RunMetrics(
        name=name or path.parent.name or path.stem,
        strategy=strategy,
        problems=data["problems"],
        aggregate=data.get("aggregate", {}),
    )


def _rows_for(run: RunMetrics) -> list[dict]:
    rows = []
    for problem in run.problems:
        rows.append(
            {
                "run": run.name,
                "problem_id": problem["problem_id"],
                "retained": str(problem["retained"]).lower(),
                "n_solutions": problem["n_solutions"],
                "confidence": problem["confidence"],
                "raw_steps": problem["raw_step_count"],
                "nodes": problem["node_count"],
                "compression_rate": problem["compression_rate"] or "",
                "comment_only_keys": problem.get("comment_only_keys", 0),
                "solutions_rejected": problem["solutions_rejected"],
                "labeled_samples": problem["labeled_samples"],
                "labeled_weight": problem["labeled_weight"],
            }
        )
    return rows


def write_csv(rows: list[dict], path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        if not rows:
            handle.write("# no data\n")


def write_table(runs: list[RunMetrics], rows: list[dict], path: Path) -> None:
    lines: list[str] = []
    if not rows:
        lines.append("no data")
    else:
        cells = [[str(row[column]) for column in _COLUMNS] for row in rows]
        widths = [
            max(len(_COLUMNS[i]), *(len(row[i]) for row in cells))
            for i in range(len(_COLUMNS))
        ]
        header = "  ".join(
            name.ljust(widths[i]) for i, name in enumerate(_COLUMNS)
        )
        lines.append(header)
        lines.append("  ".join("-" * width for width in widths))
        for row in cells:
            lines.append(
                "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row))
            )
        lines.append("")
        for run in runs:
            agg = run.aggregate
            lines.append(
                f"{run.name} (strategy={run.strategy}): "
                f"{agg.get('problems_retained', 0)}/{agg.get('problems_total', 0)}"
                f" problems retained, "
                f"{agg.get('labeled_samples', 0)} samples "
                f"(weight {agg.get('labeled_weight', 0)}), "
                f"overall compression "
                f"{agg.get('compression_rate_overall') or 'n/a'}"
            )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_histogram(runs: list[RunMetrics], path: Path) -> None:
    figure, axis = plt.subplots(figsize=(7, 4.5))
    series = []
    for run in runs:
        values = [
            float(problem["compression_rate"])
            for problem in run.problems
            if problem.get("compression_rate")
        ]
        if values:
            series.append((run.name, values))
    if not series:
        axis.text(
            0.5, 0.5, "no data", ha="center", va="center",
            transform=axis.transAxes, fontsize=18, color="gray",
        )
        axis.set_xticks([])
        axis.set_yticks([])
    else:
        bins = [i / 20 for i in range(21)]
        for name, values in series:
            axis.hist(values, bins=bins, alpha=0.6, label=name, edgecolor="black")
        axis.set_xlabel("compression rate (nodes / raw steps)")
        axis.set_ylabel("problems")
        axis.legend()
    axis.set_title("Step compression by problem")
    figure.tight_layout()
    figure.savefig(path, dpi=120)
    plt.close(figure)


def write_report(
    metrics_paths: list[str | Path],
    out_dir: str | Path,
    names: list[str] | None = None,
) -> list[Path]:
    """Render all three report files; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    runs = []
    for position, path in enumerate(metrics_paths):
        name = names[position] if names and position < len(names) else None
        runs.append(load_metrics(path, name=name))
    rows = [row for run in runs for row in _rows_for(run)]
    csv_path = out / "report.csv"
    table_path = out / "report.txt"
    figure_path = out / "compression_hist.png"
    write_csv(rows, csv_path)
    write_table(runs, rows, table_path)
    write_histogram(runs, figure_path)
    for path in (csv_path, table_path, figure_path):
        log.info("wrote %s", path)
    return [csv_path, table_path, figure_path]
