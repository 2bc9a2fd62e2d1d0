import csv
import json
from pathlib import Path

import pytest

from stepcompress.report import ReportError, load_metrics, write_report


def metrics_payload(problem_id="p-1", compression="0.500000", strategy="distinct"):
    return {
        "problems": [{
            "problem_id": problem_id,
            "n_solutions": 4,
            "confidence": "0.750000",
            "confidence_exact": "3/4",
            "retained": True,
            "translate_failures": 0,
            "solutions_rejected": 0,
            "labeled_samples": 3,
            "labeled_weight": 4,
            "generation_units": 4,
            "raw_step_count": 8,
            "node_count": 4,
            "compression_rate": compression,
            "compression_exact": "1/2",
            "step_keys": 8,
            "comment_only_keys": 1,
            "opaque_keys": 0,
        }],
        "aggregate": {
            "problems_total": 1,
            "problems_retained": 1,
            "solutions_total": 4,
            "solutions_rejected": 0,
            "labeled_samples": 3,
            "labeled_weight": 4,
            "compression_rate_overall": compression,
        },
        "config": {"run": {"comment_strategy": strategy}},
    }


def write_metrics(tmp_path, name, payload):
    directory = tmp_path / name
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / "metrics.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def test_load_metrics_preserves_decimal_strings(tmp_path):
    path = write_metrics(tmp_path, "run-a", metrics_payload())
    run = load_metrics(path)
    assert run.name == "run-a"
    assert run.strategy == "distinct"
    assert run.problems[0]["compression_rate"] == "0.500000"
    assert run.aggregate["compression_rate_overall"] == "0.500000"


def test_load_metrics_rejects_other_json(tmp_path):
    path = tmp_path / "metrics.json"
    path.write_text('{"not": "metrics"}', encoding="utf-8")
    with pytest.raises(ReportError):
        load_metrics(path)
    with pytest.raises(ReportError):
        load_metrics(tmp_path / "missing.json")


def test_write_report_produces_all_three_files(tmp_path):
    first = write_metrics(tmp_path, "dist", metrics_payload(strategy="distinct"))
    second = write_metrics(
        tmp_path, "skip",
        metrics_payload(problem_id="p-1", compression="0.400000",
                        strategy="skipping"),
    )
    out = tmp_path / "report"
    paths = write_report([first, second], out)
    assert [p.name for p in paths] == [
        "report.csv", "report.txt", "compression_hist.png",
    ]

    with paths[0].open(newline="") as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) == 2
    assert rows[0]["run"] == "dist"
    assert rows[0]["compression_rate"] == "0.500000"
    assert rows[1]["run"] == "skip"
    assert rows[1]["compression_rate"] == "0.400000"

    table = paths[1].read_text()
    assert "dist (strategy=distinct): 1/1 problems retained" in table
    assert "skip (strategy=skipping)" in table
    assert "overall compression 0.500000" in table

    png = paths[2].read_bytes()
    assert png[:8] == b"\x89PNG\r\n\x1a\n"
    assert len(png) > 1000


def test_explicit_names_override_directory_names(tmp_path):
    path = write_metrics(tmp_path, "run-a", metrics_payload())
    out = tmp_path / "report"
    paths = write_report([path], out, names=["baseline"])
    table = paths[1].read_text()
    assert "baseline (strategy=distinct)" in table


def test_empty_metrics_render_no_data_markers(tmp_path):
    payload = {
        "problems": [],
        "aggregate": {},
        "config": {"run": {"comment_strategy": "distinct"}},
    }
    path = write_metrics(tmp_path, "empty", payload)
    out = tmp_path / "report"
    csv_path, table_path, png_path = write_report([path], out)
    assert "# no data" in csv_path.read_text()
    assert table_path.read_text() == "no data\n"
    assert png_path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_unretained_problem_has_blank_compression_cell(tmp_path):
    payload = metrics_payload()
    payload["problems"][0].update(
        retained=False, compression_rate=None, node_count=0, raw_step_count=0,
        labeled_samples=0, labeled_weight=0, solutions_rejected=4,
    )
    payload["aggregate"].update(compression_rate_overall=None)
    path = write_metrics(tmp_path, "none", payload)
    csv_path, table_path, _ = write_report([path], tmp_path / "report")
    with csv_path.open(newline="") as handle:
        (row,) = list(csv.DictReader(handle))
    assert row["compression_rate"] == ""
    assert row["retained"] == "false"
    assert "overall compression n/a" in table_path.read_text()
