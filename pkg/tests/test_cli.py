"""End-to-end CLI tests: exit codes, artifacts, and sweep aggregation.

Runs use deliberately small grids and short schedules so the whole file
stays fast; the full-resolution runs live in the acceptance suite.
"""

import json

import pytest

from extballs.cli import main
from extballs.report import read_report_json


def _write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


@pytest.fixture()
def plane_config(tmp_path):
    return _write(tmp_path, "plane.json", {
        "surface": "plane",
        "schedule": {"t_min": 0.5, "t_max": 2.0, "count": 3},
        "grid": 64,
    })


def test_catalog_list(capsys):
    assert main(["catalog", "list"]) == 0
    out = capsys.readouterr().out
    for name in ("plane", "catenoid", "enneper", "helicoid", "h2_in_h3",
                 "hyperbolic_catenoid", "sphere_control"):
        assert name in out


def test_report_writes_artifacts(plane_config, tmp_path, capsys):
    out_dir = tmp_path / "out"
    assert main(["report", plane_config, "--out", str(out_dir)]) == 0
    text = capsys.readouterr().out
    assert "PASS" in text and "exit status 0" in text
    assert (out_dir / "series.csv").exists()
    doc = read_report_json(out_dir / "report.json")
    assert doc["report"]["surface"] == "plane"
    assert doc["report"]["exit_status"] == 0
    assert doc["config"]["surface"] == "plane"
    # csv has a header plus one row per scheduled radius
    lines = (out_dir / "series.csv").read_text().strip().splitlines()
    assert len(lines) == 1 + 3


def test_report_quiet(plane_config, tmp_path, capsys):
    out_dir = tmp_path / "out"
    assert main(["report", plane_config, "--out", str(out_dir),
                 "--quiet"]) == 0
    assert capsys.readouterr().out == ""


def test_report_missing_config(tmp_path, capsys):
    assert main(["report", str(tmp_path / "nope.json")]) == 1
    assert "error" in capsys.readouterr().err


def test_report_invalid_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"surface": ', encoding="utf-8")
    assert main(["report", str(path)]) == 1
    assert "not valid JSON" in capsys.readouterr().err


def test_report_infeasible_geometry(tmp_path, capsys):
    cfg = _write(tmp_path, "small.json", {
        "surface": "plane",
        "params": {"halfwidth": 3.0},
        "schedule": {"t_max": 10.0},
        "grid": 64,
    })
    assert main(["report", cfg, "--out", str(tmp_path / "o")]) == 1
    assert "error" in capsys.readouterr().err


def test_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as err:
        main([])
    assert err.value.code == 1
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 1
    capsys.readouterr()


def test_helicoid_reports_hypothesis_violation(tmp_path, capsys):
    cfg = _write(tmp_path, "helicoid.json", {
        "surface": "helicoid",
        "schedule": {"t_min": 1.0, "t_max": 8.0, "count": 6},
        "grid": 128,
    })
    out_dir = tmp_path / "out"
    assert main(["report", cfg, "--out", str(out_dir)]) == 2
    doc = read_report_json(out_dir / "report.json")
    assert doc["report"]["hypothesis_violated"] is True
    assert doc["report"]["exit_status"] == 2
    capsys.readouterr()


def test_sweep_aggregates_runs(plane_config, tmp_path, capsys):
    out_root = tmp_path / "sweep"
    assert main(["sweep", plane_config, "--param", "schedule.count",
                 "--values", "3,4", "--out", str(out_root)]) == 0
    doc = json.loads((out_root / "sweep.json").read_text())
    assert doc["param"] == "schedule.count"
    assert doc["values"] == [3, 4]
    assert len(doc["runs"]) == 2
    for index, run in enumerate(doc["runs"]):
        assert run["error"] is None
        assert run["exit_status"] == 0
        assert (out_root / f"run_{index:03d}" / "report.json").exists()
        assert run["verdicts"]["kg_identity"]["passed"] is True
    capsys.readouterr()


def test_sweep_isolates_bad_values(plane_config, tmp_path, capsys):
    out_root = tmp_path / "sweep"
    assert main(["sweep", plane_config, "--param", "schedule.count",
                 "--values", "3,1", "--out", str(out_root), "--quiet"]) == 1
    doc = json.loads((out_root / "sweep.json").read_text())
    assert doc["runs"][0]["error"] is None
    assert "ConfigError" in doc["runs"][1]["error"]


def test_sweep_json_values(plane_config, tmp_path):
    out_root = tmp_path / "sweep"
    assert main(["sweep", plane_config, "--param", "grid",
                 "--values", "[[64, 96]]", "--out", str(out_root),
                 "--quiet"]) == 0
    doc = json.loads((out_root / "sweep.json").read_text())
    assert doc["values"] == [[64, 96]]
    assert doc["runs"][0]["error"] is None
