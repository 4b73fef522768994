"""Grid runner: output files, manifest, exit codes, determinism and mirroring."""

import csv
import json

import numpy as np
import pytest

from cvlab.scan import from_dict, run
from cvlab.scan.runner import EXIT_EXCLUSIONS, EXIT_OK, MANIFEST_NAME, format_value

SHORT = {"horizon": 3.0, "sample_dt": 0.05}
MANIFEST_KEYS = {
    "schema_version", "experiment", "code_version", "backend", "python", "config", "resolved",
    "files", "points", "exclusions", "convergence", "summary", "wall_time_total", "workers",
    "exit_code",
}


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def _baseline_doc(**extra):
    return {
        "experiment": "baseline-trajectories",
        "input": {"s_a": 1.0},
        "grid": {"s_b": [-0.5, 0.5]},
        "integrator": SHORT,
        **extra,
    }


def test_trajectory_run_writes_tables_and_manifest(tmp_path):
    res = run(from_dict(_baseline_doc()), out_dir=tmp_path)
    assert res.exit_code == EXIT_OK
    m = json.loads((tmp_path / MANIFEST_NAME).read_text())
    assert set(m) == MANIFEST_KEYS
    assert m["resolved"]["axes"] == {"s_b": [-0.5, 0.5]}
    assert m["files"]["trajectories"]["rows"] == 2 * 61
    rows = _rows(tmp_path / "trajectories.csv")
    assert rows[0] == ["point", "s_b", "t", "E_N", "D_B", "nu_tilde", "is_symmetric",
                       "bona_fide", "phys_ok"]
    assert len(rows) == 1 + 2 * 61
    assert [r[0] for r in rows[1:]] == ["0"] * 61 + ["1"] * 61
    pts = _rows(tmp_path / "points.csv")
    assert len(pts) == 3


def test_output_is_deterministic(tmp_path):
    cfg = from_dict(_baseline_doc())
    run(cfg, out_dir=tmp_path / "a")
    run(cfg, out_dir=tmp_path / "b", workers=2)
    for name in ("trajectories.csv", "points.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_exclusions_give_exit_two(tmp_path):
    doc = {
        "experiment": "baseline-trajectories",
        "generator": "o0",
        "kernel": {"gamma": 1.0},
        "grid": {"delta_AE": [0.0, 1.0]},
        "integrator": SHORT,
    }
    res = run(from_dict(doc), out_dir=tmp_path)
    assert res.exit_code == EXIT_EXCLUSIONS
    (ex,) = res.manifest["exclusions"]
    assert ex["point"] == 0 and ex["reason"] == "unstable-regime"
    assert res.manifest["points"][1]["status"] == "ok"
    # excluded points contribute no rows
    assert {r[0] for r in _rows(tmp_path / "trajectories.csv")[1:]} == {"1"}


def test_sign_mirroring_matches_direct_evaluation(tmp_path):
    doc = {
        "experiment": "witness-scan",
        "generator": "o0",
        "input": {"s_a": 1.0, "s_b": -1.0},
        "kernel": {"gamma": 0.5},
        "grid": {"delta_AE": [-1.0, 1.0], "delta_AB": [-0.5]},
        "integrator": {"horizon": 10.0, "sample_dt": 0.05},
    }
    mirrored = run(from_dict(doc), out_dir=tmp_path / "m")
    direct = run(from_dict({**doc, "options": {"mirror_sign_symmetry": False}}),
                 out_dir=tmp_path / "d")
    assert [p["mirrored"] for p in mirrored.manifest["points"]] == [True, False]
    assert not any(p["mirrored"] for p in direct.manifest["points"])
    wm = [p["summary"]["witness_N"] for p in mirrored.manifest["points"]]
    wd = [p["summary"]["witness_N"] for p in direct.manifest["points"]]
    np.testing.assert_allclose(wm, wd, atol=1e-8)


def test_convergence_probe_is_recorded(tmp_path):
    res = run(from_dict(_baseline_doc()), out_dir=tmp_path, probe=True)
    conv = res.manifest["convergence"]
    assert conv["requested"] and conv["passed"]
    assert conv["worst"]["max_dEN"] < 1e-6
    assert all(p["convergence"]["passed"] for p in res.manifest["points"])


def test_heatmap_summary(tmp_path):
    doc = {"experiment": "baseline-heatmap", "grid": {"s_a": [1.0], "s_b": [-0.5, 0.0, 0.5]}}
    res = run(from_dict(doc), out_dir=tmp_path)
    (row,) = res.manifest["summary"]["rows"]
    assert row["crossings_s_b"] == [-0.25]
    assert row["simon_positive"] == pytest.approx(-0.3115406302, abs=1e-9)
    assert row["simon_negative"] is None


@pytest.mark.parametrize("value,text", [
    (True, "1"), (3, "3"), (0.0, "0"), (-0.0, "0"), (float("nan"), "nan"),
    (0.1, "0.1"), (1 / 3, "0.333333333333"), (np.float64(2.5e-13), "2.5e-13"), ("markov", "markov"),
])
def test_format_value(value, text):
    assert format_value(value) == text
