"""Plot-ready panel files derived from run directories."""

import csv

import pytest

from cvlab.errors import MissingArtifact
from cvlab.scan import emit_plotdata, from_dict, run
from cvlab.scan.plotdata import LINE_HEADER, MAP_HEADER, PANELS


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_every_experiment_has_panels():
    from cvlab.scan.config import EXPERIMENTS

    assert set(PANELS) == set(EXPERIMENTS)


def test_line_panel_layout(tmp_path):
    doc = {"experiment": "baseline-trajectories", "input": {"s_a": 1.0},
           "grid": {"s_b": [-0.5, 0.5]}, "integrator": {"horizon": 1.0, "sample_dt": 0.5}}
    run(from_dict(doc), out_dir=tmp_path)
    (path,) = emit_plotdata(tmp_path)
    rows = _rows(path)
    assert tuple(rows[0]) == LINE_HEADER
    assert [r[1] for r in rows[1:]] == ["s_b=-0.5"] * 3 + ["s_b=0.5"] * 3
    assert {r[0] for r in rows[1:]} == {"entanglement_vs_time"}


def test_map_panel_layout(tmp_path):
    doc = {"experiment": "baseline-heatmap", "grid": {"s_a": [0.5, 1.0], "s_b": [0.5]}}
    run(from_dict(doc), out_dir=tmp_path)
    (path,) = emit_plotdata(tmp_path, tmp_path / "panels")
    rows = _rows(path)
    assert path.parent == tmp_path / "panels"
    assert tuple(rows[0]) == MAP_HEADER
    assert [r[1:3] for r in rows[1:]] == [["0.5", "0.5"], ["1", "0.5"]]


def test_fully_excluded_run_gives_header_only(tmp_path):
    doc = {"experiment": "baseline-trajectories", "generator": "o0", "kernel": {"gamma": 1.0},
           "system": {"delta_AE": 0.0}}
    res = run(from_dict(doc), out_dir=tmp_path)
    assert res.exit_code == 2
    (path,) = emit_plotdata(tmp_path)
    assert _rows(path) == [list(LINE_HEADER)]


def test_missing_artifacts(tmp_path):
    with pytest.raises(MissingArtifact):
        emit_plotdata(tmp_path)
    doc = {"experiment": "baseline-heatmap", "grid": {"s_a": [1.0], "s_b": [1.0]}}
    run(from_dict(doc), out_dir=tmp_path)
    (tmp_path / "heatmap.csv").unlink()
    with pytest.raises(MissingArtifact):
        emit_plotdata(tmp_path)
