"""Plot-ready long-format files derived from a completed run directory.

Every panel file is a CSV with one of two fixed layouts:

* line panels: ``panel,series,x,y``
* map panels: ``panel,x,y,z``

``series`` labels are ``axis=value`` pairs joined by ``;`` over the grid
axes that are not on the x axis.  Rows follow the canonical point order of
the run, then the order of the source rows.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from ..errors import MissingArtifact
from .runner import MANIFEST_NAME

LINE_HEADER = ("panel", "series", "x", "y")
MAP_HEADER = ("panel", "x", "y", "z")

# experiment -> list of (output file, source table, layout, x column, y column, z column)
PANELS = {
    "baseline-trajectories": [("entanglement_vs_time.csv", "trajectories", "line", "t", "E_N", None)],
    "baseline-heatmap": [("steady_entanglement_map.csv", "heatmap", "map", "s_a", "s_b", "E_N_final")],
    "thermal-sweep": [("entanglement_vs_nbar.csv", "sweep", "line", "n_bar", "E_N_final", None)],
    "freezing": [
        ("freezing_overlay.csv", "trajectories", "line", "t", "E_N", None),
        ("freezing_deviation.csv", "deviation", "line", "t", "percent", None),
    ],
    "freezing-thermal": [
        ("thermal_overlay.csv", "trajectories", "line", "t", "E_N", None),
        ("thermal_deviation.csv", "deviation", "line", "t", "percent", None),
    ],
    "revivals": [("revival_series.csv", "trajectories", "line", "t", "E_N", None)],
    "witness-scan": [("witness_vs_detuning.csv", "witness", "line", "delta_AB", "witness_N", None)],
    "beating": [("beating_series.csv", "trajectories", "line", "t", "E_N", None)],
    "locking": [("time_average_vs_amplitude.csv", "locking", "line", "delta0", "time_avg_E_N", None)],
    "locking-witness": [("witness_vs_amplitude.csv", "witness", "line", "delta0", "witness_N", None)],
    "beating-thermal": [
        ("beating_thermal_overlay.csv", "trajectories", "line", "t", "E_N", None),
        ("beating_thermal_deviation.csv", "deviation", "line", "t", "percent", None),
    ],
    "oracle-check": [("oracle_agreement.csv", "oracle", "line", "seed", "max_abs_dEN", None)],
}


def _read_table(path: Path) -> tuple[list, list]:
    if not path.exists():
        raise MissingArtifact(f"missing run artifact {path}")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise MissingArtifact(f"run artifact {path} has no header")
    return rows[0], rows[1:]


def _series_label(row: dict, axes: list, x: str, extra=()) -> str:
    keys = [a for a in axes if a != x] + list(extra)
    return ";".join(f"{k}={row[k]}" for k in keys)


def emit_plotdata(run_dir, out_dir=None) -> list[Path]:
    """Write the panel files for a finished run.

    Raises:
        MissingArtifact: the manifest or a source table is absent.
    """
    run_dir = Path(run_dir)
    mpath = run_dir / MANIFEST_NAME
    if not mpath.exists():
        raise MissingArtifact(f"no {MANIFEST_NAME} in {run_dir}")
    manifest = json.loads(mpath.read_text())
    experiment = manifest["experiment"]
    axes = list(manifest["resolved"]["axes"])
    out = Path(out_dir) if out_dir is not None else run_dir / "plotdata"
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for fname, table, layout, xcol, ycol, zcol in PANELS[experiment]:
        header, rows = _read_table(run_dir / f"{table}.csv")
        panel = Path(fname).stem
        target = out / fname
        with open(target, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            if layout == "map":
                w.writerow(MAP_HEADER)
                for raw in rows:
                    row = dict(zip(header, raw))
                    w.writerow((panel, row[xcol], row[ycol], row[zcol]))
            else:
                w.writerow(LINE_HEADER)
                extra = ("generator",) if table == "oracle" else ()
                for raw in rows:
                    row = dict(zip(header, raw))
                    w.writerow((panel, _series_label(row, axes, xcol, extra), row[xcol], row[ycol]))
        written.append(target)
    return written
