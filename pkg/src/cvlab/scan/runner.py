"""Grid execution, post-processing and CSV/manifest output."""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import __version__
from .._backend import backend_name
from ..diagnostics import relative_deviation, separability_onset
from ..gaussian import analytic_thermal_cutoff, simon_threshold
from .config import ExperimentConfig
from .experiments import (
    EXPERIMENT_TABLES,
    HEATMAP_COLUMNS,
    LOCKING_COLUMNS,
    ORACLE_COLUMNS,
    POINT_COLUMNS,
    TRAJECTORY_COLUMNS,
    WITNESS_COLUMNS,
    PointResult,
    effective_delta_AE,
    evaluate_point,
    resolve_point,
)

log = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
MANIFEST_SCHEMA_VERSION = 1
EXIT_OK, EXIT_ERROR, EXIT_EXCLUSIONS = 0, 1, 2
ZERO_EN = 1e-8
TABLE_COLUMNS = {
    "trajectories": TRAJECTORY_COLUMNS,
    "points": POINT_COLUMNS,
    "heatmap": HEATMAP_COLUMNS,
    "sweep": HEATMAP_COLUMNS,
    "witness": WITNESS_COLUMNS,
    "locking": LOCKING_COLUMNS,
    "oracle": ORACLE_COLUMNS,
    "deviation": ("t", "E_N", "E_N_baseline", "percent"),
}
DEVIATION_AXIS = {"freezing": "gamma", "freezing-thermal": "n_bar", "beating-thermal": "n_bar"}


@dataclass
class RunResult:
    manifest: dict
    exit_code: int
    out_dir: Path
    results: list


# ---------------------------------------------------------------------------
# formatting


def format_value(v) -> str:
    """Deterministic text form of one CSV cell."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if v == 0.0:
            return "0"
        return format(v, ".12g")
    return str(v)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def write_table(path: Path, axes: tuple, columns: tuple, results: list, table: str) -> int:
    """Write one CSV in canonical point order; returns the number of data rows."""
    n_rows = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("point",) + axes + tuple(columns))
        for res in results:
            data = res.tables.get(table)
            if not data:
                continue
            n = len(next(iter(data.values())))
            coords = [format_value(res.point[a]) for a in axes]
            cols = [data[c] for c in columns]
            idx = str(res.index)
            for k in range(n):
                w.writerow([idx, *coords, *(format_value(c[k]) for c in cols)])
            n_rows += n
    return n_rows


# ---------------------------------------------------------------------------
# grid handling


def grid_points(cfg: ExperimentConfig) -> tuple[tuple, list]:
    """Axis names and canonical list of points for the experiment."""
    if cfg.experiment == "oracle-check":
        return ("seed",), [{"seed": k} for k in range(int(cfg.options["oracle_seeds"]))]
    return cfg.axes, cfg.points()


def plan_mirroring(cfg: ExperimentConfig, points: list) -> dict:
    """Map each point index to ``("run", conjugate)`` or ``("copy", partner_index)``.

    Points with negative effective ``δ_AE`` are served from the sign-symmetric
    partner ``(δ → -δ, α → α*)``: copied from the grid when that partner is
    present with identical resolved parameters, otherwise evaluated directly
    in the conjugate frame.
    """
    plan = {i: ("run", False) for i in range(len(points))}
    if cfg.experiment == "oracle-check" or not cfg.options["mirror_sign_symmetry"]:
        return plan
    setups = {}
    for i, p in enumerate(points):
        try:
            setups[i] = resolve_point(cfg, p)
        except Exception:  # resolution errors surface again when the point runs
            setups[i] = None
    for i, p in enumerate(points):
        s = setups[i]
        if s is None or not effective_delta_AE(cfg, p) < 0:
            continue
        mirror = resolve_point(cfg, p, conjugate=True)
        partner = next(
            (j for j, sj in setups.items()
             if sj is not None and j != i and sj.system.delta_AE >= 0 and sj == mirror),
            None,
        )
        plan[i] = ("copy", partner) if partner is not None else ("run", True)
    return plan


def _copy_result(src: PointResult, index: int, point: dict) -> PointResult:
    tables = {k: dict(v) for k, v in src.tables.items()}
    summary = dict(src.summary)
    if "delta_AE_used" in summary:
        summary["delta_AE_used"] = -summary["delta_AE_used"]
        if "points" in tables:
            tables["points"]["delta_AE_used"] = -tables["points"]["delta_AE_used"]
    return PointResult(index=index, point=dict(point), status=src.status, reason=src.reason,
                       detail=src.detail, tables=tables, series=src.series, summary=summary,
                       convergence=src.convergence, wall_time=0.0, mirrored=True)


def execute(cfg: ExperimentConfig, points: list, workers: int = 1, probe: bool = False) -> list:
    """Evaluate all points (in parallel when ``workers > 1``) in canonical order."""
    doc_json = json.dumps(cfg.raw, sort_keys=True)
    plan = plan_mirroring(cfg, points)
    jobs = [(i, points[i], plan[i][1]) for i in range(len(points)) if plan[i][0] == "run"]
    done: dict[int, PointResult] = {}
    if workers <= 1 or len(jobs) <= 1:
        for i, p, conj in jobs:
            done[i] = evaluate_point(doc_json, i, p, probe, conj)
            log.info("point %d/%d %s (%s)", i + 1, len(points), done[i].status, p)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = {i: pool.submit(evaluate_point, doc_json, i, p, probe, conj)
                    for i, p, conj in jobs}
            for i in sorted(futs):
                done[i] = futs[i].result()
                log.info("point %d/%d %s (%s)", i + 1, len(points), done[i].status, points[i])
    for i, (kind, arg) in plan.items():
        if kind == "copy":
            done[i] = _copy_result(done[arg], i, points[i])
    return [done[i] for i in range(len(points))]


# ---------------------------------------------------------------------------
# experiment-level post-processing


def _group_key(point: dict, axis: str) -> tuple:
    return tuple((k, v) for k, v in point.items() if k != axis)


def _deviation(cfg, axes, results) -> tuple[dict, dict]:
    axis = DEVIATION_AXIS[cfg.experiment]
    floor = float(cfg.options["deviation_floor"])
    window = cfg.options["deviation_window"]
    t0, t1 = (-np.inf, np.inf) if window is None else (float(window[0]), float(window[1]))
    baseline_value = cfg.options["baseline"]
    groups: dict = {}
    for r in results:
        groups.setdefault(_group_key(r.point, axis), []).append(r)
    tables, summary = {}, {"axis": axis, "floor": floor, "window": [t0, t1], "points": []}
    for members in groups.values():
        if axis in axes:
            values = [m.point[axis] for m in members]
            if baseline_value is None:
                bval = 0.0 if axis == "n_bar" and 0.0 in values else values[0]
            else:
                bval = float(baseline_value)
            base = next((m for m in members if m.point[axis] == bval), None)
        else:
            base, bval = None, None
        for m in members:
            if base is None or base.status != "ok" or m.status != "ok":
                continue
            curve = relative_deviation(m.series["E_N"], base.series["E_N"], floor, m.series["t"])
            tables[m.index] = {
                "t": curve.times,
                "E_N": m.series["E_N"],
                "E_N_baseline": base.series["E_N"],
                "percent": curve.percent,
            }
            summary["points"].append({
                "point": m.index,
                "baseline_point": base.index,
                axis: m.point[axis],
                "max_percent": curve.max_in(),
                "max_percent_in_window": curve.max_in(t0, t1),
            })
    return tables, summary


def _heatmap_summary(results) -> dict:
    rows: dict = {}
    for r in results:
        if r.status == "ok" and "s_a" in r.point and "s_b" in r.point:
            rows.setdefault(r.point["s_a"], []).append((r.point["s_b"], r.summary["E_N_final"]))
    out = []
    for s_a in sorted(rows):
        pts = sorted(rows[s_a])
        crossings = []
        for (x0, e0), (x1, e1) in zip(pts, pts[1:]):
            if (e0 > ZERO_EN) != (e1 > ZERO_EN):
                crossings.append(0.5 * (x0 + x1))
        out.append({
            "s_a": s_a,
            "crossings_s_b": crossings,
            "simon_positive": simon_threshold(s_a, "positive"),
            "simon_negative": simon_threshold(s_a, "negative"),
        })
    return {"rows": out}


def _thermal_summary(results) -> dict:
    groups: dict = {}
    for r in results:
        if r.status == "ok":
            groups.setdefault(_group_key(r.point, "n_bar"), []).append(r)
    out = []
    for key, members in groups.items():
        members.sort(key=lambda m: m.point.get("n_bar", 0.0))
        nb = [m.point.get("n_bar", 0.0) for m in members]
        en = [m.summary["E_N_final"] for m in members]
        entry = {k: v for k, v in key}
        entry["separability_onset"] = separability_onset(nb, en, ZERO_EN)
        s_a, s_b = entry.get("s_a"), entry.get("s_b")
        if s_a is not None and s_b is not None:
            entry["analytic_cutoff"] = analytic_thermal_cutoff(s_a, s_b)
        out.append(entry)
    return {"groups": out}


def _locking_summary(results) -> dict:
    groups: dict = {}
    for r in results:
        if r.status == "ok" and "delta0" in r.point:
            groups.setdefault(_group_key(r.point, "delta0"), []).append(r)
    out = []
    for key, members in groups.items():
        members.sort(key=lambda m: m.point["delta0"])
        x = np.array([m.point["delta0"] for m in members])
        y = np.array([m.summary["time_avg_E_N"] for m in members])
        # maxima on the closed grid: an endpoint counts when it exceeds its only neighbour
        interior = [
            k for k in range(len(x))
            if (k == 0 or y[k] > y[k - 1]) and (k == len(x) - 1 or y[k] > y[k + 1])
        ] if len(x) > 1 else []
        out.append({
            **{k: v for k, v in key},
            "local_maxima_delta0": [float(x[k]) for k in interior],
            "local_maxima_value": [float(y[k]) for k in interior],
            "max_time_avg_E_N": float(y.max()) if y.size else None,
        })
    return {"groups": out}


def _witness_summary(results) -> dict:
    pos = [r.point for r in results if r.status == "ok" and r.summary["witness_N"] > ZERO_EN]
    return {"positive_witness_points": pos, "threshold": ZERO_EN}


def _oracle_summary(results) -> dict:
    comps = [c for r in results for c in r.summary.get("comparisons", [])]
    diffs = [c["max_abs_dEN"] for c in comps if c["error"] is None]
    return {
        "comparisons": len(comps),
        "failed": sum(1 for c in comps if c["error"] is None and not c["passed"]),
        "voided": sum(1 for c in comps if c["error"] is not None),
        "max_abs_dEN": max(diffs) if diffs else None,
    }


# ---------------------------------------------------------------------------
# entry point


def run(cfg: ExperimentConfig, out_dir=None, workers: int = 1, probe: bool = False) -> RunResult:
    """Execute ``cfg`` and write ``<table>.csv`` files plus ``manifest.json`` into ``out_dir``."""
    out = Path(out_dir or cfg.output or f"runs/{cfg.experiment}")
    out.mkdir(parents=True, exist_ok=True)
    t_start = time.perf_counter()
    axes, points = grid_points(cfg)
    results = execute(cfg, points, workers, probe)

    files = {}
    for table in EXPERIMENT_TABLES[cfg.experiment]:
        name = f"{table}.csv"
        n = write_table(out / name, axes, TABLE_COLUMNS[table], results, table)
        files[table] = {"file": name, "rows": n}

    summary: dict = {}
    if cfg.experiment in DEVIATION_AXIS:
        dev_tables, summary = _deviation(cfg, axes, results)
        shadow = [PointResult(index=r.index, point=r.point,
                              tables={"deviation": dev_tables[r.index]} if r.index in dev_tables else {})
                  for r in results]
        n = write_table(out / "deviation.csv", axes, TABLE_COLUMNS["deviation"], shadow, "deviation")
        files["deviation"] = {"file": "deviation.csv", "rows": n}
    elif cfg.experiment == "baseline-heatmap":
        summary = _heatmap_summary(results)
    elif cfg.experiment == "thermal-sweep":
        summary = _thermal_summary(results)
    elif cfg.experiment == "locking":
        summary = _locking_summary(results)
    elif cfg.experiment in ("witness-scan", "locking-witness"):
        summary = _witness_summary(results)
    elif cfg.experiment == "oracle-check":
        summary = _oracle_summary(results)

    exclusions = [
        {"point": r.index, "coords": r.point, "reason": r.reason, "detail": r.detail}
        for r in results if r.status != "ok"
    ]
    conv = None
    if probe:
        reports = [r.convergence for r in results if r.convergence is not None]
        conv = {
            "requested": True,
            "passed": bool(reports) and all(c["passed"] for c in reports),
            "worst": {
                key: max((c[key] for c in reports if c.get(key) is not None), default=None)
                for key in ("max_dEN", "max_dDB", "integrated")
            },
        }
    exit_code = EXIT_EXCLUSIONS if exclusions else EXIT_OK
    if cfg.experiment == "oracle-check" and summary.get("failed"):
        exit_code = EXIT_ERROR
    manifest = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "experiment": cfg.experiment,
        "code_version": __version__,
        "backend": backend_name(),
        "python": platform.python_version(),
        "config": cfg.raw,
        "resolved": {
            "generator": cfg.generator,
            "integrator": cfg.integrator.__dict__,
            "options": cfg.options,
            "axes": {a: [p[a] for p in points] if cfg.grid_mode == "zip" else
                     (cfg.grid.get(a) if a != "seed" else [p["seed"] for p in points])
                     for a in axes},
            "grid_mode": cfg.grid_mode,
        },
        "files": files,
        "points": [
            {
                "point": r.index,
                "coords": r.point,
                "status": r.status,
                "reason": r.reason,
                "mirrored": r.mirrored,
                "wall_time": r.wall_time,
                "summary": r.summary,
                "convergence": r.convergence,
            }
            for r in results
        ],
        "exclusions": exclusions,
        "convergence": conv or {"requested": False},
        "summary": summary,
        "wall_time_total": time.perf_counter() - t_start,
        "workers": workers,
        "exit_code": exit_code,
    }
    with open(out / MANIFEST_NAME, "w") as fh:
        json.dump(_jsonable(manifest), fh, indent=2, sort_keys=False)
        fh.write("\n")
    return RunResult(manifest, exit_code, out, results)


def default_workers() -> int:
    return max(1, (os.cpu_count() or 1))
