"""Per-grid-point evaluation for every experiment kind.

Each experiment maps one grid point to a :class:`PointResult` holding
column tables (merged into CSV files by the runner), per-point summary
values and, optionally, a convergence report.  Workers call
:func:`evaluate_point` with the raw configuration document so nothing
unpicklable crosses process boundaries.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from ..diagnostics import (
    WitnessConfig,
    antipodal_pair,
    bures_series,
    prominent_maxima,
    time_avg_en,
    witness_from_series,
)
from ..dynamics import (
    DetuningDrive,
    OUKernel,
    SystemParams,
    ThermalBath,
    build_model,
    freezing_delta_star,
    stationary_weight,
)
from ..errors import (
    InfeasibleFreezing,
    NumericalDegeneracy,
    StiffnessFailure,
    UnstableRegime,
)
from ..gaussian import (
    SqueezeSpec,
    antipodal_bures_batch,
    log_negativity_batch,
    prepare_squeezed_coherent,
    pt_nu_min_batch,
    steady_symplectic_eigs,
)
from ..integrator import Trajectory, convergence_probe, integrate
from .config import ExperimentConfig, from_dict

log = logging.getLogger(__name__)

TRAJECTORY_EXPERIMENTS = (
    "baseline-trajectories",
    "freezing",
    "freezing-thermal",
    "revivals",
    "beating",
    "beating-thermal",
)
FINAL_STATE_EXPERIMENTS = ("baseline-heatmap", "thermal-sweep")
WITNESS_EXPERIMENTS = ("witness-scan", "locking-witness")
EXPERIMENT_TABLES = {
    **{name: ("trajectories", "points") for name in TRAJECTORY_EXPERIMENTS},
    "baseline-heatmap": ("heatmap",),
    "thermal-sweep": ("sweep",),
    "witness-scan": ("witness",),
    "locking-witness": ("witness",),
    "locking": ("locking",),
    "oracle-check": ("oracle",),
}
TRAJECTORY_COLUMNS = ("t", "E_N", "D_B", "nu_tilde", "is_symmetric", "bona_fide", "phys_ok")
POINT_COLUMNS = ("delta_AE_used", "max_E_N", "t_max_E_N", "final_E_N", "time_avg_E_N",
                 "n_maxima", "witness_N")
HEATMAP_COLUMNS = ("E_N_final", "nu_tilde_final", "E_N_closed_form", "phys_ok")
WITNESS_COLUMNS = ("witness_N", "max_E_N", "time_avg_E_N", "D_B_initial", "D_B_final")
LOCKING_COLUMNS = ("time_avg_E_N", "max_E_N", "final_E_N", "stationary_weight")
ORACLE_COLUMNS = ("generator", "n_bar", "s_a", "s_b", "alpha_re", "alpha_im", "beta_re",
                  "beta_im", "delta_AB", "delta_AE", "gamma", "cutoffs", "max_abs_dEN",
                  "max_E_N", "leakage", "passed", "error")


class PointExcluded(Exception):
    """A grid point that cannot be evaluated; carries a short reason code."""

    def __init__(self, reason: str, detail: str):
        super().__init__(f"{reason}: {detail}")
        self.reason = reason
        self.detail = detail


@dataclass
class PointResult:
    """Everything one grid point contributes to the run output."""

    index: int
    point: dict
    status: str = "ok"
    reason: str | None = None
    detail: str | None = None
    tables: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    convergence: dict | None = None
    wall_time: float = 0.0
    mirrored: bool = False


@dataclass(frozen=True)
class Setup:
    """Physical parameters resolved for one grid point."""

    generator: str
    system: SystemParams
    kernel: OUKernel
    bath: ThermalBath
    spec: SqueezeSpec


@lru_cache(maxsize=8)
def _cached_config(doc_json: str) -> ExperimentConfig:
    return from_dict(json.loads(doc_json))


def resolve_point(cfg: ExperimentConfig, point: dict, conjugate: bool = False) -> Setup:
    """Apply grid-axis overrides to the base configuration.

    With ``conjugate`` the point is replaced by its sign-symmetric partner:
    all detunings change sign and the displacements are complex-conjugated.
    E_N and every Bures distance are unchanged by this map.
    """
    generator = point.get("generator", cfg.generator)
    drive = cfg.system.drive
    if "delta_AB" in point:
        drive = DetuningDrive("constant", float(point["delta_AB"]))
    if "delta0" in point or "omega_mod" in point:
        kind = "sinusoidal" if cfg.experiment in ("beating", "locking", "locking-witness",
                                                  "beating-thermal") else drive.kind
        drive = DetuningDrive(kind, float(point.get("delta0", drive.delta0)),
                              float(point.get("omega_mod", drive.omega_mod)))
    gamma = float(point.get("gamma", cfg.kernel.gamma))
    kappa = cfg.system.kappa
    if "delta_AE" in point:
        delta_AE = float(point["delta_AE"])
    elif cfg.experiment in ("freezing", "freezing-thermal"):
        fs = cfg.freezing_spec()
        delta_AE = freezing_delta_star(gamma, fs.t_n, fs.n, kappa)
    else:
        delta_AE = cfg.system.delta_AE
    spec = replace(
        cfg.input,
        s_a=float(point.get("s_a", cfg.input.s_a)),
        s_b=float(point.get("s_b", cfg.input.s_b)),
    )
    if conjugate:
        drive = DetuningDrive(drive.kind, -drive.delta0, drive.omega_mod)
        delta_AE = -delta_AE
        spec = replace(spec, alpha=np.conj(spec.alpha), beta=np.conj(spec.beta))
    return Setup(
        generator,
        SystemParams(kappa, drive, delta_AE),
        OUKernel(gamma, cfg.kernel.Omega),
        ThermalBath(float(point.get("n_bar", cfg.bath.n_bar))),
        spec,
    )


def effective_delta_AE(cfg: ExperimentConfig, point: dict) -> float:
    return resolve_point(cfg, point).system.delta_AE


def _model(setup: Setup):
    kernel = setup.kernel if setup.generator != "markov" else None
    try:
        return build_model(setup.generator, setup.system, kernel, setup.bath)
    except UnstableRegime as exc:
        raise PointExcluded("unstable-regime", str(exc)) from exc


def _run(model, y0, icfg) -> Trajectory:
    try:
        traj = integrate(model, y0, icfg)
    except StiffnessFailure as exc:
        raise PointExcluded("stiffness-failure", str(exc)) from exc
    if traj.step_stats["stiff_switch_time"] is not None:
        log.warning("implicit fallback from t=%.6g", traj.step_stats["stiff_switch_time"])
    ok = traj.physicality_log["ok"]
    if not np.all(ok):
        k = int(np.argmin(ok))
        raise PointExcluded(
            "unphysical",
            f"physicality check failed at t={traj.times[k]:.6g} "
            f"(nu_min={traj.physicality_log['nu_min'][k]:.6g}, "
            f"min_eigen={traj.physicality_log['min_eigen'][k]:.6g})",
        )
    return traj


def _probe_base(cfg: ExperimentConfig, setup: Setup, conjugate: bool):
    """Initial moments of the ``+R₀`` probe (``None`` when it equals the input)."""
    base = cfg.options["witness_base_mean"]
    if base is None:
        return None
    R0 = np.asarray(base, dtype=float)
    if conjugate:
        R0 = R0 * np.array([1.0, 1.0, -1.0, -1.0])
    return antipodal_pair(prepare_squeezed_coherent(setup.spec), WitnessConfig(R0))[0]


def _trajectory_observables(cfg, setup, model, traj, conjugate):
    R, sigma = traj.quadrature()
    en = log_negativity_batch(sigma)
    nu = pt_nu_min_batch(sigma)
    probe = _probe_base(cfg, setup, conjugate)
    if probe is None:
        db = antipodal_bures_batch(R, sigma)
    else:
        ptraj = _run(model, model.initial_vector(probe), cfg.integrator)
        Rp, sp_ = ptraj.quadrature()
        db = antipodal_bures_batch(Rp, sp_)
    return en, nu, db


def _probe_convergence(cfg, model, y0, traj):
    try:
        return convergence_probe(model, y0, cfg.integrator, reference=traj).as_dict()
    except (StiffnessFailure, NumericalDegeneracy) as exc:
        return {"max_dEN": None, "max_dDB": None, "integrated": None, "passed": False,
                "error": str(exc)}


def _window(cfg: ExperimentConfig) -> float:
    T = cfg.options["average_window"]
    return cfg.integrator.horizon if T is None else float(T)


# ---------------------------------------------------------------------------
# experiment handlers


def _trajectory_point(cfg, point, res, probe, conjugate):
    setup = resolve_point(cfg, point, conjugate)
    model = _model(setup)
    y0 = model.initial_vector(prepare_squeezed_coherent(setup.spec))
    traj = _run(model, y0, cfg.integrator)
    en, nu, db = _trajectory_observables(cfg, setup, model, traj, conjugate)
    log = traj.physicality_log
    stride = cfg.options["output_stride"]
    if cfg.options["store_trajectories"]:
        sel = slice(None, None, stride)
        res.tables["trajectories"] = {
            "t": traj.times[sel],
            "E_N": en[sel],
            "D_B": db[sel],
            "nu_tilde": nu[sel],
            "is_symmetric": log["is_symmetric"][sel],
            "bona_fide": log["bona_fide"][sel],
            "phys_ok": log["ok"][sel],
        }
    tmax, _ = prominent_maxima(en, traj.times, cfg.options["maxima_height"],
                               cfg.options["maxima_prominence"])
    k = int(np.argmax(en))
    delta_AE = setup.system.delta_AE * (-1.0 if conjugate else 1.0)
    summary = {
        "delta_AE_used": delta_AE,
        "max_E_N": float(en[k]),
        "t_max_E_N": float(traj.times[k]),
        "final_E_N": float(en[-1]),
        "time_avg_E_N": time_avg_en(en, _window(cfg), traj.times),
        "n_maxima": int(tmax.size),
        "witness_N": witness_from_series(db),
    }
    res.tables["points"] = {key: np.array([val]) for key, val in summary.items()}
    res.summary = {**summary, "maxima_times": [float(x) for x in tmax]}
    res.series = {"t": traj.times, "E_N": en}
    if probe:
        res.convergence = _probe_convergence(cfg, model, y0, traj)


def _final_state_point(cfg, point, res, probe, conjugate):
    setup = resolve_point(cfg, point, conjugate)
    model = _model(setup)
    y0 = model.initial_vector(prepare_squeezed_coherent(setup.spec))
    traj = _run(model, y0, cfg.integrator)
    _, sigma = traj.quadrature()
    en = log_negativity_batch(sigma[-1:])[0]
    nu = pt_nu_min_batch(sigma[-1:])[0]
    closed = float("nan")
    if setup.generator == "markov" and setup.system.drive.delta0 == 0:
        nus = steady_symplectic_eigs(setup.spec.s_a, setup.spec.s_b, setup.bath.n_bar)
        closed = float(max(0.0, -np.log(2.0 * min(nus))))
    table = "heatmap" if cfg.experiment == "baseline-heatmap" else "sweep"
    res.tables[table] = {
        "E_N_final": np.array([en]),
        "nu_tilde_final": np.array([nu]),
        "E_N_closed_form": np.array([closed]),
        "phys_ok": np.array([True]),
    }
    res.summary = {"E_N_final": float(en), "nu_tilde_final": float(nu), "E_N_closed_form": closed}
    if probe:
        res.convergence = _probe_convergence(cfg, model, y0, traj)


def _witness_point(cfg, point, res, probe, conjugate):
    setup = resolve_point(cfg, point, conjugate)
    model = _model(setup)
    initial = prepare_squeezed_coherent(setup.spec)
    base = cfg.options["witness_base_mean"]
    wcfg = WitnessConfig(None if base is None else np.asarray(base, float)
                         * (np.array([1.0, 1.0, -1.0, -1.0]) if conjugate else 1.0))
    plus, minus = antipodal_pair(initial, wcfg)
    tp = _run(model, model.initial_vector(plus), cfg.integrator)
    tm = _run(model, model.initial_vector(minus), cfg.integrator)
    db = bures_series((tp, tm))
    en = log_negativity_batch(tp.quadrature()[1])
    N = witness_from_series(db)
    row = {
        "witness_N": N,
        "max_E_N": float(np.max(en)),
        "time_avg_E_N": time_avg_en(en, _window(cfg), tp.times),
        "D_B_initial": float(db[0]),
        "D_B_final": float(db[-1]),
    }
    res.tables["witness"] = {k: np.array([v]) for k, v in row.items()}
    res.summary = row
    if probe:
        res.convergence = _probe_convergence(cfg, model, model.initial_vector(plus), tp)


def _locking_point(cfg, point, res, probe, conjugate):
    setup = resolve_point(cfg, point, conjugate)
    model = _model(setup)
    y0 = model.initial_vector(prepare_squeezed_coherent(setup.spec))
    traj = _run(model, y0, cfg.integrator)
    en = log_negativity_batch(traj.quadrature()[1])
    drive = setup.system.drive
    row = {
        "time_avg_E_N": time_avg_en(en, _window(cfg), traj.times),
        "max_E_N": float(np.max(en)),
        "final_E_N": float(en[-1]),
        "stationary_weight": stationary_weight(drive.delta0, drive.omega_mod),
    }
    res.tables["locking"] = {k: np.array([v]) for k, v in row.items()}
    res.summary = row
    if probe:
        res.convergence = _probe_convergence(cfg, model, y0, traj)


def _oracle_point(cfg, point, res, probe, conjugate):
    from ..fock import FockConfig, oracle_seed

    seed = int(point["seed"])
    fcfg = FockConfig(cutoff_per_mode=cfg.options["oracle_cutoff"])
    comps = oracle_seed(seed, fcfg, horizon=float(cfg.options["oracle_horizon"]))
    cols = {c: [] for c in ORACLE_COLUMNS}
    for c in comps:
        d = c.as_dict()
        cols["generator"].append(d["generator"])
        cols["n_bar"].append(d["n_bar"])
        cols["s_a"].append(d["s_a"])
        cols["s_b"].append(d["s_b"])
        cols["alpha_re"].append(d["alpha"][0])
        cols["alpha_im"].append(d["alpha"][1])
        cols["beta_re"].append(d["beta"][0])
        cols["beta_im"].append(d["beta"][1])
        cols["delta_AB"].append(d["delta_AB"])
        cols["delta_AE"].append(d.get("delta_AE", float("nan")))
        cols["gamma"].append(d.get("gamma", float("nan")))
        cols["cutoffs"].append("x".join(str(x) for x in d["cutoffs"]))
        cols["max_abs_dEN"].append(d["max_abs_dEN"])
        cols["max_E_N"].append(d["max_EN"])
        cols["leakage"].append(d["leakage"])
        cols["passed"].append(d["passed"])
        cols["error"].append(d["error"] or "")
    res.tables["oracle"] = {k: np.array(v, dtype=object) for k, v in cols.items()}
    res.summary = {"comparisons": [c.as_dict() for c in comps]}
    voided = [c for c in comps if c.error is not None]
    if voided:
        raise PointExcluded("leakage-breach", "; ".join(c.error for c in voided))


HANDLERS = {
    **{name: _trajectory_point for name in TRAJECTORY_EXPERIMENTS},
    **{name: _final_state_point for name in FINAL_STATE_EXPERIMENTS},
    **{name: _witness_point for name in WITNESS_EXPERIMENTS},
    "locking": _locking_point,
    "oracle-check": _oracle_point,
}


def evaluate_point(doc_json: str, index: int, point: dict, probe: bool = False,
                   conjugate: bool = False) -> PointResult:
    """Evaluate one grid point; exclusions are captured, never raised."""
    cfg = _cached_config(doc_json)
    res = PointResult(index=index, point=dict(point), mirrored=conjugate)
    start = time.perf_counter()
    try:
        HANDLERS[cfg.experiment](cfg, point, res, probe, conjugate)
    except PointExcluded as exc:
        res.status, res.reason, res.detail = "excluded", exc.reason, exc.detail
        res.tables = {}
    except InfeasibleFreezing as exc:
        res.status, res.reason, res.detail = "excluded", "infeasible-freezing", str(exc)
        res.tables = {}
    except NumericalDegeneracy as exc:
        res.status, res.reason, res.detail = "excluded", "numerical-degeneracy", str(exc)
        res.tables = {}
    res.wall_time = time.perf_counter() - start
    return res
