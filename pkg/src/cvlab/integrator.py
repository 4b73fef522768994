"""Adaptive Dormand-Prince 5(4) integration with dense output on a uniform grid.

The stepping loop is a single function that numba compiles when the
right-hand side is itself a compiled kernel; otherwise the same source runs
as plain Python.  Error control uses the max norm over the real and
imaginary parts of every component against the scale
``atol + rtol·max(|y|, |y_new|)`` built from the complex modulus.

Stiffness is declared after ``stiff_threshold`` consecutive rejected steps,
or after ``STIFF_HITS`` accepted steps whose stage-difference estimate of
``h·|λ|`` exceeds ``STIFF_HLAMBDA``.  The remaining interval is then handed
to scipy's Radau (an implicit single-step method) when ``stiff_fallback``
is on.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ._backend import backend_name, is_compiled, jit
from .errors import InvalidArgument, StiffnessFailure

# Dormand-Prince 5(4) tableau
DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
DP_A = np.array(
    [
        [0, 0, 0, 0, 0],
        [1 / 5, 0, 0, 0, 0],
        [3 / 40, 9 / 40, 0, 0, 0],
        [44 / 45, -56 / 15, 32 / 9, 0, 0],
        [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0],
        [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    ]
)
DP_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# difference between the 5th and embedded 4th order weights (7 stages, FSAL)
DP_E = np.array(
    [-71 / 57600, 0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40]
)
# continuous extension: y(t + θh) = y + h Σ_s k_s Σ_j P[s, j] θ^{j+1}
DP_P = np.array(
    [
        [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0, 0, 0, 0],
        [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
# stiffness test: h·|λ| estimated from the last two stages beyond the stability edge
STIFF_HLAMBDA = 3.25
STIFF_HITS = 15
STIFF_RESOLUTION = 1e-12

STATUS_DONE, STATUS_STIFF, STATUS_UNDERFLOW = 0, 1, 2


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and sampling for one trajectory.

    The default tolerances are the working-precision targets used for all
    production runs; :func:`convergence_probe` tightens them by 1e-2.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    horizon: float = 150.0
    sample_dt: float = 0.01
    max_step: float = 1.0
    stiff_fallback: bool = True
    stiff_threshold: int = 50

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise InvalidArgument("tolerances must be positive")
        if not (0 < self.sample_dt <= self.horizon):
            raise InvalidArgument("need 0 < sample_dt <= horizon")
        if not self.max_step > 0:
            raise InvalidArgument("max_step must be positive")
        if self.stiff_threshold < 1:
            raise InvalidArgument("stiff_threshold must be >= 1")

    @property
    def n_samples(self) -> int:
        return int(np.floor(self.horizon / self.sample_dt + 1e-9)) + 1

    def grid(self) -> np.ndarray:
        return np.arange(self.n_samples) * self.sample_dt


@dataclass
class Trajectory:
    """Sampled solution on a uniform grid.

    Attributes:
        times: sample times ``k·sample_dt``.
        states: complex array ``(n_samples, dim)``.
        step_stats: accepted/rejected step counts and solver bookkeeping.
        physicality_log: per-sample physicality arrays when a model is attached.
        model: the generator the states belong to, if any.
    """

    times: np.ndarray
    states: np.ndarray
    step_stats: dict
    physicality_log: dict | None = None
    model: object = None
    _quad: tuple | None = field(default=None, repr=False)

    def quadrature(self):
        """Reduced two-mode ``(R, σ)`` per sample (cached)."""
        if self.model is None:
            raise InvalidArgument("trajectory has no model attached")
        if self._quad is None:
            self._quad = self.model.reduced_quadrature(self.states)
        return self._quad


def _dp5_core(rhs, p, times, y0, i0, t0, rtol, atol, max_step, h_init,
              min_step, stiff_threshold, out, A, B, E, P):
    n_t = times.shape[0]
    t_end = times[n_t - 1]
    dim = y0.shape[0]
    y = y0.copy()
    t = t0
    K = np.empty((7, dim), dtype=np.complex128)
    ys = np.empty(dim, dtype=np.complex128)
    f = rhs(t, y, p)
    nfev = 1
    idx = i0
    while idx < n_t and times[idx] <= t:
        out[idx] = y
        idx += 1

    # initial step (Hairer-Wanner heuristic, max norm)
    h = h_init
    if h <= 0.0:
        d0 = 0.0
        d1 = 0.0
        for i in range(dim):
            sc = atol + rtol * abs(y[i])
            d0 = max(d0, abs(y[i].real) / sc, abs(y[i].imag) / sc)
            d1 = max(d1, abs(f[i].real) / sc, abs(f[i].imag) / sc)
        h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
        f1 = rhs(t + h0, y + h0 * f, p)
        nfev += 1
        d2 = 0.0
        for i in range(dim):
            sc = atol + rtol * abs(y[i])
            dfi = f1[i] - f[i]
            d2 = max(d2, abs(dfi.real) / sc, abs(dfi.imag) / sc)
        d2 /= h0
        if max(d1, d2) <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** 0.2
        h = min(100.0 * h0, h1)

    n_acc = 0
    n_rej = 0
    consec = 0
    hits = 0
    calm = 0
    status = STATUS_DONE
    while t < t_end:
        h = min(h, max_step)
        last = False
        if t + h >= t_end or t_end - (t + h) < 1e-12 * max(1.0, abs(t_end)):
            h = t_end - t
            last = True
        if h < min_step:
            status = STATUS_UNDERFLOW
            break
        K[0] = f
        for s in range(1, 6):
            for i in range(dim):
                acc_s = y[i]
                for j in range(s):
                    acc_s += (h * A[s, j]) * K[j, i]
                ys[i] = acc_s
            K[s] = rhs(t + DP_C_[s] * h, ys, p)
        y_new = np.empty_like(y)
        for i in range(dim):
            acc_s = y[i]
            for j in range(6):
                acc_s += (h * B[j]) * K[j, i]
            y_new[i] = acc_s
        t_new = t_end if last else t + h
        K[6] = rhs(t_new, y_new, p)
        nfev += 6
        err = 0.0
        for i in range(dim):
            e = 0j
            for j in range(7):
                e += E[j] * K[j, i]
            e *= h
            # complex modulus sets the scale for both interleaved real parts
            sc = atol + rtol * max(abs(y[i]), abs(y_new[i]))
            err = max(err, abs(e.real) / sc, abs(e.imag) / sc)
        if err <= 1.0:
            while idx < n_t and times[idx] <= t_new:
                if times[idx] >= t_new:
                    out[idx] = y_new
                else:
                    th = (times[idx] - t) / h
                    acc = y.copy()
                    for s in range(7):
                        q = th * (P[s, 0] + th * (P[s, 1] + th * (P[s, 2] + th * P[s, 3])))
                        if q != 0.0:
                            acc += (h * q) * K[s]
                    out[idx] = acc
                idx += 1
            if stiff_threshold > 0:
                num = 0.0
                den = 0.0
                ynorm = 0.0
                for i in range(dim):
                    num += abs(K[6, i] - K[5, i]) ** 2
                    den += abs(y_new[i] - ys[i]) ** 2
                    ynorm += abs(y_new[i]) ** 2
                # meaningful only above roundoff, and a step capped by max_step is not
                # limited by stability
                resolved = den > (STIFF_RESOLUTION ** 2) * ynorm and h < max_step
                if resolved and h * np.sqrt(num / den) > STIFF_HLAMBDA:
                    calm = 0
                    hits += 1
                    if hits >= STIFF_HITS:
                        t = t_new
                        y = y_new
                        n_acc += 1
                        status = STATUS_STIFF
                        break
                else:
                    calm += 1
                    if calm >= 6:
                        hits = 0
            t = t_new
            y = y_new
            f = K[6]
            n_acc += 1
            consec = 0
            if err == 0.0:
                fac = MAX_FACTOR
            else:
                fac = min(MAX_FACTOR, SAFETY * err ** -0.2)
            h = h * fac
        else:
            n_rej += 1
            consec += 1
            h = h * max(MIN_FACTOR, SAFETY * err ** -0.2)
            if stiff_threshold > 0 and consec >= stiff_threshold:
                status = STATUS_STIFF
                break
    return status, t, y, idx, n_acc, n_rej, nfev, h


DP_C_ = DP_C  # module-level alias read by the compiled loop

_dp5_compiled = jit(_dp5_core, cache=False)


def _as_kernel(rhs, params):
    """Normalise the right-hand side to ``(kernel, params, compiled?)``."""
    if hasattr(rhs, "rhs") and hasattr(rhs, "params"):
        return rhs.rhs, rhs.params, is_compiled(rhs.rhs), rhs
    if params is None:
        fn = rhs

        def wrapped(t, y, p):
            return np.asarray(fn(t, y), dtype=complex)

        return wrapped, np.zeros(1), False, None
    return rhs, np.asarray(params, dtype=float), is_compiled(rhs), None


def _radau_tail(kernel, p, times, idx, t, y, cfg, out):
    from scipy.integrate import solve_ivp

    dim = y.shape[0]

    def f(tt, z):
        d = kernel(tt, z[:dim] + 1j * z[dim:], p)
        return np.concatenate([d.real, d.imag])

    z0 = np.concatenate([y.real, y.imag])
    sol = solve_ivp(f, (t, times[-1]), z0, method="Radau", t_eval=times[idx:],
                    rtol=max(cfg.rel_tol, 1e-13), atol=cfg.abs_tol)
    if not sol.success:
        raise StiffnessFailure(f"implicit fallback failed: {sol.message}", t)
    out[idx:] = (sol.y[:dim] + 1j * sol.y[dim:]).T
    return sol.nfev


def integrate(rhs, y0, cfg: IntegratorConfig | None = None, params=None) -> Trajectory:
    """Integrate ``dy/dt = rhs(t, y[, p])`` from ``t = 0`` to ``cfg.horizon``.

    Args:
        rhs: a :class:`~cvlab.dynamics.Model`, a kernel ``f(t, y, p)`` used
            with ``params``, or any callable ``f(t, y)``.
        y0: initial complex state vector.
        cfg: integrator settings.
        params: packed parameters for kernel-style right-hand sides.

    Raises:
        StiffnessFailure: the step size fell below ``1e-14·horizon``.
    """
    cfg = cfg or IntegratorConfig()
    kernel, p, compiled, model = _as_kernel(rhs, params)
    y0 = np.ascontiguousarray(np.asarray(y0, dtype=complex).ravel())
    if not np.all(np.isfinite(y0)):
        raise InvalidArgument("initial state is not finite")
    times = cfg.grid()
    out = np.empty((times.size, y0.size), dtype=complex)
    core = _dp5_compiled if compiled else getattr(_dp5_compiled, "py_func", _dp5_compiled)
    threshold = cfg.stiff_threshold if cfg.stiff_fallback else 0
    min_step = 1e-14 * cfg.horizon
    status, t, y, idx, n_acc, n_rej, nfev, _ = core(
        kernel, p, times, y0, 0, 0.0, cfg.rel_tol, cfg.abs_tol, cfg.max_step, 0.0,
        min_step, threshold, out, DP_A, DP_B, DP_E, DP_P,
    )
    stats = {
        "accepted": int(n_acc),
        "rejected": int(n_rej),
        "rhs_evals": int(nfev),
        "stiff_switch_time": None,
        "backend": backend_name() if compiled else "python",
    }
    if status == STATUS_UNDERFLOW:
        raise StiffnessFailure(f"step size underflow at t={t:.6g}", t)
    if status == STATUS_STIFF:
        stats["stiff_switch_time"] = float(t)
        stats["rhs_evals"] += int(_radau_tail(kernel, p, times, idx, t, y, cfg, out))
    traj = Trajectory(times=times, states=out, step_stats=stats, model=model)
    if model is not None:
        from .gaussian import physicality_batch

        traj.physicality_log = physicality_batch(traj.quadrature()[1])
    return traj


# ---------------------------------------------------------------------------
# convergence probing

PROBE_THRESHOLDS = {"max_dEN": 1e-6, "max_dDB": 1e-6, "integrated": 1e-5}


@dataclass(frozen=True)
class ConvergenceReport:
    """Differences between a run and its refined rerun on the common grid."""

    max_dEN: float
    max_dDB: float
    integrated: float
    thresholds: dict = field(default_factory=lambda: dict(PROBE_THRESHOLDS))

    @property
    def passed(self) -> bool:
        return (
            self.max_dEN < self.thresholds["max_dEN"]
            and self.max_dDB < self.thresholds["max_dDB"]
            and self.integrated < self.thresholds["integrated"]
        )

    def as_dict(self) -> dict:
        return {
            "max_dEN": self.max_dEN,
            "max_dDB": self.max_dDB,
            "integrated": self.integrated,
            "passed": self.passed,
        }


def refined_config(cfg: IntegratorConfig) -> IntegratorConfig:
    """Halved sampling step and tolerances tightened by 1e-2."""
    return replace(
        cfg,
        sample_dt=0.5 * cfg.sample_dt,
        rel_tol=cfg.rel_tol * 1e-2,
        abs_tol=cfg.abs_tol * 1e-2,
    )


def _observables(traj: Trajectory):
    if traj.model is None:
        y = traj.states
        return y, y
    from .gaussian import antipodal_bures_batch, log_negativity_batch

    R, sigma = traj.quadrature()
    return log_negativity_batch(sigma), antipodal_bures_batch(R, sigma)


def compare_runs(coarse: Trajectory, fine: Trajectory) -> ConvergenceReport:
    """Compare two trajectories on the coarse grid (the fine grid must nest it)."""
    ratio = int(round((coarse.times[1] - coarse.times[0]) / (fine.times[1] - fine.times[0])))
    en_c, db_c = _observables(coarse)
    en_f, db_f = _observables(fine)
    en_f = en_f[::ratio][: len(en_c)]
    db_f = db_f[::ratio][: len(db_c)]
    d_en = np.abs(en_c - en_f)
    d_db = np.abs(db_c - db_f)
    if d_en.ndim > 1:
        d_en = d_en.max(axis=1)
        d_db = d_db.max(axis=1)
    integrated = float(np.trapezoid(d_en, coarse.times))
    return ConvergenceReport(float(d_en.max()), float(d_db.max()), integrated)


def convergence_probe(rhs, y0, cfg: IntegratorConfig | None = None, params=None,
                      reference: Trajectory | None = None) -> ConvergenceReport:
    """Rerun with halved sampling and tighter tolerances and report the change.

    For a model-backed right-hand side the monitored quantities are ``E_N``
    and the antipodal Bures distance; for a bare right-hand side they are
    the state components themselves.
    """
    cfg = cfg or IntegratorConfig()
    coarse = reference if reference is not None else integrate(rhs, y0, cfg, params)
    fine = integrate(rhs, y0, refined_config(cfg), params)
    return compare_runs(coarse, fine)
