"""Time-series diagnostics: E_N(t), antipodal Bures series, witness, averages, deviations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .errors import InvalidArgument
from .gaussian import (
    LadderMoments,
    QuadratureState,
    fidelity,
    ladder_to_quadrature,
    log_negativity_batch,
    pt_nu_min_batch,
)
from .integrator import Trajectory

DEVIATION_FLOOR = 0.01
# relative covariance mismatch below which a probe pair counts as equal-covariance
EQUAL_COV_TOL = 1e-9


@dataclass(frozen=True)
class WitnessConfig:
    """Antipodal probe means ``±R₀``; ``None`` takes R₀ from the input state."""

    base_mean: np.ndarray | None = None
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise InvalidArgument("sign must be +1 or -1")


@dataclass(frozen=True)
class DeviationCurve:
    """``|ΔE_N / E_N^baseline| × 100`` on the common grid, NaN where masked."""

    times: np.ndarray
    percent: np.ndarray
    floor: float

    @property
    def mask(self) -> np.ndarray:
        return np.isfinite(self.percent)

    def max_in(self, t0: float = -np.inf, t1: float = np.inf) -> float:
        """Largest unmasked deviation with ``t0 <= t <= t1`` (NaN if none)."""
        sel = self.mask & (self.times >= t0) & (self.times <= t1)
        return float(np.max(self.percent[sel])) if np.any(sel) else float("nan")


def en_series(traj: Trajectory) -> np.ndarray:
    """E_N at every sample of a model-backed trajectory.

    Samples that fail the physicality checks are still evaluated; they are
    flagged in ``traj.physicality_log["ok"]``.
    """
    return log_negativity_batch(traj.quadrature()[1])


def nu_tilde_series(traj: Trajectory) -> np.ndarray:
    """Smallest PT symplectic eigenvalue at every sample."""
    return pt_nu_min_batch(traj.quadrature()[1])


def antipodal_pair(initial: LadderMoments, cfg: WitnessConfig | None = None):
    """Two probes sharing the centred second moments of ``initial`` with means ``±R₀``."""
    cfg = cfg or WitnessConfig()
    m, M, N = initial.arrays()
    Mc = M - np.outer(m, m)
    Nc = N - np.outer(m.conj(), m)
    if cfg.base_mean is None:
        m0 = m
    else:
        R0 = np.asarray(cfg.base_mean, dtype=float)
        if R0.shape != (4,):
            raise InvalidArgument("base_mean must have length 4")
        m0 = (R0[:2] + 1j * R0[2:]) / np.sqrt(2.0)

    def probe(mu):
        return LadderMoments.from_arrays(mu, Mc + np.outer(mu, mu), Nc + np.outer(mu.conj(), mu))

    plus, minus = probe(cfg.sign * m0), probe(-cfg.sign * m0)
    return plus, minus


def bures_series(traj_pair) -> np.ndarray:
    """Bures distance between two trajectories sample by sample."""
    t1, t2 = traj_pair
    if t1.times.shape != t2.times.shape or np.max(np.abs(t1.times - t2.times)) > 1e-12:
        raise InvalidArgument("trajectories are not on the same grid")
    R1, s1 = t1.quadrature()
    R2, s2 = t2.quadrature()
    scale = max(1.0, float(np.max(np.abs(s1))))
    if np.max(np.abs(s1 - s2)) <= EQUAL_COV_TOL * scale:
        S = s1 + s2
        d = R2 - R1
        x = np.linalg.solve(S, d[..., None])[..., 0]
        f = np.exp(-0.25 * np.einsum("ti,ti->t", d, x))
    else:
        f = np.array([
            fidelity(QuadratureState(R1[k], s1[k]), QuadratureState(R2[k], s2[k]))
            for k in range(len(t1.times))
        ])
    return np.sqrt(np.maximum(0.0, 2.0 * (1.0 - f)))


def witness_from_series(db: np.ndarray) -> float:
    """Sum of the positive sample-to-sample increments of ``D_B``."""
    inc = np.diff(np.asarray(db, dtype=float))
    return float(np.sum(inc[inc > 0]))


def witness_N(traj_pair) -> float:
    """Integrated backflow witness of an antipodal trajectory pair."""
    return witness_from_series(bures_series(traj_pair))


def time_avg_en(series, T: float, times) -> float:
    """``(1/T) ∫₀ᵀ E_N dt`` by the trapezoidal rule on the sampling grid."""
    times = np.asarray(times, dtype=float)
    series = np.asarray(series, dtype=float)
    if T <= 0 or T > times[-1] + 1e-12:
        raise InvalidArgument("averaging window must satisfy 0 < T <= horizon")
    sel = times <= T + 1e-12
    return float(np.trapezoid(series[sel], times[sel]) / T)


def relative_deviation(test, baseline, floor: float = DEVIATION_FLOOR, times=None) -> DeviationCurve:
    """Percent deviation of ``test`` from ``baseline`` where the baseline exceeds ``floor``."""
    test = np.asarray(test, dtype=float)
    baseline = np.asarray(baseline, dtype=float)
    if test.shape != baseline.shape:
        raise InvalidArgument("series are not on a common grid")
    times = np.arange(test.size, dtype=float) if times is None else np.asarray(times, dtype=float)
    pct = np.full(test.shape, np.nan)
    ok = baseline > floor
    pct[ok] = np.abs(test[ok] - baseline[ok]) / baseline[ok] * 100.0
    return DeviationCurve(times, pct, float(floor))


def prominent_maxima(series, times, height: float, prominence: float = 0.1):
    """Times and values of local maxima above ``height`` with the given prominence."""
    idx, _ = find_peaks(np.asarray(series), height=height, prominence=prominence)
    return np.asarray(times)[idx], np.asarray(series)[idx]


def separability_onset(x, values, zero_tol: float = 1e-8):
    """First grid value after which ``values`` stay at or below ``zero_tol``."""
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=float)
    above = np.nonzero(values > zero_tol)[0]
    if above.size == 0:
        return float(x[0])
    last = above[-1]
    return float(x[last + 1]) if last + 1 < x.size else None


def quadrature_from_ladder(m: LadderMoments) -> QuadratureState:
    R, s = ladder_to_quadrature(*m.arrays())
    return QuadratureState(R, s)
