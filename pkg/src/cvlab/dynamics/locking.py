"""Harmonic decomposition of the sinusoidally modulated detuning."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import jv

from ..errors import InvalidArgument
from .params import DetuningDrive

COMMENSURATE_TOL = 1e-9


@dataclass(frozen=True)
class Harmonic:
    """One Jacobi-Anger term ``J_k(x) e^{i(kω ± δ₀)t}``."""

    k: int
    weight: float
    offset: float


@dataclass(frozen=True)
class HarmonicSet:
    """Weights for both signs of the phase and the locking verdict."""

    plus: tuple[Harmonic, ...]
    minus: tuple[Harmonic, ...]
    commensurate: bool
    stationary_k: int | None


def jacobi_anger_weights(delta0: float, omega_mod: float, k_range=(-10, 10)) -> HarmonicSet:
    """Expand ``e^{±i∫δ_AB}`` into harmonics of the modulation frequency.

    With ``x = δ₀/ω``, ``e^{∓ix cos ωt} = Σ_k (∓i)^k J_k(x) e^{ikωt}``, so the
    real weights are ``J_k(∓x)`` up to the unit phase and each term rotates
    at ``kω ± δ₀``.  A term is stationary when ``kω ± δ₀ = 0``, which needs
    ``δ₀/ω ∈ ℤ``.
    """
    if not omega_mod > 0:
        raise InvalidArgument("omega_mod must be positive")
    lo, hi = int(k_range[0]), int(k_range[1])
    ks = np.arange(lo, hi + 1)
    x = delta0 / omega_mod
    plus = tuple(Harmonic(int(k), float(jv(k, -x)), float(k * omega_mod + delta0)) for k in ks)
    minus = tuple(Harmonic(int(k), float(jv(k, x)), float(k * omega_mod - delta0)) for k in ks)
    nearest = round(x)
    commensurate = abs(x - nearest) <= COMMENSURATE_TOL
    stationary = abs(int(nearest)) if commensurate and lo <= -abs(nearest) and abs(nearest) <= hi else None
    if delta0 == 0:
        stationary = 0
    return HarmonicSet(plus, minus, commensurate, stationary)


def stationary_weight(delta0: float, omega_mod: float = 1.0) -> float:
    """Magnitude of the non-rotating harmonic, zero when off-lattice."""
    hs = jacobi_anger_weights(delta0, omega_mod, (-64, 64))
    if hs.stationary_k is None:
        return 0.0
    for h in hs.plus:
        if abs(h.offset) < 1e-9:
            return abs(h.weight)
    return 0.0


def phase_accumulation(t, drive: DetuningDrive, sign: int = 1):
    """``exp(±i ∫₀ᵗ δ_AB(s) ds)`` in closed form."""
    t = np.asarray(t, dtype=float)
    if drive.kind == "constant":
        integral = drive.delta0 * t
    else:
        w = drive.omega_mod
        integral = drive.delta0 * t + (drive.delta0 / w) * (1.0 - np.cos(w * t))
    out = np.exp(1j * sign * integral)
    return complex(out) if out.ndim == 0 else out
