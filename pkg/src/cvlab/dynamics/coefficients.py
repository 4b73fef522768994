"""Memory coefficients of the O₀ closure: Riccati flow, closed forms, freezing law."""

from __future__ import annotations

import numpy as np

from ..errors import InfeasibleFreezing, InvalidArgument, UnstableRegime
from .params import CoefficientState, FreezingSpec, OUKernel, SystemParams


def ou_kernel(t: float, s: float, k: OUKernel) -> complex:
    """Bath correlation ``α(t - s) = (γ/2) e^{-(γ + iΩ)(t - s)}``."""
    if t < s:
        raise InvalidArgument("ou_kernel needs t >= s")
    return complex(0.5 * k.gamma * np.exp(-(k.gamma + 1j * k.Omega) * (t - s)))


def riccati_rhs(
    F: CoefficientState, t: float, p: SystemParams, k: OUKernel
) -> CoefficientState:
    """Time derivative of ``(F₁, F₂)``.

    ``dF₁/dt = γ√κ/2 + (√κ(F₁+F₂) - (γ + iδ_AE)) F₁`` and the same for ``F₂``
    with ``δ_AE`` replaced by ``δ_AE - δ_AB(t)``.
    """
    rk = np.sqrt(p.kappa)
    g = k.gamma
    dab = float(p.drive(t))
    s = rk * (F.F1 + F.F2)
    d1 = 0.5 * g * rk + (s - (g + 1j * p.delta_AE)) * F.F1
    d2 = 0.5 * g * rk + (s - (g + 1j * (p.delta_AE - dab))) * F.F2
    return CoefficientState(complex(d1), complex(d2))


def riccati_jacobian(F: CoefficientState, t: float, p: SystemParams, k: OUKernel) -> np.ndarray:
    """Complex Jacobian of :func:`riccati_rhs` (the flow is holomorphic in F)."""
    rk = np.sqrt(p.kappa)
    c1 = k.gamma + 1j * p.delta_AE
    c2 = k.gamma + 1j * (p.delta_AE - float(p.drive(t)))
    return np.array(
        [
            [rk * (2 * F.F1 + F.F2) - c1, rk * F.F1],
            [rk * F.F2, rk * (F.F1 + 2 * F.F2) - c2],
        ]
    )


def _chi(gamma: float, delta_AE: float, kappa: float) -> complex:
    c = gamma + 1j * delta_AE
    chi = np.sqrt(complex(c * c - 4.0 * gamma * kappa))
    return -chi if chi.real < 0 else chi


def is_unstable_sector(gamma: float, delta_AE: float, kappa: float = 1.0) -> bool:
    """Double resonance with short memory, where the closure is refused."""
    return delta_AE == 0 and gamma / kappa < 4.0


def coefficient_steady_state(gamma: float, delta_AE: float, kappa: float = 1.0) -> complex:
    """``F∞ = (γ + iδ_AE - χ) / (4√κ)`` with ``Re χ > 0``."""
    if is_unstable_sector(gamma, delta_AE, kappa):
        raise UnstableRegime(
            f"no stable coefficient steady state at delta_AE=0, gamma/kappa={gamma / kappa:g} < 4"
        )
    chi = _chi(gamma, delta_AE, kappa)
    return complex((gamma + 1j * delta_AE - chi) / (4.0 * np.sqrt(kappa)))


def _tanh(z):
    # tanh without overflow for large |Re z|
    z = np.asarray(z, dtype=complex)
    flip = z.real < 0
    w = np.where(flip, -z, z)
    e = np.exp(-2.0 * w)
    out = (1.0 - e) / (1.0 + e)
    return np.where(flip, -out, out)


def coefficient_transient(t, gamma: float, delta_AE: float, kappa: float = 1.0):
    """Closed-form ``F(t)`` at resonance (``δ_AB = 0``, so ``F₁ = F₂``).

    ``F(t) = [(γ + iδ_AE) - χ tanh(χt/2 + φ)] / (4√κ)`` with
    ``tanh φ = (γ + iδ_AE)/χ``, which makes ``F(0) = 0`` on every branch of
    the inverse.  At ``χ = 0`` the rational limit
    ``c²t / (2√κ · 2(ct + 2))`` is used (``√κ·2κt/(1+2κt)`` for ``γ = 4κ``).
    """
    t_arr = np.asarray(t, dtype=float)
    c = gamma + 1j * delta_AE
    rk = np.sqrt(kappa)
    chi = np.sqrt(complex(c * c - 4.0 * gamma * kappa))
    if abs(chi) <= 1e-12 * max(1.0, abs(c)):
        out = c * c * t_arr / (2.0 * (c * t_arr + 2.0)) / (2.0 * rk)
        return complex(out) if out.ndim == 0 else out
    if chi.real < 0:
        chi = -chi
    if chi.real == 0:
        raise UnstableRegime("coefficient transient has no stable branch here")
    phi = np.arctanh(c / chi)
    out = (c - chi * _tanh(0.5 * chi * t_arr + phi)) / (4.0 * rk)
    if not np.all(np.isfinite(out)) or abs(c - chi * _tanh(phi)) > 1e-12 * abs(c):
        out = _numeric_transient(t_arr, gamma, delta_AE, kappa)
    return complex(out) if np.ndim(out) == 0 else out


def _numeric_transient(t, gamma, delta_AE, kappa):
    # fallback for points where the closed form is numerically ambiguous
    from scipy.integrate import solve_ivp

    rk = np.sqrt(kappa)
    c = gamma + 1j * delta_AE
    tt = np.atleast_1d(t)

    def f(_, y):
        F = y[0] + 1j * y[1]
        d = 0.5 * gamma * rk + (2.0 * rk * F - c) * F
        return [d.real, d.imag]

    sol = solve_ivp(
        f, (0.0, float(tt.max())), [0.0, 0.0], method="DOP853",
        t_eval=np.sort(tt), rtol=1e-12, atol=1e-14,
    )
    vals = sol.y[0] + 1j * sol.y[1]
    out = vals[np.argsort(np.argsort(tt))]
    return out.reshape(np.shape(t))


def freezing_delta_star(gamma: float, t_n: float = 10.0, n: float = 100.0, kappa: float = 1.0) -> float:
    """Critical detuning at which the moments decay to ``1/n`` after ``t_n``.

    ``δ* = sqrt(2κ t_n [1/(2t_nγ - ln n) + 1/ln n] - 1) · (t_nγ - ln n)/t_n``.
    It solves ``Re F∞(γ, δ*) = ln n / (4√κ t_n)``.
    """
    L = np.log(n)
    if not (t_n > 0 and n > 1 and gamma > 0):
        raise InfeasibleFreezing("need t_n > 0, n > 1 and gamma > 0")
    if t_n * gamma <= L:
        raise InfeasibleFreezing(
            f"t_n*gamma = {t_n * gamma:g} must exceed ln n = {L:g}"
        )
    rad = 2.0 * kappa * t_n * (1.0 / (2.0 * t_n * gamma - L) + 1.0 / L) - 1.0
    if rad <= 0:
        raise InfeasibleFreezing("critical detuning is not real for these parameters")
    return float(np.sqrt(rad) * (t_n * gamma - L) / t_n)


def freezing_gamma_bound(spec: FreezingSpec) -> float:
    """Memory bound ``γ > ln n / t_n + ln n_s / t_s``."""
    return float(np.log(spec.n) / spec.t_n + np.log(spec.n_s) / spec.t_s)


def coefficient_decay_ok(gamma: float, delta_AE: float, spec: FreezingSpec, kappa: float = 1.0) -> bool:
    """Whether the coefficients relax by ``1/n_s`` within ``t_s``: ``e^{-Re χ t_s} <= 1/n_s``."""
    chi = _chi(gamma, delta_AE, kappa)
    return bool(np.exp(-chi.real * spec.t_s) <= 1.0 / spec.n_s)
