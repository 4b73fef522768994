"""Gaussian states of two (or three) bosonic modes.

Conventions used throughout the package:

* quadratures ``x = (o + o†)/√2`` and ``p = -i(o - o†)/√2``, so the vacuum
  covariance is ``I/2``;
* quadrature ordering ``(x_1, ..., x_n, p_1, ..., p_n)`` with symplectic form
  ``J = [[0, I], [-I, 0]]``;
* a positive squeezing parameter ``s`` squeezes the ``x`` quadrature, i.e.
  ``Var(x) = e^{-2s}/2``.

Most functions accept a single state; the ``*_batch`` helpers work on stacks
of covariance matrices with a leading time axis and are what the trajectory
code uses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument, NonPhysicalState, NumericalDegeneracy

DEFAULT_DISPLACEMENT = np.sqrt(5.0) * np.exp(1j * np.pi / 4)

SYMMETRY_TOL = 1e-10
NU_TOL = 1e-4
EIGEN_FLOOR = 1e-4
COND_LIMIT = 1e12
# symplectic eigenvalues this close to 1/2 mark a pure state
PURE_TOL = 1e-10

# partial transpose on mode a: p_a -> -p_a
PT_A = np.diag([1.0, 1.0, -1.0, 1.0])


# ---------------------------------------------------------------------------
# value types


@dataclass(frozen=True)
class SqueezeSpec:
    """Product input state ``D(alpha)S(s_a) ⊗ D(beta)S(s_b)|0,0⟩``."""

    s_a: float
    s_b: float
    alpha: complex = DEFAULT_DISPLACEMENT
    beta: complex = DEFAULT_DISPLACEMENT

    def __post_init__(self):
        for name in ("s_a", "s_b", "alpha", "beta"):
            if not np.isfinite(getattr(self, name)):
                raise InvalidArgument(f"{name} must be finite")


@dataclass(frozen=True)
class LadderMoments:
    """First and second moments of the ladder operators of modes a and b.

    ``m_xy = ⟨x y⟩`` and ``n_xy = ⟨x† y⟩``. ``n_aa`` and ``n_bb`` are real.
    """

    mean_a: complex
    mean_b: complex
    m_aa: complex
    m_bb: complex
    m_ab: complex
    n_aa: float
    n_bb: float
    n_ab: complex

    def arrays(self):
        """Return ``(m, M, N)`` with ``M_ij = ⟨o_i o_j⟩`` and ``N_ij = ⟨o_i† o_j⟩``."""
        m = np.array([self.mean_a, self.mean_b], dtype=complex)
        M = np.array([[self.m_aa, self.m_ab], [self.m_ab, self.m_bb]], dtype=complex)
        N = np.array(
            [[self.n_aa, self.n_ab], [np.conj(self.n_ab), self.n_bb]], dtype=complex
        )
        return m, M, N

    @classmethod
    def from_arrays(cls, m, M, N) -> "LadderMoments":
        m = np.asarray(m)
        M = np.asarray(M)
        N = np.asarray(N)
        return cls(
            mean_a=complex(m[0]),
            mean_b=complex(m[1]),
            m_aa=complex(M[0, 0]),
            m_bb=complex(M[1, 1]),
            m_ab=complex(0.5 * (M[0, 1] + M[1, 0])),
            n_aa=float(N[0, 0].real),
            n_bb=float(N[1, 1].real),
            n_ab=complex(0.5 * (N[0, 1] + np.conj(N[1, 0]))),
        )


@dataclass(frozen=True)
class QuadratureState:
    """Mean vector ``R`` and covariance ``sigma`` in (x..., p...) ordering."""

    R: np.ndarray
    sigma: np.ndarray
    n_modes: int = field(init=False)

    def __post_init__(self):
        R = np.array(self.R, dtype=float)
        sigma = np.array(self.sigma, dtype=float)
        if R.ndim != 1 or R.size % 2 or sigma.shape != (R.size, R.size):
            raise InvalidArgument(
                f"shape mismatch: R {R.shape}, sigma {sigma.shape}"
            )
        R.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "n_modes", R.size // 2)

    @classmethod
    def vacuum(cls, n_modes: int = 2) -> "QuadratureState":
        return cls(np.zeros(2 * n_modes), 0.5 * np.eye(2 * n_modes))


@dataclass(frozen=True)
class PhysicalityReport:
    """Outcome of :func:`check_physical`.

    Attributes:
        is_symmetric: ``max|σ - σᵀ| <= 1e-10``.
        asymmetry: the value of ``max|σ - σᵀ|``.
        nu_min: smallest symplectic eigenvalue.
        min_eigen: smallest ordinary eigenvalue of ``σ``.
        bona_fide: ``σ + iJ/2 ⪰ 0`` within tolerance.
    """

    is_symmetric: bool
    asymmetry: float
    nu_min: float
    min_eigen: float
    bona_fide: bool

    @property
    def ok(self) -> bool:
        return (
            self.is_symmetric
            and self.bona_fide
            and self.nu_min >= 0.5 - NU_TOL
            and self.min_eigen >= EIGEN_FLOOR
        )


# ---------------------------------------------------------------------------
# construction and conversion


def symplectic_form(n_modes: int) -> np.ndarray:
    """Symplectic form ``[[0, I], [-I, 0]]`` for ``n_modes`` modes."""
    if int(n_modes) != n_modes or n_modes < 1:
        raise InvalidArgument(f"n_modes must be a positive integer, got {n_modes}")
    n = int(n_modes)
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def prepare_squeezed_coherent(spec: SqueezeSpec) -> LadderMoments:
    """Moments of the displaced single-mode squeezed product input.

    Per mode with squeezing ``s`` and displacement ``mu``:
    ``⟨o²⟩ = mu² - sinh(2s)/2`` and ``⟨o†o⟩ = |mu|² + sinh²(s)``.
    """
    a, b = complex(spec.alpha), complex(spec.beta)
    return LadderMoments(
        mean_a=a,
        mean_b=b,
        m_aa=a * a - 0.5 * np.sinh(2.0 * spec.s_a),
        m_bb=b * b - 0.5 * np.sinh(2.0 * spec.s_b),
        m_ab=a * b,
        n_aa=abs(a) ** 2 + np.sinh(spec.s_a) ** 2,
        n_bb=abs(b) ** 2 + np.sinh(spec.s_b) ** 2,
        n_ab=np.conj(a) * b,
    )


def ladder_to_quadrature(m, M, N):
    """Convert raw ladder moments to ``(R, sigma)``.

    Works on any number of modes and on stacked inputs: ``m`` has shape
    ``(..., n)``, ``M`` and ``N`` shape ``(..., n, n)``.  ``M`` is symmetrised
    and ``N`` Hermitised before use so the returned ``sigma`` is exactly
    symmetric.
    """
    m = np.asarray(m, dtype=complex)
    M = np.asarray(M, dtype=complex)
    N = np.asarray(N, dtype=complex)
    if not (np.all(np.isfinite(m)) and np.all(np.isfinite(M)) and np.all(np.isfinite(N))):
        raise InvalidArgument("non-finite moments")
    n = m.shape[-1]
    swap = lambda A: np.swapaxes(A, -1, -2)  # noqa: E731
    M = 0.5 * (M + swap(M))
    N = 0.5 * (N + swap(N).conj())
    Mc = M - m[..., :, None] * m[..., None, :]
    Nc = N - m.conj()[..., :, None] * m[..., None, :]

    half = 0.5 * np.eye(n)
    sxx = Mc.real + Nc.real + half
    spp = -Mc.real + Nc.real + half
    sxp = Mc.imag + Nc.imag
    sigma = np.empty(m.shape[:-1] + (2 * n, 2 * n))
    sigma[..., :n, :n] = sxx
    sigma[..., n:, n:] = spp
    sigma[..., :n, n:] = sxp
    sigma[..., n:, :n] = swap(sxp)
    R = np.sqrt(2.0) * np.concatenate([m.real, m.imag], axis=-1)
    return R, sigma


def moments_to_quadrature(m: LadderMoments) -> QuadratureState:
    R, sigma = ladder_to_quadrature(*m.arrays())
    return QuadratureState(R, sigma)


def bright_dark_transform(m: LadderMoments) -> LadderMoments:
    """Rotate to ``d± = (a ± b)/√2``; the result stores d+ as "a" and d- as "b".

    The rotation is real, symmetric and involutory, so applying it twice
    returns the input.
    """
    U = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    mv, M, N = m.arrays()
    return LadderMoments.from_arrays(U @ mv, U @ M @ U.T, U @ N @ U.T)


# ---------------------------------------------------------------------------
# spectra and physicality


def _require_symmetric(sigma: np.ndarray) -> None:
    scale = max(1.0, float(np.max(np.abs(sigma))))
    if np.max(np.abs(sigma - np.swapaxes(sigma, -1, -2))) > SYMMETRY_TOL * scale:
        raise InvalidArgument("covariance matrix is not symmetric")


def symplectic_spectrum(sigma) -> np.ndarray:
    """Symplectic eigenvalues of ``sigma`` in ascending order."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] % 2:
        raise InvalidArgument(f"bad covariance shape {sigma.shape}")
    _require_symmetric(sigma)
    return symplectic_spectrum_batch(sigma[None])[0]


def symplectic_spectrum_batch(sigma: np.ndarray) -> np.ndarray:
    """Symplectic eigenvalues for a stack ``(T, 2n, 2n)``, ascending per row.

    For positive ``σ = L Lᵀ`` the spectrum of ``iJσ`` equals that of the
    Hermitian matrix ``Lᵀ(iJ)L``, so a Hermitian solver resolves degenerate
    spectra to machine precision.  Stacks containing a non-positive matrix
    fall back to the general eigenvalue solver.
    """
    sigma = np.asarray(sigma, dtype=float)
    n = sigma.shape[-1] // 2
    J = symplectic_form(n)
    try:
        L = np.linalg.cholesky(0.5 * (sigma + np.swapaxes(sigma, -1, -2)))
    except np.linalg.LinAlgError:
        ev = np.abs(np.linalg.eigvals(1j * (J @ sigma)))
        ev.sort(axis=-1)
        # eigenvalues come in ± pairs, keep one of each
        return 0.5 * (ev[..., 0::2] + ev[..., 1::2])
    herm = 1j * (np.swapaxes(L, -1, -2) @ J @ L)
    ev = np.linalg.eigvalsh(herm)
    # ascending ±ν pairs: the upper half is +ν in ascending order
    return 0.5 * (ev[..., n:] - ev[..., n - 1::-1])


def check_physical(q: QuadratureState) -> PhysicalityReport:
    """Run the symmetry, symplectic, positivity and bona fide checks.

    This single-state path uses direct eigen-solves, including the Hermitian
    matrix ``σ + iJ/2``; :func:`physicality_batch` is the vectorised variant.
    """
    sigma = q.sigma
    asym = float(np.max(np.abs(sigma - sigma.T)))
    sym = 0.5 * (sigma + sigma.T)
    nu_min = float(symplectic_spectrum_batch(sym[None])[0, 0])
    min_eig = float(np.linalg.eigvalsh(sym)[0])
    herm_min = float(np.linalg.eigvalsh(sym + 0.5j * symplectic_form(q.n_modes))[0])
    return PhysicalityReport(
        is_symmetric=asym <= SYMMETRY_TOL,
        asymmetry=asym,
        nu_min=nu_min,
        min_eigen=min_eig,
        bona_fide=herm_min >= -NU_TOL,
    )


def physicality_batch(sigma: np.ndarray) -> dict:
    """Vectorised physicality checks over a stack of covariance matrices.

    Returns a dict of arrays with the fields of :class:`PhysicalityReport`
    plus ``ok``.  For positive ``σ``, ``σ + iJ/2 ⪰ 0`` is equivalent to
    ``ν_min >= 1/2``, which is how ``bona_fide`` is evaluated here.
    """
    sigma = np.asarray(sigma, dtype=float)
    n = sigma.shape[-1] // 2
    asym = np.max(np.abs(sigma - np.swapaxes(sigma, -1, -2)), axis=(-1, -2))
    sym = 0.5 * (sigma + np.swapaxes(sigma, -1, -2))
    nu_min = symplectic_spectrum_batch(sym)[..., 0]
    min_eig = np.linalg.eigvalsh(sym)[..., 0]
    is_sym = asym <= SYMMETRY_TOL
    bona = (min_eig > 0) & (nu_min >= 0.5 - NU_TOL)
    ok = is_sym & bona & (min_eig >= EIGEN_FLOOR)
    return {
        "is_symmetric": is_sym,
        "asymmetry": asym,
        "nu_min": nu_min,
        "min_eigen": min_eig,
        "bona_fide": bona,
        "ok": ok,
    }


# ---------------------------------------------------------------------------
# entanglement


def pt_nu_min(sigma) -> float:
    """Smallest symplectic eigenvalue of the partial transpose, by eigen-solve."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (4, 4):
        raise InvalidArgument("partial transpose is defined here for two modes")
    st = PT_A @ sigma @ PT_A
    return float(np.min(np.abs(np.linalg.eigvals(1j * symplectic_form(2) @ st))))


def pt_nu_min_batch(sigma: np.ndarray) -> np.ndarray:
    """Smallest PT symplectic eigenvalue for a stack of two-mode covariances.

    The partial transpose flips ``p_a``; the spectrum then comes from the
    Hermitian reduction of :func:`symplectic_spectrum_batch`, which stays
    exact where ``ν̃₊ = ν̃₋`` (product inputs, for instance).
    """
    s = np.asarray(sigma, dtype=float)
    return symplectic_spectrum_batch(PT_A @ s @ PT_A)[..., 0]


def en_from_nu(nu) -> np.ndarray:
    """``max(0, -ln 2ν̃₋)``."""
    return np.maximum(0.0, -np.log(2.0 * np.asarray(nu)))


def log_negativity(q: QuadratureState) -> float:
    """Logarithmic negativity of a physical two-mode Gaussian state."""
    if q.n_modes != 2:
        raise InvalidArgument("log_negativity needs a two-mode state")
    rep = check_physical(q)
    if not rep.ok:
        raise NonPhysicalState("state fails the physicality checks", rep)
    return float(en_from_nu(pt_nu_min(q.sigma)))


def log_negativity_batch(sigma: np.ndarray) -> np.ndarray:
    """E_N for a stack of two-mode covariances (no physicality gate)."""
    return en_from_nu(pt_nu_min_batch(sigma))


# ---------------------------------------------------------------------------
# fidelity and Bures geometry


def _checked_inverse_solve(S: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    if np.linalg.cond(S) > COND_LIMIT:
        raise NumericalDegeneracy("σ₁ + σ₂ is singular or badly conditioned")
    return np.linalg.solve(S, rhs)


def fidelity_prefactor(sigma1, sigma2) -> float:
    """Covariance-only factor ``F₀`` of the root fidelity.

    Auxiliary-matrix construction: with ``Σ = σ₁ + σ₂`` and
    ``V = Jᵀ Σ⁻¹ (J/4 + σ₂ J σ₁)``,
    ``F₀⁴ = det[2(sqrt(I + (VJ)^{-2}/4) + I) V] / det Σ``.
    The matrix square root is taken through the eigenvalues of ``VJ``.  When
    either state is pure the overlap form ``det(Σ)^{-1/4}`` is used instead;
    it avoids the cancellation in ``I + (VJ)^{-2}/4`` near purity.
    """
    s1 = np.asarray(sigma1, dtype=float)
    s2 = np.asarray(sigma2, dtype=float)
    n = s1.shape[0] // 2
    J = symplectic_form(n)
    S = s1 + s2
    if any(np.all(np.abs(symplectic_spectrum_batch(s[None])[0] - 0.5) <= PURE_TOL) for s in (s1, s2)):
        # one state pure: F₀² = Tr ρ₁ρ₂ at zero displacement = det(Σ)^{-1/2}
        _checked_inverse_solve(S, np.eye(2 * n))
        return float(np.linalg.det(S) ** -0.25)
    V = J.T @ _checked_inverse_solve(S, J / 4.0 + s2 @ J @ s1)
    mu = np.linalg.eigvals(V @ J)
    f = np.sqrt(1.0 + 0.25 / (mu * mu))
    ftot = (2.0 ** (2 * n)) * np.prod(1.0 + f) * np.linalg.det(V)
    val = ftot.real / np.linalg.det(S)
    return float(max(val, 0.0) ** 0.25)


def fidelity(q1: QuadratureState, q2: QuadratureState) -> float:
    """Root-Uhlmann fidelity ``F₀ exp(-¼ δᵀ(σ₁+σ₂)⁻¹δ)`` with ``δ = R₂ - R₁``."""
    if q1.n_modes != q2.n_modes:
        raise InvalidArgument("states have different numbers of modes")
    S = q1.sigma + q2.sigma
    d = q2.R - q1.R
    expo = 0.25 * float(d @ _checked_inverse_solve(S, d))
    f0 = fidelity_prefactor(q1.sigma, q2.sigma)
    return float(np.clip(f0 * np.exp(-expo), 0.0, 1.0))


def equal_covariance_fidelity(sigma: np.ndarray, R1, R2) -> float:
    """Fidelity when both states share ``sigma``: ``F₀ = 1`` exactly."""
    d = np.asarray(R2, dtype=float) - np.asarray(R1, dtype=float)
    S = 2.0 * np.asarray(sigma, dtype=float)
    return float(np.exp(-0.25 * float(d @ _checked_inverse_solve(S, d))))


def bures_distance(q1: QuadratureState, q2: QuadratureState) -> float:
    """``sqrt(2(1 - F))``."""
    return float(np.sqrt(max(0.0, 2.0 * (1.0 - fidelity(q1, q2)))))


def antipodal_bures_batch(R: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Bures distance between ``(R, σ)`` and ``(-R, σ)`` for a stack of states.

    Both states share the covariance, so ``F = exp(-½ Rᵀσ⁻¹R)``.
    """
    x = np.linalg.solve(sigma, R[..., None])[..., 0]
    f = np.exp(-0.5 * np.einsum("...i,...i->...", R, x))
    return np.sqrt(np.maximum(0.0, 2.0 * (1.0 - f)))


# ---------------------------------------------------------------------------
# Markovian steady state in closed form


def simon_threshold(s_fixed: float, branch: str = "positive"):
    """Partner squeezing at which the steady state stops being entangled.

    ``positive``: entangled iff ``e^{-2s_a} + e^{-2s_b} < 2``, returns ``t``
    such that the partner needs ``s > t``.  ``negative``: entangled iff
    ``e^{2s_a} + e^{2s_b} < 2``, partner needs ``s < t``.  Returns ``None``
    when the branch admits no entangled partner.
    """
    if not np.isfinite(s_fixed):
        raise InvalidArgument("s_fixed must be finite")
    if branch == "positive":
        arg = 2.0 - np.exp(-2.0 * s_fixed)
        return None if arg <= 0 else float(-0.5 * np.log(arg))
    if branch == "negative":
        arg = 2.0 - np.exp(2.0 * s_fixed)
        return None if arg <= 0 else float(0.5 * np.log(arg))
    raise InvalidArgument(f"unknown branch {branch!r}")


def steady_covariance(
    s_a: float,
    s_b: float,
    alpha: complex = DEFAULT_DISPLACEMENT,
    beta: complex = DEFAULT_DISPLACEMENT,
) -> QuadratureState:
    """Long-time Markov state at resonance: bright mode in vacuum, dark mode frozen."""
    em = np.exp(-2.0 * s_a) + np.exp(-2.0 * s_b)
    ep = np.exp(2.0 * s_a) + np.exp(2.0 * s_b)
    a_minus = np.array([[2.0 + em, 2.0 - em], [2.0 - em, 2.0 + em]])
    a_plus = np.array([[2.0 + ep, 2.0 - ep], [2.0 - ep, 2.0 + ep]])
    sigma = np.zeros((4, 4))
    sigma[:2, :2] = a_minus / 8.0
    sigma[2:, 2:] = a_plus / 8.0
    half = 0.5 * (complex(alpha) - complex(beta))
    m = np.array([half, -half])
    R = np.sqrt(2.0) * np.concatenate([m.real, m.imag])
    return QuadratureState(R, sigma)


def steady_symplectic_eigs(s_a: float, s_b: float, n_bar: float = 0.0):
    """Closed-form PT symplectic eigenvalues ``(ν̃₁, ν̃₂)`` of the steady state.

    ``ν̃₁ = sqrt(e^{2s_a}+e^{2s_b}) e^{-(s_a+s_b)} / (2√2)`` and
    ``ν̃₂ = sqrt(e^{2s_a}+e^{2s_b}) / (2√2)``, both multiplied by
    ``sqrt(1 + 2 n̄)`` for a thermal bath.
    """
    if n_bar < 0:
        raise InvalidArgument("n_bar must be non-negative")
    root = np.sqrt(np.exp(2.0 * s_a) + np.exp(2.0 * s_b)) / (2.0 * np.sqrt(2.0))
    scale = np.sqrt(1.0 + 2.0 * n_bar)
    return float(scale * root * np.exp(-(s_a + s_b))), float(scale * root)


def analytic_thermal_cutoff(s_a: float, s_b: float) -> float:
    """Occupation at which the rescaled spectrum reaches ``ν̃₋ = 1/2``.

    Returns 0 when the zero-temperature steady state is already separable.
    """
    nu = min(steady_symplectic_eigs(s_a, s_b, 0.0))
    if nu >= 0.5:
        return 0.0
    return float(0.5 * (0.25 / nu**2 - 1.0))
