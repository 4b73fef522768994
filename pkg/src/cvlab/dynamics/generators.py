"""Linear moment generators for the three reservoir models.

Every model propagates raw ladder moments ``m = ⟨o⟩``, ``M = ⟨o oᵀ⟩`` and
``N = ⟨o† oᵀ⟩`` (entry ``ij`` is ``⟨o_i† o_j⟩``).  All three generators share
the form

    dm/dt = -K m
    dM/dt = -K M - M Kᵀ
    dN/dt = -K* N - N Kᵀ + D

and differ only in the drift ``K`` and the diffusion ``D``:

* ``markov``: collective jump ``√κ(a + b)``, optional thermal absorption.
  ``K = (κ/2)[[1, 1], [1, 1]] + diag(0, iδ_AB)``, ``D = κ n̄ [[1, 1], [1, 1]]``.
* ``o0``: memory closure with time-dependent coefficients,
  ``K = √κ [[F₁, F₂], [F₁, F₂]] + diag(0, iδ_AB)``, ``D = 0``.  The
  coefficients are integrated alongside the moments.
* ``pseudomode``: auxiliary mode ``c`` with coupling ``g = √(γ/2)``,
  ``K = [[0, 0, ig√κ], [0, iδ_AB, ig√κ], [ig√κ, ig√κ, γ + iδ_AE]]`` and
  ``D = diag(0, 0, 2γ n̄)``.

State vectors are flat complex arrays ``[m, M.ravel(), N.ravel()]``; the O₀
model prepends ``[F₁, F₂]``.  Kernels take ``(t, y, p)`` where ``p`` is the
packed float parameter array described by the ``P_*`` indices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._backend import USE_NUMBA, jit
from ..errors import InvalidArgument, UnstableRegime
from ..gaussian import LadderMoments, ladder_to_quadrature
from .coefficients import is_unstable_sector
from .params import (
    CoefficientState,
    DetuningDrive,
    OUKernel,
    SystemParams,
    ThermalBath,
    TripartiteMoments,
)

P_KAPPA, P_DAB, P_DRIVE, P_OMEGA, P_DAE, P_GAMMA, P_NBAR, P_PIN = range(8)
N_PARAMS = 8

KINDS = ("markov", "o0", "pseudomode")


@jit
def delta_ab(t, p):
    if p[P_DRIVE] == 0.0:
        return p[P_DAB]
    return p[P_DAB] * (np.sin(p[P_OMEGA] * t) + 1.0)


def _flow_loops(K, D, y, off, n, dy):
    mo = off + n
    no = mo + n * n
    for i in range(n):
        acc = 0j
        for k in range(n):
            acc += K[i, k] * y[off + k]
        dy[off + i] = -acc
    for i in range(n):
        for j in range(n):
            am = 0j
            an = 0j
            for k in range(n):
                am += K[i, k] * y[mo + k * n + j] + y[mo + i * n + k] * K[j, k]
                an += np.conj(K[i, k]) * y[no + k * n + j] + y[no + i * n + k] * K[j, k]
            dy[mo + i * n + j] = -am
            dy[no + i * n + j] = D[i, j] - an


def _flow_numpy(K, D, y, off, n, dy):
    mo = off + n
    no = mo + n * n
    M = y[mo:no].reshape(n, n)
    N = y[no:no + n * n].reshape(n, n)
    dy[off:mo] = -(K @ y[off:mo])
    dy[mo:no] = (-(K @ M) - M @ K.T).ravel()
    dy[no:no + n * n] = (D - K.conj() @ N - N @ K.T).ravel()


# small fixed-size loops beat BLAS calls once compiled; numpy prefers matmul
_flow = jit(_flow_loops) if USE_NUMBA else _flow_numpy


@jit
def markov_kernel(t, y, p):
    h = 0.5 * p[P_KAPPA]
    K = np.empty((2, 2), dtype=np.complex128)
    K[0, 0] = h
    K[0, 1] = h
    K[1, 0] = h
    K[1, 1] = h + 1j * delta_ab(t, p)
    D = np.full((2, 2), p[P_KAPPA] * p[P_NBAR] + 0j)
    dy = np.empty_like(y)
    _flow(K, D, y, 0, 2, dy)
    return dy


@jit
def o0_kernel(t, y, p):
    rk = np.sqrt(p[P_KAPPA])
    dab = delta_ab(t, p)
    dy = np.empty_like(y)
    if p[P_PIN] != 0.0:
        F1 = 0.5 * rk + 0j
        F2 = 0.5 * rk + 0j
        dy[0] = 0.0
        dy[1] = 0.0
    else:
        F1 = y[0]
        F2 = y[1]
        g = p[P_GAMMA]
        s = rk * (F1 + F2)
        dy[0] = 0.5 * g * rk + (s - (g + 1j * p[P_DAE])) * F1
        dy[1] = 0.5 * g * rk + (s - (g + 1j * (p[P_DAE] - dab))) * F2
    K = np.empty((2, 2), dtype=np.complex128)
    K[0, 0] = rk * F1
    K[0, 1] = rk * F2
    K[1, 0] = rk * F1
    K[1, 1] = rk * F2 + 1j * dab
    D = np.zeros((2, 2), dtype=np.complex128)
    _flow(K, D, y, 2, 2, dy)
    return dy


@jit
def pseudomode_kernel(t, y, p):
    g = p[P_GAMMA]
    c = 1j * np.sqrt(0.5 * g) * np.sqrt(p[P_KAPPA])
    K = np.zeros((3, 3), dtype=np.complex128)
    K[0, 2] = c
    K[1, 1] = 1j * delta_ab(t, p)
    K[1, 2] = c
    K[2, 0] = c
    K[2, 1] = c
    K[2, 2] = g + 1j * p[P_DAE]
    D = np.zeros((3, 3), dtype=np.complex128)
    D[2, 2] = 2.0 * g * p[P_NBAR]
    dy = np.empty_like(y)
    _flow(K, D, y, 0, 3, dy)
    return dy


KERNELS = {"markov": markov_kernel, "o0": o0_kernel, "pseudomode": pseudomode_kernel}


# ---------------------------------------------------------------------------
# model assembly


def pack_params(
    system: SystemParams,
    kernel: OUKernel | None = None,
    bath: ThermalBath | None = None,
    pin_coefficients: bool = False,
) -> np.ndarray:
    drive = system.drive
    p = np.zeros(N_PARAMS)
    p[P_KAPPA] = system.kappa
    p[P_DAB] = drive.delta0
    p[P_DRIVE] = 0.0 if drive.kind == "constant" else 1.0
    p[P_OMEGA] = drive.omega_mod
    p[P_DAE] = system.delta_AE
    p[P_GAMMA] = kernel.gamma if kernel is not None else 0.0
    p[P_NBAR] = bath.n_bar if bath is not None else 0.0
    p[P_PIN] = 1.0 if pin_coefficients else 0.0
    return p


@dataclass(frozen=True)
class Model:
    """A generator together with its parameters and state layout."""

    kind: str
    system: SystemParams
    kernel: OUKernel | None
    bath: ThermalBath
    params: np.ndarray
    pin_coefficients: bool = False

    @property
    def rhs(self):
        return KERNELS[self.kind]

    @property
    def n_modes(self) -> int:
        return 3 if self.kind == "pseudomode" else 2

    @property
    def offset(self) -> int:
        return 2 if self.kind == "o0" else 0

    @property
    def dim(self) -> int:
        n = self.n_modes
        return self.offset + n + 2 * n * n

    def initial_vector(self, two_mode: LadderMoments) -> np.ndarray:
        """Flat initial state for this model from two-mode input moments."""
        if self.kind == "pseudomode":
            m, M, N = pseudomode_initial(two_mode, self.bath).arrays()
        else:
            m, M, N = two_mode.arrays()
        head = np.zeros(self.offset, dtype=complex)
        return np.concatenate([head, m, M.ravel(), N.ravel()])

    def unpack(self, states: np.ndarray):
        """Split stacked state vectors into ``(m, M, N)`` over all modes."""
        s = np.atleast_2d(states)
        n, off = self.n_modes, self.offset
        m = s[:, off:off + n]
        M = s[:, off + n:off + n + n * n].reshape(-1, n, n)
        N = s[:, off + n + n * n:off + n + 2 * n * n].reshape(-1, n, n)
        return m, M, N

    def reduced_quadrature(self, states: np.ndarray):
        """``(R, σ)`` of the (a, b) subsystem for stacked states."""
        m, M, N = self.unpack(states)
        return ladder_to_quadrature(m[:, :2], M[:, :2, :2], N[:, :2, :2])

    def reduced_ladder(self, state: np.ndarray) -> LadderMoments:
        m, M, N = self.unpack(state)
        return LadderMoments.from_arrays(m[0, :2], M[0, :2, :2], N[0, :2, :2])

    def coefficients(self, states: np.ndarray) -> np.ndarray:
        if self.kind != "o0":
            raise InvalidArgument("only the o0 model carries memory coefficients")
        return np.atleast_2d(states)[:, :2]


def build_model(
    kind: str,
    system: SystemParams | None = None,
    kernel: OUKernel | None = None,
    bath: ThermalBath | None = None,
    pin_coefficients: bool = False,
) -> Model:
    """Assemble a :class:`Model`, refusing parameter sectors the closure cannot handle."""
    if kind not in KINDS:
        raise InvalidArgument(f"unknown generator {kind!r}; expected one of {KINDS}")
    system = system or SystemParams()
    bath = bath or ThermalBath()
    if kind in ("o0", "pseudomode") and kernel is None:
        raise InvalidArgument(f"{kind} generator needs an OUKernel")
    if kind == "o0":
        if bath.n_bar != 0:
            raise InvalidArgument("the o0 closure is a zero-temperature model; use pseudomode")
        if not pin_coefficients and is_unstable_sector(kernel.gamma, system.delta_AE, system.kappa):
            raise UnstableRegime(
                "double resonance (delta_AE = 0) with gamma/kappa < 4 is refused"
            )
    return Model(kind, system, kernel, bath, pack_params(system, kernel, bath, pin_coefficients),
                 pin_coefficients)


# ---------------------------------------------------------------------------
# operation-level wrappers on the value types


def _ladder_vector(m: LadderMoments) -> np.ndarray:
    mv, M, N = m.arrays()
    return np.concatenate([mv, M.ravel(), N.ravel()])


def _ladder_from_vector(v: np.ndarray, off: int = 0) -> LadderMoments:
    return LadderMoments.from_arrays(
        v[off:off + 2], v[off + 2:off + 6].reshape(2, 2), v[off + 6:off + 10].reshape(2, 2)
    )


def markov_moment_rhs(
    m: LadderMoments, t: float, p: SystemParams, bath: ThermalBath | None = None
) -> LadderMoments:
    """Derivative of the two-mode moments under the collective Lindblad generator."""
    params = pack_params(p, None, bath)
    return _ladder_from_vector(markov_kernel(float(t), _ladder_vector(m), params))


def o0_moment_rhs(
    m: LadderMoments,
    F: CoefficientState,
    t: float,
    p: SystemParams,
    k: OUKernel,
    pin_coefficients: bool = False,
):
    """Joint derivative ``(dm, dF)`` of moments and memory coefficients."""
    params = pack_params(p, k, None, pin_coefficients)
    y = np.concatenate([[F.F1, F.F2], _ladder_vector(m)]).astype(complex)
    dy = o0_kernel(float(t), y, params)
    return _ladder_from_vector(dy, 2), CoefficientState(complex(dy[0]), complex(dy[1]))


def pseudomode_rhs(
    m: TripartiteMoments, t: float, p: SystemParams, k: OUKernel, bath: ThermalBath | None = None
) -> TripartiteMoments:
    """Derivative of the tripartite moments under the pseudomode GKLS generator."""
    params = pack_params(p, k, bath)
    mv, M, N = m.arrays()
    dy = pseudomode_kernel(float(t), np.concatenate([mv, M.ravel(), N.ravel()]), params)
    return TripartiteMoments(dy[:3], dy[3:12].reshape(3, 3), dy[12:21].reshape(3, 3))


def pseudomode_initial(two_mode: LadderMoments, bath: ThermalBath | None = None) -> TripartiteMoments:
    """Attach a pseudomode in its thermal state, uncorrelated with the system."""
    n_bar = bath.n_bar if bath is not None else 0.0
    return TripartiteMoments.from_two_mode(two_mode, c_num=n_bar)


def trace_out_pseudomode(m: TripartiteMoments) -> LadderMoments:
    """Gaussian partial trace over ``c``: drop its rows and columns."""
    mv, M, N = m.arrays()
    return LadderMoments.from_arrays(mv[:2], M[:2, :2], N[:2, :2])


def mirrored_drive(drive: DetuningDrive) -> DetuningDrive:
    return DetuningDrive(drive.kind, -drive.delta0, drive.omega_mod)
