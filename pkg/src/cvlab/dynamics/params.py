"""Parameter and state containers for the moment dynamics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidArgument
from ..gaussian import LadderMoments


@dataclass(frozen=True)
class DetuningDrive:
    """Mode detuning ``δ_AB(t)``.

    ``constant``: ``δ_AB = delta0``.  ``sinusoidal``:
    ``δ_AB(t) = delta0 (sin(omega_mod t) + 1)``.
    """

    kind: str = "constant"
    delta0: float = 0.0
    omega_mod: float = 1.0

    def __post_init__(self):
        if self.kind not in ("constant", "sinusoidal"):
            raise InvalidArgument(f"unknown drive kind {self.kind!r}")
        if self.kind == "sinusoidal" and not self.omega_mod > 0:
            raise InvalidArgument("omega_mod must be positive")

    def __call__(self, t):
        if self.kind == "constant":
            return self.delta0 + 0.0 * np.asarray(t)
        return self.delta0 * (np.sin(self.omega_mod * np.asarray(t)) + 1.0)


@dataclass(frozen=True)
class SystemParams:
    """Decay rate and detunings, all in units of κ.

    ``delta_AB`` may be a number (constant drive) or a :class:`DetuningDrive`.
    """

    kappa: float = 1.0
    delta_AB: float | DetuningDrive = 0.0
    delta_AE: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise InvalidArgument("kappa must be positive")
        if not isinstance(self.delta_AB, DetuningDrive):
            object.__setattr__(
                self, "delta_AB", DetuningDrive("constant", float(self.delta_AB))
            )

    @property
    def drive(self) -> DetuningDrive:
        return self.delta_AB


@dataclass(frozen=True)
class OUKernel:
    """Ornstein-Uhlenbeck correlation ``(γ/2) e^{-(γ + iΩ)(t - s)}``."""

    gamma: float = 1.0
    Omega: float = 0.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise InvalidArgument("gamma must be positive")


@dataclass(frozen=True)
class ThermalBath:
    """Mean bath occupation; build from physical units with :meth:`from_temperature`."""

    n_bar: float = 0.0

    def __post_init__(self):
        if not self.n_bar >= 0:
            raise InvalidArgument("n_bar must be non-negative")

    @classmethod
    def from_temperature(cls, omega_phys: float, temperature: float) -> "ThermalBath":
        from .thermal import occupation_from_temperature

        return cls(occupation_from_temperature(omega_phys, temperature))


@dataclass(frozen=True)
class CoefficientState:
    """Memory coefficients ``F₁, F₂`` of the O₀ closure (units √κ)."""

    F1: complex = 0j
    F2: complex = 0j


@dataclass(frozen=True)
class FreezingSpec:
    """Decay scales that define the critical detuning and the γ bound."""

    t_n: float = 10.0
    n: float = 100.0
    t_s: float = 5.0
    n_s: float = 100.0

    def __post_init__(self):
        if min(self.t_n, self.t_s) <= 0:
            raise InvalidArgument("decay times must be positive")
        if self.n <= 1 or self.n_s <= 1:
            raise InvalidArgument("decay factors must exceed 1")


@dataclass(frozen=True)
class TripartiteMoments:
    """Moments of modes (a, b, c): ``m_i = ⟨o_i⟩``, ``M_ij = ⟨o_i o_j⟩``, ``N_ij = ⟨o_i† o_j⟩``."""

    m: np.ndarray
    M: np.ndarray
    N: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name, shape in (("m", (3,)), ("M", (3, 3)), ("N", (3, 3))):
            arr = np.array(getattr(self, name), dtype=complex)
            if arr.shape != shape:
                raise InvalidArgument(f"{name} must have shape {shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def arrays(self):
        return self.m, self.M, self.N

    @classmethod
    def from_two_mode(cls, two: LadderMoments, c_mean=0j, c_sq=0j, c_num=0.0):
        m2, M2, N2 = two.arrays()
        m = np.zeros(3, complex)
        M = np.zeros((3, 3), complex)
        N = np.zeros((3, 3), complex)
        m[:2] = m2
        m[2] = c_mean
        M[:2, :2] = M2
        N[:2, :2] = N2
        M[2, 2] = c_sq
        N[2, 2] = c_num
        # factorised cross moments between system and pseudomode
        M[:2, 2] = M[2, :2] = m2 * c_mean
        N[:2, 2] = np.conj(m2) * c_mean
        N[2, :2] = np.conj(c_mean) * m2
        return cls(m, M, N)
