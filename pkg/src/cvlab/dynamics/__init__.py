"""Moment dynamics: generators, memory coefficients, freezing law and locking predictor."""

from .coefficients import (
    coefficient_decay_ok,
    coefficient_steady_state,
    coefficient_transient,
    freezing_delta_star,
    freezing_gamma_bound,
    is_unstable_sector,
    ou_kernel,
    riccati_jacobian,
    riccati_rhs,
)
from .generators import (
    KINDS,
    Model,
    build_model,
    markov_moment_rhs,
    o0_moment_rhs,
    pseudomode_initial,
    pseudomode_rhs,
    trace_out_pseudomode,
)
from .locking import jacobi_anger_weights, phase_accumulation, stationary_weight
from .params import (
    CoefficientState,
    DetuningDrive,
    FreezingSpec,
    OUKernel,
    SystemParams,
    ThermalBath,
    TripartiteMoments,
)
from .thermal import occupation_from_temperature, temperature_from_occupation

__all__ = [name for name in dir() if not name.startswith("_")]
