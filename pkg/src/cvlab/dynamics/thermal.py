"""Conversion between bath occupation and physical temperature."""

from __future__ import annotations

import numpy as np

from ..errors import InvalidArgument

# CODATA exact SI values
HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K


def occupation_from_temperature(omega_phys: float, temperature: float) -> float:
    """Bose-Einstein occupation ``1/(e^{ħΩ/k_B T} - 1)``.

    Args:
        omega_phys: angular frequency in rad/s.
        temperature: temperature in kelvin; zero gives ``n̄ = 0``.
    """
    if omega_phys <= 0 or temperature < 0:
        raise InvalidArgument("need omega_phys > 0 and temperature >= 0")
    if temperature == 0:
        return 0.0
    return float(1.0 / np.expm1(HBAR * omega_phys / (K_B * temperature)))


def temperature_from_occupation(omega_phys: float, n_bar: float) -> float:
    """Inverse of :func:`occupation_from_temperature` (kelvin)."""
    if omega_phys <= 0 or n_bar < 0:
        raise InvalidArgument("need omega_phys > 0 and n_bar >= 0")
    if n_bar == 0:
        return 0.0
    return float(HBAR * omega_phys / (K_B * np.log1p(1.0 / n_bar)))
