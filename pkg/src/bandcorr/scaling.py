"""Spectral constants of the block band ensemble at a bulk energy ``E``.

Everything here is a closed-form function of ``E`` (and of the matrix size
for the microscopic scaling): the semicircle density, the two saddle points
on the unit circle, ``t_* = (2 pi rho)^2`` and the pair of spectral
arguments ``E +/- xi / (2 N rho)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EnergyParams",
    "ScaledPair",
    "semicircle_density",
    "semicircle_cdf",
    "saddle_points",
    "scaled_pair",
    "t_star",
    "energy_params",
]


def _check_bulk(E: float) -> float:
    E = float(E)
    if not -2.0 < E < 2.0:
        raise ValueError(f"energy must lie in the open bulk (-2, 2), got {E!r}")
    return E


def semicircle_density(E: float) -> float:
    """Wigner semicircle density ``sqrt(4 - E^2) / (2 pi)``, zero at the edges."""
    E = float(E)
    if not -2.0 <= E <= 2.0:
        raise ValueError(f"semicircle density is supported on [-2, 2], got {E!r}")
    return math.sqrt(4.0 - E * E) / (2.0 * math.pi)


def semicircle_cdf(x):
    """Distribution function of the semicircle law; vectorised over ``x``."""
    y = np.clip(np.asarray(x, dtype=float), -2.0, 2.0)
    return 0.5 + (y * np.sqrt(4.0 - y * y) / 4.0 + np.arcsin(y / 2.0)) / np.pi


def saddle_points(E: float) -> tuple[complex, complex]:
    """Return ``a_+, a_- = (iE +/- sqrt(4 - E^2)) / 2``.

    Both lie on the unit circle, ``a_+ a_- = -1`` and ``a_- = -conj(a_+)``.
    """
    E = _check_bulk(E)
    root = math.sqrt(4.0 - E * E)
    return complex(root / 2.0, E / 2.0), complex(-root / 2.0, E / 2.0)


def t_star(E: float) -> float:
    """``(2 pi rho(E))^2``, which is exactly ``4 - E^2``."""
    E = _check_bulk(E)
    return 4.0 - E * E


@dataclass(frozen=True)
class EnergyParams:
    E: float
    rho: float
    a_plus: complex
    a_minus: complex
    t_star: float


def energy_params(E: float) -> EnergyParams:
    a_plus, a_minus = saddle_points(E)
    return EnergyParams(float(E), semicircle_density(E), a_plus, a_minus, t_star(E))


@dataclass(frozen=True)
class ScaledPair:
    lambda1: float
    lambda2: float
    xi: float
    N: int


def scaled_pair(E: float, xi: float, N: int) -> ScaledPair:
    """Spectral arguments ``E +/- xi / (2 N rho(E))`` at microscopic offset ``xi``.

    The shift is computed once and added/subtracted, so flipping the sign of
    ``xi`` swaps the two arguments bit for bit.
    """
    E = _check_bulk(E)
    if int(N) < 1:
        raise ValueError(f"matrix dimension must be positive, got {N!r}")
    shift = float(xi) / (2.0 * int(N) * semicircle_density(E))
    return ScaledPair(E + shift, E - shift, float(xi), int(N))
