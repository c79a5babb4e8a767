"""Limits of the normalised second correlation function across the crossover.

Three regimes, one interpolating family:

* delocalized (``W >> n``): ``DS(pi xi)``
* critical (``n = C_* W``): ``(exp(-C* Delta - i pi xi nu) 1, 1)`` with ``C* = C_*/t_*``
* localized (``W << n``): identically 1

plus the finite-``(n, W)`` propagator ``(K_0^{n-1} e_0, e_0)`` whose large-``W``
limit is the critical value.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import harmonics
from .scaling import t_star

__all__ = [
    "TruncationWarning",
    "TruncatedGenerator",
    "RegimeCurve",
    "REGIMES",
    "matrix_exponential",
    "generator",
    "c_star_from_ratio",
    "delocalized_limit",
    "localized_limit",
    "critical_limit",
    "critical_limit_raw",
    "finite_n_propagator",
    "propagator_matrix",
    "regime_curve",
]

REGIMES = ("localized", "critical", "delocalized", "finite")

IMAG_TOL_LIMIT = 1e-10
IMAG_TOL_PROPAGATOR = 1e-9
TRUNCATION_TOL = 1e-9
DEFAULT_ORDER = 30


class TruncationWarning(UserWarning):
    """Doubling the basis size moved a value by more than the tolerance."""


def matrix_exponential(M) -> np.ndarray:
    """``exp(M)`` by scaling and squaring with Pade approximants.

    Raises ``OverflowError`` when the result cannot be represented; the
    largest eigenvalue of the Hermitian part bounds ``log ||exp(M)||_2``.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"matrix_exponential needs a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix_exponential needs finite entries")
    herm = 0.5 * (M + M.conj().T)
    growth = np.linalg.eigvalsh(herm)[-1] if M.size else 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        out = scipy.linalg.expm(M)
    if not np.all(np.isfinite(out)):
        raise OverflowError(f"exp(M) overflows (Hermitian-part bound {growth:.3g})")
    return out


@dataclass(frozen=True)
class TruncatedGenerator:
    """``C* Delta_l + i pi xi nu_l`` on the first ``l`` zonal harmonics."""

    order: int
    C_star: float
    xi: float
    laplace: np.ndarray = field(repr=False)
    nu: np.ndarray = field(repr=False)

    @property
    def matrix(self) -> np.ndarray:
        return self.C_star * np.diag(self.laplace) + 1j * math.pi * self.xi * self.nu


def generator(xi: float, C_star: float, l: int, m: int | None = None) -> TruncatedGenerator:
    if C_star < 0:
        raise ValueError(f"C* must be non-negative, got {C_star}")
    return TruncatedGenerator(
        order=int(l),
        C_star=float(C_star),
        xi=float(xi),
        laplace=harmonics.laplace_spectrum(l),
        nu=harmonics.nu_matrix(l, m).dense(),
    )


def c_star_from_ratio(C_sub: float, E: float) -> float:
    """``C* = C_* / t_*(E)`` where ``C_* = n / W``."""
    return float(C_sub) / t_star(E)


def delocalized_limit(xi):
    return harmonics.ds_function(np.pi * np.asarray(xi, dtype=float))


def localized_limit(xi):
    xi = np.asarray(xi, dtype=float)
    out = np.ones_like(xi)
    return float(out) if out.ndim == 0 else out


def critical_limit_raw(xi: float, C_star: float, l: int = DEFAULT_ORDER, m: int | None = None) -> complex:
    """Complex ``(exp(-G) e_0, e_0)`` before the reality check."""
    G = generator(xi, C_star, l, m).matrix
    return complex(matrix_exponential(-G)[0, 0])


def _real_part(z: complex, tol: float, what: str) -> float:
    if abs(z.imag) > tol:
        raise ArithmeticError(f"{what} has imaginary residue {z.imag:.3e} > {tol:g}")
    return z.real


def critical_limit(
    xi: float,
    C_star: float,
    l: int = DEFAULT_ORDER,
    m: int | None = None,
    check_truncation: bool = False,
) -> float:
    """Critical-regime limit at scaled offset ``xi`` and ``C* = C_*/t_*``.

    With ``check_truncation`` the value is recomputed at order ``2l`` and a
    ``TruncationWarning`` is issued if the two differ by more than 1e-9.
    """
    value = _real_part(critical_limit_raw(xi, C_star, l, m), IMAG_TOL_LIMIT, "critical limit")
    if check_truncation:
        m2 = None if m is None else max(int(m), harmonics.default_quadrature_order(2 * l))
        doubled = _real_part(critical_limit_raw(xi, C_star, 2 * l, m2), IMAG_TOL_LIMIT, "critical limit")
        if abs(doubled - value) > TRUNCATION_TOL:
            warnings.warn(
                f"critical limit at xi={xi}, C*={C_star} moved by {abs(doubled - value):.3e} "
                f"between l={l} and l={2 * l}",
                TruncationWarning,
                stacklevel=2,
            )
    return value


def propagator_matrix(xi: float, n: int, W: int, E: float, l: int, m: int | None = None) -> np.ndarray:
    """One-step operator ``I - Delta_l/(t_* W) - (i pi xi / n) nu_l``."""
    lap = harmonics.laplace_spectrum(l)
    nu = harmonics.nu_matrix(l, m).dense()
    return np.diag(1.0 - lap / (t_star(E) * W)) - (1j * math.pi * xi / n) * nu


def finite_n_propagator(xi: float, n: int, W: int, E: float, l: int, m: int | None = None) -> float:
    """``Re (K_0^{n-1} e_0, e_0)`` with the power taken by repeated squaring."""
    n, W, l = int(n), int(W), int(l)
    if n < 2:
        raise ValueError(f"need at least two blocks, got n={n}")
    if W < 1 or l < 1:
        raise ValueError(f"W and l must be positive, got W={W}, l={l}")
    K = propagator_matrix(xi, n, W, E, l, m)
    z = complex(np.linalg.matrix_power(K, n - 1)[0, 0])
    return _real_part(z, IMAG_TOL_PROPAGATOR, "finite-n propagator")


@dataclass(frozen=True)
class RegimeCurve:
    regime: str
    xi: np.ndarray
    values: np.ndarray
    params: dict
    order: int | None
    truncation_error: np.ndarray


def regime_curve(regime: str, xi_grid, **params) -> RegimeCurve:
    """Evaluate one regime on a grid of ``xi``.

    ``critical`` needs ``C_star`` (optional ``l``, ``m``); ``finite`` needs
    ``n``, ``W`` (optional ``E``, ``l``, ``m``).  Operator-based regimes carry
    a truncation error ``|value(l) - value(2l)|`` per point and warn when it
    exceeds 1e-9.
    """
    xi = np.asarray(xi_grid, dtype=float).ravel()
    if not np.all(np.isfinite(xi)):
        raise ValueError("xi grid must be finite")
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}; expected one of {REGIMES}")

    if regime == "delocalized":
        values = np.atleast_1d(delocalized_limit(xi))
        return RegimeCurve(regime, xi, values, {}, None, np.zeros_like(xi))
    if regime == "localized":
        return RegimeCurve(regime, xi, np.ones_like(xi), {}, None, np.zeros_like(xi))

    l = int(params.get("l", DEFAULT_ORDER))
    m = params.get("m")
    m2 = None if m is None else max(int(m), harmonics.default_quadrature_order(2 * l))
    if regime == "critical":
        if params.get("C_star") is None:
            raise ValueError("critical regime needs C_star")
        C = float(params["C_star"])

        def evaluate(x, order, mm):
            return critical_limit(x, C, order, mm)

        used = {"C_star": C}
    else:
        missing = [k for k in ("n", "W") if params.get(k) is None]
        if missing:
            raise ValueError(f"finite regime needs {missing}")
        n, W, E = int(params["n"]), int(params["W"]), float(params.get("E", 0.0))

        def evaluate(x, order, mm):
            return finite_n_propagator(x, n, W, E, order, mm)

        used = {"n": n, "W": W, "E": E}

    values = np.array([evaluate(x, l, m) for x in xi])
    doubled = np.array([evaluate(x, 2 * l, m2) for x in xi])
    err = np.abs(doubled - values)
    if np.any(err > TRUNCATION_TOL):
        warnings.warn(
            f"{regime} curve truncation error {err.max():.3e} exceeds {TRUNCATION_TOL:g} at l={l}",
            TruncationWarning,
            stacklevel=2,
        )
    used.update(l=l, m=m)
    return RegimeCurve(regime, xi, values, used, l, err)
