"""Radial harmonic analysis on the rank-one symmetric space.

Functions of the radial coordinate ``x in [0, 1]`` are integrated against the
probability measure ``12 x^3 (1 - x^2) dx``.  In the variable ``v = 1 - 2 x^2``
this is ``(3/4)(1 - v^2) dv`` on ``[-1, 1]``, i.e. the Jacobi weight with
``alpha = beta = 1``; Gauss rules and the orthonormal zonal basis are built
in that variable.

Conventions
-----------
``phi_j`` is the orthonormal polynomial of degree ``j`` in ``v`` with positive
leading coefficient, so ``phi_0 = 1`` and ``phi_1 = sqrt(5) v``.  Every
``phi_j`` is positive at ``x = 0`` (the identity of the group).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

__all__ = [
    "QuadratureRule",
    "SpectralBasis",
    "TridiagonalNu",
    "jacobi_recurrence",
    "quadrature_rule",
    "default_quadrature_order",
    "build_basis",
    "radial_matrix",
    "nu_matrix",
    "nu_offdiagonal_closed_form",
    "laplace_spectrum",
    "iz_integral",
    "transfer_eigenvalue",
    "ds_function",
]


def default_quadrature_order(l: int) -> int:
    return 2 * int(l) + 8


def jacobi_recurrence(m: int, a: float = 1.0, b: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Recurrence coefficients of the orthonormal Jacobi polynomials.

    Weight ``(1 - v)^a (1 + v)^b`` on ``[-1, 1]`` normalised to unit mass.
    Returns ``(alpha, beta)`` with ``alpha`` of length ``m`` (diagonal of the
    Jacobi matrix) and ``beta`` of length ``m - 1`` (its off-diagonal).
    """
    k = np.arange(m, dtype=float)
    s = 2.0 * k + a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha = (b * b - a * a) / (s * (s + 2.0))
    if m > 0 and a + b == 0.0:
        alpha[0] = (b - a) / (a + b + 2.0)
    k = np.arange(1, m, dtype=float)
    s = 2.0 * k + a + b
    beta2 = 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0))
    return np.nan_to_num(alpha), np.sqrt(beta2)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule for the radial measure; ``x`` nodes in (0, 1), weights sum to 1."""

    x: np.ndarray
    weights: np.ndarray

    @property
    def s(self) -> np.ndarray:
        """Nodes in the variable ``S = x^2``."""
        return self.x**2

    @property
    def v(self) -> np.ndarray:
        """Nodes in the variable ``v = 1 - 2 x^2``."""
        return 1.0 - 2.0 * self.x**2

    def integrate(self, f) -> complex | float:
        """Integrate ``f(x)`` against the radial probability measure."""
        return np.dot(self.weights, f(self.x))


@lru_cache(maxsize=64)
def _gauss_nodes(m: int) -> tuple[np.ndarray, np.ndarray]:
    alpha, beta = jacobi_recurrence(m, 1.0, 1.0)
    v, vecs = eigh_tridiagonal(alpha, beta)
    w = vecs[0, :] ** 2
    return v, w / w.sum()


def quadrature_rule(m: int) -> QuadratureRule:
    """``m``-point Gauss rule, exact for polynomials in ``x^2`` of degree ``<= 2m - 1``."""
    m = int(m)
    if m < 1:
        raise ValueError(f"quadrature order must be positive, got {m}")
    v, w = _gauss_nodes(m)
    # Ascending in x means descending in v.
    order = np.argsort(-v)
    x = np.sqrt((1.0 - v[order]) / 2.0)
    return QuadratureRule(x=x, weights=w[order].copy())


@dataclass(frozen=True)
class SpectralBasis:
    """Orthonormal zonal polynomials ``phi_0 .. phi_{l-1}``.

    The three-term recurrence ``v phi_j = b_j phi_{j+1} + a_j phi_j + b_{j-1} phi_{j-1}``
    is obtained by a discretised Stieltjes procedure on ``rule`` and is used to
    evaluate the basis anywhere on ``[0, 1]``.
    """

    order: int
    rule: QuadratureRule
    a: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)

    def __call__(self, x) -> np.ndarray:
        """Table of shape ``(order, len(x))`` with ``phi_j(x)`` in row ``j``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        v = 1.0 - 2.0 * x * x
        out = np.empty((self.order, x.size))
        out[0] = 1.0
        if self.order > 1:
            out[1] = (v - self.a[0]) / self.b[0]
        for j in range(1, self.order - 1):
            out[j + 1] = ((v - self.a[j]) * out[j] - self.b[j - 1] * out[j - 1]) / self.b[j]
        return out

    def at_identity(self) -> np.ndarray:
        """``phi_j(0)`` for every ``j``."""
        return self(np.zeros(1))[:, 0]

    def gram(self) -> np.ndarray:
        table = self(self.rule.x)
        return (table * self.rule.weights) @ table.T


def build_basis(l: int, m: int | None = None) -> SpectralBasis:
    l = int(l)
    if l < 1:
        raise ValueError(f"basis size must be positive, got {l}")
    m = default_quadrature_order(l) if m is None else int(m)
    if m < l + 1:
        raise ValueError(f"quadrature order {m} too small for basis size {l}")
    rule = quadrature_rule(m)
    v, w = rule.v, rule.weights
    a = np.zeros(l)
    b = np.zeros(max(l - 1, 0))
    prev = np.zeros_like(v)
    cur = np.ones_like(v)
    for j in range(l):
        a[j] = np.dot(w, v * cur * cur)
        if j == l - 1:
            break
        nxt = (v - a[j]) * cur - (b[j - 1] * prev if j > 0 else 0.0)
        b[j] = math.sqrt(np.dot(w, nxt * nxt))
        prev, cur = cur, nxt / b[j]
    return SpectralBasis(order=l, rule=rule, a=a, b=b)


def radial_matrix(f, l: int, m: int | None = None) -> np.ndarray:
    """Galerkin matrix ``int phi_i f phi_j dmu`` of multiplication by ``f(x)``."""
    basis = build_basis(l, m)
    rule = basis.rule
    table = basis(rule.x)
    return (table * (rule.weights * f(rule.x))) @ table.T


def nu_offdiagonal_closed_form(l: int) -> np.ndarray:
    j = np.arange(int(l) - 1, dtype=float)
    return np.sqrt((j + 1.0) * (j + 3.0) / ((2.0 * j + 3.0) * (2.0 * j + 5.0)))


@dataclass(frozen=True)
class TridiagonalNu:
    order: int
    diagonal: np.ndarray
    offdiagonal: np.ndarray

    def dense(self) -> np.ndarray:
        return np.diag(self.diagonal) + np.diag(self.offdiagonal, 1) + np.diag(self.offdiagonal, -1)


_DIAG_TOL = 1e-12


def nu_matrix(l: int, m: int | None = None) -> TridiagonalNu:
    """Multiplication by ``1 - 2 x^2`` in the zonal basis, computed by quadrature.

    The quadrature diagonal is checked to vanish and then stored as exact zeros.
    """
    full = radial_matrix(lambda x: 1.0 - 2.0 * x * x, l, m)
    diag = np.diag(full)
    if np.max(np.abs(diag)) > _DIAG_TOL:
        raise ArithmeticError(f"nu diagonal does not vanish: max |d| = {np.max(np.abs(diag)):.3e}")
    off = 0.5 * (np.diag(full, 1) + np.diag(full, -1))
    return TridiagonalNu(order=int(l), diagonal=np.zeros(int(l)), offdiagonal=off)


def laplace_spectrum(l: int) -> np.ndarray:
    j = np.arange(int(l), dtype=float)
    return j * (j + 3.0)


def _iz_series(p: float) -> float:
    # exp(-p u) expanded against 6u(1-u): sum (-p)^k / k! * 6 / ((k+2)(k+3))
    total = 0.0
    term = 1.0
    for k in range(60):
        if k:
            term *= -p / k
        inc = term * 6.0 / ((k + 2.0) * (k + 3.0))
        total += inc
        if abs(inc) < 1e-18 * abs(total):
            break
    return total


def iz_integral(p: float) -> float:
    """Haar average of ``exp(-p S)``: ``(6/p^2)(1 - 2/p + e^{-p}(1 + 2/p))``.

    Near ``p = 0`` the closed form cancels catastrophically, so a Taylor
    series is summed for ``|p| < 2``.
    """
    p = float(p)
    if p == 0.0:
        raise ValueError("iz_integral is singular at p = 0; the limit value is 1")
    if abs(p) < 2.0:
        return _iz_series(p)
    return 6.0 / (p * p) * (1.0 - 2.0 / p + math.exp(-p) * (1.0 + 2.0 / p))


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def _exp_weighted_rule(p: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes in ``S`` and weights for ``int_0^1 g(S) exp(-p S) dS``.

    Composite Gauss-Legendre split at ``min(1, 40/p)`` so the peak at ``S = 0``
    is resolved for any ``p > 0``; the exponential is folded into the weights.
    """
    cut = min(1.0, 40.0 / p)
    pieces = [(0.0, cut)] if cut >= 1.0 else [(0.0, cut), (cut, 1.0)]
    nodes, weights = [], []
    for lo, hi in pieces:
        half = 0.5 * (hi - lo)
        s = lo + half * (_GL_NODES + 1.0)
        nodes.append(s)
        weights.append(half * _GL_WEIGHTS * np.exp(-p * s))
    return np.concatenate(nodes), np.concatenate(weights)


def transfer_eigenvalue(j: int, p: float, m: int | None = None) -> float:
    """Eigenvalue of the Gaussian transfer kernel ``(p^2/6) exp(-p S(Q Q'^*))`` on ``phi_j``.

    Computed as ``(p^2/6) int exp(-p S) phi_j dmu / phi_j(0)``; the division
    normalises the zonal function to 1 at the identity.  For ``j = 0`` this
    reproduces ``1 - 2/p + e^{-p}(1 + 2/p)``.
    """
    j = int(j)
    p = float(p)
    if p <= 0.0:
        raise ValueError(f"transfer eigenvalue needs p > 0, got {p}")
    if j < 0:
        raise ValueError(f"index must be non-negative, got {j}")
    basis = build_basis(j + 1, m)
    s, w = _exp_weighted_rule(p)
    phi = basis(np.sqrt(s))[j]
    integral = np.dot(w, 6.0 * s * (1.0 - s) * phi)
    return float(p * p / 6.0 * integral / basis.at_identity()[j])


def _ds_series(x: np.ndarray) -> np.ndarray:
    # 3 * sum_{k>=1} (-1)^k x^{2k-2} (1/(2k+1)! - 1/(2k)!)
    x2 = x * x
    out = np.zeros_like(x)
    for k in range(12, 0, -1):
        c = (-1.0) ** k * (math.exp(-gammaln(2 * k + 2)) - math.exp(-gammaln(2 * k + 1)))
        out = out * x2 + c
    return 3.0 * out


def ds_function(x):
    """``3 (sin x / x^3 - cos x / x^2)``, equal to 1 at the origin; even in ``x``."""
    arr = np.abs(np.asarray(x, dtype=float))
    small = np.abs(arr) < 0.5
    safe = np.where(small, 1.0, arr)
    direct = 3.0 * (np.sin(safe) / safe**3 - np.cos(safe) / safe**2)
    out = np.where(small, _ds_series(arr), direct)
    return float(out) if out.ndim == 0 else out
