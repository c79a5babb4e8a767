"""Monte Carlo oracle for the real symmetric block band (Wegner orbital) ensemble.

Sample ``m`` of a run with seed ``s`` always draws from the stream
``SeedSequence(s, spawn_key=(m,))``, and every reduction is done in sample
order in the calling process, so results do not depend on the worker count.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .scaling import scaled_pair

__all__ = [
    "DegenerateBatchWarning",
    "EnsembleParams",
    "VarianceProfile",
    "LogSignValue",
    "McEstimate",
    "variance_profile",
    "sample_matrix",
    "sample_rng",
    "char_poly_product",
    "log_char_poly_products",
    "sample_log_products",
    "ratio_from_logs",
    "estimate_ratio",
    "DEFAULT_BATCHES",
]

DEFAULT_BATCHES = 50


class DegenerateBatchWarning(UserWarning):
    """A batch denominator was not positive; the delta-method error is unreliable."""


@dataclass(frozen=True)
class EnsembleParams:
    n: int
    W: int
    beta: float
    E: float = 0.0

    def __post_init__(self):
        if int(self.n) < 1 or int(self.W) < 1:
            raise ValueError(f"n and W must be positive integers, got n={self.n}, W={self.W}")
        if not 0.0 < self.beta < 0.25:
            raise ValueError(f"beta must lie in (0, 1/4), got {self.beta}")
        if not -2.0 < self.E < 2.0:
            raise ValueError(f"E must lie in (-2, 2), got {self.E}")

    @property
    def N(self) -> int:
        return int(self.n) * int(self.W)


@dataclass(frozen=True)
class VarianceProfile:
    J: np.ndarray
    W: int

    def expanded(self) -> np.ndarray:
        """Entry-level variance map ``J_{jk}`` repeated over each ``W x W`` block."""
        return np.kron(self.J, np.ones((self.W, self.W)))


def variance_profile(n: int, W: int, beta: float) -> VarianceProfile:
    """``J = (I + beta Delta0) / W`` with the Neumann Laplacian ``Delta0`` on ``1..n``."""
    if not 0.0 < beta < 0.25:
        raise ValueError(f"beta must lie in (0, 1/4), got {beta}")
    n, W = int(n), int(W)
    if n < 1 or W < 1:
        raise ValueError(f"n and W must be positive, got n={n}, W={W}")
    lap = np.zeros((n, n))
    idx = np.arange(n - 1)
    lap[idx, idx + 1] = 1.0
    lap[idx + 1, idx] = 1.0
    lap[np.diag_indices(n)] = -lap.sum(axis=1)
    return VarianceProfile(J=(np.eye(n) + beta * lap) / W, W=W)


def sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


def _entry_scale(profile: VarianceProfile) -> np.ndarray:
    return np.sqrt(profile.expanded())


def sample_matrix(params: EnsembleParams, profile: VarianceProfile, rng: np.random.Generator, _scale=None) -> np.ndarray:
    """Draw ``H`` with off-diagonal variance ``J_jk`` and diagonal variance ``2 J_jj``.

    ``(A + A^T)/sqrt(2)`` has unit off-diagonal and doubled diagonal variance,
    and is symmetric bit for bit, as is the elementwise scaling.
    """
    N = params.N
    if profile.J.shape != (params.n, params.n) or profile.W != params.W:
        raise ValueError("variance profile does not match ensemble parameters")
    scale = _entry_scale(profile) if _scale is None else _scale
    A = rng.standard_normal((N, N))
    return (A + A.T) * (scale / math.sqrt(2.0))


@dataclass(frozen=True)
class LogSignValue:
    """``sign * exp(log_abs)``; products add logs and multiply signs."""

    log_abs: float
    sign: int

    def __mul__(self, other: "LogSignValue") -> "LogSignValue":
        if self.sign == 0 or other.sign == 0:
            return LogSignValue(-math.inf, 0)
        return LogSignValue(self.log_abs + other.log_abs, self.sign * other.sign)

    @property
    def value(self) -> float:
        return 0.0 if self.sign == 0 else self.sign * math.exp(self.log_abs)


def log_char_poly_products(eigs, lambda1, lambda2) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``log|det(l1-H) det(l2-H)|`` and sign from the spectrum of ``H``.

    ``lambda1`` and ``lambda2`` are arrays of equal length ``G``; each factor
    pair is summed as ``log|l1 - e| + log|l2 - e|`` so swapping the two
    arguments gives an identical result.
    """
    eigs = np.asarray(eigs, dtype=float)
    d1 = np.asarray(lambda1, dtype=float)[:, None] - eigs[None, :]
    d2 = np.asarray(lambda2, dtype=float)[:, None] - eigs[None, :]
    with np.errstate(divide="ignore"):
        log_abs = (np.log(np.abs(d1)) + np.log(np.abs(d2))).sum(axis=1)
    negatives = (np.signbit(d1).astype(np.int64) + np.signbit(d2)).sum(axis=1)
    sign = np.where(negatives % 2 == 0, 1, -1)
    zero = np.any(d1 == 0.0, axis=1) | np.any(d2 == 0.0, axis=1)
    sign = np.where(zero, 0, sign)
    log_abs = np.where(zero, -np.inf, log_abs)
    return log_abs, sign


def char_poly_product(H, lambda1: float, lambda2: float) -> LogSignValue:
    """``det(lambda1 - H) det(lambda2 - H)`` in log-sign form via the eigenvalues of ``H``."""
    eigs = np.linalg.eigvalsh(np.asarray(H, dtype=float))
    log_abs, sign = log_char_poly_products(eigs, [lambda1], [lambda2])
    return LogSignValue(float(log_abs[0]), int(sign[0]))


def sample_log_products(params: EnsembleParams, lambda1, lambda2, seed: int, start: int, stop: int):
    """Log-sign products for samples ``start .. stop-1``; arrays of shape ``(stop-start, G)``."""
    profile = variance_profile(params.n, params.W, params.beta)
    scale = _entry_scale(profile)
    G = len(lambda1)
    logs = np.empty((stop - start, G))
    signs = np.empty((stop - start, G), dtype=np.int8)
    for row, m in enumerate(range(start, stop)):
        H = sample_matrix(params, profile, sample_rng(seed, m), _scale=scale)
        eigs = np.linalg.eigvalsh(H)
        logs[row], signs[row] = log_char_poly_products(eigs, lambda1, lambda2)
    return logs, signs


@dataclass(frozen=True)
class McEstimate:
    xi: float
    ratio: float
    std_error: float
    samples: int
    seed: int
    params: EnsembleParams


def ratio_from_logs(log_abs, sign, zero_col: int, batches: int = DEFAULT_BATCHES):
    """Common-sample ratio estimates and batch delta-method standard errors.

    ``log_abs`` and ``sign`` have shape ``(M, G)``; column ``zero_col`` is the
    ``xi = 0`` reference.  Weights are rescaled by the run-wide maximum log
    before summation.  Returns ``(ratio, std_error)`` arrays of length ``G``.
    """
    log_abs = np.asarray(log_abs, dtype=float)
    sign = np.asarray(sign)
    M = log_abs.shape[0]
    offset = np.max(log_abs[np.isfinite(log_abs)]) if np.any(np.isfinite(log_abs)) else 0.0
    w = sign * np.exp(log_abs - offset)
    B = max(1, min(int(batches), M))
    bounds = np.linspace(0, M, B + 1).astype(int)
    batch_sums = np.add.reduceat(w, bounds[:-1], axis=0)
    num = batch_sums.sum(axis=0)
    den = num[zero_col]
    ratio = num / den
    ratio[zero_col] = 1.0
    if np.any(batch_sums[:, zero_col] <= 0.0):
        warnings.warn("a batch denominator is not positive", DegenerateBatchWarning, stacklevel=2)
    if B < 2:
        return ratio, np.full_like(ratio, np.nan)
    dbar = den / B
    resid = batch_sums - ratio[None, :] * batch_sums[:, [zero_col]]
    var = (resid**2).sum(axis=0) / (B * (B - 1)) / dbar**2
    return ratio, np.sqrt(var)


def estimate_ratio(
    params: EnsembleParams,
    xi_grid,
    M: int,
    seed: int,
    workers: int = 1,
    batches: int = DEFAULT_BATCHES,
) -> list[McEstimate]:
    """Estimate ``F2(E + d, E - d) / F2(E, E)`` on a grid of ``xi`` with ``d = xi/(2 N rho)``.

    All grid points share the same ``M`` matrices; ``xi = 0`` is added
    internally when absent.  Output depends only on ``(params, xi_grid, M, seed)``.
    """
    M = int(M)
    if M < 2:
        raise ValueError(f"need at least two samples, got {M}")
    xi = [float(x) for x in np.atleast_1d(np.asarray(xi_grid, dtype=float))]
    full = xi if 0.0 in xi else xi + [0.0]
    pairs = [scaled_pair(params.E, x, params.N) for x in full]
    lam1 = np.array([p.lambda1 for p in pairs])
    lam2 = np.array([p.lambda2 for p in pairs])

    workers = max(1, int(workers))
    if workers == 1:
        logs, signs = sample_log_products(params, lam1, lam2, seed, 0, M)
    else:
        edges = np.linspace(0, M, min(workers * 4, M) + 1).astype(int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(sample_log_products, params, lam1, lam2, seed, int(a), int(b))
                for a, b in zip(edges[:-1], edges[1:])
                if b > a
            ]
            chunks = [f.result() for f in futures]
        logs = np.concatenate([c[0] for c in chunks])
        signs = np.concatenate([c[1] for c in chunks])

    ratio, se = ratio_from_logs(logs, signs, full.index(0.0), batches)
    return [
        McEstimate(x, float(ratio[i]), float(se[i]), M, int(seed), params)
        for i, x in enumerate(xi)
    ]
