import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bandcorr import harmonics, limits
from bandcorr.limits import (
    TruncationWarning,
    c_star_from_ratio,
    critical_limit,
    critical_limit_raw,
    delocalized_limit,
    finite_n_propagator,
    generator,
    localized_limit,
    matrix_exponential,
    regime_curve,
)


def eig_expm(M):
    """Oracle: exp via eigendecomposition (fine for the diagonalisable inputs used here)."""
    vals, vecs = np.linalg.eig(M)
    return vecs @ np.diag(np.exp(vals)) @ np.linalg.inv(vecs)


def second_order_large_c(xi, C):
    """Dyson expansion of (exp(-C Delta - i pi xi nu) e0, e0) to second order in xi."""
    d1 = 4.0 * C
    nu01_sq = 0.2
    return 1.0 - (math.pi * xi) ** 2 * nu01_sq * (1.0 / d1 - (1.0 - math.exp(-d1)) / d1**2)


def test_matrix_exponential_trivial_cases():
    assert np.array_equal(matrix_exponential(np.zeros((3, 3))), np.eye(3))
    out = matrix_exponential(np.diag([0.3, -2.0]))
    assert np.allclose(out, np.diag(np.exp([0.3, -2.0])), rtol=1e-15, atol=0)
    N = np.diag([1.0, 2.0, 3.0], 1)  # nilpotent: exp = I + N + N^2/2 + N^3/6
    taylor = np.eye(4) + N + N @ N / 2 + N @ N @ N / 6
    assert np.allclose(matrix_exponential(N), taylor, rtol=1e-14, atol=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_matrix_exponential_against_eigendecomposition(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((8, 8))
    B = rng.standard_normal((8, 8))
    M = (A + A.T) / 2 + 1j * (B - B.T) / 2
    ref = eig_expm(M)
    assert np.linalg.norm(matrix_exponential(M) - ref, 1) <= 1e-11 * np.linalg.norm(ref, 1)


def test_matrix_exponential_errors():
    with pytest.raises(OverflowError):
        matrix_exponential(np.diag([800.0, 0.0]))
    with pytest.raises(ValueError):
        matrix_exponential(np.ones((2, 3)))
    with pytest.raises(ValueError):
        matrix_exponential(np.array([[np.nan]]))


def test_generator_structure():
    g = generator(0.7, 2.0, 10)
    G = g.matrix
    assert np.array_equal(np.diag(G.real), 2.0 * harmonics.laplace_spectrum(10))
    assert np.array_equal(G.real, np.diag(np.diag(G.real)))
    assert np.allclose(G.imag, G.imag.T, atol=0)
    assert np.allclose(G.imag, math.pi * 0.7 * harmonics.nu_matrix(10).dense())
    with pytest.raises(ValueError):
        generator(0.0, -1.0, 5)


def test_delocalized_examples():
    assert delocalized_limit(0) == 1.0
    assert delocalized_limit(1) == pytest.approx(3 / math.pi**2, rel=1e-14)
    # DS(2 pi) = -3 cos(2 pi) / (2 pi)^2: negative
    assert delocalized_limit(2) == pytest.approx(-3 / (4 * math.pi**2), rel=1e-14)


def test_localized_examples():
    assert localized_limit(0) == 1.0
    assert localized_limit(5) == 1.0
    assert localized_limit(-3) == 1.0
    assert np.array_equal(localized_limit([1.0, 2.0]), [1.0, 1.0])


@pytest.mark.parametrize("C", [0.0, 0.1, 5.0, 1e3])
def test_critical_at_zero_xi_is_one(C):
    assert critical_limit(0.0, C, 20) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("xi", np.linspace(-3, 3, 13))
def test_critical_zero_c_is_ds(xi):
    assert abs(critical_limit(xi, 0.0, 30) - delocalized_limit(xi)) < 1e-8


@pytest.mark.parametrize("xi", [0.25, 1.0, 2.0])
@pytest.mark.parametrize("C", [1e3, 1e4])
def test_critical_large_c_perturbative(xi, C):
    value = critical_limit(xi, C, 40)
    fourth_order = (math.pi * xi) ** 4 / (4.0 * C) ** 2
    assert value == pytest.approx(second_order_large_c(xi, C), abs=max(1e-9, fourth_order))
    assert abs(value - 1.0) < 2e-3


@settings(max_examples=30, deadline=None)
@given(st.floats(-5, 5), st.floats(0.0, 100.0))
def test_critical_limit_is_real(xi, C):
    assert abs(critical_limit_raw(xi, C, 20).imag) <= 1e-10


def test_critical_truncation_stable():
    for C in (0.01, 1.0, 100.0):
        for xi in (-5.0, -1.3, 0.4, 5.0):
            assert abs(critical_limit(xi, C, 20) - critical_limit(xi, C, 40)) <= 1e-10


def test_critical_truncation_warning():
    with pytest.warns(TruncationWarning):
        critical_limit(5.0, 0.0, 4, check_truncation=True)
    with warnings.catch_warnings():
        warnings.simplefilter("error", TruncationWarning)
        critical_limit(1.0, 1.0, 30, check_truncation=True)


def test_c_star_conversion():
    assert c_star_from_ratio(4.0, 0.0) == 1.0
    assert c_star_from_ratio(2.0, math.sqrt(3)) == pytest.approx(2.0)


def test_finite_propagator_trivial_cases():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n, W, l = int(rng.integers(2, 500)), int(rng.integers(1, 500)), int(rng.integers(1, 12))
        assert finite_n_propagator(0.0, n, W, float(rng.uniform(-1.9, 1.9)), l) == 1.0
        assert finite_n_propagator(float(rng.uniform(-5, 5)), n, W, 0.0, 1) == 1.0
    with pytest.raises(ValueError):
        finite_n_propagator(1.0, 1, 10, 0.0, 5)
    with pytest.raises(ValueError):
        finite_n_propagator(1.0, 10, 10, 2.5, 5)


def test_finite_propagator_converges_to_critical():
    target = critical_limit(1.0, c_star_from_ratio(4.0, 0.0), 25)
    errs = [abs(finite_n_propagator(1.0, 4 * W, W, 0.0, 25) - target) for W in (100, 1000, 10000)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 1e-3


def test_finite_propagator_nonzero_energy():
    E = 1.0
    target = critical_limit(0.8, c_star_from_ratio(3.0, E), 20)
    assert abs(finite_n_propagator(0.8, 30000, 10000, E, 20) - target) < 1e-3


def test_exponent_consistency():
    l, n = 20, 10**5
    for xi, C in [(1.0, 1.0), (2.5, 0.3), (-1.7, 4.0)]:
        G = generator(xi, C, l).matrix
        step = np.eye(l) - G / n
        power = np.linalg.matrix_power(step, n - 1)[0, 0]
        assert abs(power - matrix_exponential(-G)[0, 0]) < 1e-4


def test_regime_curve_closed_forms():
    c = regime_curve("delocalized", [0.0])
    assert c.values.tolist() == [1.0] and c.truncation_error.tolist() == [0.0]
    c = regime_curve("localized", [0.0, 2.0])
    assert c.values.tolist() == [1.0, 1.0]


def test_regime_curve_critical():
    c = regime_curve("critical", [0.0, 0.5, 1.0], C_star=1.0, l=30)
    assert c.values[0] == 1.0
    assert np.all(c.truncation_error <= 1e-10)
    assert c.values[2] == critical_limit(1.0, 1.0, 30)


def test_regime_curve_finite_pointwise():
    grid = np.linspace(-2, 2, 5)
    c = regime_curve("finite", grid, n=100, W=25, E=0.0, l=20)
    expected = [finite_n_propagator(x, 100, 25, 0.0, 20) for x in grid]
    assert c.values.tolist() == expected


def test_regime_curve_errors():
    with pytest.raises(ValueError):
        regime_curve("critical", [0.0])
    with pytest.raises(ValueError):
        regime_curve("finite", [0.0], n=10)
    with pytest.raises(ValueError):
        regime_curve("nonsense", [0.0])
    with pytest.raises(ValueError):
        regime_curve("delocalized", [np.inf])
    with pytest.warns(TruncationWarning):
        regime_curve("critical", [5.0], C_star=0.0, l=4)


def test_module_constants():
    assert limits.DEFAULT_ORDER == 30
