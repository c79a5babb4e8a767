import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bandcorr.scaling import (
    energy_params,
    saddle_points,
    scaled_pair,
    semicircle_cdf,
    semicircle_density,
    t_star,
)

bulk = st.floats(min_value=-1.999, max_value=1.999, allow_nan=False)


def test_semicircle_density_values():
    assert semicircle_density(0) == pytest.approx(1 / math.pi, rel=1e-15)
    assert semicircle_density(2) == 0.0
    assert semicircle_density(-2) == 0.0
    assert semicircle_density(1) == pytest.approx(math.sqrt(3) / (2 * math.pi), rel=1e-15)
    with pytest.raises(ValueError):
        semicircle_density(2.0001)


def test_semicircle_cdf_matches_density():
    x = np.linspace(-2, 2, 2001)
    cdf = semicircle_cdf(x)
    assert cdf[0] == pytest.approx(0.0, abs=1e-15)
    assert cdf[-1] == pytest.approx(1.0, abs=1e-15)
    mid = 0.5 * (x[1:] + x[:-1])
    dens = np.array([semicircle_density(e) for e in mid])
    assert np.allclose(np.diff(cdf) / np.diff(x), dens, atol=2e-3)


def test_saddle_points_values():
    a_plus, a_minus = saddle_points(0)
    assert a_plus == pytest.approx(1) and a_minus == pytest.approx(-1)
    a_plus, a_minus = saddle_points(1)
    assert a_plus == pytest.approx((1j + math.sqrt(3)) / 2, abs=1e-15)
    assert a_minus == pytest.approx((1j - math.sqrt(3)) / 2, abs=1e-15)
    for bad in (2, -2, 3):
        with pytest.raises(ValueError):
            saddle_points(bad)


@given(bulk)
def test_saddle_point_identities(E):
    a_plus, a_minus = saddle_points(E)
    assert abs(abs(a_plus) - 1) < 1e-14
    assert abs(abs(a_minus) - 1) < 1e-14
    assert abs(a_plus * a_minus + 1) < 1e-14
    assert a_minus == -a_plus.conjugate()
    assert abs(t_star(E) - abs(a_plus - a_minus) ** 2) < 1e-13


def test_t_star_values():
    assert t_star(0) == 4.0
    assert t_star(math.sqrt(3)) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(ValueError):
        t_star(2)


@given(bulk)
def test_t_star_equals_density_form(E):
    assert t_star(E) == pytest.approx((2 * math.pi * semicircle_density(E)) ** 2, rel=1e-14)
    assert t_star(E) == 4 - E * E


def test_scaled_pair_examples():
    p = scaled_pair(0, 0, 100)
    assert (p.lambda1, p.lambda2) == (0.0, 0.0)
    p = scaled_pair(0, 1, 100)
    assert p.lambda1 == pytest.approx(math.pi / 200, rel=1e-14)
    assert p.lambda2 == pytest.approx(-math.pi / 200, rel=1e-14)
    p = scaled_pair(1, 2, 50)
    shift = 2 / (100 * math.sqrt(3) / (2 * math.pi))
    assert p.lambda1 == pytest.approx(1 + shift, rel=1e-14)
    assert p.lambda2 == pytest.approx(1 - shift, rel=1e-14)
    with pytest.raises(ValueError):
        scaled_pair(2, 1, 10)
    with pytest.raises(ValueError):
        scaled_pair(0, 1, 0)


@given(bulk, st.floats(-50, 50), st.integers(1, 10**6))
def test_scaled_pair_invariants(E, xi, N):
    p = scaled_pair(E, xi, N)
    q = scaled_pair(E, -xi, N)
    assert (q.lambda1, q.lambda2) == (p.lambda2, p.lambda1)
    assert abs(p.lambda1 + p.lambda2 - 2 * E) <= 4e-16 * max(1.0, abs(p.lambda1) + abs(p.lambda2))


def test_energy_params_bundle():
    ep = energy_params(0.5)
    assert ep.t_star == pytest.approx((2 * math.pi * ep.rho) ** 2)
    assert ep.a_plus * ep.a_minus == pytest.approx(-1)
