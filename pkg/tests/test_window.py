import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from strongweak.errors import DivergentIntegral
from strongweak.window import (WindowSpec, c1_coefficient, distance_density, double_integral,
                               set_covariance)


def test_geometry():
    w = WindowSpec(3.0)
    assert w.area == pytest.approx(36.0)
    assert w.diameter == pytest.approx(6 * math.sqrt(2))


@pytest.mark.parametrize("u, expected", [((0, 0), 4.0), ((2, 0), 0.0), ((1, 1), 1.0)])
def test_set_covariance_examples(u, expected):
    assert set_covariance(WindowSpec(1.0), np.array(u, float)) == pytest.approx(expected)


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.1, 3))
def test_set_covariance_symmetric(u1, u2, r):
    w = WindowSpec(r)
    u = np.array([u1, u2])
    assert set_covariance(w, u) == pytest.approx(set_covariance(w, -u))
    assert set_covariance(w, u) <= set_covariance(w, np.zeros(2)) + 1e-12


def test_distance_density_support_and_normalisation():
    w = WindowSpec(1.0)
    assert distance_density(w, 2 * 2 * math.sqrt(2)) == 0.0
    total, _ = integrate.quad(lambda s: distance_density(w, s), 0, w.diameter,
                              points=[2.0], limit=200, epsabs=1e-12)
    assert total == pytest.approx(1.0, abs=1e-8)
    grid = np.linspace(0, w.diameter, 97)
    assert np.all(np.asarray(distance_density(w, grid)) >= 0)


def test_mean_distance_unit_square():
    w = WindowSpec(0.5)
    mean, _ = integrate.quad(lambda s: s * distance_density(w, s), 0, w.diameter, points=[1.0],
                             limit=200, epsabs=1e-12)
    exact = (2 + math.sqrt(2) + 5 * math.log(1 + math.sqrt(2))) / 15
    assert mean == pytest.approx(exact, abs=1e-8)
    assert mean == pytest.approx(0.5214054, abs=1e-7)


def test_c1_limits_and_errors():
    w = WindowSpec(1.0)
    assert c1_coefficient(w, 1, 0.0) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(DivergentIntegral):
        c1_coefficient(w, 2, 1.2)


def test_c1_closed_form_unit_square():
    # E|U - V|^{-1} on the unit square has a closed form
    exact = 4 * math.log(1 + math.sqrt(2)) - 4 / 3 * (math.sqrt(2) - 1)
    assert c1_coefficient(WindowSpec(0.5), 1, 1.0) == pytest.approx(exact, rel=1e-8)


def test_c1_scaling_law():
    base = c1_coefficient(WindowSpec(1.0), 2, 0.3)
    for r in (2.0, 4.0):
        assert c1_coefficient(WindowSpec(r), 2, 0.3) == pytest.approx(r ** -0.6 * base, rel=1e-7)


def test_double_integral_constant():
    assert double_integral(WindowSpec(1.0), lambda s: 1.0) == pytest.approx(16.0, rel=1e-9)


def test_double_integral_inverse_distance_vs_monte_carlo():
    w = WindowSpec(1.0)
    val = double_integral(w, lambda s: 1.0 / s, singular_exponent=1.0)
    rng = np.random.default_rng(3)
    u = rng.uniform(-1, 1, (2_000_000, 4))
    mc = 16.0 * np.mean(1.0 / np.hypot(u[:, 0] - u[:, 2], u[:, 1] - u[:, 3]))
    assert val == pytest.approx(mc, rel=0.01)


def test_short_range_double_integral_over_area_converges():
    vals = []
    for r in (10.0, 20.0, 40.0, 80.0):
        w = WindowSpec(r)
        vals.append(double_integral(w, lambda s: (1 + s * s) ** -2.5) / r ** 2)
    diffs = np.abs(np.diff(vals))
    assert np.all(diffs[1:] < diffs[:-1])
    assert abs(vals[-1] - vals[-2]) / vals[-1] < 0.02
