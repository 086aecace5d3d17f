import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from strongweak.covmodels import (Cauchy, Constant, Dependence, LogPower, PowerLawTail, classify,
                                  evaluate, model_from_mapping, spectral_constant_c2)
from strongweak.errors import BoundaryCase, DomainError


@pytest.mark.parametrize("z, r, expected", [(4, 0, 1.0), (2, 1, 0.5), (0.4, 3, 10 ** -0.2)])
def test_cauchy_values(z, r, expected):
    assert evaluate(Cauchy(z), r) == pytest.approx(expected, rel=1e-14)


def test_cauchy_value_example():
    assert float(Cauchy(0.4).evaluate(3.0)) == pytest.approx(0.63096, abs=1e-5)


def test_cauchy_strictly_decreasing():
    r = np.linspace(0, 50, 2001)
    for z in (0.2, 1.0, 4.0):
        assert np.all(np.diff(Cauchy(z).evaluate(r)) < 0)


@given(st.floats(0.05, 6.0), st.floats(0.0, 1e6))
def test_correlation_bounded_by_one(z, r):
    v = float(Cauchy(z).evaluate(r))
    assert 0.0 <= v <= 1.0


def test_classify_examples():
    assert classify(Cauchy(0.2), 2).dependence is Dependence.LONG_RANGE
    c = classify(Cauchy(2.5), 1)
    assert c.dependence is Dependence.SHORT_RANGE and not c.is_long_range
    with pytest.raises(BoundaryCase):
        classify(Cauchy(1.0), 2)


def test_classify_ignores_slowvar_scale():
    a = classify(PowerLawTail(0.5, Constant(1.0)))
    b = classify(PowerLawTail(0.5, Constant(0.3)))
    assert a.dependence is b.dependence


def test_spectral_constant():
    assert spectral_constant_c2(2, 1.0) == pytest.approx(1 / (2 * math.pi), rel=1e-13)
    assert spectral_constant_c2(2, 0.4) == pytest.approx(0.06117, abs=1e-5)
    with pytest.raises(DomainError):
        spectral_constant_c2(2, 2.0)
    alphas = np.linspace(0.05, 1.95, 4000)
    vals = np.array([spectral_constant_c2(2, a) for a in alphas])
    assert np.all(vals > 0)
    # no jumps: neighbouring values differ by a small relative amount
    assert np.max(np.abs(np.diff(vals)) / vals[1:]) < 0.02


def test_slowly_varying_ratio():
    L = LogPower(1.0)
    r = 1e250
    for t in (0.5, 2.0, 10.0):
        assert float(L(t * r) / L(r)) == pytest.approx(1.0, abs=0.01)


def test_power_law_tail_matches_cauchy_for_constant():
    r = np.linspace(0, 30, 50)
    np.testing.assert_allclose(PowerLawTail(1.5).evaluate(r), Cauchy(1.5).evaluate(r), rtol=1e-14)


def test_power_law_with_log_factor_is_normalised():
    m = PowerLawTail(0.5, LogPower(-1.0))
    assert float(m.evaluate(0.0)) == pytest.approx(1.0)
    assert classify(m).is_long_range


def test_model_from_mapping_round_trip():
    for m in (Cauchy(2.5), PowerLawTail(0.4, LogPower(-0.5))):
        assert model_from_mapping(m.to_dict()) == m
    assert model_from_mapping({"kind": '"cauchy"', "z": "0.2"}) == Cauchy(0.2)
    with pytest.raises(DomainError):
        model_from_mapping({"kind": "matern"})
