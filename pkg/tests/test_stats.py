import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special, stats as sps

from strongweak.errors import DegenerateVariance, EmptySample, InsufficientPoints
from strongweak.stats import (SampleSet, ecdf, kolmogorov_sf, ks_two_sample, loglog_slope,
                              pairs_to_csv, qq_points, skewness)

samples = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=40)


def test_sample_set_validation():
    with pytest.raises(EmptySample):
        SampleSet(np.array([]))
    with pytest.raises(ValueError):
        SampleSet(np.array([1.0, np.nan]))
    assert list(SampleSet(np.array([3.0, 1.0])).sorted) == [1.0, 3.0]


def test_ecdf():
    xs, f = ecdf([3, 1, 1, 2])
    assert list(xs) == [1, 2, 3] and list(f) == [0.5, 0.75, 1.0]


def test_ks_examples():
    r = ks_two_sample([1, 2, 3], [1, 2, 3])
    assert r.statistic == 0.0 and r.p_value == 1.0
    assert ks_two_sample([1, 2, 3], [1.5, 2.5, 3.5]).statistic == pytest.approx(1 / 3)
    rng = np.random.default_rng(0)
    far = ks_two_sample(rng.standard_normal(10_000), rng.standard_normal(10_000) + 2)
    assert far.rejects(1e-6)
    with pytest.raises(EmptySample):
        ks_two_sample([], [1.0])


def test_ks_matches_scipy_statistic_and_series():
    rng = np.random.default_rng(1)
    a, b = rng.standard_normal(300), rng.standard_t(5, 400)
    assert ks_two_sample(a, b).statistic == pytest.approx(sps.ks_2samp(a, b).statistic)
    for lam in (0.3, 0.6, 1.0, 1.7, 2.5):
        assert kolmogorov_sf(lam) == pytest.approx(special.kolmogorov(lam), abs=1e-12)


@given(samples, samples)
def test_ks_symmetric(a, b):
    x, y = ks_two_sample(a, b), ks_two_sample(b, a)
    assert x.statistic == pytest.approx(y.statistic) and x.p_value == pytest.approx(y.p_value)
    assert 0.0 <= x.statistic <= 1.0 and 0.0 <= x.p_value <= 1.0


spaced = st.lists(st.integers(-1000, 1000).map(float), min_size=1, max_size=40)


@given(spaced, spaced)
def test_ks_invariant_under_increasing_transform(a, b):
    f = lambda v: np.arctan(np.asarray(v) / 100.0) * 7 + 3
    assert ks_two_sample(a, b).statistic == pytest.approx(ks_two_sample(f(a), f(b)).statistic)


def test_ks_calibration_under_null():
    rng = np.random.default_rng(2024)
    rejections = sum(ks_two_sample(rng.standard_normal(500), rng.standard_normal(500)).rejects(0.05)
                     for _ in range(2000))
    assert 0.035 <= rejections / 2000 <= 0.065


def test_skewness():
    assert skewness([-1, 0, 1]) == 0.0
    with pytest.raises(DegenerateVariance):
        skewness([2.0, 2.0, 2.0])
    rng = np.random.default_rng(5)
    w = rng.standard_normal((1_000_000, 2))
    y = w[:, 0] + w[:, 1] ** 2 - 1
    assert skewness(y) == pytest.approx(8 / 3 ** 1.5, abs=0.05)


@settings(deadline=None)
@given(st.lists(st.floats(-100, 100), min_size=3, max_size=30), st.floats(0.01, 100), st.floats(-50, 50))
def test_skewness_affine_invariance(x, scale, shift):
    x = np.asarray(x)
    if np.std(x) < 1e-3:
        return
    assert skewness(scale * x + shift) == pytest.approx(skewness(x), abs=1e-6)


def test_loglog_slope():
    fit = loglog_slope([(r, 7 * r ** 3.6) for r in (10, 20, 40, 80)])
    assert fit.slope == pytest.approx(3.6, abs=1e-9)
    assert loglog_slope([(r, 5.0) for r in (1, 2, 3)]).slope == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(InsufficientPoints):
        loglog_slope([(1, 1), (2, 2), (2, 3)])


def test_qq_points():
    a = np.arange(10.0)
    assert all(x == y for x, y in qq_points(a, a, 9))
    assert qq_points([1, 2, 3], [4, 5, 6, 7], k=1) == [(2.0, 5.5)]
    rng = np.random.default_rng(9)
    pts = np.array(qq_points(rng.standard_normal(10_000), rng.standard_normal(10_000), 99))
    assert np.max(np.abs(pts[:, 0] - pts[:, 1])) < 0.1
    with pytest.raises(EmptySample):
        qq_points([], [1.0])


def test_pairs_csv():
    assert pairs_to_csv([(1.0, 2.5)]) == "x,y\n1.0,2.5\n"
