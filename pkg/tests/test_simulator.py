import io

import numpy as np
import pytest

from strongweak.covmodels import Cauchy, classify
from strongweak.errors import DomainError, EmbeddingFailure
from strongweak.simulator import (GridSpec, Method, dump_binary, embedding_diagnostics, load_binary,
                                  simulate_component, simulate_vector, to_csv)
from strongweak.stats import excess_kurtosis, skewness


def test_grid_covers_window():
    for r, h in [(10, 1), (3.3, 0.7), (0.5, 1.0)]:
        g = GridSpec(r, h)
        assert g.points_per_side * h >= 2 * r - 1e-12
        assert g.cell_area > 0
    assert GridSpec(0.5).points_per_side == 1
    with pytest.raises(DomainError):
        GridSpec(-1.0)


def test_single_node_is_standard_normal():
    g = GridSpec(0.5)
    vals = np.array([simulate_component(g, Cauchy(2.0), 11, s).values[0, 0] for s in range(100_000)])
    assert 0.98 <= vals.var() <= 1.02


def test_determinism_and_stream_separation():
    g = GridSpec(20)
    a = simulate_component(g, Cauchy(0.4), 5, 3)
    b = simulate_component(g, Cauchy(0.4), 5, 3)
    c = simulate_component(g, Cauchy(0.4), 5, 4)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


@pytest.mark.parametrize("method", [Method.CHOLESKY, Method.CIRCULANT])
def test_covariance_reproduction(method):
    z = 4.0
    g = GridSpec(16)
    reps = 2000
    lags = [1, 2, 3]
    prods = {k: [] for k in lags}
    for i in range(reps):
        v = simulate_component(g, Cauchy(z), 1, i, method=method).values
        for k in lags:
            prods[k].append(np.mean(v[:, :-k] * v[:, k:]))
    for k in lags:
        x = np.asarray(prods[k])
        target = (1 + k * k) ** (-z / 2)
        assert abs(x.mean() - target) < 4 * x.std(ddof=1) / np.sqrt(reps)


def test_vector_independence_and_classes():
    g = GridSpec(8)
    models = [Cauchy(4), Cauchy(0.4), Cauchy(0.4)]
    f = simulate_vector(g, models, 9, 0)
    assert f.m == 1 and f.n == 2 and f.p == 3
    assert len({c.stream for c in f.components}) == 3
    assert [classify(m).is_long_range for m in models] == [False, True, True]
    reps = 1000
    cross = np.array([np.mean(np.prod(simulate_vector(g, models[:2], 2, 2 * i).window_values(), axis=1))
                      for i in range(reps)])
    assert abs(cross.mean()) < 4 * cross.std(ddof=1) / np.sqrt(reps)
    with pytest.raises(DomainError):
        simulate_vector(g, [], 1)
    with pytest.raises(DomainError):
        simulate_vector(g, [Cauchy(0.4), Cauchy(4)], 1)


def test_gaussian_marginals_and_zero_mean():
    g = GridSpec(8)
    reps = 500
    vals = np.stack([simulate_component(g, Cauchy(1.0), 4, i).values for i in range(reps)])
    pooled = vals.ravel()
    assert abs(skewness(pooled)) < 0.05
    assert abs(excess_kurtosis(pooled)) < 0.15
    assert np.all(np.abs(vals.mean(axis=0)) < 4 / np.sqrt(reps))


def test_embedding_diagnostics():
    small = simulate_component(GridSpec(4), Cauchy(4), 0)
    assert embedding_diagnostics(small) == {"method": "ExactCholesky", "clip_error": 0.0,
                                            "padded_size": 0}
    big = simulate_component(GridSpec(128), Cauchy(4), 0)
    d = embedding_diagnostics(big)
    assert d["method"] == "CirculantEmbedding" and d["padded_size"] == 512
    assert d["clip_error"] <= 1e-6
    try:
        lm = simulate_component(GridSpec(128), Cauchy(0.4), 0)
        assert lm.embedding_clip_error <= 1e-2
    except EmbeddingFailure:
        pass
    with pytest.raises(EmbeddingFailure):
        simulate_component(GridSpec(128), Cauchy(0.4), 0, clip_ceiling=-1.0)


def test_binary_dump_round_trip():
    f = simulate_component(GridSpec(6, 0.5), Cauchy(2.5), 3, 1)
    buf = io.BytesIO()
    dump_binary(f, buf)
    raw = buf.getvalue()
    assert raw[:4] == b"FLDG" and len(raw) == 32 + 8 * f.values.size
    buf.seek(0)
    grid, values = load_binary(buf)
    assert grid == f.grid and np.array_equal(values, f.values)
    text = to_csv(f)
    assert text.splitlines()[0] == "x,y,value"
    assert len(text.splitlines()) == 1 + f.values.size
    with pytest.raises(DomainError):
        load_binary(io.BytesIO(b"JUNK" + raw[4:]))
