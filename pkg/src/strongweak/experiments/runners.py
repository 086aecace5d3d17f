"""Replication harness and the experiment runners.

Replication ``i`` of block ``b`` (a regime or an ``r`` value) draws its
components from streams ``(b << 40) + i * p + j``, so every sample can be
regenerated from ``(seed, stream)`` alone and results never depend on how
replications were scheduled across threads.
"""
from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy import stats as sps

from ..asymptotics import ScalingPrediction, normalizer, predict_variance
from ..covmodels import CovarianceModel, classify
from ..errors import ConfigError, QuadratureNotConverged
from ..functionals import FunctionalSample, centered_minkowski, decompose
from ..hermite import (HermiteExpansion, ReductionSets, coefficients, expand, hermite_rank,
                       reduction_sets, student_indicator, student_mean_constant,
                       student_rank1_coeff, student_rank2_coeff, student_rank2_deriv)
from ..simulator import GridSpec, VectorFieldRealization, simulate_vector
from ..stats import (KSResult, LogLogFit, SampleSet, excess_kurtosis, ks_two_sample,
                     loglog_slope, qq_points, skewness)
from .config import ExperimentConfig, ExperimentKind

__all__ = [
    "ExperimentResult",
    "replicate",
    "stream_for",
    "run_reduction",
    "run_student_minkowski",
    "run_variance_scan",
    "run_coefficients",
    "run_simulate",
    "run",
]

BLOCK_SHIFT = 40


@dataclass
class ExperimentResult:
    """Everything an experiment produces.

    ``samples`` keeps the raw per-replication values with provenance;
    ``sample_sets`` holds the same values per kind, and ``normalized`` the
    values divided by their sample standard deviation. ``timing`` is kept
    apart from the rest because wall-clock time is not reproducible.
    """

    config: ExperimentConfig
    samples: list[FunctionalSample] = field(default_factory=list)
    sample_sets: dict[str, SampleSet] = field(default_factory=dict)
    normalized: dict[str, SampleSet] = field(default_factory=dict)
    ks: list[tuple[str, str, KSResult]] = field(default_factory=list)
    moments: dict[str, dict[str, float]] = field(default_factory=dict)
    fits: dict[str, dict] = field(default_factory=dict)
    predictions: dict[str, ScalingPrediction] = field(default_factory=dict)
    qq: dict[str, list[tuple[float, float]]] = field(default_factory=dict)
    tables: dict[str, list[dict]] = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    timing: dict[str, float] = field(default_factory=dict)
    fields: list[VectorFieldRealization] = field(default_factory=list)

    def ks_between(self, a: str, b: str) -> KSResult:
        for x, y, res in self.ks:
            if {x, y} == {a, b}:
                return res
        raise KeyError((a, b))


# ----------------------------------------------------------------------------
# harness
# ----------------------------------------------------------------------------
def stream_for(block: int, rep: int, p: int) -> int:
    return (block << BLOCK_SHIFT) + rep * p


def replicate(fn: Callable[[int], object], count: int, threads: int = 1) -> list:
    """``[fn(0), ..., fn(count - 1)]``, evaluated on up to ``threads`` threads."""
    if threads <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))


def _exponents(models: Sequence[CovarianceModel]) -> tuple[list[float], list[float]]:
    betas, alphas = [], []
    for mod in models:
        (alphas if classify(mod).is_long_range else betas).append(mod.tail_exponent)
    return betas, alphas


def _sim_kwargs(cfg: ExperimentConfig) -> dict:
    return dict(method=cfg.method, padding=cfg.padding, clip_ceiling=cfg.clip_ceiling)


def _field_diagnostics(field_: VectorFieldRealization) -> list[dict]:
    return [{"method": c.method.value, "clip_error": c.embedding_clip_error,
             "padded_size": c.padded_size} for c in field_.components]


def _normalize(values: np.ndarray) -> np.ndarray:
    sd = float(np.std(values, ddof=1))
    return values / sd if sd > 0 else values


def _fill_sets(result: ExperimentResult, keys: Sequence[str]) -> None:
    by_key: dict[str, list[float]] = {k: [] for k in keys}
    for s in result.samples:
        if s.name in by_key:
            by_key[s.name].append(s.value)
    for k in keys:
        vals = np.asarray(by_key[k])
        result.sample_sets[k] = SampleSet(vals, k)
        result.normalized[k] = SampleSet(_normalize(vals), k)


def _ks_all(result: ExperimentResult, keys: Sequence[str]) -> None:
    for a, b in itertools.combinations(keys, 2):
        result.ks.append((a, b, ks_two_sample(result.normalized[a], result.normalized[b])))


def _moments(result: ExperimentResult, keys: Sequence[str]) -> None:
    for k in keys:
        x = result.normalized[k]
        result.moments[k] = {"mean": float(np.mean(result.sample_sets[k].values)),
                             "variance": float(np.var(result.sample_sets[k].values, ddof=1)),
                             "skewness": skewness(x), "excess_kurtosis": excess_kurtosis(x)}


# ----------------------------------------------------------------------------
# functional set-up
# ----------------------------------------------------------------------------
def _student_expansion(n: int, a: float) -> HermiteExpansion:
    """Closed-form coefficients of the centred Student indicator at orders 1 and 2.

    Only the indices that can attain the minimal exponent sum are kept: the
    first-order index on the numerator and the pure squares on denominator
    components.
    """
    p = n + 1
    coeffs = {tuple([1] + [0] * n): student_rank1_coeff(n, a)}
    c2 = student_rank2_coeff(n, a)
    for j in range(1, p):
        v = [0] * p
        v[j] = 2
        coeffs[tuple(v)] = c2
    return HermiteExpansion.from_coefficients(coeffs, p, 2)


def _functional(cfg: ExperimentConfig) -> tuple[HermiteExpansion, Callable | None, int]:
    f = cfg.functional
    if f.kind == "polynomial":
        e = f.expansion()
        return e, None, e.dimension
    G = student_indicator(f.n, f.a)
    e = expand(G, f.n + 1, cfg.truncation_order, method="qmc", qmc_points=cfg.qmc_points,
               seed=cfg.seed)
    return e, G, f.n + 1


def _kind_expansion(e: HermiteExpansion, key: str, rs: ReductionSets | None) -> HermiteExpansion:
    kappa = hermite_rank(e)
    base = key.split("@")[0]
    if base == "Kr":
        return e
    if base.startswith("KrKappa"):
        return e.restrict([kappa])
    if base == "Vr":
        return e.restrict(range(kappa + 1, e.truncation_order + 1))
    if base.startswith("KrStar") and rs is not None:
        level = int(base[len("KrStar"):])
        keep = set(rs.N_star[level])
        return HermiteExpansion({v: c for v, c in e.coeffs.items() if v in keep}, e.dimension,
                                e.truncation_order)
    raise ConfigError(f"no expansion for kind {key!r}")


def _polynomial_block(cfg, models, e, G, rs, r, block, pooled: bool):
    """Simulate ``replications`` fields at radius ``r``; returns samples, power sums, diagnostics."""
    grid = GridSpec(r, cfg.h)
    p = len(models)
    kw = _sim_kwargs(cfg)

    def one(i):
        fld = simulate_vector(grid, models, cfg.seed, stream_for(block, i, p), **kw)
        parts = decompose(fld, e, rs, G)
        sums = None
        if pooled:
            y = e(fld.window_values()) if G is None else G(fld.window_values())
            sums = np.array([y.size, y.sum(), (y * y).sum(), (y ** 3).sum()])
        return fld, parts, sums

    return replicate(one, cfg.replications, cfg.threads)


def _pooled_skewness(sums: np.ndarray) -> float:
    n, s1, s2, s3 = sums
    mu = s1 / n
    m2 = s2 / n - mu * mu
    m3 = s3 / n - 3 * mu * s2 / n + 2 * mu ** 3
    return float(m3 / m2 ** 1.5)


# ----------------------------------------------------------------------------
# runners
# ----------------------------------------------------------------------------
def run_reduction(cfg: ExperimentConfig) -> ExperimentResult:
    """``K_r`` against ``V_r``, ``K_{r,κ}`` and ``K*_{r,l}`` on common realizations.

    Each kind is normalised by its sample standard deviation before the
    pairwise KS tests; the pooled marginal skewness of ``G(η)`` is reported.
    """
    t0 = time.perf_counter()
    res = ExperimentResult(cfg)
    models = cfg.models
    if not models:
        raise ConfigError("reduction needs [component.*] sections")
    e, G, _ = _functional(cfg)
    betas, alphas = _exponents(models)
    rs = reduction_sets(e, betas, alphas)
    res.predictions["Kr"] = predict_variance(e, betas, alphas)
    multi = len(cfg.r_values) > 1
    keys_all = []
    for block, r in enumerate(cfg.r_values):
        out = _polynomial_block(cfg, models, e, G, rs, r, block, pooled=True)
        label = f"r={r:g}" if multi else ""
        keys = [f"{k}@{label}" if label else k for k in _sample_names(out[0][1])]
        for _, parts, _ in out:
            for s in parts.values():
                res.samples.append(replace(s, label=label) if label else s)
        _fill_sets(res, keys)
        _ks_all(res, keys)
        _moments(res, keys)
        kr = keys[0]
        for other in keys[1:]:
            res.qq[f"{_slug(kr)}_{_slug(other)}"] = qq_points(res.normalized[kr], res.normalized[other],
                                                              cfg.qq_points)
        sums = np.sum([s for *_, s in out], axis=0)
        res.diagnostics[label or "main"] = {
            "r": r, "components": _field_diagnostics(out[0][0]),
            "pooled_skewness": _pooled_skewness(sums), "pooled_values": int(sums[0]),
            "normalizer": normalizer(res.predictions["Kr"], r),
        }
        keys_all += keys
    res.diagnostics["reduction"] = {"kappa": rs.kappa, "gamma_tilde": rs.gamma_tilde,
                                    "L_plus": list(rs.L_plus),
                                    "N_star": {str(l): [list(v) for v in vs] for l, vs in rs.N_star.items()}}
    res.timing["wall_seconds"] = time.perf_counter() - t0
    return res


def _sample_names(parts: dict[str, FunctionalSample]) -> list[str]:
    """``Kr`` first, then the remaining kinds in decomposition order."""
    return [parts["Kr"].name] + [s.name for k, s in parts.items() if k != "Kr"]


def _slug(name: str) -> str:
    return name.replace("@", "_").replace("=", "").replace(".", "p")


def run_student_minkowski(cfg: ExperimentConfig) -> ExperimentResult:
    """Centred excursion areas of the Student field under each configured regime."""
    t0 = time.perf_counter()
    if cfg.functional.kind != "student":
        raise ConfigError("the student experiment needs functional = student")
    res = ExperimentResult(cfg)
    n, a = cfg.functional.n, cfg.functional.a
    e = _student_expansion(n, a)
    regimes = cfg.regime_models()
    multi = len(cfg.r_values) > 1
    keys = []
    block = 0
    for r in cfg.r_values:
        grid = GridSpec(r, cfg.h)
        for name, models in regimes:
            label = f"{name}@r={r:g}" if multi else name
            p = len(models)
            kw = _sim_kwargs(cfg)

            def one(i, models=models, block=block):
                fld = simulate_vector(grid, models, cfg.seed, stream_for(block, i, p), **kw)
                return fld, centered_minkowski(fld, n, a)

            out = replicate(one, cfg.replications, cfg.threads)
            res.samples += [replace(s, label=label) for _, s in out]
            key = f"Minkowski@{label}"
            keys.append(key)
            betas, alphas = _exponents(models)
            res.predictions[key] = predict_variance(e, betas, alphas)
            res.diagnostics[label] = {"r": r, "block": block,
                                      "components": _field_diagnostics(out[0][0]),
                                      "centering": grid.window_area * student_mean_constant(n, a),
                                      "normalizer": normalizer(res.predictions[key], r)}
            block += 1
    _fill_sets(res, keys)
    _ks_all(res, keys)
    _moments(res, keys)
    probs = np.arange(1, cfg.qq_points + 1) / (cfg.qq_points + 1)
    for k in keys:
        qs = np.quantile(res.normalized[k].values - np.mean(res.normalized[k].values), probs)
        res.qq[f"{_slug(k)}_normal"] = [(float(u), float(v)) for u, v in zip(qs, sps.norm.ppf(probs))]
    for ka, kb in itertools.combinations(keys, 2):
        res.qq[f"{_slug(ka)}_{_slug(kb)}"] = qq_points(res.normalized[ka], res.normalized[kb],
                                                       cfg.qq_points)
    res.timing["wall_seconds"] = time.perf_counter() - t0
    return res


def run_variance_scan(cfg: ExperimentConfig) -> ExperimentResult:
    """Sample variance of each requested kind across ``r_values`` and its log-log slope."""
    t0 = time.perf_counter()
    res = ExperimentResult(cfg)
    regimes = cfg.regime_models()
    if len(regimes) != 1:
        raise ConfigError("a variance scan takes a single model list")
    models = regimes[0][1]
    betas, alphas = _exponents(models)
    student = cfg.functional.kind == "student"
    if student:
        e = _student_expansion(cfg.functional.n, cfg.functional.a)
        kinds = cfg.kinds or ("Minkowski",)
        rs = None
    else:
        e, G, _ = _functional(cfg)
        rs = reduction_sets(e, betas, alphas)
        kinds = cfg.kinds or ("Vr", f"KrKappa{rs.kappa}")
    variances: dict[str, list[tuple[float, float]]] = {k: [] for k in kinds}
    p = len(models)
    for block, r in enumerate(cfg.r_values):
        label = f"r={r:g}"
        if student:
            grid = GridSpec(r, cfg.h)
            kw = _sim_kwargs(cfg)

            def one(i, block=block):
                fld = simulate_vector(grid, models, cfg.seed, stream_for(block, i, p), **kw)
                return fld, {"Minkowski": centered_minkowski(fld, cfg.functional.n, cfg.functional.a)}

            out = replicate(one, cfg.replications, cfg.threads)
        else:
            out = [(f, parts) for f, parts, _ in
                   _polynomial_block(cfg, models, e, None, rs, r, block, pooled=False)]
        by_kind = {k: [] for k in kinds}
        for _, parts in out:
            named = {s.name: s for s in parts.values()}
            for k in kinds:
                if k not in named:
                    raise ConfigError(f"unknown kind {k!r}; available: {sorted(named)}")
                res.samples.append(replace(named[k], label=label))
                by_kind[k].append(named[k].value)
        for k in kinds:
            variances[k].append((r, float(np.var(by_kind[k], ddof=1))))
        res.diagnostics[label] = {"r": r, "block": block, "components": _field_diagnostics(out[0][0])}
    for k in kinds:
        fit: LogLogFit = loglog_slope(variances[k])
        ek = e if student else _kind_expansion(e, k, rs)
        pred = predict_variance(ek, betas, alphas)
        res.predictions[k] = pred
        res.fits[k] = {"slope": fit.slope, "intercept": fit.intercept, "stderr": fit.stderr,
                       "predicted_exponent": pred.exponent,
                       "deviation": fit.slope - pred.exponent,
                       "variances": [[r, v] for r, v in variances[k]]}
    res.timing["wall_seconds"] = time.perf_counter() - t0
    return res


def run_coefficients(cfg: ExperimentConfig) -> ExperimentResult:
    """Student closed forms against quadrature over the ``(n, a)`` grid."""
    t0 = time.perf_counter()
    res = ExperimentResult(cfg)
    rows = []
    step = cfg.fd_step
    for n in cfg.n_values:
        for a in cfg.a_values:
            v1 = tuple([1] + [0] * n)
            v2 = tuple([0, 2] + [0] * (n - 1))
            row = {"n": n, "a": float(a), "mean": student_mean_constant(n, a),
                   "mean_tdist": float(sps.t.sf(a, n)),
                   "rank1": student_rank1_coeff(n, a), "rank2": student_rank2_coeff(n, a),
                   "deriv": student_rank2_deriv(n, a),
                   "deriv_fd": (student_rank2_coeff(n, a + step)
                                - student_rank2_coeff(n, a - step)) / (2 * step)}
            try:
                est, err = coefficients(student_indicator(n, a), [v1, v2], method="qmc",
                                        qmc_points=cfg.qmc_points, seed=cfg.seed)
                row.update(rank1_quad=float(est[0]), rank1_err=float(err[0]),
                           rank2_quad=float(est[1]), rank2_err=float(err[1]), status="ok")
            except QuadratureNotConverged as exc:
                row.update(rank1_quad=math.nan, rank1_err=math.nan, rank2_quad=math.nan,
                           rank2_err=math.nan, status=f"QuadratureNotConverged: {exc}")
            rows.append(row)
    res.tables["coeffs"] = rows
    res.diagnostics["max_abs_diff"] = {
        "rank1": max(abs(r["rank1"] - r["rank1_quad"]) for r in rows),
        "rank2": max(abs(r["rank2"] - r["rank2_quad"]) for r in rows),
        "deriv": max(abs(r["deriv"] - r["deriv_fd"]) for r in rows),
        "mean": max(abs(r["mean"] - r["mean_tdist"]) for r in rows),
    }
    res.timing["wall_seconds"] = time.perf_counter() - t0
    return res


def run_simulate(cfg: ExperimentConfig) -> ExperimentResult:
    """One realization per configured regime and ``r`` (replication 0), kept in ``fields``."""
    t0 = time.perf_counter()
    res = ExperimentResult(cfg)
    block = 0
    for r in cfg.r_values:
        grid = GridSpec(r, cfg.h)
        for name, models in cfg.regime_models():
            fld = simulate_vector(grid, models, cfg.seed, stream_for(block, 0, len(models)),
                                  **_sim_kwargs(cfg))
            res.fields.append(fld)
            res.diagnostics[f"{name}@r={r:g}"] = {
                "block": block, "components": _field_diagnostics(fld),
                "streams": [c.stream for c in fld.components]}
            block += 1
    res.timing["wall_seconds"] = time.perf_counter() - t0
    return res


_RUNNERS = {
    ExperimentKind.REDUCTION: run_reduction,
    ExperimentKind.STUDENT_MINKOWSKI: run_student_minkowski,
    ExperimentKind.VARIANCE_SCAN: run_variance_scan,
    ExperimentKind.COEFFICIENTS: run_coefficients,
    ExperimentKind.SIMULATE: run_simulate,
}


def run(cfg: ExperimentConfig) -> ExperimentResult:
    return _RUNNERS[cfg.experiment](cfg)
