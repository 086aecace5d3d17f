"""Empirical distribution tools: ECDF, two-sample KS, moments, Q-Q points, log-log fits."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateVariance, EmptySample, InsufficientPoints

__all__ = [
    "SampleSet",
    "KSResult",
    "LogLogFit",
    "ecdf",
    "ks_two_sample",
    "kolmogorov_sf",
    "skewness",
    "excess_kurtosis",
    "loglog_slope",
    "qq_points",
    "pairs_to_csv",
]


@dataclass(frozen=True, eq=False)
class SampleSet:
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).ravel()
        if vals.size == 0:
            raise EmptySample(f"sample {self.label!r} is empty")
        if not np.all(np.isfinite(vals)):
            raise ValueError(f"sample {self.label!r} contains NaN or infinite values")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.values.size

    @property
    def sorted(self) -> np.ndarray:
        return np.sort(self.values)


def _as_sample(a) -> SampleSet:
    return a if isinstance(a, SampleSet) else SampleSet(np.asarray(a, dtype=float))


def ecdf(a) -> tuple[np.ndarray, np.ndarray]:
    """Jump points and right-continuous ECDF values."""
    x = _as_sample(a).sorted
    xs, counts = np.unique(x, return_counts=True)
    return xs, np.cumsum(counts) / x.size


@dataclass(frozen=True)
class KSResult:
    statistic: float
    p_value: float
    n1: int
    n2: int

    def rejects(self, level: float) -> bool:
        return self.p_value < level


def kolmogorov_sf(lam: float, term_tol: float = 1e-12) -> float:
    """``P(K > lam) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lam^2)``."""
    if lam <= 0.2:
        # the limiting CDF is below 1e-40 here and the series converges too slowly to matter
        return 1.0
    total, k = 0.0, 1
    while True:
        term = math.exp(-2.0 * k * k * lam * lam)
        total += term if k % 2 else -term
        if term < term_tol:
            break
        k += 1
    return min(1.0, max(0.0, 2.0 * total))


def ks_two_sample(a, b) -> KSResult:
    """Two-sided two-sample Kolmogorov-Smirnov test with the asymptotic p-value.

    ``D`` is evaluated exactly at every jump of the pooled sample; the p-value
    uses the Kolmogorov limit at ``sqrt(n1 n2 / (n1 + n2)) * D``.
    """
    x, y = _as_sample(a).sorted, _as_sample(b).sorted
    n1, n2 = x.size, y.size
    pooled = np.concatenate([x, y])
    f1 = np.searchsorted(x, pooled, side="right") / n1
    f2 = np.searchsorted(y, pooled, side="right") / n2
    D = float(np.max(np.abs(f1 - f2)))
    en = math.sqrt(n1 * n2 / (n1 + n2))
    return KSResult(D, kolmogorov_sf(en * D), n1, n2)


def _central_moments(a):
    x = _as_sample(a).values
    if x.size < 3:
        raise DegenerateVariance("need at least 3 values")
    c = x - x.mean()
    m2 = np.mean(c * c)
    if m2 <= 0 or m2 < 1e-300:
        raise DegenerateVariance("sample has zero variance")
    return c, m2


def skewness(a) -> float:
    """``m3 / m2**1.5`` with biased central sample moments."""
    c, m2 = _central_moments(a)
    return float(np.mean(c ** 3) / m2 ** 1.5)


def excess_kurtosis(a) -> float:
    c, m2 = _central_moments(a)
    return float(np.mean(c ** 4) / m2 ** 2 - 3.0)


@dataclass(frozen=True)
class LogLogFit:
    slope: float
    intercept: float
    stderr: float


def loglog_slope(pairs: Iterable[tuple[float, float]]) -> LogLogFit:
    """Least-squares line through ``(log r, log variance)``."""
    arr = np.asarray(list(pairs), dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 3 or np.unique(arr[:, 0]).size < 3:
        raise InsufficientPoints("need at least 3 distinct r values")
    if np.any(arr <= 0):
        raise ValueError("r values and variances must be positive")
    x, y = np.log(arr[:, 0]), np.log(arr[:, 1])
    xm = x - x.mean()
    sxx = float(xm @ xm)
    slope = float(xm @ (y - y.mean()) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    dof = x.size - 2
    stderr = math.sqrt(float(resid @ resid) / dof / sxx) if dof > 0 else 0.0
    return LogLogFit(slope, intercept, stderr)


def qq_points(a, b, k: int = 99) -> list[tuple[float, float]]:
    """``k`` matched quantiles at probabilities ``i / (k + 1)`` (linear interpolation)."""
    x, y = _as_sample(a).values, _as_sample(b).values
    if k < 1:
        raise ValueError("k must be positive")
    probs = np.arange(1, k + 1) / (k + 1)
    qa = np.quantile(x, probs, method="linear")
    qb = np.quantile(y, probs, method="linear")
    return [(float(u), float(v)) for u, v in zip(qa, qb)]


def pairs_to_csv(pairs: Sequence[tuple[float, float]], fh=None, header=("x", "y")) -> str | None:
    buf = fh if fh is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for u, v in pairs:
        w.writerow([repr(float(u)), repr(float(v))])
    return buf.getvalue() if fh is None else None
