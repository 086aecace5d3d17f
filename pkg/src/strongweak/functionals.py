"""Window functionals evaluated on simulated realizations.

Integrals over ``Δ(r)`` are Riemann sums over the grid nodes whose centres
lie in the closed window, each weighted by the cell area ``h**2``.
"""
from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DegenerateDenominator, DimensionMismatch, NonFiniteValue
from .hermite import HermiteExpansion, ReductionSets, hermite_rank, hermite_table, order, vfactorial
from .hermite import student_mean_constant
from .simulator import FieldRealization, VectorFieldRealization

__all__ = [
    "Kind",
    "FunctionalSample",
    "integrate_G",
    "integrate_term",
    "decompose",
    "student_transform",
    "minkowski",
    "centered_minkowski",
    "samples_to_csv",
]


class Kind(enum.Enum):
    KR = "Kr"
    KR_KAPPA = "KrKappa"
    VR = "Vr"
    KR_STAR = "KrStar"
    MINKOWSKI = "Minkowski"
    TERM = "Term"


@dataclass(frozen=True)
class FunctionalSample:
    kind: Kind
    value: float
    r: float
    grid_h: float
    seed: int
    stream: int
    level: int | None = None
    label: str = ""

    @property
    def name(self) -> str:
        base = self.kind.value if self.level is None else f"{self.kind.value}{self.level}"
        return f"{base}@{self.label}" if self.label else base


def _provenance(field) -> tuple[float, float, int, int]:
    comp = field.components[0] if isinstance(field, VectorFieldRealization) else field
    return comp.grid.r, comp.grid.h, comp.seed, comp.stream


def _check_finite(value: float, what: str) -> float:
    if not np.isfinite(value):
        raise NonFiniteValue(f"{what} produced a non-finite value")
    return float(value)


def integrate_G(field: VectorFieldRealization, G: Callable) -> FunctionalSample:
    """``K_r``: Riemann sum of ``G(η(x)) h**2`` over in-window nodes.

    ``G`` receives an array of shape ``(n_nodes, p)``.
    """
    vals = np.asarray(G(field.window_values()), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteValue("G returned non-finite values")
    r, h, seed, stream = _provenance(field)
    return FunctionalSample(Kind.KR, float(vals.sum() * h * h), r, h, seed, stream)


def _term_integrals(w: np.ndarray, indices: Sequence[tuple], h: float) -> dict[tuple, float]:
    """``∫ e_v(η) dx`` for several ``v`` sharing one Hermite table per component."""
    if not indices:
        return {}
    p = w.shape[1]
    if any(len(v) != p for v in indices):
        raise DimensionMismatch(f"indices must have length {p}")
    kmax = max(max(v) for v in indices)
    tables = [hermite_table(kmax, w[:, j]) for j in range(p)]
    out = {}
    for v in indices:
        prod = np.ones(w.shape[0])
        for j, k in enumerate(v):
            if k:
                prod = prod * tables[j][k]
        out[v] = float(prod.sum() * h * h)
    return out


def integrate_term(field: VectorFieldRealization, v: Sequence[int], C_v: float) -> FunctionalSample:
    """``(C_v / v!) ∫ e_v(η(x)) dx``."""
    v = tuple(int(k) for k in v)
    r, h, seed, stream = _provenance(field)
    integral = _term_integrals(field.window_values(), [v], h)[v]
    value = _check_finite(C_v / vfactorial(v) * integral, "integrate_term")
    return FunctionalSample(Kind.TERM, value, r, h, seed, stream, level=order(v))


def decompose(field: VectorFieldRealization, expansion: HermiteExpansion,
              reduction: ReductionSets | None = None, G: Callable | None = None,
              tol: float = 1e-7) -> dict[str, FunctionalSample]:
    """``K_r``, ``K_{r,κ}``, ``V_r`` and every ``K*_{r,l}`` for one realization.

    ``K_r`` integrates ``G`` directly when given, otherwise the truncated
    series. ``V_r`` sums the terms of order ``κ+1 .. truncation_order``.
    """
    r, h, seed, stream = _provenance(field)
    coeffs = expansion.nonzero(tol)
    kappa = hermite_rank(expansion, tol)
    indices = [v for v in coeffs if order(v) >= 1]
    integrals = _term_integrals(field.window_values(), indices, h)
    terms = {v: coeffs[v] / vfactorial(v) * integrals[v] for v in indices}

    def mk(kind, value, level=None):
        return FunctionalSample(kind, _check_finite(value, kind.value), r, h, seed, stream, level)

    out = {
        "KrKappa": mk(Kind.KR_KAPPA, sum(t for v, t in terms.items() if order(v) == kappa), kappa),
        "Vr": mk(Kind.VR, sum(t for v, t in terms.items() if order(v) > kappa)),
    }
    if G is not None:
        out["Kr"] = integrate_G(field, G)
    else:
        out["Kr"] = mk(Kind.KR, sum(terms.values()))
    if reduction is not None:
        for l in reduction.L_plus:
            val = sum(terms[v] for v in reduction.N_star[l])
            out[f"KrStar{l}"] = mk(Kind.KR_STAR, val, l)
    return out


def student_transform(field: VectorFieldRealization, n: int | None = None) -> FieldRealization:
    """Nodewise ``T_n = η_1 / sqrt((η_2**2 + ... + η_{n+1}**2) / n)``."""
    p = field.p
    if n is None:
        n = p - 1
    if p != n + 1:
        raise DimensionMismatch(f"Student transform with n={n} needs {n + 1} components, got {p}")
    stack = field.stacked()
    den = np.sqrt(np.sum(stack[..., 1:] ** 2, axis=-1) / n)
    if np.any(den == 0):
        raise DegenerateDenominator("denominator vanished at a grid node")
    first = field.components[0]
    return FieldRealization(first.grid, stack[..., 0] / den, None, first.seed, first.stream,
                            first.method, max(c.embedding_clip_error for c in field.components),
                            first.padded_size)


def minkowski(field: FieldRealization, a: float) -> FunctionalSample:
    """Excursion area ``h**2 * #{in-window nodes with value > a}``."""
    g = field.grid
    count = int(np.count_nonzero(field.values[g.mask] > a))
    return FunctionalSample(Kind.MINKOWSKI, count * g.cell_area, g.r, g.h, field.seed, field.stream)


def centered_minkowski(field: VectorFieldRealization, n: int, a: float) -> FunctionalSample:
    """``M_r{T_n} - |Δ(r)| P(T_n > a)`` (no normalisation)."""
    t = student_transform(field, n)
    raw = minkowski(t, a)
    centre = t.grid.window_area * student_mean_constant(n, a)
    return FunctionalSample(Kind.MINKOWSKI, raw.value - centre, raw.r, raw.grid_h, raw.seed,
                            raw.stream)


def samples_to_csv(samples: Iterable[FunctionalSample], fh=None) -> str | None:
    """Write ``kind, r, h, seed, stream, value`` rows; returns the text if ``fh`` is None."""
    buf = fh if fh is not None else io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["kind", "r", "h", "seed", "stream", "value"])
    for s in samples:
        writer.writerow([s.name, repr(float(s.r)), repr(float(s.grid_h)), s.seed, s.stream,
                         repr(float(s.value))])
    return buf.getvalue() if fh is None else None
