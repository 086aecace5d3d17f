"""Predicted growth of ``Var(K_r)`` and the matching normalising sequences."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .covmodels import Constant, SlowlyVarying, spectral_constant_c2
from .hermite import HermiteExpansion, reduction_sets, vfactorial
from .window import WindowSpec, c1_coefficient

__all__ = ["Regime", "ScalingPrediction", "predict_variance", "normalizer", "limit_normalized"]


class Regime(enum.Enum):
    SHORT_RANGE_CLT = "ShortRangeCLT"
    LONG_RANGE_REDUCED = "LongRangeReduced"


@dataclass(frozen=True)
class ScalingPrediction:
    """``Var ~ constant * r**exponent * (slowly varying factors)``.

    ``slowvar_powers`` lists ``l/2`` for every reduction level ``l``; the
    normaliser is ``r**(exponent/2) * sum_l L(r)**(l/2)``.
    """

    exponent: float
    regime: Regime
    d: int
    gamma_tilde: float
    levels: tuple[int, ...] = ()
    slowvar_powers: tuple[float, ...] = ()
    constant: float | None = None
    alphas: tuple[float, ...] = field(default=())

    @property
    def slowvar_power(self) -> float:
        """Largest power of ``L`` in the normaliser (0 in the CLT regime)."""
        return max(self.slowvar_powers, default=0.0)

    def to_dict(self) -> dict:
        return {"exponent": self.exponent, "regime": self.regime.value, "d": self.d,
                "gamma_tilde": self.gamma_tilde, "levels": list(self.levels),
                "slowvar_powers": list(self.slowvar_powers), "constant": self.constant}


def predict_variance(e: HermiteExpansion, betas: Sequence[float], alphas: Sequence[float],
                     d: int = 2, window: WindowSpec | None = None,
                     slowvar: SlowlyVarying | None = None, tol: float = 1e-7) -> ScalingPrediction:
    """Variance growth exponent of ``∫ G(η) dx`` over ``Δ(r)``.

    If the minimal exponent sum ``γ̃`` exceeds ``d`` every term is short-range
    and ``Var ~ C r**d``. Otherwise ``Var ~ C r**(2d - γ̃)``; when the reduced
    terms sit on a single level ``l`` with one common long-range exponent
    ``α``, the constant ``c1(l, α, Δ) |Δ|**2 sum C_v**2 / v!`` is attached.

    Raises
    ------
    BoundaryCase
        propagated from :func:`~strongweak.hermite.reduction_sets`.
    """
    rs = reduction_sets(e, betas, alphas, d, slowvar, tol)
    if rs.gamma_tilde > d:
        return ScalingPrediction(float(d), Regime.SHORT_RANGE_CLT, d, rs.gamma_tilde)
    m = len(betas)
    constant = None
    if len(rs.L_plus) == 1:
        level = rs.L_plus[0]
        vs = rs.N_star[level]
        used = {float(alphas[j - m]) for v in vs for j, k in enumerate(v) if k and j >= m}
        if len(used) == 1 and all(sum(v[:m]) == 0 for v in vs):
            alpha = used.pop()
            w = window if window is not None else WindowSpec(1.0)
            coeff_sum = sum(e.coeffs[v] ** 2 / vfactorial(v) for v in vs)
            constant = c1_coefficient(w, level, alpha) * w.area ** 2 * coeff_sum
    return ScalingPrediction(2.0 * d - rs.gamma_tilde, Regime.LONG_RANGE_REDUCED, d,
                             rs.gamma_tilde, rs.L_plus, tuple(l / 2 for l in rs.L_plus),
                             constant, tuple(float(a) for a in alphas))


def normalizer(prediction: ScalingPrediction, r: float, L2: SlowlyVarying | None = None) -> float:
    """``r**(d - γ̃/2) * sum_l L2(r)**(l/2)``, or ``r**(d/2)`` in the CLT regime."""
    if prediction.regime is Regime.SHORT_RANGE_CLT:
        return r ** (0.5 * prediction.d)
    L2 = L2 if L2 is not None else Constant(1.0)
    Lr = float(L2(r))
    return r ** (prediction.d - 0.5 * prediction.gamma_tilde) * sum(Lr ** p for p in prediction.slowvar_powers)


def limit_normalized(value: float, prediction: ScalingPrediction, r: float, alpha: float,
                     L2: SlowlyVarying | None = None) -> float:
    """``c2(d, α)**(-l/2) * value / normalizer`` for a single reduction level ``l``.

    For a purely long-range leading term this is the scaling whose limit is a
    multiple Wiener-Itô integral of order ``l``.
    """
    if prediction.regime is Regime.SHORT_RANGE_CLT or len(prediction.levels) != 1:
        raise ValueError("defined only for a single long-range reduction level")
    level = prediction.levels[0]
    return value * spectral_constant_c2(prediction.d, alpha) ** (-0.5 * level) / normalizer(
        prediction, r, L2)
