"""Observation window geometry and distance-density integrals.

For the centred square ``[-r, r]**2`` the set covariance
``g(u) = |W ∩ (W - u)| = prod_i max(0, 2r - |u_i|)`` determines the density
of the distance between two independent uniform points,

    psi(rho) = rho / |W|**2 * int_0^{2 pi} g(rho cos t, rho sin t) dt,

and with it every double integral ``∫∫ Q(|x - y|) dx dy`` over the window.
The angular integral is evaluated by adaptive quadrature with the kinks of
``g`` passed as breakpoints, so the same path works for any window whose set
covariance is available.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import DivergentIntegral, DomainError

__all__ = [
    "Shape",
    "WindowSpec",
    "set_covariance",
    "distance_density",
    "c1_coefficient",
    "double_integral",
]

QUAD_EPSABS = 1e-9
_INNER_EPSABS = 1e-13
_INNER_EPSREL = 1e-12


class Shape(enum.Enum):
    SQUARE = "square"


@dataclass(frozen=True)
class WindowSpec:
    """Homothetic image ``Δ(r)`` of ``Δ = [-1, 1]**d`` (only ``d = 2`` supported)."""

    r: float = 1.0
    shape: Shape = Shape.SQUARE
    d: int = 2

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError("window scale r must be positive")
        if self.d != 2:
            raise DomainError("only planar windows (d = 2) are implemented")

    @property
    def side(self) -> float:
        return 2.0 * self.r

    @property
    def area(self) -> float:
        """``|Δ(r)| = r**d |Δ|``."""
        return self.side ** self.d

    @property
    def unit_area(self) -> float:
        """``|Δ|`` of the unscaled window."""
        return 2.0 ** self.d

    @property
    def diameter(self) -> float:
        return self.side * math.sqrt(self.d)

    def contains(self, x) -> np.ndarray:
        """Closed-window membership for points ``x`` of shape ``(..., d)``."""
        x = np.asarray(x, dtype=float)
        return np.all(np.abs(x) <= self.r * (1 + 1e-12), axis=-1)

    def scaled(self, r: float) -> "WindowSpec":
        return WindowSpec(r=r, shape=self.shape, d=self.d)


def set_covariance(w: WindowSpec, u) -> np.ndarray | float:
    """Area of ``Δ(r) ∩ (Δ(r) - u)`` for lag vector(s) ``u`` of shape ``(..., 2)``."""
    u = np.asarray(u, dtype=float)
    out = np.prod(np.clip(w.side - np.abs(u), 0.0, None), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def _angular_integral(w: WindowSpec, rho: float) -> float:
    """``∫_0^{2π} g(ρ cos t, ρ sin t) dt`` using the square's fourfold symmetry."""
    if rho == 0.0:
        return 2.0 * math.pi * w.area
    s = w.side
    if rho >= w.diameter:
        return 0.0
    # support of the first-quadrant integrand is [t_lo, t_hi]
    t_lo = math.acos(min(1.0, s / rho))
    t_hi = math.asin(min(1.0, s / rho))
    if t_hi <= t_lo:
        return 0.0

    def f(t):
        return max(0.0, s - rho * math.cos(t)) * max(0.0, s - rho * math.sin(t))

    val, _ = integrate.quad(f, t_lo, t_hi, epsabs=_INNER_EPSABS * w.area,
                            epsrel=_INNER_EPSREL, limit=200)
    return 4.0 * val


def distance_density(w: WindowSpec, rho) -> np.ndarray | float:
    """Density ``ψ_{Δ(r)}(ρ)`` of ``|U - V|`` for ``U, V`` iid uniform on the window."""
    rho_arr = np.atleast_1d(np.asarray(rho, dtype=float))
    if np.any(rho_arr < 0):
        raise DomainError("distance must be nonnegative")
    out = np.array([r_ * _angular_integral(w, r_) for r_ in rho_arr]) / w.area ** 2
    return float(out[0]) if np.ndim(rho) == 0 else out


def _kinks(w: WindowSpec) -> list[float]:
    # psi changes analytic form where the disc of radius rho hits the side length
    return [w.side]


def _radial_integral(w: WindowSpec, Q: Callable[[float], float], singular_exponent: float) -> float:
    """``∫_0^{diam} Q(ρ) ψ(ρ) dρ`` with ``Q(ρ) ~ ρ**(-singular_exponent)`` at zero."""
    d = w.d
    s = singular_exponent
    if s >= d:
        raise DivergentIntegral(f"singularity rho^-{s} is not integrable against psi in d={d}")
    diam = w.diameter
    if s <= 0:
        pts = [p for p in _kinks(w) if 0 < p < diam]
        val, err = integrate.quad(lambda z: Q(z) * distance_density(w, z), 0.0, diam,
                                  points=pts, epsabs=QUAD_EPSABS, epsrel=1e-10, limit=400)
    else:
        # z = t**(1/(d - s)) absorbs the z**(d-1-s) behaviour near the origin
        q = 1.0 / (d - s)

        def g(t):
            if t <= 0.0:
                return 0.0
            z = t ** q
            return Q(z) * distance_density(w, z) * q * z / t

        t_max = diam ** (d - s)
        pts = [p ** (d - s) for p in _kinks(w) if 0 < p < diam]
        val, err = integrate.quad(g, 0.0, t_max, points=pts, epsabs=QUAD_EPSABS,
                                  epsrel=1e-10, limit=400)
    if not math.isfinite(val):
        raise DivergentIntegral("quadrature returned a non-finite value")
    return val


def c1_coefficient(w: WindowSpec, kappa: int, alpha: float) -> float:
    """``c1(κ, α, Δ) = ∫_0^{diam} z**(-ακ) ψ_Δ(z) dz`` = ``E |U - V|**(-ακ)``.

    Raises
    ------
    DivergentIntegral
        when ``alpha * kappa >= d``.
    """
    if kappa < 1 or alpha < 0:
        raise DomainError("need kappa >= 1 and alpha >= 0")
    s = alpha * kappa
    if s >= w.d:
        raise DivergentIntegral(f"alpha*kappa = {s} >= d = {w.d}")
    return _radial_integral(w, lambda z: z ** (-s), s)


def double_integral(w: WindowSpec, Q: Callable[[float], float], singular_exponent: float = 0.0) -> float:
    """``∫∫_{Δ(r)²} Q(|x - y|) dx dy = |Δ(r)|² ∫ Q(ρ) ψ_{Δ(r)}(ρ) dρ``.

    Parameters
    ----------
    w : WindowSpec
    Q : callable
        scalar function of the distance.
    singular_exponent : float, default 0
        set to ``s`` when ``Q(ρ)`` behaves like ``ρ**(-s)`` at the origin so the
        quadrature can remove the singularity by substitution.
    """
    return w.area ** 2 * _radial_integral(w, Q, singular_exponent)
