"""Isotropic correlation models and their dependence classification.

Two families are provided:

* :class:`Cauchy` -- ``B(r) = (1 + r**2) ** (-z / 2)``; long-range dependent
  in the plane for ``0 < z < 2`` (non-integrable), short-range for ``z > 2``.
* :class:`PowerLawTail` -- tail ``r**(-theta) * L(r)`` with a slowly varying
  factor ``L``, smoothly continued to ``B(0) = 1`` through the Cauchy form.

Models are frozen dataclasses: hashable, so simulators can cache their
factorisations keyed on the model.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import BoundaryCase, DomainError

__all__ = [
    "Constant",
    "LogPower",
    "Cauchy",
    "PowerLawTail",
    "Dependence",
    "DependenceClass",
    "evaluate",
    "classify",
    "spectral_constant_c2",
    "model_from_mapping",
]

_BOUNDARY_ATOL = 1e-12


# ----------------------------------------------------------------------------
# Slowly varying factors
# ----------------------------------------------------------------------------
@dataclass(frozen=True)
class Constant:
    """``L(r) = c``."""

    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise DomainError(f"constant slowly varying factor must be positive, got {self.c}")

    def __call__(self, r):
        return np.full_like(np.asarray(r, dtype=float), self.c)

    def limit(self) -> float:
        return self.c

    def to_dict(self) -> dict:
        return {"form": "constant", "c": self.c}


@dataclass(frozen=True)
class LogPower:
    """``L(r) = log(e + r) ** p``."""

    p: float = 0.0

    def __call__(self, r):
        return np.log(math.e + np.asarray(r, dtype=float)) ** self.p

    def limit(self) -> float:
        if self.p > 0:
            return math.inf
        if self.p < 0:
            return 0.0
        return 1.0

    def to_dict(self) -> dict:
        return {"form": "logpower", "p": self.p}


SlowlyVarying = Constant | LogPower


# ----------------------------------------------------------------------------
# Models
# ----------------------------------------------------------------------------
@dataclass(frozen=True)
class Cauchy:
    """Cauchy correlation ``(1 + r**2) ** (-z/2)``.

    The tail behaves like ``r**(-z)`` with a constant slowly varying factor
    equal to one.
    """

    z: float
    d: int = 2

    def __post_init__(self):
        if not self.z > 0:
            raise DomainError(f"Cauchy shape z must be positive, got {self.z}")
        if self.d < 1:
            raise DomainError("dimension must be a positive integer")

    @property
    def tail_exponent(self) -> float:
        return self.z

    @property
    def slowvar(self) -> SlowlyVarying:
        return Constant(1.0)

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        return (1.0 + r * r) ** (-0.5 * self.z)

    def to_dict(self) -> dict:
        return {"kind": "cauchy", "z": self.z, "d": self.d}


@dataclass(frozen=True)
class PowerLawTail:
    """Tail ``r**(-exponent) * L(r)`` continued to 1 at the origin.

    ``B(r) = (1 + r**2) ** (-exponent/2) * L(s) / L(0)`` with
    ``s = sqrt(1 + r**2) - 1``. For a constant ``L`` this is exactly the
    Cauchy model; for log powers the factor only bends the tail. Parameter
    combinations that push ``B`` above one are rejected at construction.
    """

    exponent: float
    slowvar: SlowlyVarying = field(default_factory=Constant)
    d: int = 2

    def __post_init__(self):
        if not self.exponent > 0:
            raise DomainError(f"tail exponent must be positive, got {self.exponent}")
        grid = np.concatenate([np.linspace(0.0, 10.0, 2001), np.geomspace(10.0, 1e8, 400)])
        if np.max(self.evaluate(grid)) > 1.0 + 1e-12:
            raise DomainError("slowly varying factor drives the correlation above 1; reduce |p|")

    @property
    def tail_exponent(self) -> float:
        return self.exponent

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        s = np.sqrt(1.0 + r * r) - 1.0
        return (1.0 + r * r) ** (-0.5 * self.exponent) * self.slowvar(s) / self.slowvar(0.0)

    def to_dict(self) -> dict:
        return {"kind": "powerlaw", "exponent": self.exponent, "d": self.d, **{
            f"slowvar_{k}": v for k, v in self.slowvar.to_dict().items()}}


CovarianceModel = Cauchy | PowerLawTail


def evaluate(model: CovarianceModel, r):
    """Correlation of ``model`` at lag ``r >= 0`` (scalar or array)."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise DomainError("lag must be nonnegative")
    out = model.evaluate(r_arr)
    return float(out) if np.ndim(out) == 0 else out


# ----------------------------------------------------------------------------
# Classification
# ----------------------------------------------------------------------------
class Dependence(enum.Enum):
    SHORT_RANGE = "ShortRange"
    LONG_RANGE = "LongRange"


@dataclass(frozen=True)
class DependenceClass:
    dependence: Dependence
    effective_exponent: float

    @property
    def is_long_range(self) -> bool:
        return self.dependence is Dependence.LONG_RANGE


def classify(model: CovarianceModel, hermite_level: int = 1) -> DependenceClass:
    """Classify ``B**hermite_level`` as integrable (short) or not (long).

    Raises
    ------
    BoundaryCase
        if ``tail_exponent * hermite_level == d``.
    """
    if hermite_level < 1:
        raise DomainError("hermite_level must be >= 1")
    eff = model.tail_exponent * hermite_level
    if math.isclose(eff, model.d, rel_tol=0.0, abs_tol=_BOUNDARY_ATOL):
        raise BoundaryCase(
            f"tail exponent {model.tail_exponent} x level {hermite_level} equals d={model.d}")
    dep = Dependence.LONG_RANGE if eff < model.d else Dependence.SHORT_RANGE
    return DependenceClass(dep, eff)


def spectral_constant_c2(d: int, alpha: float) -> float:
    """Constant of the spectral density singularity at the origin.

    ``Gamma((d - alpha)/2) / (2**alpha * pi**(d/2) * Gamma(alpha/2))``.
    """
    if not 0 < alpha < d:
        raise DomainError(f"alpha must lie in (0, {d}), got {alpha}")
    return float(special.gamma(0.5 * (d - alpha))
                 / (2.0 ** alpha * math.pi ** (0.5 * d) * special.gamma(0.5 * alpha)))


def model_from_mapping(mapping: dict) -> CovarianceModel:
    """Build a model from a config mapping such as ``{"kind": "cauchy", "z": 2.5}``."""
    kind = str(mapping.get("kind", "")).strip().strip('"').lower()
    d = int(mapping.get("d", 2))
    if kind == "cauchy":
        return Cauchy(float(mapping["z"]), d=d)
    if kind in ("powerlaw", "power-law", "powerlawtail"):
        form = str(mapping.get("slowvar_form", "constant")).strip().strip('"').lower()
        if form == "logpower":
            sv = LogPower(float(mapping.get("slowvar_p", 0.0)))
        else:
            sv = Constant(float(mapping.get("slowvar_c", 1.0)))
        return PowerLawTail(float(mapping["exponent"]), sv, d=d)
    raise DomainError(f"unknown covariance model kind {kind!r}")
