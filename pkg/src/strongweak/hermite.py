"""Multivariate Hermite expansions and the reduction-set calculus.

Conventions: probabilists' Hermite polynomials ``H_k`` (``H_2(u) = u**2 - 1``),
orthogonal under the standard normal density with ``E[H_j H_k] = k! δ_jk``.
A functional ``G`` of a ``p``-vector of independent standard normals has
coefficients ``C_v = E[G(w) e_v(w)]`` with ``e_v(w) = prod_j H_{k_j}(w_j)`` and

    G = sum_v C_v / v! * e_v,     v! = prod_j k_j!.

Multi-indices are plain tuples of nonnegative ints.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy import integrate, special
from scipy.stats import norm, qmc

from .covmodels import Constant, SlowlyVarying
from .errors import (AllZero, BoundaryCase, DegreeTooLarge, DimensionMismatch, DomainError,
                     QuadratureNotConverged)

__all__ = [
    "MAX_DEGREE",
    "RANK_TOLERANCE",
    "hermite_poly",
    "hermite_table",
    "e_v",
    "order",
    "vfactorial",
    "multi_indices",
    "coefficient_quadrature",
    "coefficients",
    "HermiteExpansion",
    "expand",
    "hermite_rank",
    "ReductionSets",
    "reduction_sets",
    "student_indicator",
    "student_mean_constant",
    "student_rank1_coeff",
    "student_rank2_coeff",
    "student_rank2_deriv",
]

MAX_DEGREE = 64
RANK_TOLERANCE = 1e-7
DOUBLING_TOL = 1e-6
_MAX_TENSOR_NODES = 2 ** 22
_MAX_NODES_PER_DIM = 256
_BOUNDARY_ATOL = 1e-12

MultiIndex = tuple[int, ...]


# ----------------------------------------------------------------------------
# Polynomials
# ----------------------------------------------------------------------------
def hermite_poly(k: int, u):
    """``H_k(u)`` via ``H_{k+1} = u H_k - k H_{k-1}``."""
    if k < 0:
        raise DomainError("degree must be nonnegative")
    if k > MAX_DEGREE:
        raise DegreeTooLarge(f"degree {k} exceeds guard {MAX_DEGREE}")
    u = np.asarray(u, dtype=float)
    h_prev, h = np.ones_like(u), u.copy()
    if k == 0:
        out = h_prev
    else:
        for j in range(1, k):
            h_prev, h = h, u * h - j * h_prev
        out = h
    return float(out) if out.ndim == 0 else out


def hermite_table(kmax: int, u) -> np.ndarray:
    """Array ``T`` with ``T[k] = H_k(u)`` for ``k = 0..kmax``."""
    if kmax > MAX_DEGREE:
        raise DegreeTooLarge(f"degree {kmax} exceeds guard {MAX_DEGREE}")
    u = np.asarray(u, dtype=float)
    out = np.empty((kmax + 1,) + u.shape)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = u
    for j in range(1, kmax):
        out[j + 1] = u * out[j] - j * out[j - 1]
    return out


def e_v(v: Sequence[int], w):
    """``prod_j H_{k_j}(w_j)``; ``w`` has shape ``(..., len(v))``."""
    w = np.asarray(w, dtype=float)
    if w.shape[-1] != len(v):
        raise DimensionMismatch(f"index of length {len(v)} vs argument of length {w.shape[-1]}")
    out = np.ones(w.shape[:-1])
    for j, k in enumerate(v):
        if k:
            out = out * hermite_poly(k, w[..., j])
    return float(out) if out.ndim == 0 else out


def order(v: Sequence[int]) -> int:
    return int(sum(v))


def vfactorial(v: Sequence[int]) -> int:
    return math.prod(math.factorial(k) for k in v)


def multi_indices(p: int, max_order: int, min_order: int = 0) -> list[MultiIndex]:
    """All length-``p`` indices with ``min_order <= order <= max_order``, graded then lexicographic."""
    out = []
    for total in range(min_order, max_order + 1):
        for combo in itertools.combinations_with_replacement(range(p), total):
            v = [0] * p
            for j in combo:
                v[j] += 1
            out.append(tuple(v))
    # combinations_with_replacement yields reverse-lex within a grade; sort for stable output
    return sorted(out, key=lambda v: (sum(v), tuple(-k for k in v)))


# ----------------------------------------------------------------------------
# Quadrature backends
# ----------------------------------------------------------------------------
def _tensor_rule(p: int, n: int):
    x, w = hermegauss(n)
    w = w / math.sqrt(2.0 * math.pi)
    return x, w


def _tensor_coeffs(G, p: int, n: int, indices: Sequence[MultiIndex]) -> np.ndarray:
    """All requested coefficients from one tensor Gauss-Hermite grid of ``n**p`` nodes."""
    x, w = _tensor_rule(p, n)
    grids = np.meshgrid(*([x] * p), indexing="ij")
    pts = np.stack(grids, axis=-1)
    vals = np.asarray(G(pts), dtype=float)
    if vals.shape != pts.shape[:-1]:
        vals = np.broadcast_to(vals, pts.shape[:-1])
    kmax = max(max(v) for v in indices)
    table = hermite_table(kmax, x)  # (kmax+1, n)
    # weight then contract one axis at a time: F[k1..kp] = sum G * prod w H_k
    F = vals
    for _ in range(p):
        # contract the leading node axis and append the degree axis at the end
        F = np.tensordot(F, table * w, axes=([0], [1]))
    return np.array([F[v] for v in indices])


def _qmc_coeffs(G, p: int, indices: Sequence[MultiIndex], n_points: int, replicates: int,
                seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Randomised scrambled-Sobol estimates with replicate standard errors."""
    per = n_points // replicates
    m = max(1, int(round(math.log2(per))))
    kmax = max(max(v) for v in indices)
    ests = np.empty((replicates, len(indices)))
    seeds = np.random.SeedSequence(seed).spawn(replicates)
    for rep, ss in enumerate(seeds):
        u = qmc.Sobol(p, scramble=True, seed=np.random.default_rng(ss)).random_base2(m)
        w = norm.ppf(np.clip(u, 1e-16, 1 - 1e-16))
        g = np.asarray(G(w), dtype=float)
        tables = [hermite_table(kmax, w[:, j]) for j in range(p)]
        for i, v in enumerate(indices):
            prod = g
            for j, k in enumerate(v):
                if k:
                    prod = prod * tables[j][k]
            ests[rep, i] = prod.mean()
    return ests.mean(axis=0), ests.std(axis=0, ddof=1) / math.sqrt(replicates)


def _gauss_hermite(G, p, indices, nodes_per_dim, tol):
    cap = min(_MAX_NODES_PER_DIM, int(_MAX_TENSOR_NODES ** (1.0 / p)))
    n = max(2, min(nodes_per_dim, cap))
    prev = _tensor_coeffs(G, p, n, indices)
    while True:
        nxt = 2 * n
        if nxt > cap:
            raise QuadratureNotConverged(
                f"tensor Gauss-Hermite did not settle below {tol:g} by {n} nodes per dimension")
        cur = _tensor_coeffs(G, p, nxt, indices)
        err = np.abs(cur - prev)
        if np.all(err <= tol):
            return cur, err
        prev, n = cur, nxt


def coefficient_quadrature(G: Callable, v: Sequence[int], nodes_per_dim: int = 16, *,
                           method: str = "auto", tol: float = DOUBLING_TOL,
                           qmc_points: int = 2 ** 20, qmc_replicates: int = 16,
                           seed: int = 0) -> tuple[float, float]:
    """Hermite coefficient ``C_v = E[G(w) e_v(w)]`` and an error estimate.

    Parameters
    ----------
    G : callable
        vectorised functional taking an array of shape ``(..., p)``.
    v : multi-index of length ``p``.
    nodes_per_dim : int
        starting tensor Gauss-Hermite size; doubled until successive values
        agree to ``tol``.
    method : {"auto", "gauss-hermite", "qmc"}
        ``"auto"`` uses tensor Gauss-Hermite for ``p <= 4`` and randomised
        quasi-Monte Carlo beyond. Use ``"qmc"`` for discontinuous ``G``
        (indicators), on which tensor rules converge only like ``1/n``.

    Returns
    -------
    (C_v, err) : the doubling difference for Gauss-Hermite, the replicate
        standard error for QMC.

    Raises
    ------
    QuadratureNotConverged
    """
    v = tuple(int(k) for k in v)
    coeffs, errs = _coeffs(G, len(v), [v], nodes_per_dim, method, tol, qmc_points,
                           qmc_replicates, seed)
    return float(coeffs[0]), float(errs[0])


def coefficients(G: Callable, indices: Sequence[Sequence[int]], nodes_per_dim: int = 16, *,
                 method: str = "auto", tol: float = DOUBLING_TOL, qmc_points: int = 2 ** 20,
                 qmc_replicates: int = 16, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Several coefficients of one functional from shared evaluations of ``G``."""
    indices = [tuple(int(k) for k in v) for v in indices]
    if len({len(v) for v in indices}) != 1:
        raise DimensionMismatch("indices must share one length")
    return _coeffs(G, len(indices[0]), indices, nodes_per_dim, method, tol, qmc_points,
                   qmc_replicates, seed)


def _coeffs(G, p, indices, nodes_per_dim, method, tol, qmc_points, qmc_replicates, seed):
    if method == "auto":
        method = "gauss-hermite" if p <= 4 else "qmc"
    if method == "gauss-hermite":
        return _gauss_hermite(G, p, indices, nodes_per_dim, tol)
    if method == "qmc":
        return _qmc_coeffs(G, p, indices, qmc_points, qmc_replicates, seed)
    raise DomainError(f"unknown quadrature method {method!r}")


# ----------------------------------------------------------------------------
# Expansions
# ----------------------------------------------------------------------------
@dataclass
class HermiteExpansion:
    """Truncated expansion ``v -> C_v`` of a functional of ``dimension`` normals.

    ``second_moment`` (``E[G**2]``), when known, gives the Parseval tail
    ``E[G**2] - sum C_v**2 / v!`` left over by the truncation.
    """

    coeffs: dict[MultiIndex, float]
    dimension: int
    truncation_order: int
    errors: dict[MultiIndex, float] = field(default_factory=dict)
    second_moment: float | None = None

    def __post_init__(self):
        self.coeffs = {tuple(int(k) for k in v): float(c) for v, c in self.coeffs.items()}
        for v in self.coeffs:
            if len(v) != self.dimension:
                raise DimensionMismatch(f"index {v} does not have length {self.dimension}")

    @classmethod
    def from_coefficients(cls, coeffs: dict, dimension: int | None = None,
                          truncation_order: int | None = None) -> "HermiteExpansion":
        """Exact expansion of a finite Hermite polynomial."""
        coeffs = {tuple(v): float(c) for v, c in coeffs.items()}
        dim = dimension if dimension is not None else len(next(iter(coeffs)))
        trunc = truncation_order if truncation_order is not None else max(map(order, coeffs))
        sm = sum(c * c / vfactorial(v) for v, c in coeffs.items())
        return cls(coeffs, dim, trunc, {v: 0.0 for v in coeffs}, sm)

    def nonzero(self, tol: float = RANK_TOLERANCE) -> dict[MultiIndex, float]:
        return {v: c for v, c in self.coeffs.items() if abs(c) > tol}

    def parseval_sum(self) -> float:
        return sum(c * c / vfactorial(v) for v, c in self.coeffs.items())

    def tail_mass(self) -> float | None:
        if self.second_moment is None:
            return None
        return max(0.0, self.second_moment - self.parseval_sum())

    def restrict(self, orders: Iterable[int]) -> "HermiteExpansion":
        keep = set(orders)
        return HermiteExpansion({v: c for v, c in self.coeffs.items() if order(v) in keep},
                                self.dimension, self.truncation_order,
                                {v: e for v, e in self.errors.items() if order(v) in keep})

    def __call__(self, w):
        """Evaluate the truncated series at points ``w`` of shape ``(..., p)``."""
        w = np.asarray(w, dtype=float)
        out = np.zeros(w.shape[:-1])
        for v, c in self.coeffs.items():
            out = out + c / vfactorial(v) * e_v(v, w)
        return out

    def to_json(self) -> str:
        rows = [{"index": list(v), "coeff": c, "err": self.errors.get(v, 0.0)}
                for v, c in sorted(self.coeffs.items(), key=lambda kv: (order(kv[0]), kv[0]))]
        return json.dumps(rows)

    @classmethod
    def from_json(cls, text: str, truncation_order: int | None = None) -> "HermiteExpansion":
        rows = json.loads(text)
        coeffs = {tuple(r["index"]): r["coeff"] for r in rows}
        errs = {tuple(r["index"]): r.get("err", 0.0) for r in rows}
        dim = len(rows[0]["index"])
        trunc = truncation_order if truncation_order is not None else max(map(order, coeffs))
        return cls(coeffs, dim, trunc, errs)


def expand(G: Callable, p: int, truncation_order: int = 8, *, nodes_per_dim: int = 16,
           method: str = "auto", tol: float = DOUBLING_TOL, qmc_points: int = 2 ** 20,
           qmc_replicates: int = 16, seed: int = 0) -> HermiteExpansion:
    """Coefficients of ``G`` for every index up to ``truncation_order``.

    All coefficients share one set of ``G`` evaluations per quadrature level.
    """
    indices = multi_indices(p, truncation_order)
    coeffs, errs = _coeffs(G, p, indices, nodes_per_dim, method, tol, qmc_points,
                           qmc_replicates, seed)
    zero = tuple([0] * p)
    sm = _coeffs(lambda w: np.asarray(G(w), dtype=float) ** 2, p, [zero], nodes_per_dim,
                 method, max(tol, 1e-6), qmc_points, qmc_replicates, seed)[0][0]
    return HermiteExpansion(dict(zip(indices, coeffs)), p, truncation_order,
                            dict(zip(indices, errs)), float(sm))


def hermite_rank(e: HermiteExpansion, tol: float = RANK_TOLERANCE) -> int:
    """Smallest order ``>= 1`` carrying a coefficient above ``tol``.

    The order-0 term (the mean) is ignored: functionals enter centred.
    """
    orders = [order(v) for v, c in e.coeffs.items() if abs(c) > tol and order(v) >= 1]
    if not orders:
        raise AllZero(f"no coefficient exceeds {tol:g} up to order {e.truncation_order}")
    return min(orders)


# ----------------------------------------------------------------------------
# Reduction sets
# ----------------------------------------------------------------------------
@dataclass(frozen=True)
class ReductionSets:
    kappa: int
    gamma_tilde: float
    L_plus: tuple[int, ...]
    N_star: dict[int, tuple[MultiIndex, ...]]
    a_l: dict[int, float]
    weights: tuple[float, ...]

    def exponent_sum(self, v: Sequence[int]) -> float:
        return float(np.dot(self.weights, v))


def _level_weights(levels: Sequence[int], slowvar: SlowlyVarying) -> dict[int, float]:
    """``a_l = lim L^{l/2} / sum_i L^{i/2}`` for the supported slowly varying forms."""
    lim = slowvar.limit()
    if math.isinf(lim):
        top = max(levels)
        return {l: 1.0 if l == top else 0.0 for l in levels}
    if lim == 0.0:
        bottom = min(levels)
        return {l: 1.0 if l == bottom else 0.0 for l in levels}
    total = sum(lim ** (i / 2) for i in levels)
    return {l: lim ** (l / 2) / total for l in levels}


def reduction_sets(e: HermiteExpansion, betas: Sequence[float], alphas: Sequence[float],
                   d: int = 2, slowvar: SlowlyVarying | None = None,
                   tol: float = RANK_TOLERANCE) -> ReductionSets:
    """Minimal dependence exponent over the nonzero coefficients and its minimisers.

    Components are ordered as ``betas`` (short-range) followed by ``alphas``
    (long-range). For each nonzero ``v`` the exponent sum is
    ``sum beta_j k_j + sum alpha_j k_j``; ``gamma_tilde`` is its minimum,
    ``N_star[l]`` the minimisers of order ``l`` and ``L_plus`` their orders.

    Raises
    ------
    BoundaryCase
        when ``gamma_tilde == d``.
    """
    betas, alphas = list(map(float, betas)), list(map(float, alphas))
    if len(betas) + len(alphas) != e.dimension:
        raise DimensionMismatch("need one exponent per component")
    if any(b <= d for b in betas) or any(a >= d or a <= 0 for a in alphas):
        raise DomainError("need every beta > d and every alpha in (0, d)")
    weights = tuple(betas + alphas)
    kappa = hermite_rank(e, tol)
    nz = {v: c for v, c in e.nonzero(tol).items() if order(v) >= 1}
    sums = {v: float(np.dot(weights, v)) for v in nz}
    gamma = min(sums.values())
    if math.isclose(gamma, d, rel_tol=0.0, abs_tol=_BOUNDARY_ATOL):
        raise BoundaryCase(f"minimal exponent sum equals d = {d}")
    n_star: dict[int, list] = {}
    for v, s in sums.items():
        if math.isclose(s, gamma, rel_tol=1e-12, abs_tol=1e-12):
            n_star.setdefault(order(v), []).append(v)
    levels = tuple(sorted(n_star))
    a_l = _level_weights(levels, slowvar if slowvar is not None else Constant(1.0))
    return ReductionSets(kappa, gamma, levels, {l: tuple(sorted(n_star[l])) for l in levels},
                         a_l, weights)


# ----------------------------------------------------------------------------
# Student-field closed forms
# ----------------------------------------------------------------------------
def student_mean_constant(n: int, a: float) -> float:
    """``P(T_n > a)`` through the regularised incomplete beta function."""
    if n < 1:
        raise DomainError("degrees of freedom must be >= 1")
    ib = special.betainc(0.5 * n, 0.5, n / (n + a * a))
    return float(0.5 - 0.5 * (1.0 - ib) * np.sign(a))


def student_indicator(n: int, a: float) -> Callable:
    """Centred excursion indicator ``1{T_n(w) > a} - P(T_n > a)`` on ``R^{n+1}``."""
    mean = student_mean_constant(n, a)

    def G(w):
        w = np.asarray(w, dtype=float)
        den = np.sqrt(np.sum(w[..., 1:] ** 2, axis=-1) / n)
        return (w[..., 0] > a * den).astype(float) - mean

    return G


def student_rank1_coeff(n: int, a: float, v: Sequence[int] | None = None) -> float:
    """Coefficient at ``v = (1, 0, ..., 0)``; every other first-order index gives 0."""
    if v is not None:
        v = tuple(v)
        if len(v) != n + 1 or order(v) != 1:
            raise DimensionMismatch("expected a first-order index of length n + 1")
        if v[0] != 1:
            return 0.0
    return float(1.0 / (math.sqrt(2.0 * math.pi) * (1.0 + a * a / n) ** (n / 2)))


def student_rank2_coeff(n: int, a: float, epsabs: float = 1e-10) -> float:
    """Coefficient at an index with a single 2 on a denominator component.

    Evaluates the radial representation

        2 pi^{n/2} / (n (2 pi)^{(n+1)/2} Gamma(n/2))
          * int_0^inf (rho^2 - n) rho^{n-1} e^{-rho^2/2}
                      int_{a rho / sqrt(n)}^inf e^{-w^2/2} dw drho
    """
    if n < 1:
        raise DomainError("degrees of freedom must be >= 1")
    const = 2.0 * math.pi ** (n / 2) / (n * (2.0 * math.pi) ** ((n + 1) / 2) * special.gamma(n / 2))
    tail = math.sqrt(math.pi / 2.0)

    def f(rho):
        inner = tail * special.erfc(a * rho / math.sqrt(2.0 * n))
        return (rho * rho - n) * rho ** (n - 1) * math.exp(-0.5 * rho * rho) * inner

    val, err = integrate.quad(f, 0.0, np.inf, epsabs=epsabs, epsrel=1e-12, limit=200)
    if err > 1e-8:
        raise QuadratureNotConverged(f"radial integral error {err:.2g} above 1e-8")
    return float(const * val)


def student_rank2_deriv(n: int, a: float) -> float:
    """Closed-form ``d/da`` of :func:`student_rank2_coeff`."""
    s = 1.0 + a * a / n
    num = special.gamma((n + 1) / 2) * (1.0 - (n + 1) / (n + a * a))
    den = math.sqrt(n * math.pi) * special.gamma(n / 2) * s ** ((n + 1) / 2)
    return float(num / den)
