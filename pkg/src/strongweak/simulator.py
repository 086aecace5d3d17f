"""Gaussian random fields on a square grid covering the window ``[-r, r]**2``.

Each realization is keyed by ``(seed, stream)``: the pair is the 128-bit key
of a Philox4x64 counter-based generator, so any replication can be rebuilt
independently of how replications were scheduled.

Two exact-in-law samplers are available:

* dense Cholesky factorisation of the node covariance (small grids; used as
  the reference for the FFT method),
* circulant embedding on a padded torus. Negative embedding eigenvalues are
  clipped to zero and the clipped fraction of spectral mass is recorded.

Factorisations are cached per ``(grid, model, ...)`` since experiments draw
thousands of realizations from the same law.
"""
from __future__ import annotations

import enum
import functools
import csv
import io
import math
import struct
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import linalg
from scipy.spatial import distance

from .covmodels import CovarianceModel, classify
from .errors import DomainError, EmbeddingFailure, NotPositiveDefinite

__all__ = [
    "GridSpec",
    "Method",
    "FieldRealization",
    "VectorFieldRealization",
    "rng_for",
    "simulate_component",
    "simulate_vector",
    "embedding_diagnostics",
    "dump_binary",
    "load_binary",
    "to_csv",
    "CHOLESKY_MAX_NODES",
    "DEFAULT_CLIP_CEILING",
]

CHOLESKY_MAX_NODES = 4096
DEFAULT_CLIP_CEILING = 1e-2
DEFAULT_PADDING = 2


@dataclass(frozen=True)
class GridSpec:
    """Cell-centred square grid of spacing ``h`` covering ``[-r, r]**2``.

    Nodes sit at ``(i - (N - 1)/2) * h`` for ``i = 0..N-1`` with
    ``N = ceil(2r/h)``, so the grid is symmetric about the origin. A node
    belongs to the window when its centre lies in the closed square.
    """

    r: float
    h: float = 1.0
    d: int = 2

    def __post_init__(self):
        if not (self.r > 0 and self.h > 0):
            raise DomainError("grid needs r > 0 and h > 0")
        if self.d != 2:
            raise DomainError("only planar grids are supported")

    @property
    def points_per_side(self) -> int:
        return max(1, math.ceil(2.0 * self.r / self.h - 1e-9))

    @property
    def cell_area(self) -> float:
        return self.h ** 2

    @property
    def coords(self) -> np.ndarray:
        n = self.points_per_side
        return (np.arange(n) - 0.5 * (n - 1)) * self.h

    @functools.cached_property
    def mask(self) -> np.ndarray:
        """Boolean ``(N, N)`` array of nodes inside the closed window."""
        c = np.abs(self.coords) <= self.r * (1 + 1e-12)
        return np.outer(c, c)

    @property
    def window_area(self) -> float:
        return (2.0 * self.r) ** 2


class Method(enum.Enum):
    CHOLESKY = "ExactCholesky"
    CIRCULANT = "CirculantEmbedding"


@dataclass(frozen=True, eq=False)
class FieldRealization:
    grid: GridSpec
    values: np.ndarray
    model: CovarianceModel | None
    seed: int
    stream: int
    method: Method
    embedding_clip_error: float = 0.0
    padded_size: int = 0

    def __post_init__(self):
        n = self.grid.points_per_side
        if self.values.shape != (n, n):
            raise DomainError(f"values must have shape {(n, n)}, got {self.values.shape}")


@dataclass(frozen=True, eq=False)
class VectorFieldRealization:
    """Independent components on one grid, short-range ones first."""

    components: tuple[FieldRealization, ...]
    m: int
    n: int = field(init=False)

    def __post_init__(self):
        if not self.components:
            raise DomainError("a vector field needs at least one component")
        grids = {c.grid for c in self.components}
        if len(grids) != 1:
            raise DomainError("components must share one grid")
        object.__setattr__(self, "n", len(self.components) - self.m)

    @property
    def grid(self) -> GridSpec:
        return self.components[0].grid

    @property
    def p(self) -> int:
        return len(self.components)

    def stacked(self) -> np.ndarray:
        """Values as an ``(N, N, p)`` array."""
        return np.stack([c.values for c in self.components], axis=-1)

    def window_values(self) -> np.ndarray:
        """Node values inside the window, shape ``(n_nodes, p)``."""
        return self.stacked()[self.grid.mask]


# ----------------------------------------------------------------------------
# RNG
# ----------------------------------------------------------------------------
def rng_for(seed: int, stream: int) -> np.random.Generator:
    """Philox generator keyed by the 128-bit integer ``seed + 2**64 * stream``."""
    if not (0 <= seed < 2 ** 64 and 0 <= stream < 2 ** 64):
        raise DomainError("seed and stream must be unsigned 64-bit integers")
    return np.random.Generator(np.random.Philox(key=int(seed) + (int(stream) << 64)))


# ----------------------------------------------------------------------------
# Factorisations (cached)
# ----------------------------------------------------------------------------
@functools.lru_cache(maxsize=16)
def _cholesky_factor(grid: GridSpec, model: CovarianceModel) -> np.ndarray:
    c = grid.coords
    xx, yy = np.meshgrid(c, c, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    cov = model.evaluate(distance.cdist(pts, pts))
    try:
        return linalg.cholesky(cov, lower=True, check_finite=False)
    except linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc


@dataclass(frozen=True)
class _Embedding:
    sqrt_eig: np.ndarray
    size: int
    clip_error: float


@functools.lru_cache(maxsize=16)
def _embedding(grid: GridSpec, model: CovarianceModel, padding: int) -> _Embedding:
    n = grid.points_per_side
    size = padding * n
    k = np.arange(size)
    lag = np.minimum(k, size - k) * grid.h
    dist = np.hypot(lag[:, None], lag[None, :])
    eig = np.fft.fft2(model.evaluate(dist)).real
    neg = -eig[eig < 0].sum()
    pos = eig[eig > 0].sum()
    clip = float(neg / pos) + 0.0  # normalise -0.0 when nothing is clipped
    sqrt_eig = np.sqrt(np.clip(eig, 0.0, None) / size ** 2)
    return _Embedding(sqrt_eig, size, clip)


def _pick_method(grid: GridSpec, method: Method | str | None) -> Method:
    if method is None:
        return Method.CHOLESKY if grid.points_per_side ** 2 <= CHOLESKY_MAX_NODES else Method.CIRCULANT
    return Method(method) if not isinstance(method, Method) else method


def _draw(grid, model, rng, method, padding, clip_ceiling):
    n = grid.points_per_side
    if method is Method.CHOLESKY:
        L = _cholesky_factor(grid, model)
        return (L @ rng.standard_normal(n * n)).reshape(n, n), 0.0, 0
    emb = _embedding(grid, model, padding)
    if emb.clip_error > clip_ceiling:
        raise EmbeddingFailure(
            f"clipped spectral mass {emb.clip_error:.3g} exceeds ceiling {clip_ceiling:g}")
    noise = rng.standard_normal((2, emb.size, emb.size))
    field_ = np.fft.fft2(emb.sqrt_eig * (noise[0] + 1j * noise[1])).real
    return field_[:n, :n].copy(), emb.clip_error, emb.size


# ----------------------------------------------------------------------------
# Public samplers
# ----------------------------------------------------------------------------
def simulate_component(grid: GridSpec, model: CovarianceModel, seed: int, stream: int = 0, *,
                       method: Method | str | None = None, padding: int = DEFAULT_PADDING,
                       clip_ceiling: float = DEFAULT_CLIP_CEILING) -> FieldRealization:
    """Draw one zero-mean unit-variance Gaussian field with correlation ``model``.

    Parameters
    ----------
    grid : GridSpec
    model : covariance model
    seed, stream : int
        unsigned 64-bit integers; together they determine the draw.
    method : Method, str or None
        ``None`` selects Cholesky up to ``CHOLESKY_MAX_NODES`` nodes and
        circulant embedding beyond.
    padding : int, default 2
        torus side as a multiple of the grid side (circulant method only).
    clip_ceiling : float, default 1e-2
        largest tolerated fraction of clipped spectral mass.

    Raises
    ------
    EmbeddingFailure, NotPositiveDefinite
    """
    if padding < 2:
        raise DomainError("torus padding factor must be at least 2")
    meth = _pick_method(grid, method)
    values, clip, size = _draw(grid, model, rng_for(seed, stream), meth, padding, clip_ceiling)
    return FieldRealization(grid, values, model, int(seed), int(stream), meth, clip, size)


def simulate_vector(grid: GridSpec, models: Sequence[CovarianceModel], seed: int,
                    base_stream: int = 0, **kwargs) -> VectorFieldRealization:
    """Independent components, component ``j`` on stream ``base_stream + j``.

    ``m`` (the number of short-range components) is read off the models, which
    must be ordered short-range first.
    """
    if not models:
        raise DomainError("at least one covariance model is required")
    comps = tuple(simulate_component(grid, mod, seed, base_stream + j, **kwargs)
                  for j, mod in enumerate(models))
    longs = [classify(mod).is_long_range for mod in models]
    m = longs.index(True) if True in longs else len(longs)
    if any(not flag for flag in longs[m:]):
        raise DomainError("order components short-range first, then long-range")
    return VectorFieldRealization(comps, m)


def embedding_diagnostics(f: FieldRealization) -> dict:
    return {"method": f.method.value, "clip_error": f.embedding_clip_error,
            "padded_size": f.padded_size}


# ----------------------------------------------------------------------------
# Realization dumps
# ----------------------------------------------------------------------------
_MAGIC = b"FLDG"
_VERSION = 1
# magic, version, points per side, 4 reserved bytes, h, r: 32 bytes in total
_HEADER = struct.Struct("<4sIIIdd")


def dump_binary(f: FieldRealization, fh) -> None:
    """Write the header followed by little-endian float64 values in row-major order."""
    n = f.grid.points_per_side
    fh.write(_HEADER.pack(_MAGIC, _VERSION, n, 0, f.grid.h, f.grid.r))
    fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def load_binary(fh) -> tuple[GridSpec, np.ndarray]:
    """Inverse of :func:`dump_binary`; returns the grid and the value array."""
    head = fh.read(_HEADER.size)
    if len(head) != _HEADER.size:
        raise DomainError("truncated header")
    magic, version, n, _, h, r = _HEADER.unpack(head)
    if magic != _MAGIC or version != _VERSION:
        raise DomainError(f"not a field dump (magic {magic!r}, version {version})")
    grid = GridSpec(r, h)
    if grid.points_per_side != n:
        raise DomainError("header grid size disagrees with r and h")
    data = np.frombuffer(fh.read(8 * n * n), dtype="<f8")
    if data.size != n * n:
        raise DomainError("truncated value block")
    return grid, data.reshape(n, n).astype(float)


def to_csv(f: FieldRealization, fh=None, max_nodes: int = 65536) -> str | None:
    """Rows ``x, y, value`` for every node; meant for small grids."""
    n = f.grid.points_per_side
    if n * n > max_nodes:
        raise DomainError(f"grid has {n * n} nodes, CSV export is capped at {max_nodes}")
    buf = fh if fh is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "value"])
    c = f.grid.coords
    for i in range(n):
        for j in range(n):
            w.writerow([repr(float(c[i])), repr(float(c[j])), repr(float(f.values[i, j]))])
    return buf.getvalue() if fh is None else None
