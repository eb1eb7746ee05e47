"""Grid types and deterministic map transforms.

Conventions shared by the whole package:

* grids are float64 numpy arrays stored row-major and indexed
  ``[row, col]`` from the top-left corner,
* a gaze map is a probability distribution over grid cells
  (nonnegative values summing to one),
* every function is pure: identical inputs give bit-identical outputs,
  and the arrays held by the types are marked read-only so instances
  are safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import AllZeroGrid

__all__ = [
    "GazeMap",
    "FixationMap",
    "LogitGrid",
    "FeatureGrid",
    "grid_values",
    "fixation_mask",
    "normalize_to_simplex",
    "spatial_softmax",
    "gaussian_kernel_1d",
    "gaussian_blur",
    "area_weights",
    "resample_area",
    "entropy",
]

#: Allowed deviation of a gaze map's total mass from 1.
SIMPLEX_TOL = 1e-9

#: Total mass below this is treated as an empty grid.
MASS_FLOOR = 1e-12


def _frozen(values, dtype=np.float64):
    out = np.array(values, dtype=dtype, order="C")
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class GazeMap:
    """Probability distribution over a rectangular cell grid."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.size == 0:
            raise ValueError("gaze map needs a non-empty 2-D grid")
        if not np.all(np.isfinite(v)):
            raise ValueError("gaze map values must be finite")
        if np.any(v < 0.0):
            raise ValueError("gaze map values must be nonnegative")
        total = float(v.sum())
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"gaze map must sum to 1 within {SIMPLEX_TOL}, got {total}")
        object.__setattr__(self, "values", _frozen(v))

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class FixationMap:
    """Boolean grid marking discrete fixation locations."""

    fixated: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.fixated)
        if f.ndim != 2 or f.size == 0:
            raise ValueError("fixation map needs a non-empty 2-D grid")
        object.__setattr__(self, "fixated", _frozen(f != 0, dtype=bool))

    @property
    def height(self) -> int:
        return self.fixated.shape[0]

    @property
    def width(self) -> int:
        return self.fixated.shape[1]

    @property
    def count(self) -> int:
        return int(self.fixated.sum())


@dataclass(frozen=True, eq=False)
class LogitGrid:
    """Unnormalized real-valued scores on a grid, one logit per cell."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.size == 0:
            raise ValueError("logit grid needs a non-empty 2-D grid")
        if not np.all(np.isfinite(v)):
            raise ValueError("logits must be finite")
        object.__setattr__(self, "values", _frozen(v))


@dataclass(frozen=True, eq=False)
class FeatureGrid:
    """Channel-major feature stack over a grid, shaped (channels, h, w)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 3 or v.size == 0:
            raise ValueError("feature grid needs a non-empty (channels, h, w) array")
        if not np.all(np.isfinite(v)):
            raise ValueError("features must be finite")
        object.__setattr__(self, "values", _frozen(v))

    @property
    def channels(self) -> int:
        return self.values.shape[0]

    @property
    def height(self) -> int:
        return self.values.shape[1]

    @property
    def width(self) -> int:
        return self.values.shape[2]


def grid_values(grid) -> np.ndarray:
    """Return the float64 cell values of a map, logit grid, or bare 2-D array."""
    if isinstance(grid, (GazeMap, LogitGrid)):
        return grid.values
    v = np.asarray(grid, dtype=np.float64)
    if v.ndim != 2 or v.size == 0:
        raise ValueError("expected a non-empty 2-D grid")
    return v


def fixation_mask(fix) -> np.ndarray:
    """Return the boolean mask of a FixationMap or bare 2-D array."""
    if isinstance(fix, FixationMap):
        return fix.fixated
    m = np.asarray(fix)
    if m.ndim != 2 or m.size == 0:
        raise ValueError("expected a non-empty 2-D fixation grid")
    return m != 0


def normalize_to_simplex(grid) -> GazeMap:
    """Scale a nonnegative grid so its cells sum to one.

    Raises AllZeroGrid when total mass is below 1e-12, the signal for an
    empty or blank input map.
    """
    v = grid_values(grid)
    if not np.all(np.isfinite(v)):
        raise ValueError("grid values must be finite")
    if np.any(v < 0.0):
        raise ValueError("grid values must be nonnegative")
    total = float(v.sum())
    if total < MASS_FLOOR:
        raise AllZeroGrid(f"grid mass {total} is below {MASS_FLOOR}")
    return GazeMap(v / total)


def spatial_softmax(logits) -> GazeMap:
    """Exponentiate and normalize a logit grid into a gaze map.

    The maximum logit is subtracted first, so the result is stable for
    large scores and exactly invariant to adding a constant.
    """
    z = grid_values(logits)
    if not np.all(np.isfinite(z)):
        raise ValueError("logits must be finite")
    e = np.exp(z - z.max())
    return GazeMap(e / e.sum())


@lru_cache(maxsize=None)
def gaussian_kernel_1d(sigma: float) -> np.ndarray:
    """Normalized Gaussian taps at integer offsets in [-r, r], r = ceil(3 sigma)."""
    if not (sigma > 0.0 and math.isfinite(sigma)):
        raise ValueError("sigma must be positive and finite")
    radius = math.ceil(3.0 * sigma)
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-0.5 * (offsets / sigma) ** 2)
    w /= w.sum()
    w.setflags(write=False)
    return w


def _fold_index(t: np.ndarray, n: int) -> np.ndarray:
    # Half-sample symmetric reflection, periodic with period 2n.
    t = t % (2 * n)
    return np.where(t < n, t, 2 * n - 1 - t)


@lru_cache(maxsize=None)
def _blur_matrix(n: int, sigma: float) -> np.ndarray:
    # One-axis blur operator. Out-of-range taps fold back in by symmetric
    # reflection, which keeps the matrix doubly stochastic: rows and columns
    # both sum to 1, so mass is conserved and the uniform map is fixed.
    w = gaussian_kernel_1d(sigma)
    radius = len(w) // 2
    m = np.zeros((n, n))
    idx = np.arange(n)
    for k in range(-radius, radius + 1):
        np.add.at(m, (idx, _fold_index(idx + k, n)), w[k + radius])
    m.setflags(write=False)
    return m


def gaussian_blur(gaze, sigma: float) -> GazeMap:
    """Separable Gaussian smoothing on the simplex.

    Kernel taps that fall outside the grid fold back in by symmetric
    reflection at the borders, so every cell's mass is redistributed
    entirely in bounds: the total stays exactly one, the uniform map is
    a fixed point, and the transform is linear in its input.
    """
    v = gaze.values if isinstance(gaze, GazeMap) else GazeMap(np.asarray(gaze)).values
    h, w = v.shape
    out = _blur_matrix(h, float(sigma)) @ v @ _blur_matrix(w, float(sigma)).T
    return GazeMap(out / out.sum())


@lru_cache(maxsize=None)
def area_weights(n_src: int, n_dst: int) -> np.ndarray:
    """Overlap weights for one axis of area resampling.

    Entry [i, j] is the fraction of source cell j covered by destination
    cell i when both axes span the same interval. Columns sum to 1: every
    source cell hands its full mass to the destination row.
    """
    if n_src < 1 or n_dst < 1:
        raise ValueError("cell counts must be positive")
    m = np.zeros((n_dst, n_src))
    for i in range(n_dst):
        lo = i * n_src / n_dst
        hi = (i + 1) * n_src / n_dst
        for j in range(int(math.floor(lo)), min(int(math.ceil(hi)), n_src)):
            m[i, j] = max(0.0, min(hi, j + 1.0) - max(lo, float(j)))
    m.setflags(write=False)
    return m


def resample_area(gaze, out_w: int, out_h: int) -> GazeMap:
    """Resize a gaze map by exact fractional cell overlap.

    Each destination cell collects the overlap-weighted mass of the source
    cells it covers, which handles non-divisible size changes in both
    directions. The result is renormalized to the simplex.
    """
    v = gaze.values if isinstance(gaze, GazeMap) else GazeMap(np.asarray(gaze)).values
    h, w = v.shape
    raw = area_weights(h, int(out_h)) @ v @ area_weights(w, int(out_w)).T
    return GazeMap(raw / raw.sum())


def entropy(gaze) -> float:
    """Shannon entropy in nats; zero-mass cells contribute nothing."""
    v = gaze.values if isinstance(gaze, GazeMap) else GazeMap(np.asarray(gaze)).values
    nz = v[v > 0.0]
    return float(-(nz * np.log(nz)).sum())
