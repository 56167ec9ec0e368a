"""Intervals, Chebyshev sampling grids, and refined sup-norm estimation.

Sup norms of the piecewise and spline objects in this package are estimated
by sampling on Chebyshev-distributed points (clustered at the endpoints,
where the kinks of the target functions sit) and then polishing every local
maximum of |f| with a golden-section search in its two neighbouring cells.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

_INV_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi], at most one full period wide."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise ValueError("interval endpoints must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"empty interval [{self.lo!r}, {self.hi!r}]")
        if self.hi - self.lo > TWO_PI * (1.0 + 1e-12):
            raise ValueError("interval may not exceed one period (2*pi)")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x, slack: float = 0.0):
        return (self.lo - slack <= x) & (x <= self.hi + slack)

    def clip(self, x):
        return np.clip(x, self.lo, self.hi)


FULL_PERIOD = Interval(-np.pi, np.pi)


@dataclass(frozen=True)
class GridSpec:
    """Sampling density and refinement policy for norm and solver grids.

    points_per_degree scales the sample count with the trig degree involved;
    refinement_tolerance is the stopping gap for iterative refinement
    (absolute for sup norms, relative for minimax grids);
    max_refinements caps golden-section steps or regrid rounds.
    """

    points_per_degree: int = 20
    refinement_tolerance: float = 1e-10
    max_refinements: int = 60

    def __post_init__(self):
        if self.points_per_degree < 4:
            raise ValueError("points_per_degree must be at least 4")
        if not self.refinement_tolerance > 0:
            raise ValueError("refinement_tolerance must be positive")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be a positive integer")

    def sample_count(self, degree: int | None, floor: int = 256) -> int:
        if degree is None:
            return floor
        return max(floor, self.points_per_degree * max(int(degree), 1))


SUP_GRID = GridSpec(points_per_degree=20, refinement_tolerance=1e-10, max_refinements=60)

# Default for minimax objective/constraint grids: denser sampling, a few
# regrid rounds, relative stopping gap.
SOLVER_GRID = GridSpec(points_per_degree=40, refinement_tolerance=1e-7, max_refinements=4)


def chebyshev_points(interval: Interval, count: int, open_ends: bool = False) -> np.ndarray:
    """Chebyshev-distributed points on the interval, ascending.

    Closed variant includes the endpoints (extrema nodes); the open variant
    uses first-kind nodes, which stay strictly inside the interval.
    """
    if count < 2:
        raise ValueError("need at least two points")
    mid, half = interval.midpoint, 0.5 * interval.width
    if open_ends:
        theta = np.pi * (2.0 * np.arange(count) + 1.0) / (2.0 * count)
    else:
        theta = np.pi * np.arange(count) / (count - 1.0)
    return mid + half * np.cos(theta[::-1])


def golden_refine_max(f, lo: np.ndarray, hi: np.ndarray, rounds: int) -> np.ndarray:
    """Vectorised golden-section maximisation of |f| on bracket arrays.

    Returns the best |f| value found in each bracket.  The brackets are
    treated independently; f must accept an ndarray.
    """
    lo = np.asarray(lo, dtype=float).copy()
    hi = np.asarray(hi, dtype=float).copy()
    x1 = hi - _INV_GOLDEN * (hi - lo)
    x2 = lo + _INV_GOLDEN * (hi - lo)
    f1 = np.abs(f(x1))
    f2 = np.abs(f(x2))
    for _ in range(rounds):
        move_right = f1 < f2
        lo = np.where(move_right, x1, lo)
        hi = np.where(move_right, hi, x2)
        x1_old, x2_old = x1, x2
        width = hi - lo
        x1 = np.where(move_right, x2_old, hi - _INV_GOLDEN * width)
        x2 = np.where(move_right, lo + _INV_GOLDEN * width, x1_old)
        # one fresh evaluation per bracket per round
        fresh = np.where(move_right, x2, x1)
        fval = np.abs(f(fresh))
        f1, f2 = np.where(move_right, f2, fval), np.where(move_right, fval, f1)
    return np.maximum(f1, f2)


def sup_norm(f, interval: Interval, grid: GridSpec | None = None,
             degree_hint: int | None = None, seeds=None, floor: int = 256) -> float:
    """Sup norm of f on the interval, Chebyshev sampling plus refinement.

    seeds: optional extra sample abscissae (breakpoints, zone grids) merged
    into the Chebyshev sample before the local maxima are located.
    """
    g = grid or SUP_GRID
    count = g.sample_count(degree_hint, floor=floor)
    xs = chebyshev_points(interval, count)
    if seeds is not None and len(seeds) > 0:
        seeds = interval.clip(np.asarray(seeds, dtype=float))
        xs = np.unique(np.concatenate([xs, seeds]))
    ys = np.abs(np.asarray(f(xs), dtype=float))
    if ys.size < 3:
        return float(ys.max())

    inner = (ys[1:-1] >= ys[:-2]) & (ys[1:-1] >= ys[2:])
    idx = np.flatnonzero(inner) + 1
    # endpoints always get polished: kinks and window cuts live there
    idx = np.unique(np.concatenate([[0, ys.size - 1], idx]))
    lo = xs[np.maximum(idx - 1, 0)]
    hi = xs[np.minimum(idx + 1, ys.size - 1)]
    keep = hi > lo
    best = float(ys.max())
    if keep.any():
        refined = golden_refine_max(f, lo[keep], hi[keep], g.max_refinements)
        best = max(best, float(refined.max()))
    return best


def uniform_points(interval: Interval, count: int) -> np.ndarray:
    return np.linspace(interval.lo, interval.hi, count)
