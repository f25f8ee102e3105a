"""Diameter (largest interpoint distance) of finite point sets in the unit ball.

Provides a plain quadratic scan, a norm-pruned scan that returns the identical
value, and the scaled deficit statistic n^(2/gamma) * (2 - diameter).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from diamlab import _kernels as K

# Points with norm below (lower bound - 1) cannot be an endpoint of the
# farthest pair; the extra guard absorbs rounding in norms and distances.
_PRUNE_GUARD = 1e-12
# One round of threshold tightening scans this many survivors exactly.
_TIGHTEN_SCAN = 256
_TIGHTEN_MIN_SURVIVORS = 2048

# Above this squared distance, 2 - sqrt(q) has lost enough leading bits that
# the near-maximal pairs are re-evaluated in exact rational arithmetic.
_EXACT_DEFICIT_THRESHOLD = 4.0 - 1e-6


@dataclass(frozen=True, eq=False)
class Point:
    """A point of the d-dimensional unit ball (d >= 1, finite coordinates)."""

    coords: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.coords, dtype=np.float64)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("a point needs a one-dimensional coordinate vector")
        if not np.all(np.isfinite(c)):
            raise ValueError("point coordinates must be finite")
        object.__setattr__(self, "coords", c)

    @property
    def d(self) -> int:
        return self.coords.size

    def norm(self) -> float:
        return float(np.sqrt((self.coords * self.coords).sum()))


@dataclass(eq=False)
class PointCloud:
    """A finite point set stored as an (n, d) array with cached norms."""

    coords: np.ndarray
    norms: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        c = np.ascontiguousarray(np.asarray(self.coords, dtype=np.float64))
        if c.ndim != 2:
            raise ValueError("coords must be an (n, d) array")
        if c.shape[1] < 1:
            raise ValueError("points need at least one coordinate")
        if c.size and not np.all(np.isfinite(c)):
            raise ValueError("point coordinates must be finite")
        self.coords = c
        if self.norms is None:
            self.norms = np.sqrt((c * c).sum(axis=1))
        else:
            self.norms = np.asarray(self.norms, dtype=np.float64)
            if self.norms.shape != (c.shape[0],):
                raise ValueError("norms must have one entry per point")

    @classmethod
    def from_points(cls, points: Iterable[Point]) -> "PointCloud":
        pts = list(points)
        if not pts:
            raise ValueError("cannot infer dimension from an empty point list")
        d = pts[0].d
        if any(p.d != d for p in pts):
            raise ValueError("all points must share one dimension")
        return cls(np.stack([p.coords for p in pts]))

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def d(self) -> int:
        return self.coords.shape[1]

    @property
    def points(self) -> tuple[Point, ...]:
        return tuple(Point(row.copy()) for row in self.coords)

    def __len__(self) -> int:
        return self.n


def _require_nonempty(cloud: PointCloud) -> None:
    if cloud.n == 0:
        raise ValueError("empty point set")


def diameter_bruteforce(cloud: PointCloud) -> float:
    """Largest pairwise Euclidean distance by a full quadratic scan."""
    _require_nonempty(cloud)
    return math.sqrt(K.max_sq_dist(cloud.coords))


def _survivors(coords: np.ndarray, norms: np.ndarray) -> np.ndarray:
    """Subset of points that can still contain the farthest pair.

    Starts from a heuristic chord (the point of largest norm and the point
    farthest from it), discards everything with norm < bound - 1, and tightens
    the bound with a small exact scan while that keeps removing points.
    """
    i0 = int(np.argmax(norms))
    diff = coords - coords[i0]
    d0 = math.sqrt(float((diff * diff).sum(axis=1).max()))
    while True:
        if d0 <= 1.0:
            return coords  # threshold below 0: nothing can be discarded
        keep = norms >= d0 - 1.0 - _PRUNE_GUARD
        surv = coords[keep]
        if surv.shape[0] <= _TIGHTEN_MIN_SURVIVORS or surv.shape[0] == coords.shape[0]:
            return surv
        d1 = math.sqrt(K.max_sq_dist(surv[:_TIGHTEN_SCAN]))
        if d1 <= d0:
            return surv
        d0 = d1


def diameter_pruned(cloud: PointCloud) -> float:
    """Same value as diameter_bruteforce, computed on the pruned survivor set."""
    _require_nonempty(cloud)
    surv = _survivors(cloud.coords, cloud.norms)
    return math.sqrt(K.max_sq_dist(surv))


def _exact_deficit(pts: np.ndarray, q_max: float) -> float:
    """Deficit 2 - sqrt(q_max) with the subtraction done in exact arithmetic.

    For q near 4, float64 quantizes 2 - sqrt(q) in steps of ~2e-16 which is
    far too coarse once multiplied by a large n^(2/gamma).  4 - q, however, is
    exactly representable as a rational of the coordinates, and
    (4 - q) / (2 + sqrt(q)) recovers the deficit with full relative precision.
    """
    ii, jj, qq = K.candidate_pairs(pts, q_max * (1.0 - K.CANDIDATE_REL_WINDOW))
    best = math.inf
    four = Fraction(4)
    for i, j, q in zip(ii, jj, qq):
        gap = four
        for a, b in zip(pts[i], pts[j]):
            t = Fraction(float(a)) - Fraction(float(b))
            gap -= t * t
        deficit = float(gap) / (2.0 + math.sqrt(q))
        if deficit < best:
            best = deficit
    return best


def diameter_deficit(cloud: PointCloud) -> tuple[float, float]:
    """Return (diameter, 2 - diameter) with the deficit at full precision.

    The diameter equals diameter_pruned(cloud) exactly.  The deficit equals
    2 - diameter except when the diameter is within rounding distance of 2,
    where it is refined over the near-maximal pairs (see _exact_deficit).
    """
    _require_nonempty(cloud)
    surv = _survivors(cloud.coords, cloud.norms)
    q_max = K.max_sq_dist(surv)
    diam = math.sqrt(q_max)
    if q_max >= _EXACT_DEFICIT_THRESHOLD:
        return diam, _exact_deficit(surv, q_max)
    return diam, 2.0 - diam


def scaled_deficit(diam: float, n: float, gamma: float) -> float:
    """The statistic n^(2/gamma) * (2 - diam), clamped to be nonnegative."""
    if not n > 0:
        raise ValueError("n must be positive")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if diam < 0:
        raise ValueError("diameter cannot be negative")
    if diam > 2.0 + 1e-9:
        raise ValueError(
            f"diameter {diam} exceeds 2: impossible inside the unit ball"
        )
    return max(0.0, n ** (2.0 / gamma) * (2.0 - diam))
