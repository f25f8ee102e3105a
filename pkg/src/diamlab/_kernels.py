"""Pairwise squared-distance kernels.

Two interchangeable implementations: a numba-compiled scan (fast path) and a
blocked numpy scan (fallback).  Both evaluate each pair as
sum_k (x_k - y_k)^2 with the same left-to-right accumulation, so the value
returned for a given pair does not depend on which backend ran it or on which
subset of the cloud it was scanned in.

Backend selection: environment variable DIAMLAB_BACKEND=numba|numpy, resolved
once at import; default is numba when importable, numpy otherwise.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    NUMBA_AVAILABLE = False

_ENV_VAR = "DIAMLAB_BACKEND"

# Pairs whose squared distance is within this relative window of the maximum
# are reported as candidates for exact deficit refinement.
CANDIDATE_REL_WINDOW = 1e-12
# Hard cap on reported candidates; the true argmax pair is always included.
CANDIDATE_CAP = 64


def _resolve_backend() -> str:
    choice = os.environ.get(_ENV_VAR, "").strip().lower()
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        if not NUMBA_AVAILABLE:
            raise ImportError(
                f"{_ENV_VAR}=numba requested but numba is not importable"
            )
        return "numba"
    if choice:
        raise ValueError(
            f"unrecognized {_ENV_VAR}={choice!r}; expected 'numba' or 'numpy'"
        )
    return "numba" if NUMBA_AVAILABLE else "numpy"


BACKEND = _resolve_backend()


# ---------------------------------------------------------------------------
# numpy implementations


def _row_sq_dist(pts: np.ndarray, i: int) -> np.ndarray:
    """Squared distances from point i to points i+1..n-1.

    Accumulated coordinate by coordinate so each pair's sum has the exact
    left-to-right order of the compiled kernel (numpy's sum(axis=1) switches
    to pairwise accumulation at width 8 and would differ in the last ulp).
    """
    diff = pts[i + 1 :] - pts[i]
    q = diff[:, 0] * diff[:, 0]
    for k in range(1, pts.shape[1]):
        t = diff[:, k]
        q = q + t * t
    return q


def max_sq_dist_numpy(pts: np.ndarray) -> float:
    """Maximum squared pairwise distance; 0.0 for fewer than two points."""
    n = pts.shape[0]
    best = 0.0
    for i in range(n - 1):
        q = _row_sq_dist(pts, i)
        m = q.max()
        if m > best:
            best = float(m)
    return best


def candidate_pairs_numpy(
    pts: np.ndarray, threshold: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All pairs (i, j, q) with squared distance q >= threshold, capped."""
    n = pts.shape[0]
    ii: list[int] = []
    jj: list[int] = []
    qq: list[float] = []
    best = -1.0
    best_pair = (0, 0)
    for i in range(n - 1):
        q = _row_sq_dist(pts, i)
        m = float(q.max())
        if m > best:
            best = m
            best_pair = (i, i + 1 + int(q.argmax()))
        for off in np.nonzero(q >= threshold)[0]:
            if len(ii) < CANDIDATE_CAP:
                ii.append(i)
                jj.append(i + 1 + int(off))
                qq.append(float(q[off]))
    if best >= threshold and best_pair not in set(zip(ii, jj)):
        ii.append(best_pair[0])
        jj.append(best_pair[1])
        qq.append(best)
    return (
        np.asarray(ii, dtype=np.int64),
        np.asarray(jj, dtype=np.int64),
        np.asarray(qq, dtype=np.float64),
    )


# ---------------------------------------------------------------------------
# numba implementations

if NUMBA_AVAILABLE:

    @njit(cache=True, nogil=True)
    def _max_sq_dist_numba(pts):
        n, d = pts.shape
        best = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                s = 0.0
                for k in range(d):
                    t = pts[i, k] - pts[j, k]
                    s += t * t
                if s > best:
                    best = s
        return best

    @njit(cache=True, nogil=True)
    def _candidate_pairs_numba(pts, threshold, cap):
        n, d = pts.shape
        ii = np.empty(cap + 1, dtype=np.int64)
        jj = np.empty(cap + 1, dtype=np.int64)
        qq = np.empty(cap + 1, dtype=np.float64)
        count = 0
        best = -1.0
        bi = 0
        bj = 0
        for i in range(n):
            for j in range(i + 1, n):
                s = 0.0
                for k in range(d):
                    t = pts[i, k] - pts[j, k]
                    s += t * t
                if s > best:
                    best = s
                    bi = i
                    bj = j
                if s >= threshold and count < cap:
                    ii[count] = i
                    jj[count] = j
                    qq[count] = s
                    count += 1
        if best >= threshold:
            seen = False
            for c in range(count):
                if ii[c] == bi and jj[c] == bj:
                    seen = True
                    break
            if not seen:
                ii[count] = bi
                jj[count] = bj
                qq[count] = best
                count += 1
        return ii[:count], jj[:count], qq[:count]

    def max_sq_dist_numba(pts: np.ndarray) -> float:
        return float(_max_sq_dist_numba(np.ascontiguousarray(pts)))

    def candidate_pairs_numba(
        pts: np.ndarray, threshold: float
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return _candidate_pairs_numba(
            np.ascontiguousarray(pts), threshold, CANDIDATE_CAP
        )

else:  # pragma: no cover
    max_sq_dist_numba = None
    candidate_pairs_numba = None


if BACKEND == "numba":
    max_sq_dist = max_sq_dist_numba
    candidate_pairs = candidate_pairs_numba
else:
    max_sq_dist = max_sq_dist_numpy
    candidate_pairs = candidate_pairs_numpy
