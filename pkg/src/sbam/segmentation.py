"""Piecewise-linear segmentation of scalar constraint tracks.

A track is a pair of arrays (t, v) with strictly increasing t. Segmentation
recursively splits at the interior sample minimizing the summed area between
the data and the two resulting chords, until every segment's area drops
below a threshold that is relative to the track's amplitude. A final merge
pass walks consecutive segment pairs once from left to right: it removes a
shared breakpoint whose merged segment is still within the threshold, and
otherwise re-places it at the best feasible split of the pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit, prange

__all__ = ["SegmentationResult", "residual_area", "segment"]


@dataclass(frozen=True)
class SegmentationResult:
    """Breakpoint indices (first and last sample always included) and the
    residual area of each resulting segment."""

    breakpoints: tuple[int, ...]
    residual_areas: tuple[float, ...]
    threshold: float


def _validate_track(t: np.ndarray, v: np.ndarray):
    if t.ndim != 1 or v.ndim != 1 or t.shape != v.shape:
        raise ValueError("t and v must be 1-D arrays of equal length")
    if t.shape[0] < 2:
        raise ValueError("need at least 2 samples")
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
        raise ValueError("samples must be finite")
    if np.any(np.diff(t) <= 0):
        raise ValueError("sample times must be strictly increasing")


def residual_area(t, v, i: int, j: int) -> float:
    """Area between the data over [t_i, t_j] and the chord through samples
    i and j.

    Integrated with the trapezoid rule on |v - line|; sample intervals where
    the residual changes sign are split at the zero crossing of the linearly
    interpolated residual, which makes the result exact for piecewise-linear
    data.
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float)
    _validate_track(t, v)
    if not (0 <= i < j < t.shape[0]):
        raise ValueError(f"invalid segment [{i}, {j}]")
    slope = (v[j] - v[i]) / (t[j] - t[i])
    r = v[i : j + 1] - (v[i] + slope * (t[i : j + 1] - t[i]))
    r0, r1 = r[:-1], r[1:]
    dt = np.diff(t[i : j + 1])
    crossing = r0 * r1 < 0.0
    denom = np.abs(r0) + np.abs(r1)
    with np.errstate(divide="ignore", invalid="ignore"):
        split_area = 0.5 * dt * (r0 * r0 + r1 * r1) / denom
    plain_area = 0.5 * dt * denom
    return float(np.sum(np.where(crossing, split_area, plain_area)))


@njit(cache=True)
def _area_jit(t, v, i, j):
    slope = (v[j] - v[i]) / (t[j] - t[i])
    area = 0.0
    r0 = 0.0
    t0 = t[i]
    for p in range(i + 1, j + 1):
        r1 = v[p] - (v[i] + slope * (t[p] - t[i]))
        dt = t[p] - t0
        if r0 * r1 < 0.0:
            area += 0.5 * dt * (r0 * r0 + r1 * r1) / (abs(r0) + abs(r1))
        else:
            area += 0.5 * dt * (abs(r0) + abs(r1))
        r0 = r1
        t0 = t[p]
    return area


@njit(cache=True, parallel=True)
def _scan_splits_jit(t, v, i, j, lefts, rights):
    # Per interior candidate k: area(i, k) and area(k, j).
    for k in prange(i + 1, j):
        lefts[k - (i + 1)] = _area_jit(t, v, i, k)
        rights[k - (i + 1)] = _area_jit(t, v, k, j)


def _best_split(t, v, i, j):
    """Interior index minimizing the total residual area of the two parts,
    smallest index on ties. Returns (index, left_area, right_area)."""
    lefts = np.empty(j - i - 1)
    rights = np.empty(j - i - 1)
    _scan_splits_jit(t, v, i, j, lefts, rights)
    m = int(np.argmin(lefts + rights))  # argmin returns the first minimum
    return i + 1 + m, float(lefts[m]), float(rights[m])


def segment(t, v, eps_rel: float = 0.02) -> SegmentationResult:
    """Segment a track into piecewise-linear pieces.

    The absolute area threshold is eps_rel * (max v - min v) * (t_last -
    t_first), so the tolerance scales with both the amplitude and the
    duration of the track. A constant track yields just the two endpoints.
    """
    t = np.ascontiguousarray(t, dtype=float)
    v = np.ascontiguousarray(v, dtype=float)
    _validate_track(t, v)
    if eps_rel <= 0:
        raise ValueError("eps_rel must be > 0")
    n = t.shape[0]
    amplitude = float(v.max() - v.min())
    eps = eps_rel * amplitude * float(t[-1] - t[0])

    breakpoints = [0, n - 1]
    stack = [(0, n - 1)]
    while stack:
        i, j = stack.pop()
        if j - i < 2 or _area_jit(t, v, i, j) <= eps:
            continue
        k, left, right = _best_split(t, v, i, j)
        breakpoints.append(k)
        if left > eps and k - i >= 2:
            stack.append((i, k))
        if right > eps and j - k >= 2:
            stack.append((k, j))
    breakpoints.sort()

    _merge(t, v, breakpoints, eps)

    areas = tuple(
        float(_area_jit(t, v, a, b)) for a, b in zip(breakpoints[:-1], breakpoints[1:])
    )
    return SegmentationResult(tuple(breakpoints), areas, eps)


def _merge(t, v, breakpoints: list, eps: float):
    """Left-to-right merge sweeps, repeated until the breakpoints settle.

    A single sweep re-places each breakpoint against neighbors that may
    themselves still be misplaced, so corners are only pinned down exactly at
    the fixed point. Pairs untouched by the previous sweep are skipped.
    Capped for safety; real tracks settle within a few sweeps.
    """
    dirty = set(breakpoints)
    for _ in range(32):
        touched: set = set()
        i = 1
        while i < len(breakpoints) - 1:
            a, b, c = breakpoints[i - 1], breakpoints[i], breakpoints[i + 1]
            if a not in dirty and b not in dirty and c not in dirty:
                i += 1
                continue
            if _area_jit(t, v, a, c) <= eps:
                del breakpoints[i]
                touched.update((a, c))
                continue
            k = _replace_split(t, v, a, b, c, eps)
            if k != b:
                breakpoints[i] = k
                touched.update((a, k, c))
            i += 1
        if not touched:
            break
        dirty = touched


def _replace_split(t, v, a, b, c, eps):
    """Best split of [a, c] among candidates keeping both sides within eps.

    The incumbent b always qualifies (both sides were final segments), so the
    feasible set is never empty and per-segment areas stay bounded by eps.
    """
    lefts = np.empty(c - a - 1)
    rights = np.empty(c - a - 1)
    _scan_splits_jit(t, v, a, c, lefts, rights)
    best_k = -1
    best_total = np.inf
    for m in range(c - a - 1):
        if lefts[m] <= eps and rights[m] <= eps:
            total = float(lefts[m] + rights[m])
            if total < best_total:
                best_k, best_total = a + 1 + m, total
    return best_k if best_k >= 0 else b
