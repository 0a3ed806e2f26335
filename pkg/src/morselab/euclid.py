"""Scalar and vectorized Euclidean helpers for segments in the plane."""

from __future__ import annotations

import math

import numpy as np

XY = tuple[float, float]


def project_param(p: XY, a: XY, b: XY) -> float:
    """Arc-length parameter in [0, |ab|] of the projection of p onto segment ab."""
    ux, uy = b[0] - a[0], b[1] - a[1]
    length = math.hypot(ux, uy)
    if length == 0.0:
        return 0.0
    t = ((p[0] - a[0]) * ux + (p[1] - a[1]) * uy) / length
    return min(max(t, 0.0), length)


def project_point(p: XY, a: XY, b: XY) -> tuple[float, XY]:
    """Projection of p onto segment ab as (parameter, foot)."""
    length = math.hypot(b[0] - a[0], b[1] - a[1])
    t = project_param(p, a, b)
    if length == 0.0:
        return 0.0, a
    s = t / length
    return t, (a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]))


def segment_distance(p: XY, a: XY, b: XY) -> float:
    """Euclidean distance from p to segment ab."""
    _, foot = project_point(p, a, b)
    return math.hypot(p[0] - foot[0], p[1] - foot[1])


def segments_min_distance(a1: XY, b1: XY, a2: XY, b2: XY) -> float:
    """Minimum Euclidean distance between segments a1b1 and a2b2."""
    if _segments_intersect(a1, b1, a2, b2):
        return 0.0
    return min(
        segment_distance(a1, a2, b2),
        segment_distance(b1, a2, b2),
        segment_distance(a2, a1, b1),
        segment_distance(b2, a1, b1),
    )


def _orient(a: XY, b: XY, c: XY) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _segments_intersect(a1: XY, b1: XY, a2: XY, b2: XY) -> bool:
    d1 = _orient(a2, b2, a1)
    d2 = _orient(a2, b2, b1)
    d3 = _orient(a1, b1, a2)
    d4 = _orient(a1, b1, b2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    return (
        (d1 == 0 and _on_segment(a2, b2, a1))
        or (d2 == 0 and _on_segment(a2, b2, b1))
        or (d3 == 0 and _on_segment(a1, b1, a2))
        or (d4 == 0 and _on_segment(a1, b1, b2))
    )


def _on_segment(a: XY, b: XY, p: XY) -> bool:
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(
        a[1], b[1]
    )


def project_params_batch(pts: np.ndarray, a: XY, b: XY) -> np.ndarray:
    """Clamped projection parameters of an (n, 2) array of points onto segment ab."""
    a_arr = np.asarray(a, dtype=float)
    u = np.asarray(b, dtype=float) - a_arr
    length = float(np.hypot(u[0], u[1]))
    if length == 0.0:
        return np.zeros(pts.shape[:-1])
    t = ((pts - a_arr) @ (u / length))
    return np.clip(t, 0.0, length)


def segment_distances_batch(pts: np.ndarray, a: XY, b: XY) -> np.ndarray:
    """Euclidean distances from an (n, 2) array of points to segment ab."""
    a_arr = np.asarray(a, dtype=float)
    u = np.asarray(b, dtype=float) - a_arr
    length = float(np.hypot(u[0], u[1]))
    if length == 0.0:
        d = pts - a_arr
        return np.hypot(d[..., 0], d[..., 1])
    t = np.clip(((pts - a_arr) @ u) / (length * length), 0.0, 1.0)
    feet = a_arr + t[..., None] * u
    d = pts - feet
    return np.hypot(d[..., 0], d[..., 1])


def max_pairwise_distance(pts: np.ndarray) -> float:
    """Diameter of an (n, 2) point set (O(n^2), fine for a few thousand points)."""
    if len(pts) < 2:
        return 0.0
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((diff**2).sum(axis=-1)).max())
