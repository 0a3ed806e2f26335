"""Minimum enclosing balls in the plane, plus an additively-weighted variant.

The unweighted solver is the classic move-to-front incremental algorithm
(expected linear time after a deterministic seeded shuffle).  The weighted
variant minimizes max_i (|x - p_i| + w_i) over plane centers by a pattern
search; it is used for point clouds that include stubs of glued rays, where
a cloud member at height w_i above attachment p_i costs an extra w_i.
"""

from __future__ import annotations

import math
import random

XY = tuple[float, float]
Circle = tuple[float, float, float]  # (cx, cy, r)

_REL_EPS = 1 + 1e-12


def enclosing_circle(points: list[XY]) -> Circle:
    """Smallest circle containing all points; deterministic for a given input."""
    if not points:
        raise ValueError("empty point set")
    pts = [(float(x), float(y)) for x, y in points]
    rng = random.Random(0xC1C)
    rng.shuffle(pts)
    c: Circle | None = None
    for i, p in enumerate(pts):
        if c is None or not _inside(c, p):
            c = _with_one(pts[: i + 1], p)
    return c


def _with_one(points: list[XY], p: XY) -> Circle:
    c: Circle = (p[0], p[1], 0.0)
    for i, q in enumerate(points):
        if not _inside(c, q):
            c = _diameter(p, q) if c[2] == 0.0 else _with_two(points[: i + 1], p, q)
    return c


def _with_two(points: list[XY], p: XY, q: XY) -> Circle:
    circ = _diameter(p, q)
    left: Circle | None = None
    right: Circle | None = None
    for r in points:
        if _inside(circ, r):
            continue
        cross = _cross(p, q, r)
        c = _circumcircle(p, q, r)
        if c is None:
            continue
        if cross > 0.0 and (left is None or _cross(p, q, (c[0], c[1])) > _cross(p, q, (left[0], left[1]))):
            left = c
        elif cross < 0.0 and (right is None or _cross(p, q, (c[0], c[1])) < _cross(p, q, (right[0], right[1]))):
            right = c
    if left is None and right is None:
        return circ
    if left is None:
        return right
    if right is None:
        return left
    return left if left[2] <= right[2] else right


def _diameter(a: XY, b: XY) -> Circle:
    cx, cy = (a[0] + b[0]) / 2, (a[1] + b[1]) / 2
    r = max(math.hypot(cx - a[0], cy - a[1]), math.hypot(cx - b[0], cy - b[1]))
    return (cx, cy, r)


def _circumcircle(a: XY, b: XY, c: XY) -> Circle | None:
    ox = (min(a[0], b[0], c[0]) + max(a[0], b[0], c[0])) / 2
    oy = (min(a[1], b[1], c[1]) + max(a[1], b[1], c[1])) / 2
    ax, ay = a[0] - ox, a[1] - oy
    bx, by = b[0] - ox, b[1] - oy
    cx, cy = c[0] - ox, c[1] - oy
    d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2.0
    if d == 0.0:
        return None
    x = ox + ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
    y = oy + ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
    r = max(math.hypot(x - a[0], y - a[1]), math.hypot(x - b[0], y - b[1]), math.hypot(x - c[0], y - c[1]))
    return (x, y, r)


def _inside(c: Circle, p: XY) -> bool:
    return math.hypot(p[0] - c[0], p[1] - c[1]) <= c[2] * _REL_EPS + 1e-14


def _cross(a: XY, b: XY, p: XY) -> float:
    return (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])


def weighted_center(
    points: list[XY], weights: list[float], start: XY, step: float, tol: float = 1e-9
) -> tuple[XY, float]:
    """Minimize F(x) = max_i (|x - p_i| + w_i) by deterministic pattern search.

    F is convex, so the search converges to the global optimum.  Returns
    (center, F(center)).
    """

    def cost(x: float, y: float) -> float:
        return max(math.hypot(x - px, y - py) + w for (px, py), w in zip(points, weights))

    cx, cy = float(start[0]), float(start[1])
    best = cost(cx, cy)
    s = max(step, tol)
    while s > tol:
        moved = False
        for dx, dy in ((s, 0.0), (-s, 0.0), (0.0, s), (0.0, -s), (s, s), (s, -s), (-s, s), (-s, -s)):
            c = cost(cx + dx, cy + dy)
            if c < best - 1e-15:
                cx, cy, best = cx + dx, cy + dy, c
                moved = True
                break
        if not moved:
            s /= 2.0
    return (cx, cy), best
