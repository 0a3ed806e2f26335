"""Nearest-point projections, contracting constants, and geometry checks.

A geodesic is D-contracting when every metric ball disjoint from it projects
to a set of diameter at most D.  On the lattice-ray plane the optimal
constant of a bi-infinite geodesic between two ends equals the plane
distance between the attachment points; ``contracting_constant_exact``
returns it together with a witness ball, and ``contracting_constant_sampled``
estimates the same quantity from below by seeded ball sampling.

The verification operations (slim triangles, bounded projection images,
triangles with two certified sides) measure the corresponding quantities by
dense sampling plus local refinement and compare against caller-supplied
candidate constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import euclid
from .errors import GeodesicError, InvariantViolation, ProjectionUndefined, SpaceError, StratumViolation
from .spaces import (
    EPS_GEOM,
    BoundaryPoint,
    BoundaryRay,
    GeodesicPath,
    LatticeRayPlane,
    MetricTree,
    ModelPoint,
    ModelSpace,
    Plane,
    PlaneSegment,
    PointLike,
    Ray,
    RayAscentToInfinity,
    RayDescent,
    RayDescentFromInfinity,
    TreeEdgePoint,
    TreeEnd,
    TreeNode,
    TreeRayPoint,
    canonical,
    points_equal,
)


def normalize_point(space: ModelSpace, p: PointLike) -> PointLike:
    """Canonical form of an interior point; boundary points pass through."""
    if isinstance(p, (BoundaryRay, TreeEnd)):
        return p
    if isinstance(space, MetricTree):
        return space.canonical(p)
    return canonical(p)

# ---------------------------------------------------------------------------
# Projection of interior points


@dataclass(frozen=True)
class FootPoint:
    """Result of a nearest-point projection onto a geodesic."""

    param: float
    foot: ModelPoint
    dist: float


def project_point(space: ModelSpace, path: GeodesicPath, p: ModelPoint) -> FootPoint:
    """Nearest-point projection of p onto the geodesic (unique in these spaces)."""
    if isinstance(space, MetricTree):
        t, foot, dist = space.gate(path, p)
        return FootPoint(t, foot, dist)
    p = canonical(p)
    candidates = [_span_candidate(span, p) for span in path.spans()]
    best = min(c[0] for c in candidates)
    close = [c for c in candidates if c[0] <= best + 1e-9 * (1.0 + best)]
    spread = max(c[1] for c in close) - min(c[1] for c in close)
    if spread > 1e-6:
        feet = {path.point_at(c[1]) for c in close}
        if len(feet) > 1 and not all(
            points_equal(a, b, 1e-6) for a in feet for b in feet
        ):
            raise InvariantViolation(
                f"non-unique projection of {p!r}: parameter spread {spread:.3g}"
            )
    dist, param = min(candidates)
    return FootPoint(param, path.point_at(param), dist)


def _span_candidate(span, p: ModelPoint) -> tuple[float, float]:
    """(distance, path parameter) of the best point of one piece."""
    t0, t1, piece = span
    if isinstance(piece, PlaneSegment):
        base, extra = _base_of(p)
        tloc, foot = euclid.project_point(base, piece.p1, piece.p2)
        return extra + math.hypot(base[0] - foot[0], base[1] - foot[1]), t0 + tloc
    if isinstance(piece, RayDescent):
        lo, hi = min(piece.from_h, piece.to_h), max(piece.from_h, piece.to_h)
        if isinstance(p, Ray) and (p.m, p.n) == (piece.m, piece.n):
            c = min(max(p.h, lo), hi)
            return abs(p.h - c), t0 + abs(c - piece.from_h)
        base, extra = _base_of(p)
        d = extra + math.hypot(base[0] - piece.m, base[1] - piece.n) + lo
        return d, t0 + abs(lo - piece.from_h)
    if isinstance(piece, RayAscentToInfinity):
        if isinstance(p, Ray) and (p.m, p.n) == (piece.m, piece.n):
            c = max(p.h, piece.from_h)
            return abs(p.h - c), t0 + (c - piece.from_h)
        base, extra = _base_of(p)
        return extra + math.hypot(base[0] - piece.m, base[1] - piece.n) + piece.from_h, t0
    if isinstance(piece, RayDescentFromInfinity):
        if isinstance(p, Ray) and (p.m, p.n) == (piece.m, piece.n):
            c = max(p.h, piece.to_h)
            return abs(p.h - c), piece.to_h - c
        base, extra = _base_of(p)
        return extra + math.hypot(base[0] - piece.m, base[1] - piece.n) + piece.to_h, t1
    raise SpaceError(f"unsupported piece {piece!r}")


def _base_of(p: ModelPoint) -> tuple[tuple[float, float], float]:
    if isinstance(p, Plane):
        return (p.x, p.y), 0.0
    if isinstance(p, Ray):
        return (float(p.m), float(p.n)), p.h
    raise SpaceError(f"expected a plane-chart point, got {p!r}")


def point_to_path_distance(space: ModelSpace, path: GeodesicPath, p: ModelPoint) -> float:
    return project_point(space, path, p).dist


# ---------------------------------------------------------------------------
# Projection of boundary points


@dataclass(frozen=True)
class ProjectionSet:
    """Limit points on a geodesic of projections of a ray going to infinity."""

    geodesic: GeodesicPath
    source: BoundaryPoint
    limit_points: tuple[float, ...]
    barycenter_param: float

    @property
    def foot(self) -> ModelPoint:
        return self.geodesic.point_at(self.barycenter_param)

    @property
    def diameter(self) -> float:
        return max(self.limit_points) - min(self.limit_points)


def project_boundary(
    space: ModelSpace, path: GeodesicPath, b: BoundaryPoint, method: str = "auto"
) -> ProjectionSet:
    """Project a boundary point onto a geodesic it does not bound.

    On the model spaces the projections of the defining ray stabilize after
    finite height, so the limit set is a single parameter; ``method="sweep"``
    forces the generic increasing-height sweep instead of the closed form.
    """
    for e in path.endpoints:
        if e == b:
            raise ProjectionUndefined(f"{b!r} is an endpoint of the geodesic")
    if isinstance(space, MetricTree):
        if not isinstance(b, TreeEnd):
            raise SpaceError(f"not a tree end: {b!r}")
        params = _sweep_params(
            space, path, lambda h: TreeRayPoint(b.leaf, h) if h > 0 else TreeNode(b.leaf)
        )
    elif isinstance(space, LatticeRayPlane):
        if not isinstance(b, BoundaryRay):
            raise SpaceError(f"not a lattice end: {b!r}")
        if method == "sweep":
            params = _sweep_params(space, path, lambda h: Ray(b.m, b.n, h) if h > 0 else Plane(b.m, b.n))
        else:
            params = (project_point(space, path, Plane(float(b.m), float(b.n))).param,)
    else:
        raise SpaceError("the Euclidean plane has no boundary points")
    bary = (min(params) + max(params)) / 2.0
    return ProjectionSet(path, b, tuple(params), bary)


def _sweep_params(space, path, ray_point, max_doublings: int = 40) -> tuple[float, ...]:
    h = 1.0
    prev = project_point(space, path, ray_point(0.0)).param
    for _ in range(max_doublings):
        cur = project_point(space, path, ray_point(h)).param
        if abs(cur - prev) <= EPS_GEOM:
            return (cur,)
        prev = cur
        h *= 2.0
    raise InvariantViolation("boundary projection did not stabilize")


# ---------------------------------------------------------------------------
# Contracting certificates


@dataclass(frozen=True)
class ContractingCertificate:
    """A claimed contracting constant with the witness that realized it."""

    D: float
    mode: str  # "exact" | "sampled"
    witness: dict | None = None
    seed: int | None = None
    window: float | None = None
    sample_count: int | None = None

    def to_json(self) -> dict:
        return {
            "D": self.D,
            "mode": self.mode,
            "witness": self.witness,
            "seed": self.seed,
            "window": self.window,
        }


@dataclass(frozen=True)
class SamplerConfig:
    window: float
    ball_count: int = 10_000
    per_ball_samples: int = 64
    seed: int = 0
    pitch: float | None = None

    @property
    def grid_pitch(self) -> float:
        return self.pitch if self.pitch is not None else self.window / 32.0


def contracting_constant_exact(path: GeodesicPath) -> ContractingCertificate:
    """Optimal constant of a bi-infinite lattice-ray-plane geodesic.

    Disjoint balls project into the plane segment, so the constant equals the
    plane distance between the attachment points; the witness ball below the
    segment midpoint realizes the full segment as its projection.
    """
    a, b = path.endpoints
    if not (isinstance(a, BoundaryRay) and isinstance(b, BoundaryRay)) or not path.is_bi_infinite:
        raise GeodesicError("exact certificates require a bi-infinite geodesic between two ends")
    seg = path.plane_segment()
    if seg is None:
        raise GeodesicError("degenerate bi-infinite geodesic")
    D = seg.length
    ux, uy = (seg.p2[0] - seg.p1[0]) / D, (seg.p2[1] - seg.p1[1]) / D
    margin = max(0.25, D / 8.0)
    mid = ((seg.p1[0] + seg.p2[0]) / 2.0, (seg.p1[1] + seg.p2[1]) / 2.0)
    center = (mid[0] + uy * (D / 2.0 + margin), mid[1] - ux * (D / 2.0 + margin))
    radius = D / 2.0 + margin / 2.0
    t_c = euclid.project_param(center, seg.p1, seg.p2)
    proj_diam = min(t_c + radius, D) - max(t_c - radius, 0.0)
    witness = {
        "center": {"chart": "plane", "x": center[0], "y": center[1]},
        "radius": radius,
        "proj_diameter": proj_diam,
    }
    return ContractingCertificate(D=D, mode="exact", witness=witness)


def contracting_constant_sampled(
    space: ModelSpace, path: GeodesicPath, config: SamplerConfig
) -> ContractingCertificate:
    """Largest projection diameter over seeded disjoint sample balls.

    Ball centers sit on a plane grid (tree locations for trees) inside the
    window; each center takes the largest ball disjoint from the geodesic,
    and the ball surface is sampled at evenly spread, seeded directions.
    """
    if isinstance(space, MetricTree):
        return _sampled_tree(space, path, config)
    seg = path.plane_segment()
    rng = np.random.default_rng(config.seed)
    if seg is None:
        return _sampled_scalar(space, path, config, rng)
    span0, _ = path.segment_span()
    a, b = seg.p1, seg.p2
    mid = ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)
    pitch = config.grid_pitch
    if pitch <= 0:
        raise SpaceError("window too small to contain any disjoint ball")
    ticks = np.arange(-config.window, config.window + pitch / 2.0, pitch)
    gx, gy = np.meshgrid(mid[0] + ticks, mid[1] + ticks)
    centers = np.column_stack([gx.ravel(), gy.ravel()])
    dists = euclid.segment_distances_batch(centers, a, b)
    for t0, t1, piece in path.spans():
        if isinstance(piece, (RayDescent, RayAscentToInfinity, RayDescentFromInfinity)):
            lo = _piece_low_height(piece)
            d = np.hypot(centers[:, 0] - piece.m, centers[:, 1] - piece.n) + lo
            dists = np.minimum(dists, d)
    keep = dists > 4.0 * EPS_GEOM
    centers, dists = centers[keep], dists[keep]
    if len(centers) == 0:
        raise SpaceError("window too small to contain any disjoint ball")
    if len(centers) > config.ball_count:
        idx = np.sort(rng.choice(len(centers), size=config.ball_count, replace=False))
        centers, dists = centers[idx], dists[idx]
    radii = dists - EPS_GEOM
    k = max(int(config.per_ball_samples), 4)
    phases = rng.random(len(centers))
    angles = (np.arange(k)[None, :] + phases[:, None]) * (2.0 * math.pi / k)
    pts = centers[:, None, :] + radii[:, None, None] * np.stack(
        [np.cos(angles), np.sin(angles)], axis=-1
    )
    params = span0 + euclid.project_params_batch(pts.reshape(-1, 2), a, b).reshape(len(centers), k)
    diams = params.max(axis=1) - params.min(axis=1)
    i = int(diams.argmax())
    witness = {
        "center": {"chart": "plane", "x": float(centers[i, 0]), "y": float(centers[i, 1])},
        "radius": float(radii[i]),
        "proj_diameter": float(diams[i]),
    }
    return ContractingCertificate(
        D=float(diams[i]),
        mode="sampled",
        witness=witness,
        seed=config.seed,
        window=config.window,
        sample_count=len(centers),
    )


def _piece_low_height(piece) -> float:
    if isinstance(piece, RayDescent):
        return min(piece.from_h, piece.to_h)
    if isinstance(piece, RayAscentToInfinity):
        return piece.from_h
    return piece.to_h


def _sampled_scalar(space, path, config, rng) -> ContractingCertificate:
    """Fallback for geodesics without a plane segment (pure ray travel)."""
    base = path.point_at(path.finite_window()[0])
    bx, by = _base_of(base)[0]
    pitch = max(config.grid_pitch, 1e-3)
    best = (0.0, None)
    n = 0
    ticks = np.arange(-config.window, config.window + pitch / 2.0, pitch)
    for dx in ticks:
        for dy in ticks:
            c = Plane(bx + dx, by + dy)
            dist = point_to_path_distance(space, path, c)
            if dist <= 4.0 * EPS_GEOM:
                continue
            n += 1
            r = dist - EPS_GEOM
            params = []
            k = max(config.per_ball_samples // 8, 4)
            for j in range(k):
                ang = 2.0 * math.pi * (j + rng.random()) / k
                q = Plane(c.x + r * math.cos(ang), c.y + r * math.sin(ang))
                params.append(project_point(space, path, q).param)
            diam = max(params) - min(params)
            if diam >= best[0]:
                best = (diam, {"center": {"chart": "plane", "x": c.x, "y": c.y}, "radius": r, "proj_diameter": diam})
            if n >= config.ball_count:
                break
        if n >= config.ball_count:
            break
    if n == 0:
        raise SpaceError("window too small to contain any disjoint ball")
    return ContractingCertificate(
        D=best[0], mode="sampled", witness=best[1], seed=config.seed,
        window=config.window, sample_count=n,
    )


def _sampled_tree(space: MetricTree, path: GeodesicPath, config: SamplerConfig) -> ContractingCertificate:
    rng = np.random.default_rng(config.seed)
    locations = _tree_locations(space, config)
    balls = 0
    best = (0.0, None)
    for loc in locations:
        t, _, dist = space.gate(path, loc)
        if dist <= 4.0 * EPS_GEOM:
            continue
        balls += 1
        r = dist - EPS_GEOM
        params = [t]
        for other in locations:
            if space.distance(loc, other) < r:
                params.append(space.gate(path, other)[0])
        diam = max(params) - min(params)
        if diam >= best[0]:
            best = (diam, {"center": _loc_json(loc), "radius": r, "proj_diameter": diam})
        if balls >= config.ball_count:
            break
    if balls == 0:
        raise SpaceError("window too small to contain any disjoint ball")
    return ContractingCertificate(
        D=best[0], mode="sampled", witness=best[1], seed=config.seed,
        window=config.window, sample_count=balls,
    )


def _tree_locations(space: MetricTree, config: SamplerConfig) -> list[ModelPoint]:
    locs: list[ModelPoint] = [TreeNode(n) for n in sorted(space._adj, key=repr)]
    for u, v, w in space.edges:
        steps = max(2, int(w / max(config.grid_pitch, w / 8.0)))
        for i in range(1, steps):
            locs.append(space.canonical(TreeEdgePoint(u, v, w * i / steps)))
    for leaf in space.leaves():
        for h in (0.5, 1.0, 2.0, max(0.5, min(4.0, config.window))):
            locs.append(space.canonical(TreeRayPoint(leaf, h)))
    return locs


def _loc_json(loc: ModelPoint) -> dict:
    from .spaces import point_to_json

    return point_to_json(loc)


def best_certificate(
    space: ModelSpace, path: GeodesicPath, config: SamplerConfig | None = None
) -> ContractingCertificate:
    """Exact certificate where available, seeded sampling otherwise."""
    a, b = path.endpoints
    if isinstance(space, LatticeRayPlane) and isinstance(a, BoundaryRay) and isinstance(b, BoundaryRay):
        return contracting_constant_exact(path)
    if config is None:
        seg = path.plane_segment()
        scale = seg.length if seg is not None else 1.0
        config = SamplerConfig(window=max(2.0, 2.0 * scale), ball_count=2000, per_ball_samples=32, seed=0)
    return contracting_constant_sampled(space, path, config)


# ---------------------------------------------------------------------------
# Slim triangles


@dataclass(frozen=True)
class SlimReport:
    holds: bool
    worst_violation: float
    worst_param: float
    foot: ModelPoint
    certificate: ContractingCertificate | None


def verify_slim_triangle(
    space: ModelSpace,
    a: PointLike,
    b: PointLike,
    c: PointLike,
    delta_candidate: float,
    samples: int = 1024,
    certify: bool = False,
) -> SlimReport:
    """Check that the (a,b) geodesic stays delta-close to (a,p) followed by (p,b).

    p is the projection of b onto the (a,c) geodesic.  The (a,b) side is
    sampled densely with local refinement around the worst parameter.
    """
    a, b, c = (normalize_point(space, x) for x in (a, b, c))
    if _degenerate_triple(a, b, c):
        raise GeodesicError("slim-triangle check needs three distinct points")
    alpha = space.geodesic(a, c)
    if isinstance(b, (BoundaryRay, TreeEnd)):
        p = project_boundary(space, alpha, b).foot
    else:
        p = project_point(space, alpha, b).foot
    comparisons = []
    if isinstance(a, (BoundaryRay, TreeEnd)) or not points_equal(a, p):
        comparisons.append(space.geodesic(a, p))
    if isinstance(b, (BoundaryRay, TreeEnd)) or not points_equal(b, p):
        comparisons.append(space.geodesic(p, b))
    beta = space.geodesic(a, b)
    worst, worst_t = _max_min_distance(space, beta, comparisons, samples)
    cert = best_certificate(space, alpha) if certify else None
    return SlimReport(
        holds=worst <= delta_candidate + 1e-12,
        worst_violation=worst,
        worst_param=worst_t,
        foot=p,
        certificate=cert,
    )


def _degenerate_triple(a, b, c) -> bool:
    def eq(x, y):
        if isinstance(x, (BoundaryRay, TreeEnd)) or isinstance(y, (BoundaryRay, TreeEnd)):
            return x == y
        return points_equal(x, y)

    return eq(a, b) or eq(b, c) or eq(a, c)


def _max_min_distance(space, beta: GeodesicPath, paths: list[GeodesicPath], samples: int):
    lo, hi = beta.finite_window(pad=2.0)
    if hi <= lo:
        lo, hi = lo - 1.0, hi + 1.0
    ts = [lo + (hi - lo) * i / samples for i in range(samples + 1)]
    worst, worst_t = -1.0, lo

    def min_dist(t: float) -> float:
        x = beta.point_at(t)
        return min(point_to_path_distance(space, p, x) for p in paths)

    vals = [min_dist(t) for t in ts]
    i = max(range(len(vals)), key=vals.__getitem__)
    worst, worst_t = vals[i], ts[i]
    if worst > 1e-12:
        lo_r = ts[max(i - 1, 0)]
        hi_r = ts[min(i + 1, len(ts) - 1)]
        for _ in range(3):
            sub = [lo_r + (hi_r - lo_r) * j / 32 for j in range(33)]
            sv = [min_dist(t) for t in sub]
            j = max(range(len(sv)), key=sv.__getitem__)
            if sv[j] > worst:
                worst, worst_t = sv[j], sub[j]
            lo_r = sub[max(j - 1, 0)]
            hi_r = sub[min(j + 1, len(sub) - 1)]
    return worst, worst_t


def slim_constant_ideal(A, B, C, samples: int = 1024) -> float:
    """Worst slim violation for the ideal configuration with attachments A, B, C.

    The (a,c) side projects B to p; only the plane segment [A, B] can stray
    from [A,p] union [p,B], so the maximum of the min-distance is computed
    there (vectorized; refined around the argmax).
    """
    p = euclid.project_point(B, A, C)[1]
    ts = np.linspace(0.0, 1.0, samples + 1)
    pts = np.asarray(A, dtype=float)[None, :] + ts[:, None] * (
        np.asarray(B, dtype=float) - np.asarray(A, dtype=float)
    )[None, :]
    d1 = euclid.segment_distances_batch(pts, A, p)
    d2 = euclid.segment_distances_batch(pts, p, B)
    vals = np.minimum(d1, d2)
    i = int(vals.argmax())
    worst = float(vals[i])
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, samples)]
    for _ in range(3):
        sub = np.linspace(lo, hi, 33)
        pts = np.asarray(A, dtype=float)[None, :] + sub[:, None] * (
            np.asarray(B, dtype=float) - np.asarray(A, dtype=float)
        )[None, :]
        vals = np.minimum(
            euclid.segment_distances_batch(pts, A, p),
            euclid.segment_distances_batch(pts, p, B),
        )
        j = int(vals.argmax())
        worst = max(worst, float(vals[j]))
        lo, hi = sub[max(j - 1, 0)], sub[min(j + 1, 32)]
    return worst


# ---------------------------------------------------------------------------
# Bounded projection images


@dataclass(frozen=True)
class ImageReport:
    holds: bool
    proj_diameter: float
    min_distance: float


def verify_bounded_geodesic_image(
    space: ModelSpace, gamma: GeodesicPath, beta: GeodesicPath, B_candidate: float
) -> ImageReport:
    """Check the disjunction: large projection image or a close approach.

    The report always carries both measured quantities so either reading of
    the property can be evaluated by the caller.
    """
    diam = path_projection_diameter(space, gamma, beta)
    gap = paths_min_distance(space, gamma, beta)
    return ImageReport(holds=(diam > B_candidate) or (gap < B_candidate), proj_diameter=diam, min_distance=gap)


def path_projection_diameter(space: ModelSpace, gamma: GeodesicPath, beta: GeodesicPath) -> float:
    """Diameter of the projection of beta onto gamma.

    Projection parameters along beta are monotone on each straight stretch,
    so span boundary points (clipped to the finite core, plus short ray
    stubs) realize the extremes.
    """
    params = [project_point(space, gamma, x).param for x in _probe_points(space, beta)]
    return max(params) - min(params)


def paths_min_distance(space: ModelSpace, gamma: GeodesicPath, beta: GeodesicPath) -> float:
    if isinstance(space, MetricTree):
        q0 = beta.point_at(beta.finite_window()[0])
        _, g1, _ = space.gate(gamma, q0)
        _, g2, d = space.gate(beta, g1)
        return d
    best = math.inf
    for s1 in gamma.spans():
        for s2 in beta.spans():
            best = min(best, _span_pair_distance(s1, s2))
    return best


def _span_pair_distance(s1, s2) -> float:
    _, _, p1 = s1
    _, _, p2 = s2
    if isinstance(p1, PlaneSegment) and isinstance(p2, PlaneSegment):
        return euclid.segments_min_distance(p1.p1, p1.p2, p2.p1, p2.p2)
    if isinstance(p1, PlaneSegment) or isinstance(p2, PlaneSegment):
        seg, ray = (p1, p2) if isinstance(p1, PlaneSegment) else (p2, p1)
        lo = _piece_low_height(ray)
        return euclid.segment_distance((float(ray.m), float(ray.n)), seg.p1, seg.p2) + lo
    m1, n1, lo1 = p1.m, p1.n, _piece_low_height(p1)
    m2, n2, lo2 = p2.m, p2.n, _piece_low_height(p2)
    if (m1, n1) == (m2, n2):
        hi1 = _piece_high_height(p1)
        hi2 = _piece_high_height(p2)
        if lo1 > hi2:
            return lo1 - hi2
        if lo2 > hi1:
            return lo2 - hi1
        return 0.0
    return lo1 + math.hypot(m1 - m2, n1 - n2) + lo2


def _piece_high_height(piece) -> float:
    if isinstance(piece, RayDescent):
        return max(piece.from_h, piece.to_h)
    return math.inf


def _probe_points(space, path: GeodesicPath) -> list[ModelPoint]:
    lo, hi = path.finite_window(pad=0.0)
    pts = [path.point_at(lo), path.point_at(hi)]
    for start, end, piece in path.spans():
        for t in (start, end):
            if math.isfinite(t):
                pts.append(path.point_at(t))
    pad_lo, pad_hi = path.finite_window(pad=4.0)
    pts.append(path.point_at(pad_lo))
    pts.append(path.point_at(pad_hi))
    mid = (lo + hi) / 2.0
    pts.append(path.point_at(mid))
    return pts


# ---------------------------------------------------------------------------
# Triangles with two certified sides


def verify_contracting_triangles(
    space: ModelSpace,
    a: PointLike,
    b: PointLike,
    c: PointLike,
    D_two_sides: float,
    config: SamplerConfig | None = None,
) -> ContractingCertificate:
    """Certify the third side of a triangle whose (a,b) and (b,c) sides are bounded."""
    cert_ab = best_certificate(space, space.geodesic(a, b), config)
    cert_bc = best_certificate(space, space.geodesic(b, c), config)
    for cert, pair in ((cert_ab, (a, b)), (cert_bc, (b, c))):
        if cert.D > D_two_sides + EPS_GEOM:
            raise StratumViolation(pair, cert.D, D_two_sides)
    return best_certificate(space, space.geodesic(a, c), config)
