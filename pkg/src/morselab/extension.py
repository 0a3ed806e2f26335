"""Extending a boundary map to the interior, with quasi-isometry probes.

The construction: for a triangle of ends whose pairwise geodesics are
D-bounded, the set of interior points within K of all three sides (K = the
projection-image bound plus the slim constant) is bounded and nonempty; its
minimum-enclosing-ball center is the triangle's barycenter.  A boundary map
f sends triangles to triangles, and the extension h sends an interior point
x to the barycenter of the image barycenters of all triangles whose own
barycenter lies within R of x.  Probes then measure how far h is from a
quasi-isometry on a working window: two-sided linear distance bounds, the
quasi-inverse displacement, and agreement with f along rays.

The lattice-ray plane carries no cocompact covering of its rays, so queries
at height t on a glued ray use the enlarged radius R + t; enlarging the
radius only grows the barycenter cloud and moves h by a bounded amount.

Triangle barycenters are cached by a translation-canonical key, which makes
the construction exactly equivariant under lattice translations; cache
inserts are idempotent, so concurrent population is safe.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import euclid, miniball
from .boundary import (
    BoundaryMap,
    StratumTuple,
    in_stratum,
    lattice_cross_ratio,
    two_stable_probe,
)
from .contracting import point_to_path_distance, project_boundary
from .errors import (
    EmptyPreimage,
    HypothesisFailure,
    InvariantViolation,
    SpaceError,
    StratumViolation,
)
from .spaces import (
    EPS_GEOM,
    BoundaryRay,
    LatticeRayPlane,
    MetricTree,
    ModelPoint,
    ModelSpace,
    Plane,
    Ray,
    TreeEnd,
    TreeNode,
    TreeRayPoint,
    canonical,
)
from .tables import ConstantTables, default_tables, level_of

# ---------------------------------------------------------------------------
# E_K sets


@dataclass(frozen=True)
class EKSet:
    """Points within K of all three sides of an ideal triangle."""

    triangle: tuple
    K: float
    samples: tuple
    diameter: float
    bounding_radius: float
    center: ModelPoint


def ek_set(space: ModelSpace, triangle, K: float, grid_pitch: float) -> EKSet:
    """Grid-sample the set of points within K of all three triangle sides.

    The plane grid is anchored at the lexicographically least vertex, so
    integer translates of a triangle produce exactly translated clouds.  The
    three side projections of the opposite vertices are exact members and
    are always included.
    """
    if isinstance(space, MetricTree):
        return _ek_tree(space, triangle, K, grid_pitch)
    a, b, c = triangle
    if not all(isinstance(p, BoundaryRay) for p in triangle):
        raise SpaceError("triangle vertices must be ends of the lattice-ray plane")
    A, B, C = ((float(p.m), float(p.n)) for p in triangle)
    sides = ((A, C), (A, B), (B, C))
    anchor = min((A, B, C))
    lo_x = anchor[0] + grid_pitch * math.floor((min(A[0], B[0], C[0]) - K - anchor[0]) / grid_pitch)
    hi_x = max(A[0], B[0], C[0]) + K
    lo_y = anchor[1] + grid_pitch * math.floor((min(A[1], B[1], C[1]) - K - anchor[1]) / grid_pitch)
    hi_y = max(A[1], B[1], C[1]) + K
    xs = np.arange(lo_x, hi_x + grid_pitch / 2.0, grid_pitch)
    ys = np.arange(lo_y, hi_y + grid_pitch / 2.0, grid_pitch)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    dmax = np.zeros(len(pts))
    for s1, s2 in sides:
        dmax = np.maximum(dmax, euclid.segment_distances_batch(pts, s1, s2))
    plane_pts = [tuple(p) for p in pts[dmax <= K + EPS_GEOM]]

    exact = [
        euclid.project_point(B, A, C)[1],
        euclid.project_point(C, A, B)[1],
        euclid.project_point(A, B, C)[1],
    ]
    known = set(plane_pts)
    for p in exact:
        if p not in known:
            plane_pts.append(p)
            known.add(p)

    stubs = []
    for lm in range(int(math.floor(lo_x)), int(math.ceil(hi_x)) + 1):
        for ln in range(int(math.floor(lo_y)), int(math.ceil(hi_y)) + 1):
            L = (float(lm), float(ln))
            base = 0.0
            for s1, s2 in sides:
                if L == s1 or L == s2:
                    continue  # the glued ray at L is part of this side
                base = max(base, euclid.segment_distance(L, s1, s2))
            h_max = K - base
            if h_max > EPS_GEOM:
                stubs.append((L, h_max))
    samples: list[ModelPoint] = [Plane(x, y) for x, y in plane_pts]
    for L, h_top in stubs:
        h = grid_pitch
        while h < h_top - EPS_GEOM:
            samples.append(Ray(int(L[0]), int(L[1]), h))
            h += grid_pitch
        samples.append(Ray(int(L[0]), int(L[1]), h_top))
    if not samples:
        raise InvariantViolation("empty center set: K below the table bound or a geometry bug")
    diam = _lrp_cloud_diameter(plane_pts, stubs)
    center, radius = _lrp_cloud_center(plane_pts, stubs, grid_pitch)
    return EKSet(
        triangle=tuple(triangle),
        K=K,
        samples=tuple(samples),
        diameter=diam,
        bounding_radius=radius,
        center=center,
    )


def _hull(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and (
                (out[-1][0] - out[-2][0]) * (p[1] - out[-2][1])
                - (out[-1][1] - out[-2][1]) * (p[0] - out[-2][0])
            ) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    return lower[:-1] + upper[:-1]


def _lrp_cloud_diameter(plane_pts, stubs) -> float:
    hull = _hull(plane_pts) if plane_pts else []
    diam = 0.0
    for i in range(len(hull)):
        for j in range(i + 1, len(hull)):
            diam = max(diam, math.hypot(hull[i][0] - hull[j][0], hull[i][1] - hull[j][1]))
    for L, h in stubs:
        for q in hull:
            diam = max(diam, h + math.hypot(L[0] - q[0], L[1] - q[1]))
        for L2, h2 in stubs:
            if L2 == L:
                diam = max(diam, abs(h - h2))
            else:
                diam = max(diam, h + math.hypot(L[0] - L2[0], L[1] - L2[1]) + h2)
    return diam


def _lrp_cloud_center(plane_pts, stubs, pitch) -> tuple[ModelPoint, float]:
    if not plane_pts and stubs:
        bases = {L for L, _ in stubs}
        if len(bases) == 1:
            L = next(iter(bases))
            h_top = max(h for _, h in stubs)
            return Ray(int(L[0]), int(L[1]), h_top / 2.0), h_top / 2.0
    pts = list(plane_pts) + [L for L, _ in stubs]
    cx, cy, r = miniball.enclosing_circle(pts)
    if not stubs:
        return Plane(cx, cy), r
    wpts = [(p[0], p[1]) for p in plane_pts] + [L for L, _ in stubs]
    weights = [0.0] * len(plane_pts) + [h for _, h in stubs]
    (cx, cy), cost = miniball.weighted_center(wpts, weights, (cx, cy), max(pitch, r / 8.0))
    return Plane(cx, cy), cost


def _ek_tree(space: MetricTree, triangle, K: float, grid_pitch: float) -> EKSet:
    a, b, c = triangle
    if not all(isinstance(p, TreeEnd) for p in triangle):
        raise SpaceError("tree triangle vertices must be tree ends")
    sides = [space.geodesic(a, c), space.geodesic(a, b), space.geodesic(b, c)]
    candidates: list[ModelPoint] = [TreeNode(n) for n in sorted(space._adj, key=repr)]
    pitch = max(grid_pitch, 1e-3)
    for u, v, w in space.edges:
        steps = max(1, int(w / pitch))
        for i in range(1, steps):
            candidates.append(space.canonical(_edge_point(u, v, w * i / steps)))
    for leaf in space.leaves():
        h = pitch
        while h <= K + EPS_GEOM:
            candidates.append(TreeRayPoint(leaf, h))
            h += pitch
    for apex, side in ((b, sides[0]), (c, sides[1]), (a, sides[2])):
        candidates.append(project_boundary(space, side, apex).foot)
    members = []
    seen = set()
    for p in candidates:
        if p in seen:
            continue
        seen.add(p)
        if all(space.gate(s, p)[2] <= K + EPS_GEOM for s in sides):
            members.append(p)
    if not members:
        raise InvariantViolation("empty center set: K below the table bound or a geometry bug")
    diam, pair = 0.0, (members[0], members[0])
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            d = space.distance(members[i], members[j])
            if d > diam:
                diam, pair = d, (members[i], members[j])
    if diam == 0.0:
        center = members[0]
        radius = 0.0
    else:
        mid = space.geodesic(pair[0], pair[1]).point_at(diam / 2.0)
        center, radius = mid, diam / 2.0
    return EKSet(
        triangle=tuple(triangle),
        K=K,
        samples=tuple(members),
        diameter=diam,
        bounding_radius=radius,
        center=center,
    )


def _edge_point(u, v, t):
    from .spaces import TreeEdgePoint

    return TreeEdgePoint(u, v, t)


# ---------------------------------------------------------------------------
# Barycenters


def barycenter(space: ModelSpace, cloud) -> ModelPoint:
    """Center of the minimum enclosing ball of a bounded cloud (unique here)."""
    cloud = list(cloud)
    if not cloud:
        raise SpaceError("empty cloud")
    if isinstance(space, MetricTree):
        diam, pair = 0.0, (cloud[0], cloud[0])
        for i in range(len(cloud)):
            for j in range(i + 1, len(cloud)):
                d = space.distance(cloud[i], cloud[j])
                if d > diam:
                    diam, pair = d, (cloud[i], cloud[j])
        if diam == 0.0:
            return space.canonical(cloud[0])
        return space.geodesic(pair[0], pair[1]).point_at(diam / 2.0)
    pts = [canonical(p) for p in cloud]
    plane = [(p.x, p.y) for p in pts if isinstance(p, Plane)]
    stubs = [((float(p.m), float(p.n)), p.h) for p in pts if isinstance(p, Ray)]
    center, _ = _lrp_cloud_center(plane, stubs, pitch=0.05)
    return center


# ---------------------------------------------------------------------------
# Triangle barycenters (cached, translation-canonical)

_PI_CACHE: dict = {}


def pi_triangle(space: ModelSpace, triangle, D: float, tables: ConstantTables | None = None) -> ModelPoint:
    """Barycenter of the K-center set of an ideal triangle, K from the tables.

    Lattice triangles are canonicalized by translating their least vertex to
    the origin, so the map is exactly equivariant under lattice translations
    and the cache is shared across translates.
    """
    tables = tables or default_tables()
    K = tables.K(space.kind, D)
    if isinstance(space, MetricTree):
        key = ("tree", id(space), tuple(sorted((p.leaf for p in triangle), key=repr)), round(K, 12))
        if key not in _PI_CACHE:
            ek = ek_set(space, triangle, K, K / 16.0 if K > 0 else 0.25)
            _PI_CACHE[key] = ek.center
        return _PI_CACHE[key]
    verts = sorted((p.m, p.n) for p in triangle)
    anchor = verts[0]
    offs = tuple((m - anchor[0], n - anchor[1]) for m, n in verts)
    key = ("lrp", offs, round(K, 12))
    if key not in _PI_CACHE:
        tri0 = tuple(BoundaryRay(m, n) for m, n in offs)
        c1 = ek_set(space, tri0, K, K / 16.0).center
        c2 = ek_set(space, tri0, K, K / 32.0).center
        if space.distance(c1, c2) >= K / 8.0:
            raise InvariantViolation("barycenter did not stabilize under grid refinement")
        _PI_CACHE[key] = c2
    base = _PI_CACHE[key]
    if isinstance(base, Plane):
        return Plane(base.x + anchor[0], base.y + anchor[1])
    return Ray(base.m + anchor[0], base.n + anchor[1], base.h)


# ---------------------------------------------------------------------------
# Small flips


@dataclass(frozen=True)
class FlipChoice:
    which: str
    permutation: tuple
    value: float
    all_values: tuple[float, float, float]


def small_flip_select(space: ModelSpace, tuple4, D: float, tables: ConstantTables | None = None) -> FlipChoice:
    """Pick the smallest of the three cross-ratio magnitudes of a 4-tuple.

    The chosen magnitude is asserted against the flip bound from the tables;
    exceeding it indicates a stratum violation or a geometry bug.
    """
    tables = tables or default_tables()
    a, b, c, d = tuple4
    if not isinstance(space, LatticeRayPlane):
        raise SpaceError("flip selection runs on lattice-ray-plane ends")
    pts = {p: (float(p.m), float(p.n)) for p in tuple4}
    for p, q in itertools.combinations(tuple4, 2):
        gap = math.hypot(pts[p][0] - pts[q][0], pts[p][1] - pts[q][1])
        if gap > D + 1e-9:
            raise StratumViolation((p, q), gap, D)
    A, B, C, Dp = (pts[p] for p in tuple4)
    candidates = (
        ("[a,b,c,d]", (a, b, c, d), abs(lattice_cross_ratio(A, B, C, Dp))),
        ("[a,c,b,d]", (a, c, b, d), abs(lattice_cross_ratio(A, C, B, Dp))),
        ("[a,c,d,b]", (a, c, d, b), abs(lattice_cross_ratio(A, C, Dp, B))),
    )
    which, perm, value = min(candidates, key=lambda t: t[2])
    bound = tables.flip_c1(space.kind, min(D, 8.0))
    if value > bound + 1e-9:
        raise InvariantViolation(
            f"smallest cross-ratio {value:.6g} exceeds the flip bound {bound:.6g}"
        )
    return FlipChoice(which=which, permutation=perm, value=value, all_values=tuple(c[2] for c in candidates))


# ---------------------------------------------------------------------------
# Triangle catalogs and preimages


def _shape_catalog(D_level: float) -> tuple:
    """Lattice triangles with pairwise gaps <= D and least vertex at the origin."""
    r = int(math.floor(D_level + 1e-9))
    pts = [
        (i, j)
        for i in range(-r, r + 1)
        for j in range(-r, r + 1)
        if (i, j) > (0, 0) and math.hypot(i, j) <= D_level + 1e-9
    ]
    shapes = []
    for bi in range(len(pts)):
        for ci in range(bi + 1, len(pts)):
            B, C = pts[bi], pts[ci]
            if math.hypot(B[0] - C[0], B[1] - C[1]) <= D_level + 1e-9:
                shapes.append(((0, 0), B, C))
    return tuple(shapes)


class _Catalog:
    """Shape barycenter offsets for fast preimage queries."""

    def __init__(self, space: LatticeRayPlane, D: float, tables: ConstantTables):
        self.space = space
        self.D = D
        self.tables = tables
        self.level = level_of(D)
        self.shapes = _shape_catalog(self.level)
        offs = []
        for shape in self.shapes:
            tri = tuple(BoundaryRay(m, n) for m, n in shape)
            pi = pi_triangle(space, tri, D, tables)
            if not isinstance(pi, Plane):
                raise InvariantViolation("triangle barycenter left the plane chart")
            offs.append((pi.x, pi.y))
        self.pi_offsets = np.array(offs) if offs else np.zeros((0, 2))
        self.reach = self.level + tables.ek_diam("lattice_ray_plane", self.level) + 1.0

    def query(self, x: ModelPoint, R_eff: float):
        """Triangles (as vertex triples) and barycenters with d(x, pi) <= R_eff."""
        x = canonical(x)
        if isinstance(x, Plane):
            cx, cy, lift = x.x, x.y, 0.0
        else:
            cx, cy, lift = float(x.m), float(x.n), x.h
        plane_budget = R_eff - lift
        if plane_budget < 0 or len(self.shapes) == 0:
            return [], []
        rad = plane_budget + self.reach
        anchors = [
            (i, j)
            for i in range(int(math.floor(cx - rad)), int(math.ceil(cx + rad)) + 1)
            for j in range(int(math.floor(cy - rad)), int(math.ceil(cy + rad)) + 1)
        ]
        if not anchors:
            return [], []
        anc = np.array(anchors, dtype=float)
        pis = anc[:, None, :] + self.pi_offsets[None, :, :]
        d = np.hypot(pis[..., 0] - cx, pis[..., 1] - cy) + lift
        mask = d <= R_eff + EPS_GEOM
        tris, centers = [], []
        for ai, si in np.argwhere(mask):
            am, an = anchors[ai]
            shape = self.shapes[si]
            tris.append(tuple(BoundaryRay(m + am, n + an) for m, n in shape))
            centers.append(Plane(pis[ai, si, 0], pis[ai, si, 1]))
        return tris, centers


_CATALOGS: dict = {}


def _catalog(space: LatticeRayPlane, D: float, tables: ConstantTables) -> _Catalog:
    key = (id(tables), level_of(D))
    if key not in _CATALOGS:
        _CATALOGS[key] = _Catalog(space, D, tables)
    return _CATALOGS[key]


def preimage_triangles(
    space: ModelSpace,
    x: ModelPoint,
    R: float,
    D: float,
    tables: ConstantTables | None = None,
    window: int | None = None,
) -> list[StratumTuple]:
    """All D-triangles whose barycenter lands in the ball of radius R around x.

    An empty result signals that R is too small relative to the lattice
    pitch (or that x sits too far up a ray); the caller must enlarge R.
    """
    tables = tables or default_tables()
    if not isinstance(space, LatticeRayPlane):
        raise SpaceError("preimages are enumerated on the lattice-ray plane")
    tris, _ = _catalog(space, D, tables).query(x, R)
    if window is not None:
        tris = [
            t
            for t in tris
            if all(-window <= p.m <= window and -window <= p.n <= window for p in t)
        ]
    return [in_stratum(space, t, D) for t in tris]


# ---------------------------------------------------------------------------
# The extension


@dataclass(frozen=True)
class QueryDiag:
    pi_cloud: tuple
    diameter: float
    triangle_count: int
    R_eff: float
    M_eff: float


class ExtendedMap:
    """Lazy evaluator of the interior extension of a boundary map.

    Evaluation is pure per query given frozen tables; the cache is populated
    idempotently, so concurrent use is safe.  Queries on glued rays enlarge
    the preimage radius by the ray height (the plane barycenters cannot
    otherwise reach them); diagnostics record the effective values used.
    """

    def __init__(self, space_x, space_y, f: BoundaryMap, D: float, Dprime: float, R: float,
                 tables: ConstantTables, strict: bool = True):
        self.space_x = space_x
        self.space_y = space_y
        self.f = f
        self.D = D
        self.Dprime = Dprime
        self.R = R
        self.tables = tables
        self.strict = strict
        self._cache: dict = {}
        self._image_ok: dict = {}

    @property
    def M(self) -> float:
        """Cloud diameter bound at the base radius."""
        return self.tables.expansion_c2(self.space_y.kind, self.Dprime, 2.0 * self.R)

    def M_at(self, R_eff: float) -> float:
        return self.tables.expansion_c2(self.space_y.kind, self.Dprime, 2.0 * R_eff)

    def effective_radius(self, x: ModelPoint) -> float:
        x = canonical(x)
        return self.R + (x.h if isinstance(x, Ray) else 0.0)

    def _check_image(self, tri) -> None:
        img = self.f.map_tuple(tri)
        verts = tuple(sorted((p.m, p.n) for p in img))
        anchor = verts[0]
        key = tuple((m - anchor[0], n - anchor[1]) for m, n in verts)
        ok = self._image_ok.get(key)
        if ok is None:
            for p, q in itertools.combinations(img, 2):
                gap = math.hypot(p.m - q.m, p.n - q.n)
                if gap > self.Dprime + 1e-9:
                    raise StratumViolation((p, q), gap, self.Dprime)
            self._image_ok[key] = True

    def evaluate(self, x: ModelPoint) -> tuple[ModelPoint, QueryDiag]:
        x = canonical(x)
        if x in self._cache:
            return self._cache[x]
        R_eff = self.effective_radius(x)
        tris, _ = _catalog(self.space_x, self.D, self.tables).query(x, R_eff)
        if not tris:
            raise EmptyPreimage(
                f"no triangle barycenter within {R_eff} of {x!r}; enlarge R"
            )
        cloud = []
        for tri in tris:
            self._check_image(tri)
            img = self.f.map_tuple(tri)
            cloud.append(pi_triangle(self.space_y, img, self.Dprime, self.tables))
        pts = np.array([(p.x, p.y) for p in cloud if isinstance(p, Plane)])
        diam = euclid.max_pairwise_distance(pts) if len(pts) > 1 else 0.0
        M_eff = self.M_at(R_eff)
        if self.strict and diam > M_eff + 1e-9:
            raise InvariantViolation(
                f"barycenter cloud diameter {diam:.6g} exceeds the bound {M_eff:.6g}"
            )
        y = barycenter(self.space_y, cloud)
        diag = QueryDiag(
            pi_cloud=tuple(cloud),
            diameter=diam,
            triangle_count=len(tris),
            R_eff=R_eff,
            M_eff=M_eff,
        )
        self._cache[x] = (y, diag)
        return y, diag

    def __call__(self, x: ModelPoint) -> ModelPoint:
        return self.evaluate(x)[0]


def select_radius(space: ModelSpace, D: float, tables: ConstantTables, max_R: float = 64.0) -> float:
    """Smallest doubling radius whose preimages cover a unit cell of queries.

    By lattice periodicity of the triangle barycenters, covering one unit
    cell covers the whole plane chart.
    """
    queries = [Plane(0.25 * i, 0.25 * j) for i in range(5) for j in range(5)]
    R = 1.0
    cat = _catalog(space, D, tables)
    while R <= max_R:
        if all(len(cat.query(q, R)[0]) > 0 for q in queries):
            return R
        R *= 2.0
    raise EmptyPreimage(f"no covering radius up to {max_R}")


def extend(
    space_x: ModelSpace,
    space_y: ModelSpace,
    f: BoundaryMap,
    D: float,
    Dprime: float | None = None,
    R: float | None = None,
    tables: ConstantTables | None = None,
    certify_window: int = 8,
    strict: bool = True,
) -> ExtendedMap:
    """Build the interior extension of f after certifying 2-stability.

    Raises HypothesisFailure (with the probe report attached) when the
    stability probe returns a violation witness or the estimated image level
    exceeds the requested one.
    """
    tables = tables or default_tables()
    report = two_stable_probe(space_x, space_y, f, D, window=certify_window)
    if report.verdict == "violation":
        err = HypothesisFailure(
            f"{f.label} is not 2-stable on the window: image constants grow "
            f"{[g.value for g in report.growth]}"
        )
        err.report = report
        raise err
    if Dprime is None:
        Dprime = level_of(report.d_prime_estimate)
    elif report.d_prime_estimate > Dprime + 1e-9:
        err = HypothesisFailure(
            f"probe estimate {report.d_prime_estimate:.6g} exceeds requested D' {Dprime}"
        )
        err.report = report
        raise err
    if R is None:
        R = select_radius(space_x, D, tables)
    return ExtendedMap(space_x, space_y, f, D, Dprime, R, tables, strict=strict)


# ---------------------------------------------------------------------------
# Probes


@dataclass(frozen=True)
class QIReport:
    lambda_hat: float
    eps_hat: float
    eps_lower: float
    worst_pair: tuple
    rows: tuple  # (d_in, d_out, x, y)


def qi_probe(space_x: ModelSpace, space_y: ModelSpace, h: ExtendedMap, sample_pairs, seed: int = 0) -> QIReport:
    """Fit two-sided linear distance bounds for h over sampled pairs.

    The slope is the least-squares fit; the intercepts are the largest
    residuals, so the reported bounds hold for every sampled pair exactly.
    """
    rng = np.random.default_rng(seed)
    if isinstance(sample_pairs, int):
        pairs = []
        for _ in range(sample_pairs):
            x = Plane(float(rng.uniform(-4, 4)), float(rng.uniform(-4, 4)))
            y = Plane(float(rng.uniform(-4, 4)), float(rng.uniform(-4, 4)))
            pairs.append((x, y))
    else:
        pairs = list(sample_pairs)
    rows = []
    for x, y in pairs:
        d_in = space_x.distance(x, y)
        d_out = space_y.distance(h(x), h(y))
        rows.append((d_in, d_out, x, y))
    d_in_arr = np.array([r[0] for r in rows])
    d_out_arr = np.array([r[1] for r in rows])
    var = float(((d_in_arr - d_in_arr.mean()) ** 2).sum())
    if var <= 1e-12:
        lam = 1.0
    else:
        lam = float(((d_in_arr - d_in_arr.mean()) * (d_out_arr - d_out_arr.mean())).sum() / var)
    lam = max(lam, 1e-6)
    resid = d_out_arr - lam * d_in_arr
    eps_hat = max(0.0, float(resid.max()))
    eps_lower = max(0.0, float((-resid).max()))
    worst = rows[int(resid.argmax())]
    return QIReport(
        lambda_hat=lam,
        eps_hat=eps_hat,
        eps_lower=eps_lower,
        worst_pair=(worst[2], worst[3]),
        rows=tuple(rows),
    )


def quasi_inverse_probe(h_xy: ExtendedMap, h_yx: ExtendedMap, samples, seed: int = 0) -> dict:
    """Round-trip displacements of the two extensions over sampled points."""
    if h_yx.R + 1e-9 < max(h_xy.R, h_xy.M):
        raise SpaceError(
            "quasi-inverse probe needs the return extension built with radius >= max(R, M)"
        )
    rng = np.random.default_rng(seed)
    if isinstance(samples, int):
        pts = [Plane(float(rng.uniform(-4, 4)), float(rng.uniform(-4, 4))) for _ in range(samples)]
    else:
        pts = list(samples)
    disp_x = []
    disp_y = []
    for x in pts:
        disp_x.append(h_xy.space_x.distance(x, h_yx(h_xy(x))))
        disp_y.append(h_yx.space_x.distance(x, h_xy(h_yx(x))))
    return {
        "max_displacement_XX": max(disp_x),
        "max_displacement_YY": max(disp_y),
        "rows": list(zip(pts, disp_x, disp_y)),
    }


def boundary_agreement_probe(
    space_x: ModelSpace,
    space_y: ModelSpace,
    h: ExtendedMap,
    f: BoundaryMap,
    p: BoundaryRay,
    heights,
) -> list[dict]:
    """Distances from h(points up the ray toward p) to the ray toward f(p)."""
    fp = f(p)
    target = space_y.geodesic(Plane(float(fp.m), float(fp.n)), fp)
    out = []
    for t in heights:
        x = Ray(p.m, p.n, float(t)) if t > 0 else Plane(float(p.m), float(p.n))
        y, diag = h.evaluate(x)
        dev = point_to_path_distance(space_y, target, y)
        out.append({"height": float(t), "deviation": dev, "R_eff": diag.R_eff, "M_eff": diag.M_eff})
    return out
