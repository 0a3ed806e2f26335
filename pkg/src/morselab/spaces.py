"""Model spaces with exact closed-form distance and geodesics.

Three spaces are provided:

* ``LatticeRayPlane`` -- the Euclidean plane with a vertical ray glued at
  every integer lattice point.  Its strongly contracting directions are
  exactly the glued rays, indexed by the lattice.
* ``MetricTree`` -- a finite tree with positive edge lengths; every leaf
  carries an implicit infinite ray, so the ends of the space are the leaves.
* ``EuclideanPlane`` -- the bare flat plane (no contracting directions,
  empty boundary); a degenerate baseline.

All operations are pure functions of immutable values and are safe to call
concurrently.  Points compare through a canonical form: a ray point at
height zero is the same point as its attachment point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import GeodesicError, SpaceError

EPS_GEOM = 1e-9

# ---------------------------------------------------------------------------
# Points


@dataclass(frozen=True)
class Plane:
    """A point of the horizontal plane chart."""

    x: float
    y: float


@dataclass(frozen=True)
class Ray:
    """A point at height h >= 0 on the vertical ray glued at lattice point (m, n)."""

    m: int
    n: int
    h: float


@dataclass(frozen=True)
class BoundaryRay:
    """The end at infinity of the vertical ray glued at (m, n)."""

    m: int
    n: int


@dataclass(frozen=True)
class TreeNode:
    node: object


@dataclass(frozen=True)
class TreeEdgePoint:
    """Interior point of edge (u, v) at arc length t from u."""

    u: object
    v: object
    t: float


@dataclass(frozen=True)
class TreeRayPoint:
    """Point at height h >= 0 on the infinite ray attached at a leaf."""

    leaf: object
    h: float


@dataclass(frozen=True)
class TreeEnd:
    """The end at infinity of the ray attached at a leaf."""

    leaf: object


ModelPoint = Union[Plane, Ray, TreeNode, TreeEdgePoint, TreeRayPoint]
BoundaryPoint = Union[BoundaryRay, TreeEnd]
PointLike = Union[ModelPoint, BoundaryPoint]


def canonical(p: ModelPoint) -> ModelPoint:
    """Canonical form of a point: zero-height ray points collapse to the plane."""
    if isinstance(p, Ray):
        if p.h < -EPS_GEOM:
            raise SpaceError(f"ray height must be >= 0, got {p.h}")
        if p.h <= EPS_GEOM:
            return Plane(float(p.m), float(p.n))
        return Ray(int(p.m), int(p.n), float(p.h))
    if isinstance(p, Plane):
        if not (math.isfinite(p.x) and math.isfinite(p.y)):
            raise SpaceError("plane coordinates must be finite")
        return Plane(float(p.x), float(p.y))
    return p


def points_equal(p: PointLike, q: PointLike, tol: float = EPS_GEOM) -> bool:
    if isinstance(p, (BoundaryRay, TreeEnd)) or isinstance(q, (BoundaryRay, TreeEnd)):
        return p == q
    p, q = canonical(p), canonical(q)
    if isinstance(p, Plane) and isinstance(q, Plane):
        return math.hypot(p.x - q.x, p.y - q.y) <= tol
    if isinstance(p, Ray) and isinstance(q, Ray):
        return (p.m, p.n) == (q.m, q.n) and abs(p.h - q.h) <= tol
    return p == q


# ---------------------------------------------------------------------------
# Path pieces

XY = tuple[float, float]


@dataclass(frozen=True)
class PlaneSegment:
    p1: XY
    p2: XY

    @property
    def length(self) -> float:
        return math.hypot(self.p2[0] - self.p1[0], self.p2[1] - self.p1[1])

    def at(self, s: float) -> Plane:
        L = self.length
        f = 0.0 if L == 0.0 else s / L
        return Plane(
            self.p1[0] + f * (self.p2[0] - self.p1[0]),
            self.p1[1] + f * (self.p2[1] - self.p1[1]),
        )


@dataclass(frozen=True)
class RayDescent:
    """Finite travel along the ray at (m, n); an ascent when to_h > from_h."""

    m: int
    n: int
    from_h: float
    to_h: float

    @property
    def length(self) -> float:
        return abs(self.to_h - self.from_h)

    def at(self, s: float) -> ModelPoint:
        sign = 1.0 if self.to_h >= self.from_h else -1.0
        return canonical(Ray(self.m, self.n, self.from_h + sign * s))


@dataclass(frozen=True)
class RayAscentToInfinity:
    m: int
    n: int
    from_h: float

    @property
    def length(self) -> float:
        return math.inf

    def at(self, s: float) -> ModelPoint:
        return canonical(Ray(self.m, self.n, self.from_h + s))


@dataclass(frozen=True)
class RayDescentFromInfinity:
    m: int
    n: int
    to_h: float

    @property
    def length(self) -> float:
        return math.inf

    def at_offset(self, t: float) -> ModelPoint:
        """Point at parameter t <= 0, where t = 0 is the bottom of the descent."""
        return canonical(Ray(self.m, self.n, self.to_h - t))


@dataclass(frozen=True)
class TreeSeg:
    """One maximal straight stretch of a tree path.

    kind "edge": along stored edge (u, v) of length w, from offset t0 with
    direction sign.  kind "ray": along the leaf ray from height h0.
    """

    kind: str
    u: object = None
    v: object = None
    w: float = 0.0
    t0: float = 0.0
    sign: float = 1.0
    leaf: object = None
    h0: float = 0.0
    length: float = 0.0

    def at(self, s: float) -> ModelPoint:
        s = min(max(s, 0.0), self.length)
        if self.kind == "edge":
            t = self.t0 + self.sign * s
            if t <= EPS_GEOM:
                return TreeNode(self.u)
            if t >= self.w - EPS_GEOM:
                return TreeNode(self.v)
            return TreeEdgePoint(self.u, self.v, t)
        h = self.h0 + self.sign * s
        return TreeNode(self.leaf) if h <= EPS_GEOM else TreeRayPoint(self.leaf, h)


@dataclass(frozen=True)
class TreePath:
    """Finite core of a tree geodesic as consecutive straight stretches.

    ``lead_leaf`` / ``tail_leaf`` mark infinite ray directions before and
    after the core; ``lead_h`` / ``tail_h`` are the heights where the core
    meets those rays.
    """

    segs: tuple[TreeSeg, ...]
    lead_leaf: object = None
    lead_h: float = 0.0
    tail_leaf: object = None
    tail_h: float = 0.0

    @property
    def length(self) -> float:
        return sum(s.length for s in self.segs)

    def at(self, t: float) -> ModelPoint:
        if t <= 0.0:
            if self.lead_leaf is not None and t < 0.0:
                h = self.lead_h - t
                return TreeNode(self.lead_leaf) if h <= EPS_GEOM else TreeRayPoint(self.lead_leaf, h)
            t = 0.0
        s = t
        for seg in self.segs:
            if s <= seg.length + EPS_GEOM:
                return seg.at(s)
            s -= seg.length
        if self.tail_leaf is not None:
            h = self.tail_h + s
            return TreeNode(self.tail_leaf) if h <= EPS_GEOM else TreeRayPoint(self.tail_leaf, h)
        if self.segs:
            return self.segs[-1].at(self.segs[-1].length)
        if self.lead_leaf is not None:
            h = self.lead_h
            return TreeNode(self.lead_leaf) if h <= EPS_GEOM else TreeRayPoint(self.lead_leaf, h)
        raise GeodesicError("empty tree path")


Piece = Union[PlaneSegment, RayDescent, RayAscentToInfinity, RayDescentFromInfinity, TreePath]


class GeodesicPath:
    """A unit-speed geodesic stored as a chain of closed-form pieces.

    Parameter 0 sits at the start of the finite core (for bi-infinite paths
    in the lattice-ray plane this is the start of the plane segment; for
    fully finite paths it is the first endpoint).  An initial descent from
    infinity occupies (-inf, 0]; a terminal ascent extends to +inf.
    """

    def __init__(self, pieces, endpoints):
        self.pieces = tuple(pieces)
        self.endpoints = tuple(endpoints)
        self._spans = []
        t = 0.0
        core = 0.0
        for piece in self.pieces:
            if isinstance(piece, RayDescentFromInfinity):
                self._spans.append((-math.inf, 0.0, piece))
            elif isinstance(piece, RayAscentToInfinity):
                self._spans.append((t, math.inf, piece))
            elif isinstance(piece, TreePath):
                start = -math.inf if piece.lead_leaf is not None else t
                finite_len = piece.length
                end = math.inf if piece.tail_leaf is not None else t + finite_len
                self._spans.append((start, end, piece))
                t += finite_len
                core = t
            else:
                self._spans.append((t, t + piece.length, piece))
                t += piece.length
                core = t
        self._core_end = core

    @property
    def t_min(self) -> float:
        return self._spans[0][0]

    @property
    def t_max(self) -> float:
        return self._spans[-1][1]

    @property
    def is_bi_infinite(self) -> bool:
        return math.isinf(self.t_min) and math.isinf(self.t_max)

    @property
    def length(self) -> float:
        return self.t_max - self.t_min

    def point_at(self, t: float) -> ModelPoint:
        if t < self.t_min - EPS_GEOM or t > self.t_max + EPS_GEOM:
            raise GeodesicError(f"parameter {t} outside [{self.t_min}, {self.t_max}]")
        for start, end, piece in self._spans:
            if t <= end + EPS_GEOM:
                if isinstance(piece, RayDescentFromInfinity):
                    return piece.at_offset(min(t, 0.0))
                if isinstance(piece, TreePath):
                    base = 0.0 if math.isinf(start) else start
                    return piece.at(t - base)
                s = t - start
                if math.isfinite(end):
                    s = min(max(s, 0.0), end - start)
                return piece.at(max(s, 0.0))
        start, end, piece = self._spans[-1]
        return piece.at(end - start)

    def finite_window(self, pad: float = 0.0) -> tuple[float, float]:
        """Parameter range covering the finite core, padded into the rays."""
        lo = max(self.t_min, -pad)
        hi = min(self.t_max, self._core_end + pad)
        return lo, hi

    def plane_segment(self) -> PlaneSegment | None:
        """The unique plane segment of a lattice-ray-plane path, if any."""
        for piece in self.pieces:
            if isinstance(piece, PlaneSegment):
                return piece
        return None

    def segment_span(self) -> tuple[float, float] | None:
        for start, end, piece in self._spans:
            if isinstance(piece, PlaneSegment):
                return start, end
        return None

    def spans(self):
        return tuple(self._spans)

    def __repr__(self):
        return (
            f"GeodesicPath({self.endpoints[0]} -> {self.endpoints[1]}, "
            f"{len(self.pieces)} pieces)"
        )


# ---------------------------------------------------------------------------
# Lattice-ray plane


@dataclass(frozen=True)
class LatticeRayPlane:
    """The plane with a vertical ray glued at each integer lattice point."""

    kind = "lattice_ray_plane"

    def _check(self, p: PointLike) -> PointLike:
        if isinstance(p, (Plane, Ray)):
            return canonical(p)
        if isinstance(p, BoundaryRay):
            return p
        raise SpaceError(f"invalid chart for lattice-ray plane: {p!r}")

    def distance(self, p: ModelPoint, q: ModelPoint) -> float:
        p = self._check(p)
        q = self._check(q)
        if isinstance(p, BoundaryRay) or isinstance(q, BoundaryRay):
            raise SpaceError("distance is only defined for interior points")
        if isinstance(p, Plane) and isinstance(q, Plane):
            return math.hypot(p.x - q.x, p.y - q.y)
        if isinstance(p, Ray) and isinstance(q, Ray):
            if (p.m, p.n) == (q.m, q.n):
                return abs(p.h - q.h)
            return p.h + math.hypot(p.m - q.m, p.n - q.n) + q.h
        ray, pl = (p, q) if isinstance(p, Ray) else (q, p)
        return ray.h + math.hypot(ray.m - pl.x, ray.n - pl.y)

    def geodesic(self, a: PointLike, b: PointLike) -> GeodesicPath:
        a = self._check(a)
        b = self._check(b)
        if points_equal(a, b):
            raise GeodesicError("geodesic endpoints must differ")
        return GeodesicPath(_lrp_pieces(a, b), (a, b))

    def boundary_points(self, window) -> list[BoundaryRay]:
        m_lo, m_hi, n_lo, n_hi = _box(window)
        return [
            BoundaryRay(m, n)
            for m in range(m_lo, m_hi + 1)
            for n in range(n_lo, n_hi + 1)
        ]

    def attachment(self, b: BoundaryRay) -> XY:
        return (float(b.m), float(b.n))


def _box(window) -> tuple[int, int, int, int]:
    if isinstance(window, int):
        if window < 0:
            raise SpaceError("empty window")
        return -window, window, -window, window
    m_lo, m_hi, n_lo, n_hi = window
    if m_lo > m_hi or n_lo > n_hi:
        raise SpaceError("empty window")
    return int(m_lo), int(m_hi), int(n_lo), int(n_hi)


def _lrp_pieces(a: PointLike, b: PointLike) -> list[Piece]:
    if isinstance(a, BoundaryRay) and isinstance(b, Ray) and (a.m, a.n) == (b.m, b.n):
        return [RayDescentFromInfinity(a.m, a.n, b.h)]
    if isinstance(b, BoundaryRay) and isinstance(a, Ray) and (b.m, b.n) == (a.m, a.n):
        return [RayAscentToInfinity(b.m, b.n, a.h)]
    if isinstance(a, Ray) and isinstance(b, Ray) and (a.m, a.n) == (b.m, b.n):
        return [RayDescent(a.m, a.n, a.h, b.h)]

    pieces: list[Piece] = []
    a_anchor, b_anchor = _lrp_anchor(a), _lrp_anchor(b)
    if isinstance(a, BoundaryRay):
        pieces.append(RayDescentFromInfinity(a.m, a.n, 0.0))
    elif isinstance(a, Ray):
        pieces.append(RayDescent(a.m, a.n, a.h, 0.0))
    if a_anchor != b_anchor:
        pieces.append(PlaneSegment(a_anchor, b_anchor))
    if isinstance(b, BoundaryRay):
        pieces.append(RayAscentToInfinity(b.m, b.n, 0.0))
    elif isinstance(b, Ray):
        pieces.append(RayDescent(b.m, b.n, 0.0, b.h))
    return pieces


def _lrp_anchor(p: PointLike) -> XY:
    if isinstance(p, Plane):
        return (p.x, p.y)
    return (float(p.m), float(p.n))


# ---------------------------------------------------------------------------
# Euclidean plane


@dataclass(frozen=True)
class EuclideanPlane:
    kind = "euclidean_plane"

    def _check(self, p: PointLike) -> PointLike:
        if isinstance(p, Plane):
            return canonical(p)
        raise SpaceError(f"invalid chart for the Euclidean plane: {p!r}")

    def distance(self, p: ModelPoint, q: ModelPoint) -> float:
        p, q = self._check(p), self._check(q)
        return math.hypot(p.x - q.x, p.y - q.y)

    def geodesic(self, a: PointLike, b: PointLike) -> GeodesicPath:
        if isinstance(a, (BoundaryRay, TreeEnd)) or isinstance(b, (BoundaryRay, TreeEnd)):
            raise GeodesicError("the Euclidean plane has no boundary points")
        a, b = self._check(a), self._check(b)
        if points_equal(a, b):
            raise GeodesicError("geodesic endpoints must differ")
        return GeodesicPath([PlaneSegment((a.x, a.y), (b.x, b.y))], (a, b))

    def boundary_points(self, window) -> list:
        _box(window)
        return []


# ---------------------------------------------------------------------------
# Metric tree


class MetricTree:
    """A finite metric tree; every leaf carries an implicit infinite ray.

    Edges are (u, v, length) with strictly positive lengths; the edge list
    must describe a connected acyclic graph.  The ends of the space (its
    boundary points) are the leaves, reached along the attached rays.
    """

    kind = "metric_tree"

    def __init__(self, edges):
        if not edges:
            raise SpaceError("a metric tree needs at least one edge")
        self.edges = [(u, v, float(w)) for u, v, w in edges]
        self._adj: dict = {}
        self._edge_len: dict = {}
        for u, v, w in self.edges:
            if w <= 0:
                raise SpaceError("edge lengths must be strictly positive")
            if u == v:
                raise SpaceError("self-loops are not allowed")
            if (u, v) in self._edge_len or (v, u) in self._edge_len:
                raise SpaceError(f"duplicate edge {(u, v)!r}")
            self._edge_len[(u, v)] = w
            self._adj.setdefault(u, {})[v] = w
            self._adj.setdefault(v, {})[u] = w
        if len(self.edges) != len(self._adj) - 1:
            raise SpaceError("edge list must describe a tree (|E| = |V| - 1)")
        self.root = self.edges[0][0]
        self._parent = {self.root: None}
        self._depth = {self.root: 0.0}
        self._hops = {self.root: 0}
        order = [self.root]
        for node in order:
            for nb, w in self._adj[node].items():
                if nb not in self._parent:
                    self._parent[nb] = node
                    self._depth[nb] = self._depth[node] + w
                    self._hops[nb] = self._hops[node] + 1
                    order.append(nb)
        if len(order) != len(self._adj):
            raise SpaceError("edge list must describe a connected tree")
        self.total_length = sum(w for _, _, w in self.edges)

    # -- structure ---------------------------------------------------------

    def leaves(self) -> list:
        return sorted((n for n in self._adj if len(self._adj[n]) == 1), key=repr)

    def boundary_points(self, window) -> list[TreeEnd]:
        depth = float(window if not isinstance(window, tuple) else window[0])
        if depth < 0:
            raise SpaceError("empty window")
        return [TreeEnd(leaf) for leaf in self.leaves() if self._depth[leaf] <= depth]

    def node_path(self, u, v) -> list:
        pu, pv = [u], [v]
        a, b = u, v
        while self._hops[a] > self._hops[b]:
            a = self._parent[a]
            pu.append(a)
        while self._hops[b] > self._hops[a]:
            b = self._parent[b]
            pv.append(b)
        while a != b:
            a = self._parent[a]
            b = self._parent[b]
            pu.append(a)
            pv.append(b)
        return pu + pv[-2::-1]

    def node_distance(self, u, v) -> float:
        path = self.node_path(u, v)
        return sum(self._adj[x][y] for x, y in zip(path, path[1:]))

    def edge_length(self, u, v) -> float:
        return self._adj[u][v]

    def is_leaf(self, node) -> bool:
        return node in self._adj and len(self._adj[node]) == 1

    # -- points ------------------------------------------------------------

    def canonical(self, p: ModelPoint) -> ModelPoint:
        if isinstance(p, TreeNode):
            if p.node not in self._adj:
                raise SpaceError(f"unknown tree node {p.node!r}")
            return p
        if isinstance(p, TreeEdgePoint):
            if (p.u, p.v) in self._edge_len:
                w, t = self._edge_len[(p.u, p.v)], p.t
            elif (p.v, p.u) in self._edge_len:
                w = self._edge_len[(p.v, p.u)]
                return self.canonical(TreeEdgePoint(p.v, p.u, w - p.t))
            else:
                raise SpaceError(f"unknown tree edge {(p.u, p.v)!r}")
            if t < -EPS_GEOM or t > w + EPS_GEOM:
                raise SpaceError("edge offset out of range")
            if t <= EPS_GEOM:
                return TreeNode(p.u)
            if t >= w - EPS_GEOM:
                return TreeNode(p.v)
            return TreeEdgePoint(p.u, p.v, float(t))
        if isinstance(p, TreeRayPoint):
            if not self.is_leaf(p.leaf):
                raise SpaceError(f"{p.leaf!r} is not a leaf of this tree")
            if p.h < -EPS_GEOM:
                raise SpaceError("ray height must be >= 0")
            return TreeNode(p.leaf) if p.h <= EPS_GEOM else TreeRayPoint(p.leaf, float(p.h))
        raise SpaceError(f"invalid chart for metric tree: {p!r}")

    def _check(self, p: PointLike) -> PointLike:
        if isinstance(p, TreeEnd):
            if not self.is_leaf(p.leaf):
                raise SpaceError(f"{p.leaf!r} is not a leaf of this tree")
            return p
        return self.canonical(p)

    def _anchors(self, p: ModelPoint) -> list[tuple[object, float]]:
        """(node, offset) pairs with d(p, x) = min over anchors of offset + d(node, x)."""
        if isinstance(p, TreeNode):
            return [(p.node, 0.0)]
        if isinstance(p, TreeEdgePoint):
            w = self._edge_len[(p.u, p.v)]
            return [(p.u, p.t), (p.v, w - p.t)]
        return [(p.leaf, p.h)]

    def distance(self, p: ModelPoint, q: ModelPoint) -> float:
        if isinstance(p, TreeEnd) or isinstance(q, TreeEnd):
            raise SpaceError("distance is only defined for interior points")
        p, q = self.canonical(p), self.canonical(q)
        same = self._same_cell(p, q)
        if same is not None:
            return same
        return min(
            op + self.node_distance(u, v) + oq
            for u, op in self._anchors(p)
            for v, oq in self._anchors(q)
        )

    @staticmethod
    def _same_cell(p: ModelPoint, q: ModelPoint) -> float | None:
        if isinstance(p, TreeEdgePoint) and isinstance(q, TreeEdgePoint):
            if (p.u, p.v) == (q.u, q.v):
                return abs(p.t - q.t)
        if isinstance(p, TreeRayPoint) and isinstance(q, TreeRayPoint):
            if p.leaf == q.leaf:
                return abs(p.h - q.h)
        if isinstance(p, TreeRayPoint) and isinstance(q, TreeNode) and q.node == p.leaf:
            return p.h
        if isinstance(q, TreeRayPoint) and isinstance(p, TreeNode) and p.node == q.leaf:
            return q.h
        return None

    # -- geodesics ----------------------------------------------------------

    def geodesic(self, a: PointLike, b: PointLike) -> GeodesicPath:
        a = self._check(a)
        b = self._check(b)
        if a == b or (
            not isinstance(a, TreeEnd)
            and not isinstance(b, TreeEnd)
            and points_equal(a, b)
        ):
            raise GeodesicError("geodesic endpoints must differ")

        # Pure descents/ascents along one leaf ray.
        if isinstance(a, TreeEnd) and _on_leaf_ray(b, a.leaf):
            h = b.h if isinstance(b, TreeRayPoint) else 0.0
            piece = TreePath((), lead_leaf=a.leaf, lead_h=h)
            return GeodesicPath([piece], (a, b))
        if isinstance(b, TreeEnd) and _on_leaf_ray(a, b.leaf):
            h = a.h if isinstance(a, TreeRayPoint) else 0.0
            piece = TreePath((), tail_leaf=b.leaf, tail_h=h)
            return GeodesicPath([piece], (a, b))

        lead_leaf = a.leaf if isinstance(a, TreeEnd) else None
        tail_leaf = b.leaf if isinstance(b, TreeEnd) else None
        a_int = TreeNode(a.leaf) if isinstance(a, TreeEnd) else a
        b_int = TreeNode(b.leaf) if isinstance(b, TreeEnd) else b

        segs = self._core_segs(a_int, b_int)
        piece = TreePath(tuple(segs), lead_leaf=lead_leaf, lead_h=0.0,
                         tail_leaf=tail_leaf, tail_h=0.0)
        return GeodesicPath([piece], (a, b))

    def _core_segs(self, a: ModelPoint, b: ModelPoint) -> list[TreeSeg]:
        same = self._same_cell(a, b)
        if same is not None and not isinstance(a, TreeNode) and not isinstance(b, TreeNode):
            return [self._straight_seg(a, b, same)]

        def total_via(anchor_a, anchor_b):
            (u, ou), (v, ov) = anchor_a, anchor_b
            return ou + self.node_distance(u, v) + ov

        pairs = [
            (aa, bb) for aa in self._anchors(a) for bb in self._anchors(b)
        ]
        (start_node, start_off), (end_node, end_off) = min(
            pairs, key=lambda p: total_via(p[0], p[1])
        )
        nodes = self.node_path(start_node, end_node)

        segs: list[TreeSeg] = []
        if start_off > EPS_GEOM:
            segs.append(self._approach_seg(a, start_node, start_off))
        for u, v in zip(nodes, nodes[1:]):
            if (u, v) in self._edge_len:
                segs.append(TreeSeg(kind="edge", u=u, v=v, w=self._edge_len[(u, v)],
                                    t0=0.0, sign=1.0, length=self._edge_len[(u, v)]))
            else:
                w = self._edge_len[(v, u)]
                segs.append(TreeSeg(kind="edge", u=v, v=u, w=w, t0=w, sign=-1.0, length=w))
        if end_off > EPS_GEOM:
            segs.append(self._depart_seg(b, end_node, end_off))
        return segs

    def _straight_seg(self, a: ModelPoint, b: ModelPoint, length: float) -> TreeSeg:
        if isinstance(a, TreeRayPoint):
            sign = 1.0 if b.h >= a.h else -1.0
            return TreeSeg(kind="ray", leaf=a.leaf, h0=a.h, sign=sign, length=length)
        u, v, w = a.u, a.v, self._edge_len[(a.u, a.v)]
        sign = 1.0 if b.t >= a.t else -1.0
        return TreeSeg(kind="edge", u=u, v=v, w=w, t0=a.t, sign=sign, length=length)

    def _approach_seg(self, a: ModelPoint, node, off: float) -> TreeSeg:
        """Stretch from interior point a down/over to its anchor node."""
        if isinstance(a, TreeRayPoint):
            return TreeSeg(kind="ray", leaf=a.leaf, h0=a.h, sign=-1.0, length=off)
        w = self._edge_len[(a.u, a.v)]
        sign = -1.0 if node == a.u else 1.0
        return TreeSeg(kind="edge", u=a.u, v=a.v, w=w, t0=a.t, sign=sign, length=off)

    def _depart_seg(self, b: ModelPoint, node, off: float) -> TreeSeg:
        if isinstance(b, TreeRayPoint):
            return TreeSeg(kind="ray", leaf=b.leaf, h0=0.0, sign=1.0, length=off)
        w = self._edge_len[(b.u, b.v)]
        t0 = 0.0 if node == b.u else w
        sign = 1.0 if node == b.u else -1.0
        return TreeSeg(kind="edge", u=b.u, v=b.v, w=w, t0=t0, sign=sign, length=off)

    # -- gates (nearest-point projection) -----------------------------------

    def surrogate_endpoints(self, path: GeodesicPath, extra: float):
        """Finite stand-ins (point, parameter) for the two path endpoints.

        Ends at infinity become ray points at a dyadic height that dominates
        every distance in play, keeping Gromov-product arithmetic on dyadic
        edge lengths exact.
        """
        piece = path.pieces[0]
        if not isinstance(piece, TreePath):
            raise SpaceError("surrogate endpoints require a tree path")
        need = self.total_length + extra + 8.0
        H = 2.0 ** math.ceil(math.log2(need))
        if piece.lead_leaf is not None:
            pa = TreeRayPoint(piece.lead_leaf, piece.lead_h + H)
            ta = -H
        else:
            pa, ta = path.point_at(0.0), 0.0
        core_len = piece.length
        if piece.tail_leaf is not None:
            pb = TreeRayPoint(piece.tail_leaf, piece.tail_h + H)
            tb = core_len + H
        else:
            pb, tb = path.point_at(core_len), core_len
        return pa, ta, pb, tb

    def gate(self, path: GeodesicPath, x: ModelPoint) -> tuple[float, ModelPoint, float]:
        """Projection of x onto the path: (parameter, foot, distance to path)."""
        x = self.canonical(x)
        extra = max(off for _, off in self._anchors(x))
        pa, ta, pb, tb = self.surrogate_endpoints(path, extra)
        da = self.distance(x, pa)
        db = self.distance(x, pb)
        L = tb - ta
        s = min(max((da + L - db) / 2.0, 0.0), L)
        dist = max(0.0, (da + db - L) / 2.0)
        t = ta + s
        return t, path.point_at(t), dist


def _on_leaf_ray(p: PointLike, leaf) -> bool:
    if isinstance(p, TreeRayPoint):
        return p.leaf == leaf
    if isinstance(p, TreeNode):
        return p.node == leaf
    return False


ModelSpace = Union[LatticeRayPlane, EuclideanPlane, MetricTree]


# ---------------------------------------------------------------------------
# Module-level operation fronts


def distance(space: ModelSpace, p: ModelPoint, q: ModelPoint) -> float:
    return space.distance(p, q)


def geodesic(space: ModelSpace, a: PointLike, b: PointLike) -> GeodesicPath:
    return space.geodesic(a, b)


def enumerate_boundary(space: ModelSpace, window) -> list[BoundaryPoint]:
    return space.boundary_points(window)


# ---------------------------------------------------------------------------
# Isometries of the lattice-ray plane


_ORTHO = {
    (1, 0, 0, 1),
    (0, -1, 1, 0),
    (-1, 0, 0, -1),
    (0, 1, -1, 0),
    (-1, 0, 0, 1),
    (1, 0, 0, -1),
    (0, 1, 1, 0),
    (0, -1, -1, 0),
}


@dataclass(frozen=True)
class LatticeIsometry:
    """Lattice-preserving isometry: integer orthogonal part plus integer shift."""

    a: int = 1
    b: int = 0
    c: int = 0
    d: int = 1
    dx: int = 0
    dy: int = 0

    def __post_init__(self):
        if (self.a, self.b, self.c, self.d) not in _ORTHO:
            raise SpaceError("linear part must be one of the eight lattice symmetries")

    def apply_xy(self, x: float, y: float) -> XY:
        return (self.a * x + self.b * y + self.dx, self.c * x + self.d * y + self.dy)

    def apply(self, p: PointLike) -> PointLike:
        if isinstance(p, Plane):
            return Plane(*self.apply_xy(p.x, p.y))
        if isinstance(p, Ray):
            mx, my = self.apply_xy(p.m, p.n)
            return Ray(int(round(mx)), int(round(my)), p.h)
        if isinstance(p, BoundaryRay):
            mx, my = self.apply_xy(p.m, p.n)
            return BoundaryRay(int(round(mx)), int(round(my)))
        raise SpaceError(f"lattice isometries act on lattice-ray-plane points, not {p!r}")

    def inverse(self) -> "LatticeIsometry":
        det = self.a * self.d - self.b * self.c
        ia, ib, ic, id_ = self.d * det, -self.b * det, -self.c * det, self.a * det
        idx = -(ia * self.dx + ib * self.dy)
        idy = -(ic * self.dx + id_ * self.dy)
        return LatticeIsometry(ia, ib, ic, id_, idx, idy)


def translation(dx: int, dy: int) -> LatticeIsometry:
    return LatticeIsometry(1, 0, 0, 1, dx, dy)


def rotation90() -> LatticeIsometry:
    return LatticeIsometry(0, -1, 1, 0, 0, 0)


def reflect_x() -> LatticeIsometry:
    return LatticeIsometry(-1, 0, 0, 1, 0, 0)


def reflect_y() -> LatticeIsometry:
    return LatticeIsometry(1, 0, 0, -1, 0, 0)


# ---------------------------------------------------------------------------
# JSON formats


def space_to_json(space: ModelSpace) -> dict:
    if isinstance(space, LatticeRayPlane):
        return {"kind": "lattice_ray_plane"}
    if isinstance(space, EuclideanPlane):
        return {"kind": "euclidean_plane"}
    if isinstance(space, MetricTree):
        return {"kind": "metric_tree", "edges": [[u, v, w] for u, v, w in space.edges]}
    raise SpaceError(f"unknown space {space!r}")


def space_from_json(obj: dict) -> ModelSpace:
    kind = obj.get("kind")
    if kind == "lattice_ray_plane":
        return LatticeRayPlane()
    if kind == "euclidean_plane":
        return EuclideanPlane()
    if kind == "metric_tree":
        return MetricTree([tuple(e) for e in obj["edges"]])
    raise SpaceError(f"unknown space kind {kind!r}")


def point_to_json(p: PointLike) -> dict:
    if isinstance(p, Plane):
        return {"chart": "plane", "x": p.x, "y": p.y}
    if isinstance(p, Ray):
        return {"chart": "ray", "m": p.m, "n": p.n, "h": p.h}
    if isinstance(p, BoundaryRay):
        return {"chart": "boundary_ray", "m": p.m, "n": p.n}
    if isinstance(p, TreeNode):
        return {"chart": "tree_node", "id": p.node}
    if isinstance(p, TreeEdgePoint):
        return {"chart": "tree_edge", "u": p.u, "v": p.v, "t": p.t}
    if isinstance(p, TreeRayPoint):
        return {"chart": "tree_ray", "leaf": p.leaf, "h": p.h}
    if isinstance(p, TreeEnd):
        return {"chart": "tree_end", "leaf": p.leaf}
    raise SpaceError(f"unknown point {p!r}")


def point_from_json(obj: dict) -> PointLike:
    chart = obj.get("chart")
    if chart == "plane":
        return Plane(float(obj["x"]), float(obj["y"]))
    if chart == "ray":
        return Ray(int(obj["m"]), int(obj["n"]), float(obj["h"]))
    if chart == "boundary_ray":
        return BoundaryRay(int(obj["m"]), int(obj["n"]))
    if chart == "tree_node":
        return TreeNode(obj["id"])
    if chart == "tree_edge":
        return TreeEdgePoint(obj["u"], obj["v"], float(obj["t"]))
    if chart == "tree_ray":
        return TreeRayPoint(obj["leaf"], float(obj["h"]))
    if chart == "tree_end":
        return TreeEnd(obj["leaf"])
    raise SpaceError(f"unknown point chart {chart!r}")
