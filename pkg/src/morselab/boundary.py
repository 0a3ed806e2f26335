"""Boundary tuples, signed cross-ratios, and stability probes for boundary maps.

The cross-ratio of an ordered 4-tuple (a, b, c, d) of ends is the signed gap
between the projections of b and d onto the geodesic from a to c; the sign
is positive when walking from the first foot to the second agrees with the
a-to-c orientation.  The model spaces are uniquely geodesic, so the value is
computed on the single geodesic; the reported ``slack`` field carries the
bound (six slim constants) by which any other representative could differ.

Probes are windowed and seeded: a finite run can certify boundedness only on
its window, so unbounded growth is reported as a violation witness found by
a ratio test over doubling windows, never as a theorem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import euclid
from .contracting import best_certificate, project_boundary
from .errors import ProjectionUndefined, SpaceError, StratumViolation
from .spaces import (
    BoundaryPoint,
    BoundaryRay,
    GeodesicPath,
    LatticeRayPlane,
    ModelSpace,
)
from .tables import default_tables

# ---------------------------------------------------------------------------
# Boundary maps


class BoundaryMap:
    """A bijection of boundary points with an explicit inverse."""

    def __init__(self, label: str, kind: str, forward, inverse, params: dict | None = None):
        self.label = label
        self.kind = kind
        self._forward = forward
        self._inverse = inverse
        self.params = params or {}

    def __call__(self, b: BoundaryPoint) -> BoundaryPoint:
        return self._forward(b)

    def forward(self, b: BoundaryPoint) -> BoundaryPoint:
        return self._forward(b)

    def inverse(self, b: BoundaryPoint) -> BoundaryPoint:
        return self._inverse(b)

    def inverse_map(self) -> "BoundaryMap":
        return BoundaryMap(
            label=f"{self.label}^-1",
            kind=self.kind,
            forward=self._inverse,
            inverse=self._forward,
            params=dict(self.params, inverted=True),
        )

    def map_tuple(self, points) -> tuple:
        return tuple(self._forward(p) for p in points)

    def __repr__(self):
        return f"BoundaryMap({self.label!r})"


def identity_map() -> BoundaryMap:
    return BoundaryMap("identity", "identity", lambda b: b, lambda b: b)


def translation_map(dx: int, dy: int) -> BoundaryMap:
    def fwd(b: BoundaryRay) -> BoundaryRay:
        return BoundaryRay(b.m + dx, b.n + dy)

    def inv(b: BoundaryRay) -> BoundaryRay:
        return BoundaryRay(b.m - dx, b.n - dy)

    return BoundaryMap(f"translate({dx},{dy})", "translation", fwd, inv, {"dx": dx, "dy": dy})


def swap_map() -> BoundaryMap:
    """The axis swap: interchanges the ends at (n, 0) and (-n, 0), fixes the rest."""

    def fwd(b: BoundaryRay) -> BoundaryRay:
        return BoundaryRay(-b.m, 0) if b.n == 0 else b

    return BoundaryMap("axis-swap", "paper_swap", fwd, fwd)


def table_map(pairs) -> BoundaryMap:
    """Explicit bijection given by index pairs; identity off the table."""
    fwd_d: dict = {}
    inv_d: dict = {}
    for (m, n), (mp, np_) in pairs:
        src, dst = BoundaryRay(int(m), int(n)), BoundaryRay(int(mp), int(np_))
        if src in fwd_d or dst in inv_d:
            raise SpaceError("table map is not a bijection")
        fwd_d[src] = dst
        inv_d[dst] = src

    def fwd(b: BoundaryRay) -> BoundaryRay:
        return fwd_d.get(b, b)

    def inv(b: BoundaryRay) -> BoundaryRay:
        return inv_d.get(b, b)

    return BoundaryMap(f"table({len(fwd_d)})", "table", fwd, inv, {"pairs": list(pairs)})


def map_to_json(f: BoundaryMap) -> dict:
    if f.kind == "identity":
        return {"kind": "identity"}
    if f.kind == "translation":
        return {"kind": "translation", "dx": f.params["dx"], "dy": f.params["dy"]}
    if f.kind == "paper_swap":
        return {"kind": "paper_swap"}
    if f.kind == "table":
        return {
            "kind": "table",
            "pairs": [[[a.m, a.n] if isinstance(a, BoundaryRay) else list(a), list(b)]
                      for a, b in _normalize_pairs(f.params["pairs"])],
        }
    raise SpaceError(f"unknown map kind {f.kind!r}")


def _normalize_pairs(pairs):
    return [((p[0], p[1]), (q[0], q[1])) for p, q in pairs]


def map_from_json(obj: dict) -> BoundaryMap:
    kind = obj.get("kind")
    if kind == "identity":
        return identity_map()
    if kind == "translation":
        return translation_map(int(obj["dx"]), int(obj["dy"]))
    if kind == "paper_swap":
        return swap_map()
    if kind == "table":
        return table_map([(tuple(p), tuple(q)) for p, q in obj["pairs"]])
    raise SpaceError(f"unknown map kind {kind!r}")


# ---------------------------------------------------------------------------
# Strata


@dataclass(frozen=True)
class StratumTuple:
    """An ordered tuple of distinct ends with all pairwise geodesics certified."""

    points: tuple
    D: float
    certificates: dict = field(compare=False)

    @property
    def level(self) -> float:
        return max((c.D for c in self.certificates.values()), default=0.0)


def stratum_counterexample(space: ModelSpace, points, D: float):
    """First pair whose geodesic exceeds the bound, or None if all pass."""
    pts = list(points)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            cert = best_certificate(space, space.geodesic(pts[i], pts[j]))
            if cert.D > D + 1e-9:
                return (pts[i], pts[j])
    return None


def in_stratum(space: ModelSpace, points, D: float) -> StratumTuple:
    """Certify all pairwise geodesics at level D; raises StratumViolation otherwise."""
    pts = tuple(points)
    if len(set(pts)) != len(pts):
        raise SpaceError("stratum tuples need distinct points")
    certs: dict = {}
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            cert = best_certificate(space, space.geodesic(pts[i], pts[j]))
            if cert.D > D + 1e-9:
                raise StratumViolation((pts[i], pts[j]), cert.D, D)
            certs[(i, j)] = cert
    return StratumTuple(points=pts, D=D, certificates=certs)


# ---------------------------------------------------------------------------
# Cross-ratio


@dataclass(frozen=True)
class CrossRatio:
    value: float
    stratum: StratumTuple | None
    geodesic_used: GeodesicPath
    slack: float

    @property
    def magnitude(self) -> float:
        return abs(self.value)


def lattice_cross_ratio(A, B, C, D) -> float:
    """Signed cross-ratio of ends at attachments A, B, C, D (closed form)."""
    tb = euclid.project_param(B, A, C)
    td = euclid.project_param(D, A, C)
    return td - tb


def cross_ratio(
    space: ModelSpace,
    a: BoundaryPoint,
    b: BoundaryPoint,
    c: BoundaryPoint,
    d: BoundaryPoint,
    tables=None,
) -> CrossRatio:
    """Signed projection gap of b and d on the geodesic from a to c.

    b may equal d (the value is then zero); b and d must differ from a and c.
    """
    if a == c:
        raise ProjectionUndefined("cross-ratio needs distinct geodesic endpoints a, c")
    if b in (a, c) or d in (a, c):
        raise ProjectionUndefined("b or d equals a or c")
    tables = tables or default_tables()
    alpha = space.geodesic(a, c)
    tb = project_boundary(space, alpha, b).barycenter_param
    td = project_boundary(space, alpha, d).barycenter_param
    value = (td - tb) + 0.0
    distinct = []
    for p in (a, b, c, d):
        if p not in distinct:
            distinct.append(p)
    stratum = None
    level = 0.0
    certs: dict = {}
    for i in range(len(distinct)):
        for j in range(i + 1, len(distinct)):
            cert = best_certificate(space, space.geodesic(distinct[i], distinct[j]))
            certs[(i, j)] = cert
            level = max(level, cert.D)
    if len(distinct) == 4:
        stratum = StratumTuple(points=tuple(distinct), D=level, certificates=certs)
    # Beyond the tabulated range no single-geodesic gap bound is available.
    slack = tables.slack(space.kind, level) if level <= 8.0 else math.inf
    return CrossRatio(value=value, stratum=stratum, geodesic_used=alpha, slack=slack)


# ---------------------------------------------------------------------------
# Probes


@dataclass(frozen=True)
class GrowthRow:
    window: int
    value: float
    witness: tuple


@dataclass(frozen=True)
class TwoStableReport:
    verdict: str  # "certified-bounded" | "violation" | "inconclusive"
    d_prime_estimate: float
    worst_pair: tuple
    growth: tuple[GrowthRow, ...]
    scatter: tuple
    window: int
    D: float


@dataclass(frozen=True)
class QuasiMobiusReport:
    verdict: str
    envelope: tuple[tuple[float, float], ...]
    scatter: tuple
    growth: tuple[GrowthRow, ...]
    window: int
    D: float
    slack: float


def growth_verdict(values, factor: float = 1.5) -> str:
    flags = [values[i + 1] > factor * max(values[i], 1e-12) for i in range(len(values) - 1)]
    if len(flags) >= 2 and all(flags):
        return "violation"
    if any(flags):
        return "inconclusive"
    return "certified-bounded"


def _image_constant(space_y: ModelSpace, b1: BoundaryPoint, b2: BoundaryPoint) -> float:
    if isinstance(space_y, LatticeRayPlane):
        return math.hypot(b1.m - b2.m, b1.n - b2.n)
    return best_certificate(space_y, space_y.geodesic(b1, b2)).D


def _stratum_pairs(window: int, D: float):
    """All unordered lattice end pairs in the box with plane distance <= D."""
    offs = [
        (dm, dn)
        for dm in range(0, int(D) + 1)
        for dn in range(-int(D), int(D) + 1)
        if (dm, dn) > (0, 0) and math.hypot(dm, dn) <= D + 1e-9
    ]
    pairs = []
    for m in range(-window, window + 1):
        for n in range(-window, window + 1):
            for dm, dn in offs:
                m2, n2 = m + dm, n + dn
                if -window <= m2 <= window and -window <= n2 <= window:
                    pairs.append((BoundaryRay(m, n), BoundaryRay(m2, n2)))
    return pairs


def two_stable_probe(
    space_x: ModelSpace,
    space_y: ModelSpace,
    f: BoundaryMap,
    D: float,
    window: int,
    sample_count: int = 2000,
    seed: int = 0,
) -> TwoStableReport:
    """Estimate the image stratum level of f over doubling windows.

    Pairs at level D are enumerated exhaustively (the pair constant is closed
    form); the scatter is a seeded subsample capped at ``sample_count`` that
    always retains the worst pair.
    """
    if not isinstance(space_x, LatticeRayPlane):
        raise SpaceError("the two-stability probe runs on lattice-ray-plane boundaries")
    rng = np.random.default_rng(seed)
    growth = []
    base_scatter = None
    base_worst = None
    base_max = None
    for w in (window, 2 * window, 4 * window):
        pairs = _stratum_pairs(w, D)
        if not pairs:
            raise SpaceError(f"no pairs in the (2,{D}) stratum within window {w}")
        rows = []
        for p1, p2 in pairs:
            d_out = _image_constant(space_y, f(p1), f(p2))
            rows.append((math.hypot(p1.m - p2.m, p1.n - p2.n), d_out, (p1, p2)))
        best = max(rows, key=lambda r: r[1])
        growth.append(GrowthRow(window=w, value=best[1], witness=best[2]))
        if w == window:
            base_worst, base_max = best[2], best[1]
            if len(rows) > sample_count:
                idx = set(rng.choice(len(rows), size=sample_count, replace=False).tolist())
                idx.add(rows.index(best))
                rows = [rows[i] for i in sorted(idx)]
            base_scatter = tuple(rows)
    verdict = growth_verdict([g.value for g in growth])
    return TwoStableReport(
        verdict=verdict,
        d_prime_estimate=base_max,
        worst_pair=base_worst,
        growth=tuple(growth),
        scatter=base_scatter,
        window=window,
        D=D,
    )


def _square_tuples(window: int, D: float):
    """Systematic minimal-area stratum tuples: one unit square per lattice point."""
    if math.sqrt(2.0) > D + 1e-9:
        return []
    out = []
    for m in range(-window, window):
        for n in range(-window, window):
            out.append(
                (
                    BoundaryRay(m, n),
                    BoundaryRay(m + 1, n),
                    BoundaryRay(m, n + 1),
                    BoundaryRay(m + 1, n + 1),
                )
            )
    return out


def _random_tuples(window: int, D: float, count: int, rng) -> list:
    disc = [
        (dm, dn)
        for dm in range(-int(D), int(D) + 1)
        for dn in range(-int(D), int(D) + 1)
        if math.hypot(dm, dn) <= D + 1e-9
    ]
    out = []
    tries = 0
    while len(out) < count and tries < 50 * count:
        tries += 1
        m = int(rng.integers(-window, window + 1))
        n = int(rng.integers(-window, window + 1))
        picks = rng.choice(len(disc), size=3, replace=False)
        pts = [(m, n)] + [(m + disc[i][0], n + disc[i][1]) for i in picks]
        if len(set(pts)) != 4:
            continue
        ok = all(
            math.hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]) <= D + 1e-9
            for i in range(4)
            for j in range(i + 1, 4)
        )
        if not ok:
            continue
        if not all(-window <= x <= window and -window <= y <= window for x, y in pts):
            continue
        out.append(tuple(BoundaryRay(x, y) for x, y in pts))
    return out


def _tuple_crs(space_y: ModelSpace, f: BoundaryMap, tup) -> tuple[float, float]:
    A, B, C, D = ((p.m, p.n) for p in tup)
    cr_in = abs(lattice_cross_ratio(A, B, C, D))
    fa, fb, fc, fd = (f(p) for p in tup)
    if isinstance(space_y, LatticeRayPlane):
        cr_out = abs(
            lattice_cross_ratio((fa.m, fa.n), (fb.m, fb.n), (fc.m, fc.n), (fd.m, fd.n))
        )
    else:
        from .contracting import project_boundary as _pb

        alpha = space_y.geodesic(fa, fc)
        cr_out = abs(
            _pb(space_y, alpha, fd).barycenter_param - _pb(space_y, alpha, fb).barycenter_param
        )
    return cr_in, cr_out


def monotone_envelope(scatter) -> tuple[tuple[float, float], ...]:
    """Least non-decreasing step function dominating the scatter."""
    pts = sorted((r[0], r[1]) for r in scatter)
    env = []
    best = 0.0
    for x, y in pts:
        best = max(best, y)
        if env and env[-1][0] == x:
            env[-1] = (x, best)
        else:
            env.append((x, best))
    return tuple(env)


def quasi_mobius_probe(
    space_x: ModelSpace,
    space_y: ModelSpace,
    f: BoundaryMap,
    D: float,
    window: int,
    sample_count: int = 2000,
    seed: int = 0,
    tables=None,
) -> QuasiMobiusReport:
    """Compare cross-ratio magnitudes before and after the map on stratum tuples.

    Sampling mixes a systematic pass over unit-square tuples (the densest
    stratum members) with seeded rejection sampling; the violation test
    tracks the largest output magnitude among bounded-input tuples across
    doubling windows.
    """
    if not isinstance(space_x, LatticeRayPlane):
        raise SpaceError("the quasi-mobius probe runs on lattice-ray-plane boundaries")
    tables = tables or default_tables()
    rng = np.random.default_rng(seed)
    input_bound = max(1.0, float(D))
    growth = []
    base_scatter = None
    for w in (window, 2 * window, 4 * window):
        tuples = _square_tuples(w, D) + _random_tuples(w, D, sample_count // 2, rng)
        if not tuples:
            raise SpaceError(f"no 4-tuples in the (4,{D}) stratum within window {w}")
        rows = []
        for tup in tuples:
            cr_in, cr_out = _tuple_crs(space_y, f, tup)
            rows.append((cr_in, cr_out, tup))
        bounded = [r for r in rows if r[0] <= input_bound + 1e-9]
        pool = bounded if bounded else rows
        best = max(pool, key=lambda r: r[1])
        growth.append(GrowthRow(window=w, value=best[1], witness=best[2]))
        if w == window:
            if len(rows) > sample_count:
                idx = set(rng.choice(len(rows), size=sample_count, replace=False).tolist())
                idx.add(rows.index(best))
                rows = [rows[i] for i in sorted(idx)]
            base_scatter = tuple(rows)
    verdict = growth_verdict([g.value for g in growth])
    slack = tables.slack(space_x.kind, min(float(D), 8.0))
    return QuasiMobiusReport(
        verdict=verdict,
        envelope=monotone_envelope(base_scatter),
        scatter=base_scatter,
        growth=tuple(growth),
        window=window,
        D=D,
        slack=slack,
    )
