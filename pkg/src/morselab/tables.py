"""Empirical constant tables per model space.

Several quantities used by the checks and the interior extension are only
known to exist (slim-triangle constant, projection-image bound, the flip and
barycenter-comparison constants); no formula is available.  This module
estimates each one by an exhaustive sweep over a translation-reduced family
of lattice configurations (attachment distance at most D, apexes at integer
and half-integer offsets, window 2D) and stores the observed maximum times a
1.1 safety factor, keyed by a D-grid.  Families nest as D grows, so the
entries are monotone by construction.

Metric trees need no sweep: they are zero-slim and project onto gates, so
every entry is exactly zero.  Tables persist as JSON, one file per space
kind, in the directory named by the MORSELAB_TABLES environment variable
(default ``~/.cache/morselab/tables``).
"""

from __future__ import annotations

import itertools
import json
import math
import os
from pathlib import Path

import numpy as np

from . import euclid
from .contracting import slim_constant_ideal
from .errors import SpaceError

GRID_STEP = 0.5
MAX_LEVEL = 8.0
SAFETY = 1.1
_VERSION = 1


def level_of(D: float) -> float:
    """Smallest grid level >= D."""
    if not math.isfinite(D):
        raise SpaceError("constant tables need a finite level")
    if D > MAX_LEVEL + 1e-9:
        raise SpaceError(f"level {D} exceeds the supported table range {MAX_LEVEL}")
    return max(GRID_STEP, math.ceil(D / GRID_STEP - 1e-12) * GRID_STEP)


def lattice_disc(radius: float, half: bool = False, include_origin: bool = False):
    """Lattice (or half-lattice) points within the given radius of the origin."""
    step = 0.5 if half else 1.0
    r = int(math.floor(radius / step + 1e-9))
    pts = []
    for i in range(-r, r + 1):
        for j in range(-r, r + 1):
            x, y = i * step, j * step
            if x * x + y * y <= radius * radius + 1e-9:
                if include_origin or (x, y) != (0.0, 0.0):
                    pts.append((x, y))
    return pts


def _abs_cr_batch(A: np.ndarray, C: np.ndarray, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """|cross-ratio| of tuples (A, P, C, Q): projection gap of P, Q on segment AC."""
    u = C - A
    L = np.hypot(u[:, 0], u[:, 1])
    L = np.where(L == 0.0, 1.0, L)
    tP = np.clip(((P - A) * u).sum(axis=1) / L, 0.0, np.hypot(u[:, 0], u[:, 1]))
    tQ = np.clip(((Q - A) * u).sum(axis=1) / L, 0.0, np.hypot(u[:, 0], u[:, 1]))
    return np.abs(tQ - tP)


class ConstantTables:
    """Lazy, disk-backed lookup of the swept constants."""

    def __init__(self, directory: str | os.PathLike | None = None):
        if directory is None:
            directory = os.environ.get("MORSELAB_TABLES")
        if directory is None:
            directory = Path.home() / ".cache" / "morselab" / "tables"
        self.directory = Path(directory)
        self._data: dict[str, dict] = {}

    # -- storage -----------------------------------------------------------

    def _file(self, kind: str) -> Path:
        return self.directory / f"{kind}.json"

    def _load(self, kind: str) -> dict:
        if kind not in self._data:
            path = self._file(kind)
            if path.exists():
                obj = json.loads(path.read_text())
                if obj.get("version") == _VERSION:
                    self._data[kind] = obj
            self._data.setdefault(
                kind,
                {
                    "version": _VERSION,
                    "space_kind": kind,
                    "grid": GRID_STEP,
                    "safety": SAFETY,
                    "entries": {},
                },
            )
        return self._data[kind]

    def _save(self, kind: str) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self._file(kind)
        path.write_text(json.dumps(self._data[kind], indent=1, sort_keys=True))

    # -- lookups -----------------------------------------------------------

    _CORE_FIELDS = ("delta", "bgi", "dprime", "flip_c1")
    _EXT_FIELDS = ("ek_diam", "centers_c")

    def entry(self, kind: str, D: float, field: str) -> float:
        if kind == "euclidean_plane":
            raise SpaceError("the Euclidean plane has no contracting geodesics to tabulate")
        if field not in self._CORE_FIELDS + self._EXT_FIELDS:
            raise SpaceError(f"unknown table field {field!r}")
        lvl = level_of(D)
        key = f"{lvl:.1f}"
        data = self._load(kind)
        ent = data["entries"].setdefault(key, {})
        if field not in ent:
            if kind == "metric_tree":
                ent.setdefault(
                    "provenance",
                    {"family": "structural: trees are zero-slim; projections are gates"},
                )
                for f in self._CORE_FIELDS + self._EXT_FIELDS:
                    ent.setdefault(f, 0.0)
            else:
                if "delta" not in ent:
                    ent.update(_sweep_core(lvl))
                    self._save(kind)
                if field in self._EXT_FIELDS and field not in ent:
                    ent.update(_sweep_extension(lvl, self))
            self._save(kind)
        return float(ent[field])

    def delta(self, kind: str, D: float) -> float:
        return self.entry(kind, D, "delta")

    def bgi(self, kind: str, D: float) -> float:
        return self.entry(kind, D, "bgi")

    def dprime(self, kind: str, D: float) -> float:
        return self.entry(kind, D, "dprime")

    def flip_c1(self, kind: str, D: float) -> float:
        return self.entry(kind, D, "flip_c1")

    def ek_diam(self, kind: str, D: float) -> float:
        return self.entry(kind, D, "ek_diam")

    def centers_c(self, kind: str, D: float) -> float:
        return self.entry(kind, D, "centers_c")

    def K(self, kind: str, D: float) -> float:
        """Side-distance bound for triangle center sets: projection bound + slim constant."""
        return self.bgi(kind, D) + self.delta(kind, D)

    def slack(self, kind: str, D: float) -> float:
        """Gap bound between the supremum cross-ratio and any single-geodesic value."""
        return 6.0 * self.delta(kind, D)

    def expansion_c2(self, kind: str, D: float, L: float) -> float:
        """Image-barycenter distance bound at source distance L for the built-in maps.

        Lattice isometries preserve barycenter distances exactly (the
        barycenter construction is equivariant by canonicalization), so the
        observed maximum equals L; the safety factor is kept regardless.
        """
        if kind == "metric_tree":
            return SAFETY * L
        self.delta(kind, D)  # materialize the level for provenance
        return SAFETY * L

def _sweep_core(lvl: float) -> dict:
    R = lvl
    ints = lattice_disc(R)
    half = lattice_disc(R, half=True)
    origin = (0.0, 0.0)

    delta_raw = 0.0
    n_delta = 0
    for B in half:
        for C in ints:
            if C == B:
                continue
            if math.hypot(B[0] - C[0], B[1] - C[1]) > R + 1e-9:
                continue
            n_delta += 1
            delta_raw = max(delta_raw, slim_constant_ideal(origin, B, C))

    bgi_raw = 0.0
    span = int(math.ceil(2 * R))
    box = np.array(
        [(i, j) for i in range(-span, span + 1) for j in range(-span, span + 1)],
        dtype=float,
    )
    for C in ints:
        params = euclid.project_params_batch(box, origin, C)
        bgi_raw = max(bgi_raw, float(params.max() - params.min()))

    dprime_raw = 0.0
    for B in ints:
        for C in lattice_disc(2 * R, include_origin=False):
            if math.hypot(B[0] - C[0], B[1] - C[1]) <= R + 1e-9:
                dprime_raw = max(dprime_raw, math.hypot(C[0], C[1]))

    flip_raw, n_flip = _sweep_flips(R, ints)

    return {
        "delta": SAFETY * delta_raw,
        "bgi": SAFETY * bgi_raw,
        "dprime": SAFETY * dprime_raw,
        "flip_c1": SAFETY * flip_raw,
        "provenance": {
            "family": "translation-reduced lattice configurations, half-integer apexes",
            "window": 2 * R,
            "safety": SAFETY,
            "slim_configs": n_delta,
            "flip_tuples": n_flip,
        },
    }


def _sweep_flips(R: float, ints: list) -> tuple[float, int]:
    if len(ints) < 3:
        return 0.0, 0
    pts = np.array(ints, dtype=float)
    n = len(pts)
    d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1)
    ok = d2 <= R * R + 1e-9
    triples = [
        (i, j, k)
        for i, j, k in itertools.permutations(range(n), 3)
        if ok[i, j] and ok[i, k] and ok[j, k]
    ]
    if not triples:
        return 0.0, 0
    idx = np.array(triples)
    B, C, D = pts[idx[:, 0]], pts[idx[:, 1]], pts[idx[:, 2]]
    A = np.zeros_like(B)
    v1 = _abs_cr_batch(A, C, B, D)  # [a,b,c,d]
    v2 = _abs_cr_batch(A, B, C, D)  # [a,c,b,d]
    v3 = _abs_cr_batch(A, D, C, B)  # [a,c,d,b]
    mins = np.minimum(np.minimum(v1, v2), v3)
    return float(mins.max()), len(triples)


def _sweep_extension(lvl: float, tables: "ConstantTables") -> dict:
    from . import extension
    from .spaces import BoundaryRay, LatticeRayPlane

    space = LatticeRayPlane()
    R = lvl
    K = tables.K("lattice_ray_plane", lvl)
    ints = lattice_disc(R)
    triangles = []
    for i, B in enumerate(ints):
        for C in ints[i + 1 :]:
            if math.hypot(B[0] - C[0], B[1] - C[1]) <= R + 1e-9:
                if B != (0.0, 0.0) and C != (0.0, 0.0):
                    triangles.append((B, C))

    def end(p):
        return BoundaryRay(int(round(p[0])), int(round(p[1])))

    ek_raw = 0.0
    for B, C in triangles:
        tri = (end((0, 0)), end(B), end(C))
        cloud = extension.ek_set(space, tri, K, K / 16.0)
        ek_raw = max(ek_raw, cloud.diameter)

    centers_raw, n_tuples = _sweep_centers(lvl, tables, triangles)
    return {
        "ek_diam": SAFETY * ek_raw,
        "centers_c": SAFETY * centers_raw,
        "provenance_extension": {
            "triangles": len(triangles),
            "center_tuples": n_tuples,
            "K": K,
            "safety": SAFETY,
        },
    }


def _sweep_centers(lvl: float, tables: "ConstantTables", triangles) -> tuple[float, int]:
    from . import extension
    from .boundary import lattice_cross_ratio
    from .spaces import BoundaryRay, LatticeRayPlane

    space = LatticeRayPlane()
    R = lvl
    ints = lattice_disc(R, include_origin=True)
    tuples = []
    for b, c, d in itertools.permutations([p for p in ints if p != (0.0, 0.0)], 3):
        if (
            math.hypot(b[0] - c[0], b[1] - c[1]) <= R + 1e-9
            and math.hypot(b[0] - d[0], b[1] - d[1]) <= R + 1e-9
            and math.hypot(c[0] - d[0], c[1] - d[1]) <= R + 1e-9
        ):
            tuples.append((b, c, d))
    rng = np.random.default_rng(7)
    if len(tuples) > 1200:
        keep = sorted(rng.choice(len(tuples), size=1200, replace=False))
        tuples = [tuples[i] for i in keep]

    def end(p):
        return BoundaryRay(int(round(p[0])), int(round(p[1])))

    a = end((0, 0))
    worst = 0.0
    for b, c, d in tuples:
        pb, pc, pd = end(b), end(c), end(d)
        pi1 = extension.pi_triangle(space, (a, pb, pc), lvl, tables)
        pi2 = extension.pi_triangle(space, (a, pc, pd), lvl, tables)
        gap = space.distance(pi1, pi2)
        cr = abs(lattice_cross_ratio((0.0, 0.0), b, c, d))
        worst = max(worst, abs(gap - cr))
    return worst, len(tuples)


_DEFAULT: ConstantTables | None = None


def default_tables() -> ConstantTables:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = ConstantTables()
    return _DEFAULT
