"""Command-line front end: reproductions, probes, extensions, and plots.

Exit codes: 0 success, 2 usage error, 3 stratum/hypothesis failure,
4 internal invariant violation.  Identical configurations produce
byte-identical outputs; every sampling subcommand takes a seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import boundary as bnd
from . import extension as ext
from .contracting import SamplerConfig, contracting_constant_exact, contracting_constant_sampled
from .errors import (
    EmptyPreimage,
    GeodesicError,
    HypothesisFailure,
    InvariantViolation,
    SpaceError,
    StratumViolation,
)
from .plotting import render_plot
from .spaces import BoundaryRay, LatticeRayPlane, Plane, Ray, space_from_json
from .tables import default_tables


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# Small IO helpers


def _load_inline_or_file(text: str) -> dict:
    if text.startswith("@"):
        try:
            text = Path(text[1:]).read_text()
        except OSError as e:
            raise UsageError(f"cannot read {text[1:]}: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"invalid JSON at position {e.pos}: {e.msg}") from e


def _space_arg(text: str):
    try:
        return space_from_json(_load_inline_or_file(text))
    except SpaceError as e:
        raise UsageError(str(e)) from e


def _map_arg(text: str):
    try:
        return bnd.map_from_json(_load_inline_or_file(text))
    except SpaceError as e:
        raise UsageError(str(e)) from e


def _fmt_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _emit(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _csv_text(header: list[str], rows: list[tuple]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt_cell(v) for v in row])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _ends_json(points) -> list:
    return [[p.m, p.n] for p in points]


# ---------------------------------------------------------------------------
# Geodesic endpoint grammar: "r:m,n" | "p:x,y" | "q:m,n,h", joined by "--"


def parse_endpoint(text: str, offset: int):
    head, sep, rest = text.partition(":")
    if not sep:
        raise UsageError(f"geodesic spec: missing ':' at position {offset}")
    parts = rest.split(",")
    try:
        if head == "r" and len(parts) == 2:
            return BoundaryRay(int(parts[0]), int(parts[1]))
        if head == "p" and len(parts) == 2:
            return Plane(float(parts[0]), float(parts[1]))
        if head == "q" and len(parts) == 3:
            return Ray(int(parts[0]), int(parts[1]), float(parts[2]))
    except ValueError as e:
        raise UsageError(f"geodesic spec: bad number near position {offset + len(head) + 1}: {e}") from e
    raise UsageError(f"geodesic spec: unknown endpoint form {head!r} at position {offset}")


def parse_geodesic_spec(text: str):
    i = text.find("--")
    if i < 0:
        raise UsageError("geodesic spec: expected two endpoints separated by '--' at position 0")
    return parse_endpoint(text[:i], 0), parse_endpoint(text[i + 2 :], i + 2)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_repro_example(args) -> int:
    if args.n_max < 1:
        raise UsageError("--n-max must be at least 1")
    space = LatticeRayPlane()
    tables = default_tables()
    f = bnd.swap_map()
    header = ["n", "D_alpha_n", "D_f_alpha_n", "cr_before_abs", "cr_after_abs"]
    rows = []
    for n in range(1, args.n_max + 1):
        a, c = BoundaryRay(n, 0), BoundaryRay(n, 1)
        d_before = contracting_constant_exact(space.geodesic(a, c)).D
        fa, fc = f(a), f(c)
        d_after = contracting_constant_exact(space.geodesic(fa, fc)).D
        before = bnd.cross_ratio(
            space, BoundaryRay(n, 0), BoundaryRay(n + 1, 0), BoundaryRay(n, 1), BoundaryRay(n + 1, 1), tables
        )
        tup = (BoundaryRay(n, 0), BoundaryRay(n + 1, 0), BoundaryRay(n, 1), BoundaryRay(n + 1, 1))
        ftup = f.map_tuple(tup)
        after = bnd.cross_ratio(space, *ftup, tables)
        rows.append((n, d_before, d_after, before.magnitude, after.magnitude))
    if args.format == "json":
        _emit(args.out, _json_text([dict(zip(header, r)) for r in rows]))
    else:
        _emit(args.out, _csv_text(header, rows))
    return 0


def cmd_contracting(args) -> int:
    space = _space_arg(args.space)
    a, b = parse_geodesic_spec(args.geodesic)
    try:
        path = space.geodesic(a, b)
    except (SpaceError, GeodesicError) as e:
        raise UsageError(str(e)) from e
    if args.mode == "exact":
        cert = contracting_constant_exact(path)
    else:
        config = SamplerConfig(
            window=float(args.window),
            ball_count=args.samples,
            per_ball_samples=64,
            seed=args.seed,
        )
        cert = contracting_constant_sampled(space, path, config)
    _emit(args.out, _json_text(cert.to_json()))
    return 0


def _scatter_csv(kind: str, scatter) -> str:
    if kind == "two_stable":
        header = ["cr_in", "cr_out", "a_m", "a_n", "b_m", "b_n"]
        rows = [
            (d_in, d_out, p1.m, p1.n, p2.m, p2.n) for d_in, d_out, (p1, p2) in scatter
        ]
    else:
        header = ["cr_in", "cr_out", "a_m", "a_n", "b_m", "b_n", "c_m", "c_n", "d_m", "d_n"]
        rows = [
            (ci, co, t[0].m, t[0].n, t[1].m, t[1].n, t[2].m, t[2].n, t[3].m, t[3].n)
            for ci, co, t in scatter
        ]
    return _csv_text(header, rows)


def _growth_json(growth) -> list:
    return [
        {"window": g.window, "value": g.value, "witness": _ends_json(g.witness)}
        for g in growth
    ]


def cmd_probe(args) -> int:
    space_x = _space_arg(args.space)
    space_y = _space_arg(args.space_y) if args.space_y else space_x
    f = _map_arg(args.map)
    if args.kind == "two_stable":
        report = two_stable = bnd.two_stable_probe(
            space_x, space_y, f, D=args.D, window=args.window, sample_count=args.samples, seed=args.seed
        )
        verdict = {
            "kind": "two_stable",
            "map": f.label,
            "verdict": report.verdict,
            "window": report.window,
            "D": report.D,
            "d_prime_estimate": report.d_prime_estimate,
            "worst_pair": _ends_json(report.worst_pair),
            "growth": _growth_json(report.growth),
        }
    else:
        report = bnd.quasi_mobius_probe(
            space_x, space_y, f, D=args.D, window=args.window, sample_count=args.samples, seed=args.seed
        )
        verdict = {
            "kind": "quasi_mobius",
            "map": f.label,
            "verdict": report.verdict,
            "window": report.window,
            "D": report.D,
            "slack": report.slack,
            "envelope": [[x, y] for x, y in report.envelope[:64]],
            "growth": _growth_json(report.growth),
        }
    if args.out:
        _emit(args.out, _scatter_csv(args.kind, report.scatter))
    sys.stdout.write(_json_text(verdict))
    return 0


def cmd_extend(args) -> int:
    space_x = _space_arg(args.space)
    space_y = _space_arg(args.space_y) if args.space_y else space_x
    f = _map_arg(args.map)
    tables = default_tables()
    try:
        h = ext.extend(
            space_x, space_y, f, D=args.D, Dprime=args.Dprime, R=args.R, tables=tables
        )
    except HypothesisFailure as e:
        report = getattr(e, "report", None)
        payload = {"error": "hypothesis-failure", "detail": str(e)}
        if report is not None:
            payload["growth"] = _growth_json(report.growth)
            payload["worst_pair"] = _ends_json(report.worst_pair)
        sys.stdout.write(_json_text(payload))
        return 3

    k = max(2, int(round(args.samples ** 0.5)))
    w = float(args.window)
    queries = [
        Plane(-w + 2 * w * i / (k - 1), -w + 2 * w * j / (k - 1))
        for i in range(k)
        for j in range(k)
    ]
    header = ["x_chart", "x_coords", "h_chart", "h_coords", "pi_diameter", "triangle_count"]
    rows = []
    for q in queries:
        y, diag = h.evaluate(q)
        rows.append(
            (
                "plane",
                f"{q.x!r};{q.y!r}",
                "plane" if isinstance(y, Plane) else "ray",
                f"{y.x!r};{y.y!r}" if isinstance(y, Plane) else f"{y.m};{y.n};{y.h!r}",
                diag.diameter,
                diag.triangle_count,
            )
        )
    if args.out:
        _emit(args.out, _csv_text(header, rows))

    qi = ext.qi_probe(space_x, space_y, h, [(queries[i], queries[-1 - i]) for i in range(len(queries) // 2)], seed=args.seed)
    r_back = max(h.R, h.M)
    h_back = ext.extend(
        space_y, space_x, f.inverse_map(), D=h.Dprime, Dprime=h.D, R=r_back, tables=tables
    )
    qinv = ext.quasi_inverse_probe(h, h_back, queries[:: max(1, len(queries) // 16)], seed=args.seed)
    agreement = ext.boundary_agreement_probe(
        space_x, space_y, h, f, BoundaryRay(0, 0), heights=(2.0, 4.0, 8.0)
    )
    report = {
        "map": f.label,
        "D": h.D,
        "Dprime": h.Dprime,
        "R": h.R,
        "M": h.M,
        "qi": {
            "lambda_hat": qi.lambda_hat,
            "eps_hat": qi.eps_hat,
            "eps_lower": qi.eps_lower,
        },
        "quasi_inverse": {
            "max_displacement_XX": qinv["max_displacement_XX"],
            "max_displacement_YY": qinv["max_displacement_YY"],
        },
        "boundary_agreement": agreement,
    }
    sys.stdout.write(_json_text(report))
    return 0


def cmd_plot(args) -> int:
    try:
        text = Path(args.infile).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {args.infile}: {e}") from e
    rows = list(csv.DictReader(io.StringIO(text)))
    svg = render_plot(args.style, rows)
    _emit(args.out, svg)
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> _Parser:
    p = _Parser(prog="morselab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, space=True):
        if space:
            sp.add_argument("--space", default='{"kind": "lattice_ray_plane"}')
            sp.add_argument("--space-y", dest="space_y", default=None)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("repro-example", help="table of constants and cross-ratios for the axis swap")
    sp.add_argument("--n-max", dest="n_max", type=int, required=True)
    common(sp, space=False)
    sp.set_defaults(func=cmd_repro_example)

    sp = sub.add_parser("contracting", help="contracting certificate for a geodesic")
    sp.add_argument("--geodesic", required=True, help="endpoints, e.g. 'r:0,0--r:3,4'")
    sp.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    sp.add_argument("--window", type=float, default=8.0)
    sp.add_argument("--samples", type=int, default=10000)
    common(sp)
    sp.set_defaults(func=cmd_contracting)

    sp = sub.add_parser("probe", help="two-stability or quasi-mobius probe for a boundary map")
    sp.add_argument("--kind", choices=("two_stable", "quasi_mobius"), required=True)
    sp.add_argument("--map", required=True)
    sp.add_argument("--D", type=float, default=2.0)
    sp.add_argument("--window", type=int, default=8)
    sp.add_argument("--samples", type=int, default=2000)
    common(sp)
    sp.set_defaults(func=cmd_probe)

    sp = sub.add_parser("extend", help="extend a boundary map to the interior and probe it")
    sp.add_argument("--map", required=True)
    sp.add_argument("--D", type=float, default=2.0)
    sp.add_argument("--Dprime", type=float, default=None)
    sp.add_argument("--R", type=float, default=None)
    sp.add_argument("--window", type=float, default=2.0)
    sp.add_argument("--samples", type=int, default=64)
    common(sp)
    sp.set_defaults(func=cmd_extend)

    sp = sub.add_parser("plot", help="render a result CSV as SVG")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--style", required=True)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_plot)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        sys.stderr.write(f"usage error: {e}\n")
        return 2
    except (StratumViolation, HypothesisFailure, EmptyPreimage) as e:
        sys.stderr.write(f"hypothesis/stratum failure: {e}\n")
        return 3
    except InvariantViolation as e:
        sys.stderr.write(f"internal invariant violation: {e}\n")
        return 4
    except (SpaceError, GeodesicError) as e:
        sys.stderr.write(f"usage error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
