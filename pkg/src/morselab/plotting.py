"""Deterministic SVG rendering of plane-chart geometry.

Only the plane chart is drawn; glued rays appear as short vertical ticks at
their attachment points.  The writer is hand-rolled so that identical inputs
produce byte-identical files.
"""

from __future__ import annotations

import math

from .errors import SpaceError


def _fmt(v: float) -> str:
    return f"{v:.3f}"


class SvgCanvas:
    def __init__(self, width: int = 640, height: int = 640, bounds=(-5.0, 5.0, -5.0, 5.0)):
        self.width = width
        self.height = height
        self.x0, self.x1, self.y0, self.y1 = bounds
        self.elements: list[str] = []

    def _sx(self, x: float) -> float:
        return (x - self.x0) / (self.x1 - self.x0) * self.width

    def _sy(self, y: float) -> float:
        return self.height - (y - self.y0) / (self.y1 - self.y0) * self.height

    def line(self, a, b, color="black", width=1.0, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.elements.append(
            f'<line x1="{_fmt(self._sx(a[0]))}" y1="{_fmt(self._sy(a[1]))}" '
            f'x2="{_fmt(self._sx(b[0]))}" y2="{_fmt(self._sy(b[1]))}" '
            f'stroke="{color}" stroke-width="{width}"{d} />'
        )

    def circle(self, c, r_px: float, color="black", fill="none"):
        self.elements.append(
            f'<circle cx="{_fmt(self._sx(c[0]))}" cy="{_fmt(self._sy(c[1]))}" '
            f'r="{_fmt(r_px)}" stroke="{color}" fill="{fill}" />'
        )

    def arrow(self, a, b, color="tomato"):
        self.line(a, b, color=color, width=1.2)
        dx, dy = b[0] - a[0], b[1] - a[1]
        norm = math.hypot(dx, dy)
        if norm < 1e-12:
            self.circle(b, 2.0, color=color, fill=color)
            return
        ux, uy = dx / norm, dy / norm
        size = 0.12 * (self.x1 - self.x0) / 10.0
        left = (b[0] - size * (ux + 0.5 * uy), b[1] - size * (uy - 0.5 * ux))
        right = (b[0] - size * (ux - 0.5 * uy), b[1] - size * (uy + 0.5 * ux))
        self.line(b, left, color=color)
        self.line(b, right, color=color)

    def lattice_ticks(self, color="#bbbbbb"):
        for m in range(int(math.ceil(self.x0)), int(math.floor(self.x1)) + 1):
            for n in range(int(math.ceil(self.y0)), int(math.floor(self.y1)) + 1):
                tick = 0.12
                self.line((m, n), (m, n + tick), color=color, width=0.8)

    def text(self, pos, s, color="black", size=11):
        self.elements.append(
            f'<text x="{_fmt(self._sx(pos[0]))}" y="{_fmt(self._sy(pos[1]))}" '
            f'font-size="{size}" fill="{color}">{s}</text>'
        )

    def render(self) -> str:
        body = "\n".join(self.elements)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">\n'
            f'<rect width="{self.width}" height="{self.height}" fill="white" />\n'
            f"{body}\n</svg>\n"
        )


def plot_extension_rows(rows: list[dict]) -> str:
    """Arrows from query points to their images over the lattice ticks."""
    needed = {"x_chart", "x_coords", "h_chart", "h_coords"}
    if rows and not needed.issubset(rows[0]):
        raise SpaceError(f"missing columns: {sorted(needed - set(rows[0]))}")
    pts = []
    for r in rows:
        xx, xy = (float(v) for v in r["x_coords"].split(";"))
        hx, hy = (float(v) for v in r["h_coords"].split(";"))
        pts.append(((xx, xy), (hx, hy)))
    xs = [p[0] for pair in pts for p in pair] or [0.0]
    ys = [p[1] for pair in pts for p in pair] or [0.0]
    pad = 1.0
    canvas = SvgCanvas(bounds=(min(xs) - pad, max(xs) + pad, min(ys) - pad, max(ys) + pad))
    canvas.lattice_ticks()
    for a, b in pts:
        canvas.circle(a, 1.5, color="steelblue", fill="steelblue")
        canvas.arrow(a, b)
    return canvas.render()


def plot_scatter_rows(rows: list[dict]) -> str:
    """Input/output magnitude scatter with the monotone envelope."""
    needed = {"cr_in", "cr_out"}
    if rows and not needed.issubset(rows[0]):
        raise SpaceError(f"missing columns: {sorted(needed - set(rows[0]))}")
    pts = [(float(r["cr_in"]), float(r["cr_out"])) for r in rows]
    hi_x = max([p[0] for p in pts] + [1.0])
    hi_y = max([p[1] for p in pts] + [1.0])
    canvas = SvgCanvas(bounds=(-0.05 * hi_x, 1.05 * hi_x, -0.05 * hi_y, 1.05 * hi_y))
    canvas.line((0, 0), (hi_x, 0), color="black")
    canvas.line((0, 0), (0, hi_y), color="black")
    for p in pts:
        canvas.circle(p, 2.0, color="steelblue", fill="steelblue")
    env = []
    best = 0.0
    for x, y in sorted(pts):
        best = max(best, y)
        env.append((x, best))
    for a, b in zip(env, env[1:]):
        canvas.line(a, (b[0], a[1]), color="tomato")
        canvas.line((b[0], a[1]), b, color="tomato")
    return canvas.render()


def render_plot(style: str, rows: list[dict]) -> str:
    if style == "h-arrows":
        return plot_extension_rows(rows)
    if style == "scatter":
        return plot_scatter_rows(rows)
    raise SpaceError(f"unknown style {style!r}")
