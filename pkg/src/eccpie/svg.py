"""Standalone SVG rendering of eccentric pie charts.

Math coordinates are used with the y axis flipped, so a counterclockwise arc
in the plane is drawn with SVG sweep-flag 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

from .charts import ChartLayout
from .geometry import TWO_PI, Orientation, ray_extent

PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
)
CELL = 2.2


@dataclass(frozen=True)
class SvgOptions:
    labels: bool = True
    show_apex: bool = True
    stroke: str = "#222222"
    stroke_width: float = 0.01
    size_px: int = 400
    title: str | None = None


def _n(v: float) -> str:
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


def sector_path(layout: ChartLayout, i: int, dx: float = 0.0, dy: float = 0.0) -> str:
    """``M apex L A A 1 1 0 large sweep B Z`` for sector ``i``."""
    apex = layout.apex
    pts = layout.boundary_points
    a, b = pts[i], pts[(i + 1) % len(pts)]
    sec = layout.sector(i)
    ta, tb = math.atan2(a.y, a.x), math.atan2(b.y, b.x)
    if layout.orientation is Orientation.COUNTERCLOCKWISE:
        arc = (tb - ta) % TWO_PI
        sweep = 0
    else:
        arc = (ta - tb) % TWO_PI
        sweep = 1
    if arc == 0.0 and sec.sweep > math.pi:
        arc = TWO_PI
    large = 1 if arc > math.pi else 0

    def xy(p):
        return f"{_n(p[0] + dx)} {_n(-p[1] + dy)}"

    return f"M {xy(apex)} L {xy(a)} A 1 1 0 {large} {sweep} {xy(b)} Z"


def _chart_elements(layout: ChartLayout, opts: SvgOptions, dx: float, dy: float) -> list[str]:
    out = [f'<g class="chart">']
    n = len(layout.boundary_points)
    if n == 1:
        out.append(f'<circle cx="{_n(dx)}" cy="{_n(dy)}" r="1" fill="{PALETTE[0]}" '
                   f'stroke="{opts.stroke}" stroke-width="{_n(opts.stroke_width)}"/>')
        p = layout.boundary_points[0]
        out.append(f'<line x1="{_n(layout.apex.x + dx)}" y1="{_n(-layout.apex.y + dy)}" '
                   f'x2="{_n(p.x + dx)}" y2="{_n(-p.y + dy)}" stroke="{opts.stroke}" '
                   f'stroke-width="{_n(opts.stroke_width)}"/>')
    else:
        for i in range(n):
            out.append(f'<path class="sector" d="{sector_path(layout, i, dx, dy)}" '
                       f'fill="{PALETTE[i % len(PALETTE)]}" stroke="{opts.stroke}" '
                       f'stroke-width="{_n(opts.stroke_width)}" stroke-linejoin="round"/>')
    if opts.labels:
        shares = layout.shares
        for i in range(n):
            sec = layout.sector(i)
            mid = sec.phi_start + sec.orientation.sign * sec.sweep / 2
            r = 0.6 * ray_extent(layout.apex, mid)
            x = layout.apex.x + r * math.cos(mid) + dx
            y = -(layout.apex.y + r * math.sin(mid)) + dy
            out.append(f'<text x="{_n(x)}" y="{_n(y)}" font-size="0.12" text-anchor="middle" '
                       f'dominant-baseline="middle" font-family="sans-serif">{100 * shares[i]:.0f}%</text>')
    if opts.show_apex:
        out.append(f'<circle class="apex" cx="{_n(layout.apex.x + dx)}" cy="{_n(-layout.apex.y + dy)}" '
                   f'r="0.03" fill="{opts.stroke}"/>')
    out.append("</g>")
    return out


def render_svg(layouts: ChartLayout | Sequence[ChartLayout] | Sequence[Sequence[ChartLayout]],
               options: SvgOptions | None = None) -> str:
    """One chart, a row of charts, or a grid (list of rows) as an SVG 1.1 document."""
    opts = options or SvgOptions()
    if isinstance(layouts, ChartLayout):
        grid = [[layouts]]
    elif layouts and isinstance(layouts[0], ChartLayout):
        grid = [list(layouts)]
    else:
        grid = [list(row) for row in layouts]
    rows, cols = len(grid), max(len(r) for r in grid)
    w, h = cols * CELL, rows * CELL
    body = []
    if opts.title:
        body.append(f"<title>{escape(opts.title)}</title>")
    for r, row in enumerate(grid):
        for c, layout in enumerate(row):
            body.extend(_chart_elements(layout, opts, c * CELL, r * CELL))
    head = (
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{opts.size_px * cols}" height="{opts.size_px * rows}" '
        f'viewBox="{_n(-CELL / 2)} {_n(-CELL / 2)} {_n(w)} {_n(h)}">'
    )
    return "\n".join([head, *body, "</svg>"]) + "\n"
