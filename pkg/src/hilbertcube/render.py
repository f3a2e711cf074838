"""Deterministic SVG pictures of the two-coordinate twist maps.

The unit square of the chosen cell is subdivided into a G x G grid; each cell
is painted by the region its center lies in, then the images of the G+1
horizontal and G+1 vertical grid lines are drawn as polylines (exactly
2(G+1) of them).  An optional trajectory overlays the forward orbit of one
point's (n, m) pair as a path with dot markers.  All geometry is computed in
exact rationals and formatted to fixed-point decimals, so rendering the same
spec twice yields byte-identical output.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cube import PointRep
from .errors import OutOfRange
from .twists import CellMap, classify_region, twist_eval_unchecked

# canvas: domain [-1,1]^2 -> 560x560 viewport with a margin
_SCALE = 240
_CENTER = 280

_REGION_FILL = {
    "I": "#cfe3f7", "II": "#fbe3c9", "III": "#d6efd0", "IV": "#f2dcee",
    "I'": "#cfe3f7", "II'": "#fbe3c9", "III'": "#d6efd0", "IV'": "#f2dcee",
    "A1": "#cfe3f7", "A2": "#fbe3c9", "A3": "#d6efd0", "A4": "#f2dcee",
}


@dataclass(frozen=True)
class RenderSpec:
    cell: CellMap
    grid: int
    trace: PointRep | None = None
    trace_stages: int = 0

    def __post_init__(self):
        g = self.grid
        if g < 8 or g & (g - 1):
            raise OutOfRange(f"grid density must be a power of two >= 8, got {g}")
        if self.trace_stages < 0:
            raise OutOfRange(f"stage count must be >= 0, got {self.trace_stages}")


def _dec(value: Fraction) -> str:
    """Fixed 4-place decimal of an exact rational, round half up."""
    scaled = value * 10_000
    units = (scaled.numerator * 2 + scaled.denominator) // (scaled.denominator * 2)
    sign = "-" if units < 0 else ""
    units = abs(units)
    return f"{sign}{units // 10_000}.{units % 10_000:04d}"


def _px(x: Fraction, y: Fraction) -> str:
    return f"{_dec(_CENTER + _SCALE * x)},{_dec(_CENTER - _SCALE * y)}"


def _nodes(grid: int) -> list[Fraction]:
    return [Fraction(2 * i, grid) - 1 for i in range(grid + 1)]


def render_svg(spec: RenderSpec) -> str:
    cm = spec.cell
    ticks = _nodes(spec.grid)
    image = {}
    for x in ticks:
        for y in ticks:
            image[(x, y)] = twist_eval_unchecked(cm, x, y)

    out = []
    out.append(
        '<svg xmlns="http://www.w3.org/2000/svg" width="560" height="560" '
        'viewBox="0 0 560 560">'
    )
    out.append(f"<title>{cm.label()} on grid {spec.grid}</title>")
    out.append('<rect width="560" height="560" fill="#ffffff"/>')

    half = Fraction(1, spec.grid)
    for i in range(spec.grid):
        for j in range(spec.grid):
            cx, cy = ticks[i] + half, ticks[j] + half
            fill = _REGION_FILL.get(classify_region(cm, cx, cy), "#e8e8e8")
            corners = [
                image[(ticks[i], ticks[j])],
                image[(ticks[i + 1], ticks[j])],
                image[(ticks[i + 1], ticks[j + 1])],
                image[(ticks[i], ticks[j + 1])],
            ]
            pts = " ".join(_px(u, v) for u, v in corners)
            out.append(f'<polygon points="{pts}" fill="{fill}" stroke="none"/>')

    for y in ticks:
        pts = " ".join(_px(*image[(x, y)]) for x in ticks)
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="#444444" stroke-width="1"/>'
        )
    for x in ticks:
        pts = " ".join(_px(*image[(x, y)]) for y in ticks)
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="#444444" stroke-width="1"/>'
        )

    if spec.trace is not None:
        x, y = spec.trace.coord(cm.n), spec.trace.coord(cm.m)
        orbit = [(x, y)]
        for _ in range(spec.trace_stages):
            x, y = twist_eval_unchecked(cm, x, y)
            orbit.append((x, y))
        d = "M " + " L ".join(_px(u, v) for u, v in orbit)
        out.append(f'<path d="{d}" fill="none" stroke="#c02020" stroke-width="2"/>')
        for u, v in orbit:
            cx, cy = _px(u, v).split(",")
            out.append(f'<circle cx="{cx}" cy="{cy}" r="3" fill="#c02020"/>')

    out.append("</svg>")
    return "\n".join(out) + "\n"
