"""Coordinatewise interior homeomorphism.

For pseudo-interior anchors p, q the coordinate map is the unique two-piece
increasing linear map [-1,1] -> [-1,1] fixing -1 and 1 and sending p_i to q_i.
Applied in every coordinate it moves p to q exactly while fixing the whole
pseudo-boundary, and its inverse is the same construction with anchors
swapped.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cube import PointRep, Rational
from .errors import AnchorOnBoundary, OutOfRange


def _require_interior(p: PointRep, name: str) -> None:
    for k, c in enumerate(p.prefix):
        if abs(c) >= 1:
            raise AnchorOnBoundary(f"{name} coordinate {k + 1} = {c} is not interior")
    if abs(p.tail) >= 1:
        raise AnchorOnBoundary(f"{name} tail = {p.tail} is not interior")


@dataclass(frozen=True)
class InteriorMapParams:
    source: PointRep
    target: PointRep

    def __post_init__(self):
        _require_interior(self.source, "source")
        _require_interior(self.target, "target")

    @property
    def anchor_count(self) -> int:
        return max(len(self.source.prefix), len(self.target.prefix))


def interior_coord_map(p_i: Rational, q_i: Rational, t: Rational) -> Fraction:
    """Value at t of the two-piece map with knee (p_i, q_i)."""
    p_i, q_i, t = Fraction(p_i), Fraction(q_i), Fraction(t)
    if not (abs(p_i) < 1 and abs(q_i) < 1):
        raise AnchorOnBoundary(f"anchors ({p_i}, {q_i}) must be interior")
    if not (-1 <= t <= 1):
        raise OutOfRange(f"t = {t} outside [-1, 1]")
    if t <= p_i:
        return (t + 1) * (q_i + 1) / (p_i + 1) - 1
    return (t - p_i) * (1 - q_i) / (1 - p_i) + q_i


def coord_slopes(p_i: Rational, q_i: Rational) -> tuple[Fraction, Fraction]:
    """The two linear slopes of the coordinate map, (left, right)."""
    p_i, q_i = Fraction(p_i), Fraction(q_i)
    return (q_i + 1) / (p_i + 1), (1 - q_i) / (1 - p_i)


def interior_map_eval(params: InteriorMapParams, x: PointRep) -> PointRep:
    n = max(params.anchor_count, len(x.prefix))
    cells = tuple(
        interior_coord_map(params.source.coord(i), params.target.coord(i), x.coord(i))
        for i in range(1, n + 1)
    )
    tail = interior_coord_map(params.source.tail, params.target.tail, x.tail)
    return PointRep(cells, tail)


def interior_map_inverse(params: InteriorMapParams) -> InteriorMapParams:
    return InteriorMapParams(params.target, params.source)


def lipschitz_bound(params: InteriorMapParams) -> Fraction:
    """Exact bound on d(f(x), f(y)) / d(x, y): the largest coordinate slope.

    Each coordinate map is piecewise linear with the two slopes from
    coord_slopes, so |f_i(s) - f_i(t)| <= L_i |s - t| with L_i their max;
    the weighted sum then scales by max_i L_i at worst.
    """
    worst = Fraction(1)
    for i in range(1, params.anchor_count + 1):
        left, right = coord_slopes(params.source.coord(i), params.target.coord(i))
        worst = max(worst, left, right)
    left, right = coord_slopes(params.source.tail, params.target.tail)
    return max(worst, left, right)
