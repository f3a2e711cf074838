"""Piecewise-linear boundary twists on a two-coordinate cell.

Two families act on the square [-1,1]^2 sitting in coordinates (n, m), m > n:

* the unit twist (kind "first-attempt"): an unscaled counterclockwise shear
  of the boundary used by the demo of a construction whose limit collapses;
* the scaled twists (kinds "ccw"/"cw" and their cubed iterates): twists whose
  displacement in the weighted metric is bounded by epsilon(m), clockwise
  being the exact piecewise inverse of counterclockwise.

Every clause is evaluated in its printed table order, first match wins.  The
"verbatim" variant keeps two mirrored sign defects in the sheared clauses
(ccw Type III and cw Type I'), under which the map leaves the square; the
"corrected" variant flips both signs, which restores range containment,
piece-boundary agreement, and exact invertibility.  The diagnostics engine
can demonstrate each of those failures on a rational grid.

The printed shear fraction (sigma*(1-b) - x) / (a*(x-sigma) + sigma) is
identically equal to -b, so no clause actually divides: evaluation never
grows denominators beyond the input's.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .cube import PointRep, Rational, cell_metric, epsilon, metric_d
from .errors import (
    BadIndices,
    DegeneratePair,
    EmptySampleSet,
    MultiplePreimages,
    NoPreimage,
    OutOfRange,
    RangeViolation,
    Unclassifiable,
)

ZERO = Fraction(0)
ONE = Fraction(1)


class MapKind(str, Enum):
    FIRST_ATTEMPT = "first-attempt"
    TWIST_CCW = "ccw"
    TWIST_CW = "cw"
    TWIST_CCW_CUBED = "ccw-cubed"
    TWIST_CW_CUBED = "cw-cubed"


class Variant(str, Enum):
    VERBATIM = "verbatim"
    CORRECTED = "corrected"


_SINGLE_OF = {
    MapKind.TWIST_CCW_CUBED: MapKind.TWIST_CCW,
    MapKind.TWIST_CW_CUBED: MapKind.TWIST_CW,
}


@dataclass(frozen=True)
class CellMap:
    """A twist acting on the (n, m)-coordinate cell, m > n >= 1.

    The first-attempt kind ignores the variant (it has no defective clause).
    """

    kind: MapKind
    variant: Variant
    n: int
    m: int

    def __post_init__(self):
        if not (isinstance(self.n, int) and isinstance(self.m, int)):
            raise BadIndices("cell indices must be integers")
        if not (1 <= self.n < self.m):
            raise BadIndices(f"need m > n >= 1, got n={self.n}, m={self.m}")

    @property
    def is_cubed(self) -> bool:
        return self.kind in _SINGLE_OF

    def single(self) -> "CellMap":
        """The once-applied map underlying a cubed kind (self if single)."""
        if self.is_cubed:
            return CellMap(_SINGLE_OF[self.kind], self.variant, self.n, self.m)
        return self

    def inverse_kind(self) -> "CellMap":
        pairs = {
            MapKind.TWIST_CCW: MapKind.TWIST_CW,
            MapKind.TWIST_CW: MapKind.TWIST_CCW,
            MapKind.TWIST_CCW_CUBED: MapKind.TWIST_CW_CUBED,
            MapKind.TWIST_CW_CUBED: MapKind.TWIST_CCW_CUBED,
        }
        if self.kind not in pairs:
            raise BadIndices(f"{self.kind.value} has no paired inverse kind")
        return CellMap(pairs[self.kind], self.variant, self.n, self.m)

    def label(self) -> str:
        return f"{self.kind.value} n={self.n} m={self.m} {self.variant.value}"


def sigma(x: Rational) -> int:
    """Sign convention used by the scaled twists: sigma(0) = +1."""
    return 1 if x >= 0 else -1


@lru_cache(maxsize=None)
def _cell_params(n: int, m: int) -> tuple[Fraction, Fraction, Fraction]:
    """(a, b, 1-b) with a = epsilon(n)/epsilon(m) = 2^(m-n), b = 1/a."""
    a = Fraction(2 ** (m - n))
    b = Fraction(1, 2 ** (m - n))
    return a, b, 1 - b


def _shear_term(x: Fraction, y: Fraction, s: int, a: Fraction, b: Fraction, sign: int) -> Fraction:
    # Numerator is -b times the denominator identically, so the quotient is
    # -b wherever defined; the region admits the denominator's zero
    # (x == sigma*(1-b)) only with y == 0, where the whole term vanishes.
    if y == 0:
        return ZERO
    den = a * (x - s) + s
    return sign * y * (s * (1 - b) - x) / den


def _check_square(x: Fraction, y: Fraction) -> None:
    if not (-1 <= x <= 1 and -1 <= y <= 1):
        raise OutOfRange(f"({x}, {y}) outside the square")


# clause tables: tag -> (condition, formula), kept in printed order

def _ccw_clauses(x: Fraction, y: Fraction, a: Fraction, b: Fraction, one_minus_b: Fraction, corrected: bool):
    s = sigma(x)
    ax, ay = abs(x), abs(y)
    strip = one_minus_b <= ax <= 1
    line = a * (ax - 1) + 1
    shear_sign = 1 if corrected else -1
    return (
        ("I", x * y <= 0 and strip and line <= ay <= 1,
         lambda: (s - b * (y + s), y + s + a * (x - s))),
        ("II", x * y <= 0 and strip and 0 <= ay <= line,
         lambda: (x, y + s + a * (x - s))),
        ("III", x * y >= 0 and strip and 0 <= ay <= line,
         lambda: (x + _shear_term(x, y, s, a, b, shear_sign), s + a * (x - s))),
        ("IV", (x * y >= 0 and strip and line <= ay <= 1) or ax <= one_minus_b,
         lambda: (x - b * y, y)),
    )


def _cw_clauses(x: Fraction, y: Fraction, a: Fraction, b: Fraction, one_minus_b: Fraction, corrected: bool):
    s = sigma(x)
    ax, ay = abs(x), abs(y)
    strip = one_minus_b <= ax <= 1
    line = a * (ax - 1) + 1
    shear_sign = -1 if corrected else 1
    return (
        ("I'", x * y <= 0 and strip and 0 <= ay <= line,
         lambda: (x + _shear_term(x, y, s, a, b, shear_sign), -s - a * (x - s))),
        ("II'", x * y >= 0 and strip and 0 <= ay <= line,
         lambda: (x, y - s - a * (x - s))),
        ("III'", x * y >= 0 and strip and line <= ay <= 1,
         lambda: (s - b * (-y + s), y - s - a * (x - s))),
        ("IV'", (x * y <= 0 and strip and line <= ay <= 1) or ax <= one_minus_b,
         lambda: (x + b * y, y)),
    )


def _unit_clauses(x: Fraction, y: Fraction):
    ax, ay = abs(x), abs(y)
    return (
        ("A1", ax <= ay and x * y < 0, lambda: (-y, x + y)),
        ("A2", ax >= ay and x * y < 0, lambda: (x, x + y)),
        ("A3", ax >= ay and x * y >= 0, lambda: (x - y, x)),
        ("A4", ax <= ay and x * y >= 0, lambda: (x - y, y)),
    )


def _clauses(cm: CellMap, x: Fraction, y: Fraction):
    kind = cm.single().kind
    if kind == MapKind.FIRST_ATTEMPT:
        return _unit_clauses(x, y)
    a, b, one_minus_b = _cell_params(cm.n, cm.m)
    corrected = cm.variant == Variant.CORRECTED
    if kind == MapKind.TWIST_CCW:
        return _ccw_clauses(x, y, a, b, one_minus_b, corrected)
    return _cw_clauses(x, y, a, b, one_minus_b, corrected)


def classify_region(cm: CellMap, x: Rational, y: Rational) -> str:
    """First matching clause tag in printed order.

    Cubed kinds classify by their single application.
    """
    x, y = Fraction(x), Fraction(y)
    _check_square(x, y)
    for tag, cond, _ in _clauses(cm, x, y):
        if cond:
            return tag
    raise Unclassifiable(f"no clause matched ({x}, {y}) for {cm.label()}")


def matching_regions(cm: CellMap, x: Rational, y: Rational) -> list[str]:
    """Every clause whose condition holds (clause boundaries give several)."""
    x, y = Fraction(x), Fraction(y)
    _check_square(x, y)
    return [tag for tag, cond, _ in _clauses(cm, x, y) if cond]


def _apply_once(cm: CellMap, x: Fraction, y: Fraction) -> tuple[str, tuple[Fraction, Fraction]]:
    for tag, cond, formula in _clauses(cm, x, y):
        if cond:
            return tag, formula()
    raise Unclassifiable(f"no clause matched ({x}, {y}) for {cm.label()}")


def piece_value(cm: CellMap, tag: str, x: Rational, y: Rational) -> tuple[Fraction, Fraction]:
    """Evaluate one named clause formula regardless of where (x, y) lies."""
    x, y = Fraction(x), Fraction(y)
    for t, _, formula in _clauses(cm, x, y):
        if t == tag:
            return formula()
    raise BadIndices(f"unknown clause {tag!r} for {cm.label()}")


def twist_eval(cm: CellMap, x: Rational, y: Rational) -> tuple[Fraction, Fraction]:
    """Image of (x, y); cubed kinds apply their single map three times.

    Raises RangeViolation if any application leaves the square (possible only
    for the verbatim variant).
    """
    x, y = Fraction(x), Fraction(y)
    _check_square(x, y)
    single = cm.single()
    for _ in range(3 if cm.is_cubed else 1):
        _, (x, y) = _apply_once(single, x, y)
        if not (-1 <= x <= 1 and -1 <= y <= 1):
            raise RangeViolation(
                f"{cm.label()} left the square at ({x}, {y})", value=(x, y)
            )
    return x, y


def twist_eval_unchecked(cm: CellMap, x: Rational, y: Rational) -> tuple[Fraction, Fraction]:
    """Like twist_eval but lets out-of-square values pass through, so the
    diagnostics engine can report them instead of dying on them."""
    x, y = Fraction(x), Fraction(y)
    single = cm.single()
    for _ in range(3 if cm.is_cubed else 1):
        _, (x, y) = _apply_once(single, x, y)
    return x, y


def twist_cell_apply(cm: CellMap, p: PointRep) -> PointRep:
    """Apply the twist to coordinates (n, m) of a full point."""
    u, v = twist_eval(cm, p.coord(cm.n), p.coord(cm.m))
    return p.with_coord(cm.n, u).with_coord(cm.m, v)


def displacement_bound(cm: CellMap) -> Fraction:
    """Exact d-displacement bound: how far the twist can move any point."""
    if cm.single().kind == MapKind.FIRST_ATTEMPT:
        return 2 * epsilon(cm.n) + 2 * epsilon(cm.m)
    return (3 if cm.is_cubed else 1) * epsilon(cm.m)


# --- exact clause inversion -------------------------------------------------

def _invert_candidates(cm: CellMap, u: Fraction, v: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Solve every clause formula for its input, all sign branches.

    Each clause is affine in (x, y) once sigma is fixed (the second output
    coordinate pins x, then the first is linear in y), so inversion is exact.
    Candidates are not yet filtered against the clause conditions.
    """
    kind = cm.single().kind
    out: list[tuple[Fraction, Fraction]] = []
    if kind == MapKind.FIRST_ATTEMPT:
        out.append((v + u, -u))        # A1: u=-y, v=x+y
        out.append((u, v - u))         # A2: u=x, v=x+y
        out.append((v, v - u))         # A3: u=x-y, v=x
        out.append((u + v, v))         # A4: u=x-y, v=y
        return out
    a, b, _ = _cell_params(cm.n, cm.m)
    corrected = cm.variant == Variant.CORRECTED
    if kind == MapKind.TWIST_CCW:
        for s in (1, -1):
            # I: u = s - b(y+s), v = y + s + a(x-s)
            y = a * (s - u) - s
            x = s + b * (v - y - s)
            out.append((x, y))
            # II: u = x, v = y + s + a(x-s)
            out.append((u, v - s - a * (u - s)))
            # III: v = s + a(x-s) pins x; shear is -+ b*y on top of x
            x = s + b * (v - s)
            y = a * (x - u) if corrected else a * (u - x)
            out.append((x, y))
        # IV: u = x - b*y, v = y
        out.append((u + b * v, v))
        return out
    for s in (1, -1):
        # I': v = -s - a(x-s) pins x; shear is +- b*y on top of x
        x = s + b * (-v - s)
        y = a * (u - x) if corrected else a * (x - u)
        out.append((x, y))
        # II': u = x, v = y - s - a(x-s)
        out.append((u, v + s + a * (u - s)))
        # III': u = s - b(-y+s), v = y - s - a(x-s)
        y = s + a * (u - s)
        x = s + b * (y - s - v)
        out.append((x, y))
    # IV': u = x + b*y, v = y
    out.append((u - b * v, v))
    return out


def piece_inverse_oracle(cm: CellMap, u: Rational, v: Rational) -> tuple[Fraction, Fraction]:
    """The unique (x, y) in the square with twist_eval(cm, x, y) == (u, v).

    Works clause by clause: invert every formula exactly, keep solutions that
    land in the square and actually map to (u, v) under printed-order
    evaluation.  Independent of any closed-form inverse map, so it can sit in
    judgment over one.  Raises NoPreimage / MultiplePreimages when the map
    fails to be a bijection onto the square at this value (verbatim defect).
    """
    if cm.is_cubed:
        raise BadIndices("oracle inverts single applications only")
    u, v = Fraction(u), Fraction(v)
    found: list[tuple[Fraction, Fraction]] = []
    for x, y in _invert_candidates(cm, u, v):
        if not (-1 <= x <= 1 and -1 <= y <= 1):
            continue
        if (x, y) in found:
            continue
        if twist_eval_unchecked(cm, x, y) == (u, v):
            found.append((x, y))
    if not found:
        raise NoPreimage(f"{cm.label()} has no preimage of ({u}, {v})")
    if len(found) > 1:
        raise MultiplePreimages(
            f"{cm.label()} has {len(found)} preimages of ({u}, {v}): {found}"
        )
    return found[0]


def lipschitz_sample_check(cm: CellMap, pairs: Iterable[tuple[PointRep, PointRep]]) -> Fraction:
    """Largest observed d-distance expansion ratio over the sampled pairs."""
    worst = None
    for p, q in pairs:
        base = metric_d(p, q)
        if base == 0:
            raise DegeneratePair(f"zero-distance pair {p} = {q}")
        ratio = metric_d(twist_cell_apply(cm, p), twist_cell_apply(cm, q)) / base
        if worst is None or ratio > worst:
            worst = ratio
    if worst is None:
        raise EmptySampleSet("lipschitz_sample_check needs at least one pair")
    return worst


# --- diagnostics ------------------------------------------------------------

@dataclass(frozen=True)
class Finding:
    check: str
    map_label: str
    witness: tuple[Fraction, Fraction]
    expected: str
    observed: str


@dataclass(frozen=True)
class ErrataReport:
    variant: Variant
    n: int
    m: int
    grid_step: Fraction
    points_checked: int
    findings: tuple[Finding, ...]

    @property
    def ok(self) -> bool:
        return not self.findings

    def counts_by_check(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for f in self.findings:
            out[f.check] = out.get(f.check, 0) + 1
        return dict(sorted(out.items()))

    def to_records(self) -> list[dict]:
        """Canonically ordered plain records (sorted, rationals as strings)."""
        ordered = sorted(
            self.findings,
            key=lambda f: (f.check, f.map_label, f.witness[0], f.witness[1]),
        )
        return [
            {
                "check": f.check,
                "map": f.map_label,
                "witness": [str(f.witness[0]), str(f.witness[1])],
                "expected": f.expected,
                "observed": f.observed,
            }
            for f in ordered
        ]


def _grid_values(step: Fraction) -> list[Fraction]:
    count = int(1 / step)
    return [k * step for k in range(-count, count + 1)]


def _fmt_pair(p: tuple[Fraction, Fraction]) -> str:
    return f"({p[0]}, {p[1]})"


def twist_diagnostics(variant: Variant, n: int, m: int, grid_step: Rational) -> ErrataReport:
    """Reconcile the scaled twist pair against its stated properties on the
    full rational grid of the square with the given step.

    Checks, every failure recorded as a finding:
      range-containment   images stay in the square (both directions)
      piece-agreement     overlapping clauses give equal values
      inverse-roundtrip   cw(ccw(x, y)) == (x, y)
      oracle-roundtrip    clause inversion of the ccw image returns (x, y)
      center-fixity       the segment y = 0, |x| <= 1 - eps(m)/eps(n) is fixed
      displacement        cell displacement <= displacement_bound (cubed maps
                          checked on a stride-4 subgrid)
    """
    grid_step = Fraction(grid_step)
    if grid_step <= 0 or grid_step > Fraction(1, 16) or grid_step.numerator != 1 \
            or grid_step.denominator & (grid_step.denominator - 1):
        raise BadIndices(f"grid step must be 1/2^k, k >= 4, got {grid_step}")
    ccw = CellMap(MapKind.TWIST_CCW, variant, n, m)
    cw = CellMap(MapKind.TWIST_CW, variant, n, m)
    ccw3 = CellMap(MapKind.TWIST_CCW_CUBED, variant, n, m)
    cw3 = CellMap(MapKind.TWIST_CW_CUBED, variant, n, m)
    _, b, one_minus_b = _cell_params(n, m)
    eps_m = epsilon(m)
    findings: list[Finding] = []
    grid = _grid_values(grid_step)
    stride = [g for i, g in enumerate(grid) if i % 4 == 0]

    def note(check, label, witness, expected, observed):
        findings.append(Finding(check, label, witness, expected, observed))

    for x in grid:
        for y in grid:
            w = (x, y)
            images = {}
            for cm in (ccw, cw):
                tag, img = _apply_once(cm, x, y)
                images[cm.kind] = img
                if not (-1 <= img[0] <= 1 and -1 <= img[1] <= 1):
                    note("range-containment", cm.label(), w,
                         "image inside the square", f"{tag} -> {_fmt_pair(img)}")
                tags = matching_regions(cm, x, y)
                if len(tags) > 1:
                    vals = [piece_value(cm, t, x, y) for t in tags]
                    if any(val != vals[0] for val in vals[1:]):
                        note("piece-agreement", cm.label(), w,
                             f"clauses {tags} agree",
                             "; ".join(f"{t}: {_fmt_pair(val)}" for t, val in zip(tags, vals)))
                disp = cell_metric(n, m, w, img)
                if disp > eps_m:
                    note("displacement", cm.label(), w,
                         f"cell displacement <= {eps_m}", str(disp))
            fwd = images[MapKind.TWIST_CCW]
            if -1 <= fwd[0] <= 1 and -1 <= fwd[1] <= 1:
                back = twist_eval_unchecked(cw, *fwd)
                if back != w:
                    note("inverse-roundtrip", cw.label(), w,
                         f"cw(ccw{_fmt_pair(w)}) == {_fmt_pair(w)}",
                         f"{_fmt_pair(fwd)} -> {_fmt_pair(back)}")
                try:
                    pre = piece_inverse_oracle(ccw, *fwd)
                    if pre != w:
                        note("oracle-roundtrip", ccw.label(), w,
                             f"unique preimage {_fmt_pair(w)}", _fmt_pair(pre))
                except NoPreimage:
                    note("oracle-roundtrip", ccw.label(), w,
                         f"unique preimage of {_fmt_pair(fwd)}", "no preimage")
                except MultiplePreimages as exc:
                    note("oracle-roundtrip", ccw.label(), w,
                         f"unique preimage of {_fmt_pair(fwd)}", str(exc))
            else:
                note("inverse-roundtrip", cw.label(), w,
                     "forward image inside the square", _fmt_pair(fwd))
        if abs(x) <= one_minus_b:
            for cm in (ccw, cw):
                img = twist_eval_unchecked(cm, x, ZERO)
                if img != (x, ZERO):
                    note("center-fixity", cm.label(), (x, ZERO),
                         f"({x}, 0) fixed", _fmt_pair(img))

    for x in stride:
        for y in stride:
            for cm in (ccw3, cw3):
                try:
                    img = twist_eval_unchecked(cm, x, y)
                except Unclassifiable as exc:
                    # an earlier application already left the square, so the
                    # orbit has no defined continuation to measure
                    note("displacement", cm.label(), (x, y),
                         f"cell displacement <= {3 * eps_m}", str(exc))
                    continue
                disp = cell_metric(n, m, (x, y), img)
                if disp > 3 * eps_m:
                    note("displacement", cm.label(), (x, y),
                         f"cell displacement <= {3 * eps_m}", str(disp))

    return ErrataReport(
        variant=variant,
        n=n,
        m=m,
        grid_step=grid_step,
        points_checked=len(grid) ** 2,
        findings=tuple(findings),
    )
