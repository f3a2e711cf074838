"""Points of the cube and the exact weighted metric.

A point of the infinite-dimensional cube (coordinates indexed from 1, each in
[-1, 1]) is stored as a finite rational prefix plus a constant rational tail.
That class of points is closed under every map in this package, and the metric

    d(p, q) = sum_{i >= 1} |p_i - q_i| * 2^(-i)

is computable exactly: past the longer prefix both points are constant, so the
remainder is a geometric series with value |tail_p - tail_q| * 2^(-N).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import BadIndices, EmptySampleSet, OutOfRange

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def epsilon(j: int) -> Fraction:
    """Weight of coordinate j: 2^(-j). The segment [-1,1] in coordinate j
    has d-length exactly 2 * epsilon(j)."""
    if j < 1:
        raise BadIndices(f"coordinate index must be >= 1, got {j}")
    return Fraction(1, 2**j)


@dataclass(frozen=True)
class CoordinateWeight:
    j: int
    epsilon_j: Fraction

    @classmethod
    def of(cls, j: int) -> "CoordinateWeight":
        return cls(j, epsilon(j))


def _check_unit(value: Fraction, what: str) -> Fraction:
    if not (-1 <= value <= 1):
        raise OutOfRange(f"{what} = {value} outside [-1, 1]")
    return value


@dataclass(frozen=True)
class PointRep:
    """Finite prefix + constant tail representation of a cube point.

    Normalized on construction: trailing prefix entries equal to the tail are
    absorbed, so structural equality is coordinatewise equality.
    """

    prefix: tuple[Fraction, ...]
    tail: Fraction

    def __post_init__(self):
        tail = Fraction(self.tail)
        _check_unit(tail, "tail")
        prefix = tuple(Fraction(c) for c in self.prefix)
        for k, c in enumerate(prefix):
            _check_unit(c, f"coordinate {k + 1}")
        while prefix and prefix[-1] == tail:
            prefix = prefix[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "tail", tail)

    def coord(self, i: int) -> Fraction:
        if i < 1:
            raise BadIndices(f"coordinate index must be >= 1, got {i}")
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        return self.tail

    def with_coord(self, i: int, value: Fraction) -> "PointRep":
        """Copy with coordinate i replaced (prefix widened as needed)."""
        if i < 1:
            raise BadIndices(f"coordinate index must be >= 1, got {i}")
        n = max(i, len(self.prefix))
        cells = [self.coord(k) for k in range(1, n + 1)]
        cells[i - 1] = Fraction(value)
        return PointRep(tuple(cells), self.tail)

    def __repr__(self):
        pre = ", ".join(str(c) for c in self.prefix)
        return f"PointRep([{pre}], tail={self.tail})"


def make_point(prefix: Sequence[Fraction | int | str], tail: Fraction | int | str) -> PointRep:
    return PointRep(tuple(Fraction(c) for c in prefix), Fraction(tail))


ORIGIN = make_point([], 0)


def coord(p: PointRep, i: int) -> Fraction:
    return p.coord(i)


def metric_d(p: PointRep, q: PointRep) -> Fraction:
    n = max(len(p.prefix), len(q.prefix))
    total = ZERO
    w = Fraction(1, 2)
    for i in range(1, n + 1):
        total += abs(p.coord(i) - q.coord(i)) * w
        w /= 2
    # remaining coordinates are the constant tails; sum_{i>n} 2^-i = 2^-n
    total += abs(p.tail - q.tail) * Fraction(1, 2**n)
    return total


def cell_metric(n: int, m: int, a: tuple[Fraction, Fraction], b: tuple[Fraction, Fraction]) -> Fraction:
    """Distance contribution of the (n, m)-coordinate cell:
    epsilon(n)*|dx| + epsilon(m)*|dy|. Requires m > n >= 1.

    Two points that differ only in coordinates n and m are at exactly this
    d-distance, which is what makes per-cell displacement arguments exact.
    """
    if not (isinstance(n, int) and isinstance(m, int)) or not (1 <= n < m):
        raise BadIndices(f"need m > n >= 1, got n={n}, m={m}")
    return epsilon(n) * abs(a[0] - b[0]) + epsilon(m) * abs(a[1] - b[1])


@dataclass(frozen=True)
class BoundaryProfile:
    """Where a point meets the pseudo-boundary.

    explicit_indices: prefix positions j with |p_j| = 1.
    tail_is_boundary: whether the constant tail is +-1 (then every index from
    tail_start on is a boundary coordinate).
    """

    explicit_indices: tuple[int, ...]
    tail_is_boundary: bool
    tail_start: int

    @property
    def is_pseudo_interior(self) -> bool:
        return not self.explicit_indices and not self.tail_is_boundary

    @property
    def is_boundary(self) -> bool:
        return not self.is_pseudo_interior


def classify_point(p: PointRep) -> BoundaryProfile:
    explicit = tuple(i + 1 for i, c in enumerate(p.prefix) if abs(c) == 1)
    return BoundaryProfile(
        explicit_indices=explicit,
        tail_is_boundary=abs(p.tail) == 1,
        tail_start=len(p.prefix) + 1,
    )


PointMap = Callable[[PointRep], PointRep]


def rho_sampled(a: PointMap, b: PointMap, samples: Iterable[PointRep]) -> Fraction:
    """Largest observed pointwise distance between two maps.

    A sampled lower bound for the uniform distance; exact on the samples.
    """
    best = None
    for s in samples:
        dist = metric_d(a(s), b(s))
        if best is None or dist > best:
            best = dist
    if best is None:
        raise EmptySampleSet("rho_sampled needs at least one sample")
    return best


def zeta_sampled(
    a: PointMap,
    a_inv: PointMap,
    b: PointMap,
    b_inv: PointMap,
    samples: Iterable[PointRep],
) -> Fraction:
    """Sampled two-sided gap: rho(a, b) + rho(a_inv, b_inv)."""
    samples = list(samples)
    return rho_sampled(a, b, samples) + rho_sampled(a_inv, b_inv, samples)
