"""Staged twist limits: schedules, partial evaluation, certified tails.

A boundary point is pushed off the pseudo-boundary by an infinite composition
of cubed counterclockwise twists, one per stage.  Stage k acts on the cell
(n_k, m_k): n_k is the smallest boundary index not yet handled (the twist
moves that coordinate strictly inside) and m_k is a fresh multiple of 4 whose
coordinate the twist sacrifices to the boundary, to be handled in its turn.
The geometric budget epsilon_k = 3 * 2^(-(k+3)) makes the forward composition
converge and keeps the two-sided gap summable, and m_k >= 4k realizes it.

Everything here is exact: tail bounds are closed-form geometric sums, partial
evaluations are rational, and certified values carry the bound actually used.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

from .cube import BoundaryProfile, PointRep, Rational, classify_point
from .errors import BadIndices, HorizonExceeded, OutOfRange
from .twists import CellMap, MapKind, Variant, twist_eval

ZERO = Fraction(0)


@dataclass(frozen=True)
class BoundaryIndexStream:
    """Ordered description of the indices where a point meets the boundary:
    an explicit head plus, when the tail is +-1, every index from tail_start
    on (an arithmetic stream with step 1)."""

    head: tuple[int, ...]
    tail_start: int | None

    @property
    def is_empty(self) -> bool:
        return not self.head and self.tail_start is None

    def first(self) -> int:
        if self.head:
            return self.head[0]
        if self.tail_start is None:
            raise BadIndices("empty index stream has no first element")
        return self.tail_start

    def contains(self, j: int) -> bool:
        return j in self.head or (self.tail_start is not None and j >= self.tail_start)

    def values_upto(self, bound: int) -> list[int]:
        vals = [j for j in self.head if j <= bound]
        if self.tail_start is not None and bound >= self.tail_start:
            vals.extend(range(self.tail_start, bound + 1))
        return vals


def boundary_index_sequence(p: PointRep) -> BoundaryIndexStream:
    profile = classify_point(p)
    return BoundaryIndexStream(
        head=profile.explicit_indices,
        tail_start=profile.tail_start if profile.tail_is_boundary else None,
    )


def _stream_of(profile: BoundaryProfile) -> BoundaryIndexStream:
    return BoundaryIndexStream(
        head=profile.explicit_indices,
        tail_start=profile.tail_start if profile.tail_is_boundary else None,
    )


def stage_budget(k: int) -> Fraction:
    """Two-sided gap allowance spent when stage k+1 is appended."""
    return Fraction(3, 2 ** (k + 3))


@dataclass(frozen=True)
class Schedule:
    """Materialized prefix of the (infinite) stage list for one source point.

    stages[k-1] = (n_k, m_k).  The underlying schedule is infinite whenever
    the source meets the boundary at all (every m_k re-enters the pool); it is
    empty only for a pseudo-interior source, in which case the limit map is
    the identity and all tail bounds vanish.
    """

    stages: tuple[tuple[int, int], ...]
    source_profile: BoundaryProfile
    budget: tuple[Fraction, ...]

    @property
    def count(self) -> int:
        return len(self.stages)

    @property
    def is_identity(self) -> bool:
        return self.source_profile.is_pseudo_interior

    def n_seq(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.stages)

    def m_seq(self) -> tuple[int, ...]:
        return tuple(m for _, m in self.stages)

    def stage_map(self, k: int, reverse: bool = False) -> CellMap:
        n, m = self.stages[k - 1]
        kind = MapKind.TWIST_CW_CUBED if reverse else MapKind.TWIST_CCW_CUBED
        return CellMap(kind, Variant.CORRECTED, n, m)


def build_schedule(p: PointRep, count: int) -> Schedule:
    """First `count` stages for source point p.

    n_1 is the first boundary index; afterwards n_k is the least index in the
    pool (unhandled boundary indices plus sacrificed m's), which is always
    <= m_{k-1}, and m_k is the least multiple of 4 exceeding both m_{k-1} and
    n_k and at least 4k.  A pseudo-interior p yields the empty schedule no
    matter the count.
    """
    if count < 0:
        raise BadIndices(f"stage count must be >= 0, got {count}")
    profile = classify_point(p)
    stream = _stream_of(profile)
    if stream.is_empty:
        return Schedule((), profile, ())
    pool: list[int] = []
    in_pool: set[int] = set()
    pulled_upto = 0

    def pull(bound: int) -> None:
        nonlocal pulled_upto
        if bound > pulled_upto:
            for j in stream.values_upto(bound):
                if j > pulled_upto and j not in in_pool:
                    heapq.heappush(pool, j)
                    in_pool.add(j)
            pulled_upto = bound

    stages: list[tuple[int, int]] = []
    m_prev = 0
    for k in range(1, count + 1):
        pull(stream.first() if k == 1 else m_prev)
        n = heapq.heappop(pool)
        in_pool.discard(n)
        m = max(m_prev + 4, 4 * k, 4 * (n // 4) + 4)
        stages.append((n, m))
        heapq.heappush(pool, m)
        in_pool.add(m)
        m_prev = m
    return Schedule(tuple(stages), profile, tuple(stage_budget(k) for k in range(1, count + 1)))


def schedule_budget_ok(s: Schedule) -> bool:
    """Check the stage list against the geometric budget.

    Stage k must satisfy m_k >= log2(3 / eps_{k-1}) + (3(k-1) + 1) with
    eps_{k-1} = stage_budget(k-1); the log is taken by exact power-of-two
    arithmetic.  Also checks: n and m strictly increasing, m_k > n_k, every
    m_k a multiple of 4, and the stored budget being the canonical one.
    """
    if len(s.budget) != s.count:
        return False
    prev_n, prev_m = 0, 0
    for k in range(1, s.count + 1):
        n, m = s.stages[k - 1]
        if s.budget[k - 1] != stage_budget(k):
            return False
        if n <= prev_n or m <= prev_m or m <= n or m % 4:
            return False
        ratio = 3 / stage_budget(k - 1)  # = 2^(k+2), exactly
        if ratio.denominator != 1:
            return False
        num = ratio.numerator
        if num & (num - 1):
            return False
        if m < num.bit_length() - 1 + 3 * (k - 1) + 1:
            return False
        prev_n, prev_m = n, m
    return True


def _require_stage_range(s: Schedule, i: int) -> None:
    if not (0 <= i <= s.count):
        raise HorizonExceeded(
            f"stage {i} requested but only {s.count} stages are materialized"
        )


def forward_tail_bound(s: Schedule, i: int) -> Fraction:
    """Bound on d(limit, stage-i partial): sum of displacements past stage i.

    Materialized stages contribute 3 * 2^(-m_k) exactly; stages past the
    materialized count contribute at most (1/5) * 2^(-m_count) since any
    valid continuation has m_k >= m_count + 4(k - count).
    """
    if s.is_identity:
        return ZERO
    _require_stage_range(s, i)
    total = sum((Fraction(3, 2 ** m) for _, m in s.stages[i:]), ZERO)
    m_last = s.stages[-1][1] if s.stages else 0
    return total + Fraction(1, 5) / 2 ** m_last


def reverse_tail_bound(s: Schedule, i: int) -> Fraction:
    """Like forward_tail_bound for the inverse composition, whose stage-k
    term is inflated by the accumulated Lipschitz factor 8^(k-1)."""
    if s.is_identity:
        return ZERO
    _require_stage_range(s, i)
    total = ZERO
    for k in range(i + 1, s.count + 1):
        total += 8 ** (k - 1) * Fraction(3, 2 ** s.stages[k - 1][1])
    m_last = s.stages[-1][1] if s.stages else 0
    return total + _beyond_reverse(s.count, m_last)


def _beyond_reverse(count: int, m_last: int) -> Fraction:
    # sum_{k>count} 8^(k-1) * 3 * 2^-(m_last + 4(k-count)) = 3 * 2^(3c-3-m_last)
    exp = 3 * count - 3 - m_last
    return 3 * (Fraction(2) ** exp)


def canonical_forward_bound(m1: int, i: int) -> Fraction:
    """forward_tail_bound for the full canonical continuation with first
    sacrificed index m1 (m_k = m1 + 4(k-1)): (16/5) * 2^-(m1 + 4i)."""
    return Fraction(16, 5) / 2 ** (m1 + 4 * i)


def canonical_reverse_bound(m1: int, i: int) -> Fraction:
    """reverse_tail_bound for the full canonical continuation:
    6 * 2^-(m1 + i)."""
    return Fraction(6) / 2 ** (m1 + i)


@dataclass(frozen=True)
class CertifiedPoint:
    """A computed value plus an exact bound on its distance to the true one."""

    value: PointRep
    radius: Fraction
    stages_used: int


def _walk(s: Schedule, p: PointRep, upto: int, reverse: bool = False) -> dict[int, Fraction]:
    """Coordinate values changed by applying stages 1..upto (or upto..1 for
    the reverse maps), sparse: only touched indices appear."""
    cur: dict[int, Fraction] = {}

    def val(i: int) -> Fraction:
        return cur.get(i, p.coord(i))

    ks = range(upto, 0, -1) if reverse else range(1, upto + 1)
    for k in ks:
        n, m = s.stages[k - 1]
        u, v = twist_eval(s.stage_map(k, reverse=reverse), val(n), val(m))
        cur[n] = u
        cur[m] = v
    return cur


def _rebuild(p: PointRep, cur: dict[int, Fraction]) -> PointRep:
    if not cur:
        return p
    width = max(max(cur), len(p.prefix))
    cells = tuple(cur.get(i, p.coord(i)) for i in range(1, width + 1))
    return PointRep(cells, p.tail)


def forward_partial_eval(s: Schedule, p: PointRep, i: int) -> PointRep:
    """Stages 1..i applied to p (stage 1 first)."""
    _require_stage_range(s, i)
    return _rebuild(p, _walk(s, p, i))


def reverse_partial_eval(s: Schedule, y: PointRep, i: int) -> PointRep:
    """Inverse of forward_partial_eval(s, ., i): cw stages i down to 1."""
    _require_stage_range(s, i)
    return _rebuild(y, _walk(s, y, i, reverse=True))


def _least_stage(s: Schedule, tau: Fraction, bound_fn) -> int:
    if tau <= 0:
        raise OutOfRange(f"tolerance must be positive, got {tau}")
    for i in range(s.count + 1):
        if bound_fn(s, i) < tau:
            return i
    raise HorizonExceeded(
        f"tolerance {tau} needs more than the {s.count} materialized stages"
    )


def stages_for_forward(s: Schedule, budget: Rational) -> int:
    """Least materialized stage count whose forward tail bound beats budget."""
    return _least_stage(s, Fraction(budget), forward_tail_bound)


def stages_for_reverse(s: Schedule, budget: Rational) -> int:
    """Least materialized stage count whose reverse tail bound beats budget."""
    return _least_stage(s, Fraction(budget), reverse_tail_bound)


def h_eval(s: Schedule, x: PointRep, tau: Rational) -> CertifiedPoint:
    """Certified value of the limit map: the least-stage partial whose
    forward tail bound beats tau."""
    tau = Fraction(tau)
    i = _least_stage(s, tau, forward_tail_bound)
    return CertifiedPoint(forward_partial_eval(s, x, i), forward_tail_bound(s, i), i)


def h_inverse_eval(s: Schedule, y: PointRep, tau: Rational) -> CertifiedPoint:
    """Certified value of the inverse limit map."""
    tau = Fraction(tau)
    i = _least_stage(s, tau, reverse_tail_bound)
    return CertifiedPoint(reverse_partial_eval(s, y, i), reverse_tail_bound(s, i), i)


def _is_canonical(s: Schedule) -> bool:
    ms = s.m_seq()
    return all(ms[k] == ms[0] + 4 * k for k in range(len(ms)))


def final_coordinate(s: Schedule, p: PointRep, j: int) -> tuple[int, Fraction]:
    """(stage, value) once coordinate j stops moving.

    Coordinate j is finalized at stage k if n_k = j: stages beyond k only
    touch strictly larger indices.  A j the schedule never touches is final
    from the start: (0, p_j).  Touched but not finalized within the
    materialized stages raises HorizonExceeded.
    """
    if j < 1:
        raise BadIndices(f"coordinate index must be >= 1, got {j}")
    stream = _stream_of(s.source_profile)
    ns = s.n_seq()
    if j in ns:
        k = ns.index(j) + 1
        cur = _walk(s, p, k)
        return k, cur[j]
    ms = s.m_seq()
    touched = stream.contains(j) or j in ms
    if not touched and not s.is_identity:
        if s.stages and _is_canonical(s):
            m1 = ms[0]
            touched = j >= m1 and (j - m1) % 4 == 0
        else:
            # continuation unknown: any multiple of 4 beyond the last
            # materialized m may yet be sacrificed
            touched = j % 4 == 0 and j > (ms[-1] if ms else 0)
    if touched:
        raise HorizonExceeded(
            f"coordinate {j} is not finalized within {s.count} stages"
        )
    return 0, p.coord(j)


def first_attempt_partial(p: PointRep, n: int) -> PointRep:
    """Composition of unit twists on cells (k, k+1) for k = 1..n.

    The demo construction: each stage shifts the diagonal pattern one
    coordinate deeper, and the limit of the partials is not injective."""
    if n < 0:
        raise BadIndices(f"stage count must be >= 0, got {n}")
    out = p
    for k in range(1, n + 1):
        cm = CellMap(MapKind.FIRST_ATTEMPT, Variant.CORRECTED, k, k + 1)
        u, v = twist_eval(cm, out.coord(k), out.coord(k + 1))
        out = out.with_coord(k, u).with_coord(k + 1, v)
    return out
