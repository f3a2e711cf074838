"""Certified plans moving any point of the cube to any other.

A plan composes up to three exactly-representable homeomorphisms:

    H = (target escape)^-1 . interior move . (source escape)

where an escape is the staged twist limit that pushes a boundary point into
the pseudo-interior, and the interior move is the coordinatewise map sending
the escaped source to the escaped target.  Pseudo-interior endpoints need no
escape, giving four cases.  The interior move's anchors use the exact
finalized coordinates of both escapes up to a cutoff N and the identity
beyond, so the design residual is at most 2^(1-N); N is sized so that the
residual survives the worst Lipschitz inflation the verifying evaluation can
apply to it.

Evaluation is certified: every returned value carries an exact radius, and
verify_plan checks d(value, target) + radius < tau with everything rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .cube import PointRep, Rational, classify_point, metric_d
from .errors import HorizonExceeded, OutOfRange
from .interior import (
    InteriorMapParams,
    interior_map_eval,
    interior_map_inverse,
    lipschitz_bound,
)
from .limits import (
    CertifiedPoint,
    Schedule,
    boundary_index_sequence,
    build_schedule,
    canonical_forward_bound,
    canonical_reverse_bound,
    final_coordinate,
    forward_tail_bound,
    h_eval,
    reverse_partial_eval,
    reverse_tail_bound,
    stages_for_reverse,
)

ZERO = Fraction(0)
EIGHT = Fraction(8)

DEFAULT_HORIZON = 256


class PlanCase(str, Enum):
    INTERIOR_INTERIOR = "interior-interior"
    BOUNDARY_INTERIOR = "boundary-interior"
    INTERIOR_BOUNDARY = "interior-boundary"
    BOUNDARY_BOUNDARY = "boundary-boundary"


@dataclass(frozen=True)
class HomeoPlan:
    """Everything needed to evaluate H and H^-1 with certificates.

    source_schedule escapes the source point (present iff the source meets
    the boundary); target_schedule escapes the target.  move holds the
    interior-map anchors.
    """

    case: PlanCase
    move: InteriorMapParams
    source_schedule: Schedule | None
    target_schedule: Schedule | None


@dataclass(frozen=True)
class EvalInfo:
    """A certified value plus the Lipschitz bound of the concrete
    approximation that produced it (used to compose roundtrip bounds)."""

    point: CertifiedPoint
    lipschitz: Fraction


def _case_of(p_boundary: bool, q_boundary: bool) -> PlanCase:
    if p_boundary and q_boundary:
        return PlanCase.BOUNDARY_BOUNDARY
    if p_boundary:
        return PlanCase.BOUNDARY_INTERIOR
    if q_boundary:
        return PlanCase.INTERIOR_BOUNDARY
    return PlanCase.INTERIOR_INTERIOR


def _first_sacrifice(p: PointRep) -> int:
    """m_1 of the canonical schedule for p: least multiple of 4 > n_1."""
    n1 = boundary_index_sequence(p).first()
    return max(4, 4 * (n1 // 4) + 4)


def _stages_until(m1: int, budget: Fraction, bound_fn) -> int:
    i = 0
    while bound_fn(m1, i) >= budget:
        i += 1
    return i


def _finalized_or_none(s: Schedule, p: PointRep, j: int, horizon: int):
    try:
        stage, value = final_coordinate(s, p, j)
    except HorizonExceeded:
        return None
    if stage > horizon:
        raise HorizonExceeded(
            f"coordinate {j} finalizes at stage {stage}, beyond horizon {horizon}"
        )
    return value


def solve(p: PointRep, q: PointRep, tau: Rational, horizon: int = DEFAULT_HORIZON) -> HomeoPlan:
    """Construct a plan with certified d(H(p), q) < tau.

    The returned plan satisfies verify_plan(plan, p, q, tau).  Interior to
    interior needs no escapes and moves p to q exactly.
    """
    tau = Fraction(tau)
    if tau <= 0:
        raise OutOfRange(f"tolerance must be positive, got {tau}")
    p_prof, q_prof = classify_point(p), classify_point(q)
    case = _case_of(p_prof.is_boundary, q_prof.is_boundary)
    if case == PlanCase.INTERIOR_INTERIOR:
        return HomeoPlan(case, InteriorMapParams(p, q), None, None)

    # stages the verifying evaluation will unwind on the target side
    # (verify_plan evaluates at tau/2; its reverse budget is a further
    # half for case 3, a quarter for case 4)
    if q_prof.is_boundary:
        m1_q = _first_sacrifice(q)
        rev_budget = tau / 4 if case == PlanCase.INTERIOR_BOUNDARY else tau / 8
        i_star = _stages_until(m1_q, rev_budget, canonical_reverse_bound)
    else:
        i_star = 0

    # anchor cutoff: the design residual 2^(1-N) must survive inflation
    # by 8^i_star and still fit in a quarter of the tolerance
    resid_target = (tau / 4) / EIGHT**i_star
    n_cut = 1
    while Fraction(2, 2**n_cut) > resid_target:
        n_cut += 1

    sched_p = build_schedule(p, n_cut + 1) if p_prof.is_boundary else None
    sched_q = build_schedule(q, n_cut + 1) if q_prof.is_boundary else None

    source_vals: list[Fraction] = []
    target_vals: list[Fraction] = []
    for j in range(1, n_cut + 1):
        s_j = p.coord(j) if sched_p is None else _finalized_or_none(sched_p, p, j, horizon)
        t_j = q.coord(j) if sched_q is None else _finalized_or_none(sched_q, q, j, horizon)
        if s_j is None or t_j is None:
            s_j = t_j = ZERO  # identity coordinate: value unknowable in time
        source_vals.append(s_j)
        target_vals.append(t_j)
    move = InteriorMapParams(
        PointRep(tuple(source_vals), ZERO), PointRep(tuple(target_vals), ZERO)
    )

    # size the materialized schedules for every evaluation verify or a
    # roundtrip at this tolerance will ask of them, plus slack
    lip_f = lipschitz_bound(move)
    lip_inv = lipschitz_bound(interior_map_inverse(move))
    pad = 12
    if sched_p is not None:
        m1_p = _first_sacrifice(p)
        fwd_budget = (tau / 8) / (EIGHT**i_star * lip_f)
        need_fwd = _stages_until(m1_p, fwd_budget, canonical_forward_bound)
        need_rev = _stages_until(m1_p, tau / 8, canonical_reverse_bound)
        sched_p = build_schedule(p, max(n_cut + 1, need_fwd, need_rev) + pad)
    if sched_q is not None:
        i_inv = 0
        if sched_p is not None:
            i_inv = _stages_until(_first_sacrifice(p), tau / 8, canonical_reverse_bound)
        fwd_budget = (tau / 8) / (EIGHT**i_inv * lip_inv)
        need_fwd = _stages_until(m1_q, fwd_budget, canonical_forward_bound)
        need_rev = i_star
        sched_q = build_schedule(q, max(n_cut + 1, need_fwd, need_rev) + pad)

    return HomeoPlan(case, move, sched_p, sched_q)


def plan_eval_info(plan: HomeoPlan, x: PointRep, tau: Rational) -> EvalInfo:
    """Certified H(x) within tau, with the approximation's Lipschitz bound.

    The internal budget split targets a radius of at most tau/2, leaving
    headroom for verification at doubled tolerance.
    """
    tau = Fraction(tau)
    if tau <= 0:
        raise OutOfRange(f"tolerance must be positive, got {tau}")
    lip = lipschitz_bound(plan.move)
    if plan.case == PlanCase.INTERIOR_INTERIOR:
        value = interior_map_eval(plan.move, x)
        return EvalInfo(CertifiedPoint(value, ZERO, 0), lip)
    if plan.case == PlanCase.BOUNDARY_INTERIOR:
        z = h_eval(plan.source_schedule, x, tau / (2 * lip))
        value = interior_map_eval(plan.move, z.value)
        return EvalInfo(
            CertifiedPoint(value, lip * z.radius, z.stages_used),
            lip * EIGHT**z.stages_used,
        )
    if plan.case == PlanCase.INTERIOR_BOUNDARY:
        w = interior_map_eval(plan.move, x)
        i = stages_for_reverse(plan.target_schedule, tau / 2)
        value = reverse_partial_eval(plan.target_schedule, w, i)
        r = reverse_tail_bound(plan.target_schedule, i)
        return EvalInfo(CertifiedPoint(value, r, i), EIGHT**i * lip)
    i = stages_for_reverse(plan.target_schedule, tau / 4)
    r_rev = reverse_tail_bound(plan.target_schedule, i)
    inner = (tau / 4) / (EIGHT**i * lip)
    z = h_eval(plan.source_schedule, x, inner)
    w = interior_map_eval(plan.move, z.value)
    value = reverse_partial_eval(plan.target_schedule, w, i)
    radius = EIGHT**i * lip * z.radius + r_rev
    return EvalInfo(
        CertifiedPoint(value, radius, i + z.stages_used),
        EIGHT**i * lip * EIGHT**z.stages_used,
    )


def plan_inverse_eval_info(plan: HomeoPlan, y: PointRep, tau: Rational) -> EvalInfo:
    """Certified H^-1(y) within tau; mirror of plan_eval_info."""
    tau = Fraction(tau)
    if tau <= 0:
        raise OutOfRange(f"tolerance must be positive, got {tau}")
    inv_move = interior_map_inverse(plan.move)
    lip = lipschitz_bound(inv_move)
    if plan.case == PlanCase.INTERIOR_INTERIOR:
        value = interior_map_eval(inv_move, y)
        return EvalInfo(CertifiedPoint(value, ZERO, 0), lip)
    if plan.case == PlanCase.BOUNDARY_INTERIOR:
        w = interior_map_eval(inv_move, y)
        i = stages_for_reverse(plan.source_schedule, tau / 2)
        value = reverse_partial_eval(plan.source_schedule, w, i)
        r = reverse_tail_bound(plan.source_schedule, i)
        return EvalInfo(CertifiedPoint(value, r, i), EIGHT**i * lip)
    if plan.case == PlanCase.INTERIOR_BOUNDARY:
        z = h_eval(plan.target_schedule, y, tau / (2 * lip))
        value = interior_map_eval(inv_move, z.value)
        return EvalInfo(
            CertifiedPoint(value, lip * z.radius, z.stages_used),
            lip * EIGHT**z.stages_used,
        )
    i = stages_for_reverse(plan.source_schedule, tau / 4)
    r_rev = reverse_tail_bound(plan.source_schedule, i)
    inner = (tau / 4) / (EIGHT**i * lip)
    z = h_eval(plan.target_schedule, y, inner)
    w = interior_map_eval(inv_move, z.value)
    value = reverse_partial_eval(plan.source_schedule, w, i)
    radius = EIGHT**i * lip * z.radius + r_rev
    return EvalInfo(
        CertifiedPoint(value, radius, i + z.stages_used),
        EIGHT**i * lip * EIGHT**z.stages_used,
    )


def plan_eval(plan: HomeoPlan, x: PointRep, tau: Rational) -> CertifiedPoint:
    return plan_eval_info(plan, x, tau).point


def plan_inverse_eval(plan: HomeoPlan, y: PointRep, tau: Rational) -> CertifiedPoint:
    return plan_inverse_eval_info(plan, y, tau).point


def verify_plan(plan: HomeoPlan, p: PointRep, q: PointRep, tau: Rational) -> bool:
    """Exact check that the plan moves p to within tau of q:
    metric_d(value, q) + radius < tau for the tau/2 evaluation."""
    return plan_report(plan, p, q, tau)["verified"]


def plan_report(plan: HomeoPlan, p: PointRep, q: PointRep, tau: Rational) -> dict:
    """verify_plan plus the numbers behind it, all exact Fractions."""
    tau = Fraction(tau)
    if tau <= 0:
        raise OutOfRange(f"tolerance must be positive, got {tau}")
    cp = plan_eval(plan, p, tau / 2)
    bound = metric_d(cp.value, q) + cp.radius
    return {
        "case": plan.case.value,
        "stages_used": cp.stages_used,
        "distance_bound": bound,
        "verified": bound < tau,
    }
