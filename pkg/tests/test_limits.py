"""Stage scheduling, truncation bounds, certified limit evaluation."""

from fractions import Fraction

import pytest

from hilbertcube import (
    ORIGIN,
    HorizonExceeded,
    OutOfRange,
    boundary_index_sequence,
    build_schedule,
    final_coordinate,
    first_attempt_partial,
    forward_partial_eval,
    forward_tail_bound,
    h_eval,
    h_inverse_eval,
    make_point,
    metric_d,
    reverse_partial_eval,
    reverse_tail_bound,
    schedule_budget_ok,
    stage_budget,
)
from hilbertcube.limits import Schedule, canonical_forward_bound, canonical_reverse_bound

from conftest import rand_point

F = Fraction
ONES = make_point([], 1)


def test_boundary_index_sequence_const_one():
    stream = boundary_index_sequence(ONES)
    assert stream.values_upto(5) == [1, 2, 3, 4, 5]
    assert stream.contains(999)


def test_boundary_index_sequence_single():
    stream = boundary_index_sequence(make_point([F(1, 2), F(1, 2), 1], 0))
    assert stream.values_upto(100) == [3]
    assert not stream.contains(4)


def test_boundary_index_sequence_interior():
    assert boundary_index_sequence(ORIGIN).is_empty


def test_build_schedule_const_one():
    s = build_schedule(ONES, 4)
    assert s.stages == ((1, 4), (2, 8), (3, 12), (4, 16))


def test_build_schedule_sparse_boundary():
    # spent m's re-enter the pool once the explicit index is used up
    s = build_schedule(make_point([F(1, 2), F(1, 2), 1], 0), 4)
    assert s.stages == ((3, 4), (4, 8), (8, 12), (12, 16))


def test_build_schedule_interior_empty():
    s = build_schedule(ORIGIN, 10)
    assert s.stages == ()
    assert s.is_identity


def test_budget_values():
    assert stage_budget(1) == F(3, 16)
    assert stage_budget(4) == F(3, 128)


def test_schedule_budget_ok_default():
    assert schedule_budget_ok(build_schedule(ONES, 6))
    assert schedule_budget_ok(build_schedule(make_point([1], F(1, 3)), 5))


def test_budget_inequality_is_tight():
    # stage k needs m >= (k+2) + 3(k-1) + 1 = 4k: the default m hits equality
    for k in range(1, 9):
        assert (k + 2) + 3 * (k - 1) + 1 == 4 * k


def test_schedule_budget_rejects_bad_m():
    good = build_schedule(ONES, 3)
    bad = Schedule(((1, 4), (2, 4), (3, 12)), good.source_profile, good.budget)
    assert not schedule_budget_ok(bad)
    slack = Schedule(((1, 8), (2, 12), (3, 16)), good.source_profile, good.budget)
    assert schedule_budget_ok(slack)


def test_forward_tail_bound_values():
    s = build_schedule(ONES, 8)
    assert forward_tail_bound(s, 0) == F(1, 5)
    assert forward_tail_bound(s, 1) == F(1, 80)
    # telescoping step
    for i in range(4):
        drop = F(3, 2 ** s.stages[i][1])
        assert forward_tail_bound(s, i + 1) == forward_tail_bound(s, i) - drop


def test_reverse_tail_bound_values():
    s = build_schedule(ONES, 8)
    assert reverse_tail_bound(s, 0) == F(3, 8)
    assert reverse_tail_bound(s, 1) == F(3, 16)
    prev = reverse_tail_bound(s, 0)
    for i in range(1, 6):
        cur = reverse_tail_bound(s, i)
        assert cur < prev
        prev = cur


def test_tail_bounds_identity_schedule():
    s = build_schedule(ORIGIN, 5)
    assert forward_tail_bound(s, 0) == 0
    assert reverse_tail_bound(s, 0) == 0


def test_canonical_closed_forms_match():
    s = build_schedule(ONES, 12)
    for i in range(6):
        assert forward_tail_bound(s, i) == canonical_forward_bound(4, i)
        assert reverse_tail_bound(s, i) == canonical_reverse_bound(4, i)


def test_forward_partial_const_one_stage1():
    out = forward_partial_eval(build_schedule(ONES, 2), ONES, 1)
    assert out.coord(1) == F(5, 8)
    assert out.coord(4) == 1
    assert out.coord(2) == 1


def test_forward_partial_stage0_and_origin():
    s = build_schedule(ONES, 2)
    assert forward_partial_eval(s, ONES, 0) == ONES
    s0 = build_schedule(ORIGIN, 2)
    assert forward_partial_eval(s0, ORIGIN, 0) == ORIGIN
    # origin cells are fixed by every stage
    assert forward_partial_eval(s, ORIGIN, 2) == ORIGIN


def test_forward_reverse_are_inverse(rng):
    s = build_schedule(ONES, 5)
    for _ in range(20):
        x = rand_point(rng)
        y = forward_partial_eval(s, x, 4)
        assert reverse_partial_eval(s, y, 4) == x


def test_forward_cauchy_steps(rng):
    s = build_schedule(ONES, 6)
    for _ in range(10):
        x = rand_point(rng)
        for i in range(5):
            gap = metric_d(
                forward_partial_eval(s, x, i + 1), forward_partial_eval(s, x, i)
            )
            assert gap <= F(3, 2 ** s.stages[i][1])


def test_reverse_cauchy_steps(rng):
    s = build_schedule(ONES, 5)
    for _ in range(10):
        y = rand_point(rng)
        for i in range(4):
            gap = metric_d(
                reverse_partial_eval(s, y, i + 1), reverse_partial_eval(s, y, i)
            )
            assert gap <= 8**i * F(3, 2 ** s.stages[i][1])


def test_h_eval_stage_selection():
    s = build_schedule(ONES, 4)
    # 1/5 < 1/4 already, so tau = 1/4 needs no stages at all
    cp = h_eval(s, ONES, F(1, 4))
    assert cp.stages_used == 0 and cp.radius == F(1, 5)
    # tau = 1/10 forces one stage, certified at 1/80
    cp = h_eval(s, ONES, F(1, 10))
    assert cp.stages_used == 1 and cp.radius == F(1, 80)
    assert cp.value.coord(1) == F(5, 8)


def test_h_eval_radius_monotone_in_tau():
    s = build_schedule(ONES, 6)
    radii = [h_eval(s, ONES, F(1, 2**k)).radius for k in range(1, 12)]
    assert radii == sorted(radii, reverse=True)


def test_h_eval_identity_schedule():
    s = build_schedule(ORIGIN, 3)
    p = make_point([F(1, 3)], 0)
    cp = h_eval(s, p, F(1, 1000))
    assert cp.value == p and cp.radius == 0 and cp.stages_used == 0


def test_h_inverse_eval_stage_selection():
    s = build_schedule(ONES, 4)
    cp = h_inverse_eval(s, ORIGIN, F(1))
    assert cp.stages_used == 0 and cp.radius == F(3, 8) and cp.value == ORIGIN


def test_h_eval_requires_positive_tau():
    s = build_schedule(ONES, 4)
    with pytest.raises(OutOfRange):
        h_eval(s, ONES, F(0))


def test_h_eval_exhausts_materialized_stages():
    s = build_schedule(ONES, 2)
    with pytest.raises(HorizonExceeded):
        h_eval(s, ONES, F(1, 10**9))


def test_roundtrip_certificate(rng):
    s = build_schedule(ONES, 6)
    tau = F(1, 100)
    for _ in range(10):
        x = rand_point(rng)
        fwd = h_eval(s, x, tau)
        back = h_inverse_eval(s, fwd.value, tau)
        combined = back.radius + 8**back.stages_used * fwd.radius
        assert metric_d(back.value, x) <= combined


def test_final_coordinate_const_one():
    s = build_schedule(ONES, 4)
    assert final_coordinate(s, ONES, 1) == (1, F(5, 8))
    assert final_coordinate(s, ONES, 2) == (2, F(61, 64))


def test_final_coordinate_untouched():
    p = make_point([F(1, 2), F(1, 2), 1], 0)
    s = build_schedule(p, 4)
    assert final_coordinate(s, p, 1) == (0, F(1, 2))
    # coordinate 5 is interior and never scheduled
    assert final_coordinate(s, p, 5) == (0, F(0))


def test_final_coordinate_agrees_with_later_partials():
    s = build_schedule(ONES, 8)
    for j in (1, 2, 3, 4, 5):
        stage, value = final_coordinate(s, ONES, j)
        for i in range(stage, 9):
            assert forward_partial_eval(s, ONES, i).coord(j) == value


def test_final_coordinate_strictly_interior_for_boundary_indices():
    s = build_schedule(ONES, 8)
    for j in range(1, 9):
        _, value = final_coordinate(s, ONES, j)
        assert abs(value) < 1


def test_final_coordinate_not_yet_scheduled():
    s = build_schedule(ONES, 2)
    with pytest.raises(HorizonExceeded):
        final_coordinate(s, ONES, 3)
    # sacrificed m index is touched but not finalized within 2 stages
    with pytest.raises(HorizonExceeded):
        final_coordinate(s, ONES, 4)


def test_first_attempt_partial_patterns():
    out = first_attempt_partial(ONES, 3)
    assert out == make_point([0, 0, 0], 1)
    t = F(1, 3)
    out_t = first_attempt_partial(make_point([], t), 3)
    assert out_t == make_point([0, 0, 0], t)
    assert first_attempt_partial(ONES, 0) == ONES


def test_first_attempt_collapse_distance():
    # the two streams end up 2^-n * |1 - t| apart: distinct limits collide
    t = F(1, 3)
    a = first_attempt_partial(ONES, 5)
    b = first_attempt_partial(make_point([], t), 5)
    assert metric_d(a, b) == (1 - t) * F(1, 2**5)
