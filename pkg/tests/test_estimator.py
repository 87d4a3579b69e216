import math

import numpy as np
import pytest

from robbo import (
    CENTRAL,
    CENTRAL_ESTIMATE_GAP_LIMIT,
    Estimate,
    FrontFamily,
    FunctionFront,
    InconsistentSampleError,
    Interval,
    LINEAR,
    OutOfDomainError,
    Problem,
    RotatedPoint,
    ToleranceVec,
    bounds_on_grid,
    certified_gap,
    error_bands,
    estimate_at,
    estimate_curve,
    from_vq,
    global_error,
    make_transform,
    realize,
    realize_point,
    run_robbo,
    to_vq,
    worst_case_interval_error,
)
from robbo.bench import problem_for
from conftest import rotated_dataset

SQRT2 = math.sqrt(2.0)


def flat_rotated_problem(delta=(1.0, 1.0), v_lo=-5.0, v_hi=5.0):
    """Problem whose rotated front is identically q = 0."""
    tv = ToleranceVec(*delta)
    t = make_transform(tv)
    lo = from_vq(t, RotatedPoint(v_lo, 0.0))
    hi = from_vq(t, RotatedPoint(v_hi, 0.0))
    slope = tv.delta2 / tv.delta1
    return Problem(tv, FunctionFront(lambda f1: -slope * f1, lo.z1, hi.z1))


def test_estimate_at_examples():
    d = rotated_dataset([(0.0, 0.0), (4.0, 2.0)])
    assert estimate_at(Estimate(d, CENTRAL), 2.0).q == 1.0
    assert estimate_at(Estimate(d, LINEAR), 2.0).q == 1.0


def test_estimates_interpolate_samples_exactly():
    d = rotated_dataset([(0.0, 0.0), (1.5, 0.7), (4.0, 2.0)])
    for kind in (CENTRAL, LINEAR):
        for i in range(d.size):
            assert estimate_at(Estimate(d, kind), float(d.v[i])).q == float(d.q[i])


def test_estimate_at_out_of_domain():
    d = rotated_dataset([(0.0, 0.0), (4.0, 2.0)])
    with pytest.raises(OutOfDomainError):
        estimate_at(Estimate(d, CENTRAL), 4.5)


def test_estimate_curve_two_points_is_anchors():
    d = rotated_dataset([(0.0, 0.0), (4.0, 2.0)])
    rows = estimate_curve(Estimate(d, CENTRAL), 2)
    assert [(r[0], r[1], r[4]) for r in rows] == [(0.0, 0.0, 0.0), (4.0, 2.0, 0.0)]


def test_estimate_curve_middle_row():
    d = rotated_dataset([(0.0, 0.0), (4.0, 2.0)])
    rows = estimate_curve(Estimate(d, CENTRAL), 3)
    v, q, _, _, lam = rows[1]
    assert (v, q, lam) == (2.0, 1.0, 2.0)


def test_estimate_curve_needs_two_points():
    d = rotated_dataset([(0.0, 0.0), (4.0, 2.0)])
    with pytest.raises(ValueError):
        estimate_curve(Estimate(d, CENTRAL), 1)


def test_estimate_curve_monotone_in_objective_space():
    # The central estimate's objective curve is monotone; strictly so on a
    # flat rotated front, with flat runs wherever an interval has Q != 0
    # (the estimate there has unit slope and one objective stalls).
    rep = run_robbo(problem_for(1.0, "equal"))
    rows = estimate_curve(Estimate(rep.dataset, CENTRAL), 512)
    f1 = np.array([r[2] for r in rows])
    f2 = np.array([r[3] for r in rows])
    assert np.all(np.diff(f1) > 0)
    assert np.all(np.diff(f2) < 0)

    rep2 = run_robbo(problem_for(2.0, "equal"))
    rows2 = estimate_curve(Estimate(rep2.dataset, CENTRAL), 512)
    f1 = np.array([r[2] for r in rows2])
    f2 = np.array([r[3] for r in rows2])
    eps = 1e-12 * 10.0
    assert np.all(np.diff(f1) >= -eps)
    assert np.all(np.diff(f2) <= eps)


def test_worst_case_interval_error_examples():
    flat = Interval(RotatedPoint(0.0, 0.0), RotatedPoint(4.0, 0.0))
    assert worst_case_interval_error(flat, CENTRAL) == 2.0
    assert worst_case_interval_error(flat, LINEAR) == 2.0
    sloped = Interval(RotatedPoint(0.0, 0.0), RotatedPoint(4.0, 2.0))
    assert worst_case_interval_error(sloped, CENTRAL) == 1.0
    assert worst_case_interval_error(sloped, LINEAR) == 1.5
    edge = Interval(RotatedPoint(0.0, 0.0), RotatedPoint(4.0, 4.0 - 1e-12))
    assert worst_case_interval_error(edge, CENTRAL) == pytest.approx(0.0, abs=1e-12)
    assert worst_case_interval_error(edge, LINEAR) == pytest.approx(0.0, abs=1e-12)


def test_central_never_worse_than_linear(rng):
    for _ in range(200):
        v = float(rng.uniform(0.5, 10.0))
        q = float(rng.uniform(-0.999, 0.999)) * v
        iv = Interval(RotatedPoint(0.0, 0.0), RotatedPoint(v, q))
        c = worst_case_interval_error(iv, CENTRAL)
        l = worst_case_interval_error(iv, LINEAR)
        assert c <= l
        if q == 0.0:
            assert c == l
        else:
            assert c < l


def test_certified_gap_central_equals_global_error(rng):
    from conftest import random_pareto_dataset

    for _ in range(20):
        d = random_pareto_dataset(rng)
        assert certified_gap(d, CENTRAL) == pytest.approx(global_error(d), rel=1e-12)
        assert certified_gap(d, LINEAR) >= certified_gap(d, CENTRAL) - 1e-12


def test_realize_flat_front_candidate_above():
    prob = flat_rotated_problem()
    rep = realize_point(prob, RotatedPoint(0.0, 1.0))
    assert rep.realized.z1 == pytest.approx(0.0, abs=1e-9)
    assert rep.realized.z2 == pytest.approx(0.0, abs=1e-9)
    assert rep.error[0] == pytest.approx(1.0 / SQRT2, rel=1e-9)
    assert rep.error[1] == pytest.approx(1.0 / SQRT2, rel=1e-9)
    assert rep.ratio == pytest.approx(1.0, rel=1e-12)


def test_realize_candidate_on_front_has_zero_error():
    prob = flat_rotated_problem()
    rep = realize_point(prob, RotatedPoint(0.0, 0.0))
    assert rep.error == (0.0, 0.0)
    assert rep.ratio is None


def test_realized_ratio_equals_tolerance_ratio():
    prob = problem_for(2.0, "skew")
    run = run_robbo(prob)
    est = Estimate(run.dataset, CENTRAL)
    lo, hi = run.dataset.v_span
    want = prob.delta.delta1 / prob.delta.delta2
    seen = 0
    for v in np.linspace(lo, hi, 60):
        rep = realize(est, prob, float(v))
        if rep.ratio is None:
            continue
        assert rep.ratio == pytest.approx(want, rel=1e-9)
        seen += 1
    assert seen > 10


def test_realize_flags_front_outside_dataset_bounds():
    # Dataset believes the front passes near q=0, but the sampled front sits
    # at q=3, far above the optimal upper bound.
    d = rotated_dataset([(0.0, 0.0), (4.0, 0.0)])
    t = make_transform(d.delta)
    lo = from_vq(t, RotatedPoint(0.0, 3.0))
    hi = from_vq(t, RotatedPoint(4.0, 3.0))
    prob = Problem(d.delta, FunctionFront(lambda f1: 6.0 / SQRT2 - f1, lo.z1, hi.z1))
    with pytest.raises(InconsistentSampleError):
        realize_point(prob, RotatedPoint(2.0, 0.5), dataset=d)


def test_realization_errors_meet_l1_condition_below_threshold():
    # Certified run: every candidate on the central estimate realizes with
    # per-objective errors within the tolerances.
    prob = problem_for(0.7, "equal")
    run = run_robbo(prob)
    assert run.final_gap <= CENTRAL_ESTIMATE_GAP_LIMIT
    est = Estimate(run.dataset, CENTRAL)
    t = make_transform(prob.delta)
    lo, hi = run.dataset.v_span
    for v in np.linspace(lo, hi, 100):
        rep = realize(est, prob, float(v))
        e_vq = to_vq(t, type(rep.candidate)(rep.error[0], rep.error[1]))
        assert abs(e_vq.v) + abs(e_vq.q) <= SQRT2 * (1 + 1e-6)
        assert abs(rep.error[0]) <= prob.delta.delta1 * (1 + 1e-6)
        assert abs(rep.error[1]) <= prob.delta.delta2 * (1 + 1e-6)


def test_central_estimate_error_is_at_most_half_the_gap():
    # Against the true analytical front on a dense grid.
    prob = problem_for(2.0, "equal")
    run = run_robbo(prob)
    est = Estimate(run.dataset, CENTRAL)
    backend = prob.backend
    t = make_transform(prob.delta)
    grid = np.linspace(*run.dataset.v_span, 2_000)
    lower, upper = bounds_on_grid(run.dataset, grid)
    center = 0.5 * (lower + upper)
    for v, c, gap in zip(grid, center, upper - lower):
        z = backend.solve_scalarized(prob.delta, float(v)).z
        h = to_vq(t, z).q
        assert abs(c - h) <= gap / 2 + 1e-7


def test_error_bands_examples():
    d = rotated_dataset([(0.0, 0.0), (4.0, 2.0)], delta=(1.0, 2.0))
    assert error_bands(d, 0.0) == (0.0, 0.0)
    b1, b2 = error_bands(d, 2.0)
    assert b1 == pytest.approx(1.4142, abs=1e-4)
    assert b2 == pytest.approx(2.8284, abs=1e-4)


def test_error_bands_within_twice_tolerance_after_certified_run():
    prob = problem_for(1.3, "skew")
    run = run_robbo(prob)
    d = run.dataset
    for v in np.linspace(*d.v_span, 500):
        b1, b2 = error_bands(d, float(v))
        assert b1 <= 2 * prob.delta.delta1 * (1 + 1e-9)
        assert b2 <= 2 * prob.delta.delta2 * (1 + 1e-9)
