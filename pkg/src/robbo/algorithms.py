"""Iterative estimation runs and the comparison strategies.

The reference loop samples the two anchors, lays a uniform candidate grid
over the anchor v-span sized by the central-estimate planner, and repeatedly
samples the unsampled grid value with the widest bound gap until the gap
certificate drops to 2*sqrt(2).  Variants swap the estimate (central or
linear), the selection rule (uniform grid, greedy interval bisection, greedy
max-uncertainty points), or the termination (guarantee vs. fixed budget).
Uniform-spacing baselines and convex-combination scalarization are provided
for comparison on analytical backends.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .bounds import global_error, intervals, local_error_on_grid, worst_segment
from .errors import (
    InconsistentSampleError,
    SamplerFailureError,
    UnsupportedBaselineError,
)
from .estimator import (
    CENTRAL,
    CENTRAL_ESTIMATE_GAP_LIMIT,
    LINEAR,
    certified_gap,
)
from .planner import (
    BudgetSpec,
    budget_tolerances,
    min_samples_central,
    ranges_from_anchors,
)
from .sampler import (
    AnalyticalBackend,
    Problem,
    SampleResult,
    _bisection_midpoint,
    sample_anchor,
    sample_at,
    validate_sample,
)
from .transform import (
    Dataset,
    ObjectivePoint,
    ToleranceVec,
    build_dataset,
    make_transform,
    to_vq,
)

UNIFORM_GRID = "uniform-grid"
GREEDY_BISECTION = "greedy-bisection"
GREEDY_MAX_UNCERTAINTY = "greedy-max-uncertainty"

TOLERANCE_GUARANTEE = "tolerance-guarantee"
FIXED_BUDGET = "fixed-budget"

_SELECTION_SHORT = {
    UNIFORM_GRID: "uniform",
    GREEDY_BISECTION: "bisection",
    GREEDY_MAX_UNCERTAINTY: "maxu",
}

# Grid values this close (relative to the span) to a sample's v count as
# already sampled.
_GRID_HIT_REL_TOL = 1e-12
# Relative tolerance grouping near-equal scores during candidate selection.
_TIE_REL_TOL = 1e-12


@dataclass(frozen=True)
class StrategySpec:
    """Which estimate, selection rule, and termination a run uses."""

    estimate_kind: str = CENTRAL
    selection: str = UNIFORM_GRID
    termination: str = TOLERANCE_GUARANTEE

    def __post_init__(self):
        if self.estimate_kind not in (CENTRAL, LINEAR):
            raise ValueError(f"unknown estimate kind {self.estimate_kind!r}")
        if self.selection not in _SELECTION_SHORT:
            raise ValueError(f"unknown selection {self.selection!r}")
        if self.termination not in (TOLERANCE_GUARANTEE, FIXED_BUDGET):
            raise ValueError(f"unknown termination {self.termination!r}")
        if self.selection == GREEDY_MAX_UNCERTAINTY and self.estimate_kind != LINEAR:
            raise ValueError(
                "greedy-max-uncertainty targets the linear estimate's worst"
                " points; pair it with the linear estimate"
            )

    @property
    def label(self) -> str:
        return f"{self.estimate_kind}-{_SELECTION_SHORT[self.selection]}"


ALL_GUARANTEE_STRATEGIES = (
    StrategySpec(CENTRAL, UNIFORM_GRID),
    StrategySpec(CENTRAL, GREEDY_BISECTION),
    StrategySpec(LINEAR, UNIFORM_GRID),
    StrategySpec(LINEAR, GREEDY_BISECTION),
    StrategySpec(LINEAR, GREEDY_MAX_UNCERTAINTY),
)


@dataclass(frozen=True)
class RunReport:
    """Outcome of one estimation run.

    lambda_trace records (total samples so far, global bound gap) after the
    anchors and after every accepted sample; the gap never increases.
    total_samples counts the anchors.  Budget runs also carry the derived
    tolerance limits, the achieved per-objective bands, and whether the
    guarantee was already met before the budget ran out.
    """

    dataset: Dataset
    strategy: StrategySpec
    iterations: int
    total_samples: int
    lambda_trace: tuple[tuple[int, float], ...]
    terminated_by: str
    final_certified_gap: float
    budget_limits: ToleranceVec | None = None
    budget_bands: tuple[float, float] | None = None
    early_guarantee: bool | None = None

    @property
    def final_gap(self) -> float:
        return self.lambda_trace[-1][1]

    def to_dict(self) -> dict:
        from .transform import dataset_to_dict

        out = {
            "strategy": {
                "estimate_kind": self.strategy.estimate_kind,
                "selection": self.strategy.selection,
                "termination": self.strategy.termination,
            },
            "iterations": self.iterations,
            "total_samples": self.total_samples,
            "lambda_trace": [[k, g] for k, g in self.lambda_trace],
            "terminated_by": self.terminated_by,
            "final_certified_gap": self.final_certified_gap,
            "dataset": dataset_to_dict(self.dataset),
        }
        if self.budget_limits is not None:
            out["budget_limits"] = list(self.budget_limits.as_tuple())
            out["budget_bands"] = list(self.budget_bands)
            out["early_guarantee"] = self.early_guarantee
        return out


def _anchors_dataset(problem: Problem) -> Dataset:
    a1 = sample_anchor(problem, "a1")
    a2 = sample_anchor(problem, "a2")
    return build_dataset(problem.delta, [a1, a2])


def _insert(problem: Problem, d: Dataset, s: SampleResult) -> Dataset:
    points = [d.objective_point(i) for i in range(d.size)] + [s.z]
    xs = list(d.xs) + [s.x]
    return build_dataset(problem.delta, points, xs)


def _attach_partial(exc: Exception, report: RunReport):
    exc.partial_report = report
    return exc


def _partial(problem, spec, d, trace, iterations, kind) -> RunReport:
    return RunReport(
        dataset=d,
        strategy=spec,
        iterations=iterations,
        total_samples=d.size,
        lambda_trace=tuple(trace),
        terminated_by="aborted",
        final_certified_gap=certified_gap(d, kind),
    )


def _pick_grid_value(d: Dataset, grid: np.ndarray, open_idx: np.ndarray) -> int:
    """Unsampled grid value with the widest bound gap.

    Near-ties (within 1e-12 relative) fall to the value farthest in v from
    all collected samples, then to the smallest value.
    """
    errs = local_error_on_grid(d, grid[open_idx])
    best = float(np.max(errs))
    tol = _TIE_REL_TOL * max(1.0, abs(best))
    top = open_idx[errs >= best - tol]
    if top.size > 1:
        dists = np.min(np.abs(grid[top][:, None] - d.v[None, :]), axis=1)
        far = float(np.max(dists))
        tol_d = _TIE_REL_TOL * max(1.0, abs(far))
        top = top[dists >= far - tol_d]
    return int(top[0])  # grid is ascending: first index = smallest value


def _run_uniform(
    problem: Problem,
    spec: StrategySpec,
    grid_points: int,
    exhaust_budget: bool,
) -> RunReport:
    kind = spec.estimate_kind
    d = _anchors_dataset(problem)
    v_lo, v_hi = d.v_span
    full = np.linspace(v_lo, v_hi, grid_points + 2)
    grid = full[1:-1]
    sampled = np.zeros(grid.size, dtype=bool)
    hit_tol = _GRID_HIT_REL_TOL * d.span_width

    trace = [(2, global_error(d))]
    iterations = 0
    terminated_by = "budget" if exhaust_budget else "guarantee"
    while True:
        if not exhaust_budget and certified_gap(d, kind) <= CENTRAL_ESTIMATE_GAP_LIMIT:
            terminated_by = "guarantee"
            break
        open_idx = np.flatnonzero(~sampled)
        if open_idx.size == 0:
            if exhaust_budget:
                terminated_by = "budget"
            elif certified_gap(d, kind) <= CENTRAL_ESTIMATE_GAP_LIMIT:
                terminated_by = "guarantee"
            else:
                terminated_by = "grid-exhausted"
            break
        pick = _pick_grid_value(d, grid, open_idx)
        try:
            result = sample_at(problem, float(grid[pick]))
        except (SamplerFailureError, InconsistentSampleError) as exc:
            raise _attach_partial(exc, _partial(problem, spec, d, trace, iterations, kind))
        iterations += 1
        sampled[pick] = True
        check = validate_sample(d, result)
        if not check.accepted:
            exc = InconsistentSampleError(f"sample rejected: {check.reason}")
            raise _attach_partial(exc, _partial(problem, spec, d, trace, iterations, kind))
        if check.duplicate_of is None:
            d = _insert(problem, d, result)
            new_v = to_vq(d.transform, result.z).v
            sampled |= np.abs(grid - new_v) < hit_tol
            trace.append((d.size, global_error(d)))

    return RunReport(
        dataset=d,
        strategy=spec,
        iterations=iterations,
        total_samples=d.size,
        lambda_trace=tuple(trace),
        terminated_by=terminated_by,
        final_certified_gap=certified_gap(d, kind),
    )


def _greedy_target(d: Dataset, spec: StrategySpec) -> float:
    """Next v for greedy selection: worst interval's midpoint or peak point."""
    ivs = intervals(d)
    gaps = [max(iv.V - abs(iv.Q), 0.0) for iv in ivs]
    best = max(gaps)
    tol = _TIE_REL_TOL * max(1.0, best)
    iv = next(iv for iv, g in zip(ivs, gaps) if g >= best - tol)
    if spec.selection == GREEDY_BISECTION:
        return (iv.left.v + iv.right.v) / 2.0
    seg = worst_segment(iv)
    lo_dist = min(abs(seg.v_lo - float(u)) for u in d.v)
    hi_dist = min(abs(seg.v_hi - float(u)) for u in d.v)
    if abs(lo_dist - hi_dist) <= _TIE_REL_TOL * max(1.0, hi_dist):
        return min(seg.v_lo, seg.v_hi)
    return seg.v_lo if lo_dist > hi_dist else seg.v_hi


def _run_greedy(problem: Problem, spec: StrategySpec) -> RunReport:
    kind = spec.estimate_kind
    d = _anchors_dataset(problem)
    trace = [(2, global_error(d))]
    iterations = 0
    while certified_gap(d, kind) > CENTRAL_ESTIMATE_GAP_LIMIT:
        target = _greedy_target(d, spec)
        try:
            result = sample_at(problem, target)
        except (SamplerFailureError, InconsistentSampleError) as exc:
            raise _attach_partial(exc, _partial(problem, spec, d, trace, iterations, kind))
        iterations += 1
        check = validate_sample(d, result)
        if not check.accepted:
            exc = InconsistentSampleError(f"sample rejected: {check.reason}")
            raise _attach_partial(exc, _partial(problem, spec, d, trace, iterations, kind))
        if check.duplicate_of is not None:
            exc = SamplerFailureError(
                "backend returned a duplicate sample for a fresh greedy target;"
                " no progress possible"
            )
            raise _attach_partial(exc, _partial(problem, spec, d, trace, iterations, kind))
        d = _insert(problem, d, result)
        trace.append((d.size, global_error(d)))
    return RunReport(
        dataset=d,
        strategy=spec,
        iterations=iterations,
        total_samples=d.size,
        lambda_trace=tuple(trace),
        terminated_by="guarantee",
        final_certified_gap=certified_gap(d, kind),
    )


def run_variant(problem: Problem, spec: StrategySpec) -> RunReport:
    """Run one guarantee-terminated strategy to completion.

    Uniform-grid selections draw candidates from the planner-sized grid (the
    fully sampled grid certifies both estimate kinds); greedy selections
    refine the worst interval directly and need no grid.
    """
    if spec.termination != TOLERANCE_GUARANTEE:
        raise ValueError("fixed-budget runs go through run_robbo_budget")
    if spec.selection == UNIFORM_GRID:
        a1 = sample_anchor(problem, "a1")
        a2 = sample_anchor(problem, "a2")
        target = min_samples_central(problem.delta, ranges_from_anchors(a1, a2))
        return _run_uniform(problem, spec, target - 2, exhaust_budget=False)
    return _run_greedy(problem, spec)


def run_robbo(problem: Problem) -> RunReport:
    """Reference run: central estimate on the uniform candidate grid.

    Terminates with the per-objective tolerances certified, in at most the
    planner's central-estimate count of samples.
    """
    return run_variant(problem, StrategySpec(CENTRAL, UNIFORM_GRID))


def run_robbo_budget(problem: Problem, n_B: int, alpha: float) -> RunReport:
    """Exhaust a fixed sampling budget and report the achieved bands.

    The problem's own tolerances are superseded: the budget and the wanted
    ratio alpha determine the attainable tolerances, which then define the
    estimation coordinates.  The loop runs until the whole budget is spent;
    reaching the guarantee early is flagged, not acted on.
    """
    a1 = sample_anchor(problem, "a1")
    a2 = sample_anchor(problem, "a2")
    limits = budget_tolerances(BudgetSpec(n_B=n_B, alpha=alpha), ranges_from_anchors(a1, a2))
    budget_problem = Problem(delta=limits, backend=problem.backend)
    spec = StrategySpec(CENTRAL, UNIFORM_GRID, FIXED_BUDGET)
    report = _run_uniform(budget_problem, spec, n_B - 2, exhaust_budget=True)

    achieved = report.final_gap
    scale = achieved / CENTRAL_ESTIMATE_GAP_LIMIT
    bands = (limits.delta1 * scale, limits.delta2 * scale)
    early = any(g <= CENTRAL_ESTIMATE_GAP_LIMIT for _, g in report.lambda_trace[:-1])
    return RunReport(
        dataset=report.dataset,
        strategy=spec,
        iterations=report.iterations,
        total_samples=report.total_samples,
        lambda_trace=report.lambda_trace,
        terminated_by=report.terminated_by,
        final_certified_gap=report.final_certified_gap,
        budget_limits=limits,
        budget_bands=bands,
        early_guarantee=early,
    )


def _require_analytical(problem: Problem) -> AnalyticalBackend:
    if not isinstance(problem.backend, AnalyticalBackend):
        raise UnsupportedBaselineError(
            "this baseline needs many constrained solves and runs only on"
            " analytical backends"
        )
    return problem.backend


def _dedup_points(
    delta: ToleranceVec, points: list[ObjectivePoint]
) -> list[ObjectivePoint]:
    """Drop points coinciding in v; keeps the first of each group."""
    t = make_transform(delta)
    decorated = sorted((to_vq(t, p).v, i, p) for i, p in enumerate(points))
    span = decorated[-1][0] - decorated[0][0]
    tol = 1e-9 * span if span > 0 else 0.0
    kept: list[tuple[float, ObjectivePoint]] = []
    for v, _, p in decorated:
        if kept and abs(v - kept[-1][0]) < tol:
            continue
        kept.append((v, p))
    return [p for _, p in kept]


def _sweep_values(start: float, step: float, stop: float) -> list[float]:
    count = int(math.floor((stop - start) / step + 1e-12))
    values = [start + i * step for i in range(count + 1)]
    if values[-1] < stop:
        values.append(stop)
    return values


def run_ec(problem: Problem, delta: ToleranceVec | None = None) -> tuple[Dataset, int]:
    """Constraint-sweep baseline: uniform steps in f1 and in f2, union.

    Consecutive samples then differ by at most one tolerance in each
    objective, which is what a nearest-neighbor front approximation needs.
    """
    backend = _require_analytical(problem)
    delta = delta if delta is not None else problem.delta
    a1, a2 = backend.anchors()
    points = [backend.point_at_f1(f1) for f1 in _sweep_values(a1.z1, delta.delta1, a2.z1)]
    for f2 in _sweep_values(a2.z2, delta.delta2, a1.z2):
        f1 = backend.front_f1(f2)
        points.append(ObjectivePoint(z1=f1, z2=f2))
    dataset = build_dataset(delta, _dedup_points(delta, points))
    return dataset, dataset.size


def run_nbi(problem: Problem, delta: ToleranceVec | None = None) -> tuple[Dataset, int]:
    """Anchor-segment baseline: samples uniform when projected on the segment.

    The projection spacing is the smaller of the two tolerance projections,
    the worst-case-safe choice; front points are recovered by bisection on
    f1 (the projection is strictly increasing along the front).
    """
    backend = _require_analytical(problem)
    delta = delta if delta is not None else problem.delta
    a1, a2 = backend.anchors()
    big_d1, big_d2 = a2.z1 - a1.z1, a1.z2 - a2.z2
    length = math.hypot(big_d1, big_d2)
    beta = math.atan2(big_d2, big_d1)
    spacing = min(delta.delta1 * math.cos(beta), delta.delta2 * math.sin(beta))
    segments = max(int(math.ceil(length / spacing - 1e-12)), 1)

    def projection(f1: float) -> float:
        p = backend.point_at_f1(f1)
        return ((p.z1 - a1.z1) * big_d1 + (p.z2 - a1.z2) * (-big_d2)) / length**2

    lo_all, hi_all = backend.f1_range
    points = [a1]
    for i in range(1, segments):
        t_target = i / segments
        lo, hi = lo_all, hi_all
        for _ in range(200):
            mid = _bisection_midpoint(lo, hi)
            if mid <= lo or mid >= hi:
                break
            if projection(mid) < t_target:
                lo = mid
            else:
                hi = mid
        points.append(backend.point_at_f1(0.5 * (lo + hi)))
    points.append(a2)
    dataset = build_dataset(delta, _dedup_points(delta, points))
    return dataset, dataset.size


def run_convex_combination(problem: Problem, n_B: int) -> Dataset:
    """Weighted-sum scalarization baseline over an even weight grid.

    Minimizes w*f1 + (1-w)*f2 along the front for each weight (coarse grid
    plus bounded 1-D refinement).  On linear or concave fronts the minima
    sit at the anchors, so most weights collapse onto at most two points.
    """
    backend = _require_analytical(problem)
    if n_B < 2:
        raise ValueError(f"need at least 2 weights, got {n_B}")
    lo, hi = backend.f1_range
    coarse = np.linspace(lo, hi, 2001)
    curve = np.array([backend.front_f2(f) for f in coarse])
    points: list[ObjectivePoint] = []
    for w in np.linspace(0.0, 1.0, n_B):
        cost = w * coarse + (1.0 - w) * curve
        i = int(np.argmin(cost))
        best_f1 = float(coarse[i])
        best_cost = float(cost[i])
        if 0 < i < coarse.size - 1:
            res = minimize_scalar(
                lambda f1: w * f1 + (1.0 - w) * backend.front_f2(f1),
                bounds=(float(coarse[i - 1]), float(coarse[i + 1])),
                method="bounded",
            )
            if res.fun < best_cost:
                best_f1, best_cost = float(res.x), float(res.fun)
        points.append(backend.point_at_f1(best_f1))
    return build_dataset(problem.delta, _dedup_points(problem.delta, points))
