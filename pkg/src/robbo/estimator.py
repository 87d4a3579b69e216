"""Front estimates, candidate realization, and per-objective error bands.

Two queryable estimates are supported: the central estimate (midpoint of the
optimal bounds, whose worst-case error is half the bound gap and minimal
among all estimates) and the piecewise-linear interpolant of the samples.
Realization maps a candidate picked on an estimate to an actual front point
sharing its v-coordinate; the resulting error vector always splits between
the two objectives in the ratio of the prescribed tolerances.
"""

import math
from dataclasses import dataclass

import numpy as np

from .bounds import Interval, bounds_at, bounds_on_grid, local_error_on_grid
from .errors import InconsistentSampleError
from .sampler import Problem, sample_at
from .transform import (
    DUPLICATE_V_REL_TOL,
    Dataset,
    ObjectivePoint,
    RotatedPoint,
    from_vq,
    make_transform,
)

CENTRAL = "central"
LINEAR = "linear"

# Largest bound gap under which a realization meeting the per-objective
# tolerances exists for any admissible estimate / for the central estimate.
ANY_ESTIMATE_GAP_LIMIT = math.sqrt(2.0)
CENTRAL_ESTIMATE_GAP_LIMIT = 2.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class Estimate:
    """A queryable front approximation over the anchor v-span."""

    dataset: Dataset
    kind: str = CENTRAL

    def __post_init__(self):
        if self.kind not in (CENTRAL, LINEAR):
            raise ValueError(f"kind must be {CENTRAL!r} or {LINEAR!r}, got {self.kind!r}")


def estimate_on_grid(e: Estimate, v: np.ndarray) -> np.ndarray:
    """Estimate values on an array of in-domain v-coordinates."""
    v = np.asarray(v, dtype=float)
    if e.kind == CENTRAL:
        lower, upper = bounds_on_grid(e.dataset, v)
        return 0.5 * (lower + upper)
    return np.interp(v, e.dataset.v, e.dataset.q)


def estimate_at(e: Estimate, v: float) -> RotatedPoint:
    """Estimate value at a single v; interpolates the samples exactly."""
    q = float(estimate_on_grid(e, np.array([v]))[0])
    return RotatedPoint(v=float(v), q=q)


def estimate_curve(e: Estimate, n: int) -> list[tuple[float, float, float, float, float]]:
    """Materialize the estimate on a uniform v-grid spanning the anchors.

    Each row is (v, q, f1, f2, lambda) with lambda the local worst-case
    error at that v.  n = 2 yields exactly the two anchors.
    """
    if n < 2:
        raise ValueError(f"curve needs at least 2 points, got {n}")
    d = e.dataset
    v = np.linspace(d.v[0], d.v[-1], n)
    q = estimate_on_grid(e, v)
    lam = local_error_on_grid(d, v)
    d1, d2 = d.delta.as_tuple()
    f1 = d1 * (v + q) / math.sqrt(2.0)
    f2 = d2 * (q - v) / math.sqrt(2.0)
    return [
        (float(v[i]), float(q[i]), float(f1[i]), float(f2[i]), float(lam[i]))
        for i in range(n)
    ]


def worst_case_interval_error(i: Interval, kind: str) -> float:
    """Largest estimation error the given estimate can commit on an interval.

    Central: (V - |Q|) / 2.  Linear: the same times (1 + |Q|/V); the two
    coincide exactly when Q = 0 and the central one is smaller otherwise.
    """
    gap = max(i.V - abs(i.Q), 0.0)
    if kind == CENTRAL:
        return gap / 2.0
    if kind == LINEAR:
        return (gap / 2.0) * (1.0 + abs(i.Q) / i.V)
    raise ValueError(f"unknown estimate kind {kind!r}")


def certified_gap(d: Dataset, kind: str) -> float:
    """Termination quantity: twice the worst per-interval estimate error.

    For the central estimate this equals the global bound gap; for the
    linear one it is never smaller.  A run may stop, with the per-objective
    tolerances certified, once this drops to 2*sqrt(2).
    """
    dv = np.diff(d.v)
    dq = np.abs(np.diff(d.q))
    gap = np.maximum(dv - dq, 0.0)
    if kind == CENTRAL:
        return float(np.max(gap))
    if kind == LINEAR:
        return float(np.max(gap * (1.0 + dq / dv)))
    raise ValueError(f"unknown estimate kind {kind!r}")


@dataclass(frozen=True)
class RealizationReport:
    """A candidate, its realized front point, and the realization error.

    ``error`` is the candidate-minus-realized vector in objective units.
    ``ratio`` is |error1|/|error2|, which equals delta1/delta2 whenever the
    error is nonzero; it is None (undefined, not 0/0) for a candidate lying
    exactly on the front.
    """

    candidate: ObjectivePoint
    realized: ObjectivePoint
    error: tuple[float, float]
    ratio: float | None

    def to_dict(self) -> dict:
        return {
            "candidate": list(self.candidate.as_tuple()),
            "realized": list(self.realized.as_tuple()),
            "error": [self.error[0], self.error[1]],
            "ratio": self.ratio,
        }


def realize_point(
    problem: Problem,
    candidate: RotatedPoint,
    dataset: Dataset | None = None,
) -> RealizationReport:
    """Realize an arbitrary candidate given in estimation coordinates.

    The front is sampled at the candidate's v, so the error vector is the
    inverse transform of (0, q_hat - q_front): its components are
    delta_i * (q_hat - q_front) / sqrt(2), giving the fixed component ratio.
    When a dataset is supplied, a realized point falling outside its
    optimal bounds (beyond a small scale-free slack) is an error.
    """
    result = sample_at(problem, candidate.v)
    t = problem.delta
    realized = result.z
    d1, d2 = t.as_tuple()
    sqrt2 = math.sqrt(2.0)
    q_front = (realized.z1 / d1 + realized.z2 / d2) / sqrt2

    if dataset is not None:
        slack = DUPLICATE_V_REL_TOL * dataset.span_width
        b = bounds_at(dataset, min(max(candidate.v, dataset.v_span[0]), dataset.v_span[1]))
        if q_front < b.lower - slack or q_front > b.upper + slack:
            raise InconsistentSampleError(
                f"realized q={q_front!r} violates the current bounds"
                f" [{b.lower!r}, {b.upper!r}] at v={candidate.v!r}"
            )

    eps_q = candidate.q - q_front
    eps1 = d1 * eps_q / sqrt2
    eps2 = d2 * eps_q / sqrt2
    ratio = abs(eps1) / abs(eps2) if eps2 != 0.0 else None
    cand_obj = from_vq(make_transform(t), candidate)
    return RealizationReport(
        candidate=cand_obj,
        realized=realized,
        error=(eps1, eps2),
        ratio=ratio,
    )


def realize(e: Estimate, problem: Problem, candidate_v: float) -> RealizationReport:
    """Realize the estimate's own point at candidate_v."""
    candidate = estimate_at(e, candidate_v)
    return realize_point(problem, candidate, dataset=e.dataset)


def error_bands(d: Dataset, v: float) -> tuple[float, float]:
    """Worst-case realization error bands per objective at v.

    Scales the local bound gap back into each objective's units; zero at
    sample coordinates.
    """
    lam = bounds_at(d, v)
    gap = lam.upper - lam.lower
    c = math.sqrt(2.0) / 2.0
    return (d.delta.delta1 * c * gap, d.delta.delta2 * c * gap)
