"""Optimal bounds on the set of fronts consistent with the sampled points.

Every continuous front through the data is squeezed between two 1-Lipschitz
envelopes: cones of slope +/-1 emanating from each sample.  For a query v the
envelopes depend only on the two samples bracketing v, so a query costs one
binary search.  The gap between the envelopes is the worst-case estimation
error; its maximum over the domain is the quantity driving termination of
the sampling loops.
"""

from dataclasses import dataclass

import numpy as np

from .errors import OutOfDomainError
from .transform import Dataset, RotatedPoint

# Queries beyond an anchor by more than this (relative to the v-span) are
# errors; within it they clamp, so grids landing on anchors up to rounding
# stay in-domain.
DOMAIN_EDGE_REL_TOL = 1e-12


@dataclass(frozen=True)
class BoundPair:
    """Pointwise envelope values (dimensionless q units)."""

    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower!r} exceeds upper {self.upper!r}")


@dataclass(frozen=True)
class Interval:
    """One open interval between consecutive samples.

    V is the v-width, Q the q-increment.  Mutual non-dominance makes
    |Q| < V in exact arithmetic; equality is tolerated because Q can
    round onto V when the front runs along the dominance-cone edge (the
    worst-case gap is then exactly zero).
    """

    left: RotatedPoint
    right: RotatedPoint

    def __post_init__(self):
        if not self.V > 0.0:
            raise ValueError(f"interval width must be positive, got {self.V!r}")
        if abs(self.Q) > self.V:
            raise ValueError(f"|Q|={abs(self.Q)!r} exceeds V={self.V!r}")

    @property
    def V(self) -> float:
        return self.right.v - self.left.v

    @property
    def Q(self) -> float:
        return self.right.q - self.left.q


@dataclass(frozen=True)
class WorstSegment:
    """Sub-interval on which the bound gap attains its maximum."""

    v_lo: float
    v_hi: float
    lambda_max: float


def intervals(d: Dataset) -> list[Interval]:
    """The consecutive-sample intervals covering the anchor span."""
    return [
        Interval(left=d.rotated_point(i), right=d.rotated_point(i + 1))
        for i in range(d.size - 1)
    ]


def _clamp_domain(d: Dataset, v: float) -> float:
    lo, hi = d.v_span
    slack = DOMAIN_EDGE_REL_TOL * d.span_width
    if v < lo - slack or v > hi + slack:
        raise OutOfDomainError(f"v={v!r} outside anchor span [{lo!r}, {hi!r}]")
    return min(max(v, lo), hi)


def bounds_on_grid(d: Dataset, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized envelope evaluation; v entries must lie in the anchor span.

    Only the two bracketing samples feed each query: cones from farther
    samples are provably looser, so they never bind.
    """
    v = np.asarray(v, dtype=float)
    lo, hi = d.v_span
    slack = DOMAIN_EDGE_REL_TOL * d.span_width
    if np.any(v < lo - slack) or np.any(v > hi + slack):
        bad = v[(v < lo - slack) | (v > hi + slack)][0]
        raise OutOfDomainError(f"v={bad!r} outside anchor span [{lo!r}, {hi!r}]")
    v = np.clip(v, lo, hi)

    idx = np.clip(np.searchsorted(d.v, v, side="left"), 1, d.size - 1)
    vl, ql = d.v[idx - 1], d.q[idx - 1]
    vr, qr = d.v[idx], d.q[idx]
    upper = np.minimum(ql + (v - vl), qr + (vr - v))
    lower = np.maximum(ql - (v - vl), qr - (vr - v))
    # Guard against one-ulp inversions on cone-edge intervals (gap ~ 0).
    lower = np.minimum(lower, upper)
    return lower, upper


def bounds_at(d: Dataset, v: float) -> BoundPair:
    """Tightest upper/lower envelope values at a single v."""
    v = _clamp_domain(d, v)
    lower, upper = bounds_on_grid(d, np.array([v]))
    return BoundPair(lower=float(lower[0]), upper=float(upper[0]))


def local_error(d: Dataset, v: float) -> float:
    """Worst-case estimation error at v: the gap between the envelopes.

    Exactly zero at sample coordinates (the envelopes collapse onto the
    sample, with no floating residue).
    """
    b = bounds_at(d, v)
    return b.upper - b.lower


def local_error_on_grid(d: Dataset, v: np.ndarray) -> np.ndarray:
    lower, upper = bounds_on_grid(d, v)
    return upper - lower


def global_error(d: Dataset) -> float:
    """Maximum envelope gap over the whole anchor span.

    Equals the largest V - |Q| over the consecutive-sample intervals; no
    grid is involved.
    """
    dv = np.diff(d.v)
    dq = np.diff(d.q)
    return float(np.max(np.maximum(dv - np.abs(dq), 0.0)))


def worst_segment(i: Interval) -> WorstSegment:
    """Where inside an interval the envelope gap peaks.

    The gap is constant and maximal on a closed sub-interval centered at the
    midpoint and shifted by Q/2; it collapses to the midpoint when Q = 0.
    """
    mid = (i.left.v + i.right.v) / 2.0
    a = mid + i.Q / 2.0
    b = mid - i.Q / 2.0
    return WorstSegment(
        v_lo=min(a, b),
        v_hi=max(a, b),
        lambda_max=max(i.V - abs(i.Q), 0.0),
    )
