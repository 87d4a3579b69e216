"""Closed-form sample-count planning and budget-to-tolerance inversion.

All counts include the two anchor points.  Inputs are the objective ranges
spanned by the anchors (Delta1, Delta2) and the tolerances (delta1, delta2);
every formula reduces to the anchor v-span V_a = (sqrt(2)/2) *
(Delta1/delta1 + Delta2/delta2).  Degenerate fronts (either range zero) are
fully described by their anchors, so every count collapses to 2.
"""

import math
from dataclasses import dataclass

from .errors import InvalidToleranceError
from .transform import ObjectivePoint, ToleranceVec

_SQRT2 = math.sqrt(2.0)
_TWO_SQRT2 = 2.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class RangeSpec:
    """Objective ranges spanned by the anchor points."""

    Delta1: float
    Delta2: float

    def __post_init__(self):
        if not (self.Delta1 >= 0.0 and self.Delta2 >= 0.0):
            raise ValueError(f"ranges must be non-negative, got {self}")

    @property
    def degenerate(self) -> bool:
        return self.Delta1 == 0.0 or self.Delta2 == 0.0


@dataclass(frozen=True)
class BudgetSpec:
    """A fixed sampling budget and the wanted tolerance ratio delta1/delta2."""

    n_B: int
    alpha: float

    def __post_init__(self):
        if self.n_B < 2:
            raise ValueError(f"budget must cover at least the anchors, got {self.n_B}")
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise ValueError(f"alpha must be a positive real, got {self.alpha!r}")


def ranges_from_anchors(a1: ObjectivePoint, a2: ObjectivePoint) -> RangeSpec:
    return RangeSpec(Delta1=a2.z1 - a1.z1, Delta2=a1.z2 - a2.z2)


def _ceil(x: float) -> int:
    # Relative slack so values meant to be integers do not round up on dust.
    return math.ceil(x - 1e-12 * max(1.0, abs(x)))


def _normalized_load(delta: ToleranceVec, ranges: RangeSpec) -> float:
    return ranges.Delta1 / delta.delta1 + ranges.Delta2 / delta.delta2


def v_span(delta: ToleranceVec, ranges: RangeSpec) -> float:
    """Length of the anchor v-interval."""
    return (_SQRT2 / 2.0) * _normalized_load(delta, ranges)


def min_samples_robust(delta: ToleranceVec, ranges: RangeSpec) -> int:
    """Samples needed so ANY admissible estimate meets the tolerances.

    Evenly allocated samples at this count bring every bound gap to at most
    sqrt(2), which is necessary and sufficient in the worst case.
    """
    if ranges.degenerate:
        return 2
    return max(_ceil(_normalized_load(delta, ranges) / 2.0) + 1, 2)


def min_samples_central(delta: ToleranceVec, ranges: RangeSpec) -> int:
    """Samples needed when the central estimate is used (half the gap bites)."""
    if ranges.degenerate:
        return 2
    return max(_ceil(_normalized_load(delta, ranges) / 4.0) + 1, 2)


def max_samples_greedy(delta: ToleranceVec, ranges: RangeSpec) -> int:
    """Worst-case samples for greedy midpoint bisection with central estimate.

    The worst-case gap halves only when every interval has been bisected
    (one epoch); epochs double the sample count, so the bound exceeds the
    uniform-grid count unless V_a / (2*sqrt(2)) is a power of two.
    """
    if ranges.degenerate:
        return 2
    va = v_span(delta, ranges)
    if va <= _TWO_SQRT2:
        return 2
    epochs = _ceil(math.log2(va / _TWO_SQRT2))
    return 2 + (1 << epochs) - 1


def samples_ec(delta: ToleranceVec, ranges: RangeSpec) -> int:
    """Worst-case count for the constraint-sweep baseline.

    Sweeping each objective in steps of its tolerance (both sweeps, union)
    is what a nearest-neighbor approximation needs to certify the same
    per-objective accuracy.
    """
    if ranges.degenerate:
        return 2
    return max(_ceil(_normalized_load(delta, ranges)) + 1, 2)


def samples_nbi(delta: ToleranceVec, ranges: RangeSpec) -> int:
    """Worst-case count for uniform sampling along the anchor segment.

    With alpha = delta1/delta2 and gamma = Delta1/Delta2, the projection
    spacing is limited by the smaller of the two tolerance projections,
    which inflates one term unless alpha * gamma = 1 (then it matches the
    constraint-sweep count).
    """
    if ranges.degenerate:
        return 2
    if not (delta.delta2 > 0.0 and ranges.Delta2 > 0.0):
        raise InvalidToleranceError("ratios require positive delta2 and Delta2")
    alpha = delta.delta1 / delta.delta2
    gamma = ranges.Delta1 / ranges.Delta2
    ag = alpha * gamma
    if abs(ag - 1.0) <= 1e-12:
        return samples_ec(delta, ranges)
    t1 = ranges.Delta1 / delta.delta1
    t2 = ranges.Delta2 / delta.delta2
    if ag > 1.0:
        return max(_ceil(t1 * ag + t2) + 1, 2)
    return max(_ceil(t1 + t2 / ag) + 1, 2)


def budget_tolerances(b: BudgetSpec, ranges: RangeSpec) -> ToleranceVec:
    """Attainable per-objective worst-case guarantees for a fixed budget.

    Inverts the central-estimate count relation under even allocation; the
    returned tolerances keep exactly the requested ratio alpha.
    """
    d1 = (ranges.Delta1 + b.alpha * ranges.Delta2) / (4.0 * (b.n_B - 1))
    return ToleranceVec(delta1=d1, delta2=d1 / b.alpha)


def q0_offset(delta_pct1: float, delta_pct2: float) -> float:
    """Anchor q-offset of the power-curve family under percentage tolerances.

    Percentages are fractions of each objective's range (0.015 for 1.5%).
    Equal percentages put both anchors at the same q; swapping them negates
    the offset.
    """
    if not (delta_pct1 > 0.0 and delta_pct2 > 0.0):
        raise InvalidToleranceError("percentages must be positive")
    return (_SQRT2 / 2.0) * (1.0 / delta_pct1 - 1.0 / delta_pct2)
