"""Tolerance-scaled rotation between criterion and estimation coordinates.

The criterion plane (f1, f2) is mapped to estimation coordinates (v, q) by
first normalizing each objective by its error tolerance and then rotating
the scaled axes clockwise by 45 degrees:

    [v, q]^T = (sqrt(2)/2) * [[1, -1], [1, 1]] * diag(1/d1, 1/d2) * [f1, f2]^T

Along any mutually non-dominated set of points, v is strictly increasing and
a continuous front becomes the graph of a function q = h(v) with unit-bounded
slope.  All types here are immutable values; all operations are pure.
"""

from dataclasses import dataclass, field
import json
import math

import numpy as np

from .errors import (
    DuplicateSampleError,
    InsufficientDataError,
    InvalidToleranceError,
    NonParetoDatasetError,
)

# Relative v-distance below which two samples count as one (scale-free dedup).
DUPLICATE_V_REL_TOL = 1e-9

_SQRT2_OVER_2 = math.sqrt(2.0) / 2.0


@dataclass(frozen=True)
class ToleranceVec:
    """Per-objective error tolerances chosen by the decision maker."""

    delta1: float
    delta2: float

    def __post_init__(self):
        for name, value in (("delta1", self.delta1), ("delta2", self.delta2)):
            if not (math.isfinite(value) and value > 0.0):
                raise InvalidToleranceError(
                    f"{name} must be a finite positive real, got {value!r}"
                )

    def as_tuple(self) -> tuple[float, float]:
        return (float(self.delta1), float(self.delta2))


@dataclass(frozen=True)
class ObjectivePoint:
    """A point in criterion coordinates (objective values)."""

    z1: float
    z2: float

    def __post_init__(self):
        if not (math.isfinite(self.z1) and math.isfinite(self.z2)):
            raise ValueError(f"objective point entries must be finite, got {self}")

    def as_tuple(self) -> tuple[float, float]:
        return (float(self.z1), float(self.z2))


@dataclass(frozen=True)
class RotatedPoint:
    """A point in estimation coordinates (dimensionless)."""

    v: float
    q: float

    def __post_init__(self):
        if not (math.isfinite(self.v) and math.isfinite(self.q)):
            raise ValueError(f"rotated point entries must be finite, got {self}")

    def as_tuple(self) -> tuple[float, float]:
        return (float(self.v), float(self.q))


@dataclass(frozen=True)
class Transform:
    """The scaling-plus-rotation map and its exact inverse.

    ``forward`` maps (f1, f2) to (v, q); ``inverse`` undoes it.  The product
    forward @ inverse equals the identity to 1e-12 per entry.
    """

    delta: ToleranceVec
    forward: np.ndarray = field(repr=False)
    inverse: np.ndarray = field(repr=False)


def make_transform(delta: ToleranceVec) -> Transform:
    """Build the tolerance-scaled rotation for the given tolerances."""
    d1, d2 = delta.as_tuple()
    forward = _SQRT2_OVER_2 * np.array([[1.0 / d1, -1.0 / d2], [1.0 / d1, 1.0 / d2]])
    # Closed-form inverse of the scaled rotation; exact up to rounding.
    inverse = np.array([[d1, d1], [-d2, d2]]) / math.sqrt(2.0)
    forward.setflags(write=False)
    inverse.setflags(write=False)
    return Transform(delta=delta, forward=forward, inverse=inverse)


def to_vq(t: Transform, p: ObjectivePoint) -> RotatedPoint:
    """Map a criterion point into estimation coordinates."""
    d1, d2 = t.delta.as_tuple()
    v = _SQRT2_OVER_2 * (p.z1 / d1 - p.z2 / d2)
    q = _SQRT2_OVER_2 * (p.z1 / d1 + p.z2 / d2)
    return RotatedPoint(v=v, q=q)


def from_vq(t: Transform, r: RotatedPoint) -> ObjectivePoint:
    """Map an estimation-coordinate point back to criterion coordinates."""
    d1, d2 = t.delta.as_tuple()
    z1 = d1 * (r.v + r.q) / math.sqrt(2.0)
    z2 = d2 * (r.q - r.v) / math.sqrt(2.0)
    return ObjectivePoint(z1=z1, z2=z2)


@dataclass(frozen=True)
class Dataset:
    """Ordered Pareto front samples in both coordinate systems.

    Samples are sorted by increasing z1 (equivalently increasing v); the
    first and last samples are the anchors minimizing f1 and f2.  Both
    coordinate systems are stored so bound queries are bit-stable.  The
    arrays are read-only; instances are safe to share across threads.
    """

    delta: ToleranceVec
    transform: Transform = field(repr=False)
    z1: np.ndarray = field(repr=False)
    z2: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    q: np.ndarray = field(repr=False)
    xs: tuple = field(repr=False, default=())

    @property
    def size(self) -> int:
        return int(self.v.shape[0])

    @property
    def v_span(self) -> tuple[float, float]:
        """The anchor v-interval (domain of every bound/estimate query)."""
        return (float(self.v[0]), float(self.v[-1]))

    @property
    def span_width(self) -> float:
        return float(self.v[-1] - self.v[0])

    def objective_point(self, i: int) -> ObjectivePoint:
        return ObjectivePoint(z1=float(self.z1[i]), z2=float(self.z2[i]))

    def rotated_point(self, i: int) -> RotatedPoint:
        return RotatedPoint(v=float(self.v[i]), q=float(self.q[i]))

    @property
    def samples(self) -> list[tuple[ObjectivePoint, RotatedPoint]]:
        return [(self.objective_point(i), self.rotated_point(i)) for i in range(self.size)]

    @property
    def anchors(self) -> tuple[ObjectivePoint, ObjectivePoint]:
        return (self.objective_point(0), self.objective_point(self.size - 1))


def build_dataset(
    delta: ToleranceVec,
    points: list[ObjectivePoint],
    xs: list | None = None,
) -> Dataset:
    """Sort, transform and validate a set of front samples.

    Points may arrive in any order; they are ranked by increasing z1.  The
    extremes become the anchors.  Mutual non-dominance is enforced with
    strict comparisons: sampler output is exact for analytical fronts, and
    external samples failing the strict check must surface as errors.
    """
    if len(points) < 2:
        raise InsufficientDataError(
            f"a dataset needs at least the two anchor points, got {len(points)}"
        )
    if xs is not None and len(xs) != len(points):
        raise ValueError("xs must align one-to-one with points")

    t = make_transform(delta)
    z1 = np.array([p.z1 for p in points], dtype=float)
    z2 = np.array([p.z2 for p in points], dtype=float)
    order = np.argsort(z1, kind="stable")
    z1, z2 = z1[order], z2[order]
    xs_sorted = tuple((xs or [None] * len(points))[i] for i in order)

    d1, d2 = delta.as_tuple()
    v = _SQRT2_OVER_2 * (z1 / d1 - z2 / d2)
    q = _SQRT2_OVER_2 * (z1 / d1 + z2 / d2)

    span = float(v[-1] - v[0])
    dup_tol = DUPLICATE_V_REL_TOL * span
    dv = np.diff(v)
    if np.any(np.abs(dv) < dup_tol):
        i = int(np.argmax(np.abs(dv) < dup_tol))
        raise DuplicateSampleError(
            f"samples {i} and {i + 1} coincide in v within {dup_tol:g}"
            f" (v={v[i]!r}, v={v[i + 1]!r})"
        )
    if not (np.all(np.diff(z1) > 0.0) and np.all(np.diff(z2) < 0.0)):
        bad = int(np.argmin((np.diff(z1) > 0.0) & (np.diff(z2) < 0.0)))
        raise NonParetoDatasetError(
            f"samples {bad} and {bad + 1} are not mutually non-dominated:"
            f" ({z1[bad]!r}, {z2[bad]!r}) vs ({z1[bad + 1]!r}, {z2[bad + 1]!r})"
        )

    for arr in (z1, z2, v, q):
        arr.setflags(write=False)
    return Dataset(delta=delta, transform=t, z1=z1, z2=z2, v=v, q=q, xs=xs_sorted)


def dataset_to_dict(d: Dataset) -> dict:
    """Serialize a dataset to the exchange schema (points sorted by z1)."""
    points = []
    for i in range(d.size):
        entry: dict = {"z": [float(d.z1[i]), float(d.z2[i])]}
        if d.xs[i] is not None:
            entry["x"] = list(d.xs[i])
        points.append(entry)
    return {"delta": [float(d.delta.delta1), float(d.delta.delta2)], "points": points}


def dataset_from_dict(payload: dict) -> Dataset:
    """Build a dataset from the exchange schema; input points may be unordered."""
    try:
        d1, d2 = payload["delta"]
        raw = payload["points"]
        points = [ObjectivePoint(z1=float(e["z"][0]), z2=float(e["z"][1])) for e in raw]
        xs = [tuple(float(u) for u in e["x"]) if "x" in e else None for e in raw]
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ValueError(f"malformed dataset payload: {exc}") from exc
    return build_dataset(ToleranceVec(float(d1), float(d2)), points, xs)


def dataset_to_json(d: Dataset) -> str:
    return json.dumps(dataset_to_dict(d))


def dataset_from_json(text: str) -> Dataset:
    return dataset_from_dict(json.loads(text))
