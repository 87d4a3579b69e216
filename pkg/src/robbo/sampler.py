"""Front sampling backends: analytical families, in-memory curves, plugins.

A problem pairs the decision maker's tolerances with a backend able to answer
two kinds of request: the anchor points (the front's extremes minimizing each
objective), and the front point at a prescribed v-coordinate.  Analytical
backends answer the second request exactly, by monotone bisection on f1
along the known curve; external solvers are reached through a one-JSON-line
subprocess protocol and their replies are never trusted blindly.
"""

import json
import math
import os
import shlex
import subprocess
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass

from .bounds import bounds_at
from .errors import (
    InconsistentSampleError,
    OutOfDomainError,
    SamplerFailureError,
)
from .transform import (
    DUPLICATE_V_REL_TOL,
    Dataset,
    ObjectivePoint,
    ToleranceVec,
    make_transform,
    to_vq,
)

# |v - tilde_v| of a returned sample may not exceed this fraction of the span.
V_MATCH_REL_TOL = 1e-8
# Analytical bisection stops at this fraction of the span (double-precision
# floor with margin), or after the iteration cap.
BISECTION_REL_TOL = 1e-10
BISECTION_MAX_ITER = 200

PLUGIN_TIMEOUT_ENV = "ROBBO_PLUGIN_TIMEOUT_S"
PLUGIN_TIMEOUT_DEFAULT_S = 300.0


@dataclass(frozen=True)
class SampleRequest:
    """A scalarized-sample request: hit the front at v = tilde_v."""

    tilde_v: float
    delta: ToleranceVec


@dataclass(frozen=True)
class SampleResult:
    """A front point returned by a backend, with optional decision vector."""

    z: ObjectivePoint
    x: tuple | None = None


def _bisection_midpoint(lo: float, hi: float) -> float:
    """Next probe for a monotone bracket.

    Geometric stepping when the bracket spans orders of magnitude, so roots
    hugging an axis (tiny f1 on extreme fronts) are localized in a few dozen
    probes instead of thousands of arithmetic halvings; plain midpoint once
    the bracket is tight or not strictly positive.
    """
    if lo > 0.0 and hi / lo > 16.0:
        return math.sqrt(lo) * math.sqrt(hi)
    if lo == 0.0 and hi > 0.0:
        return hi * 2.0**-50
    return 0.5 * (lo + hi)


class Backend(ABC):
    """Answers anchor and sample-at-v requests deterministically."""

    name: str = "backend"

    @abstractmethod
    def anchors(self) -> tuple[ObjectivePoint, ObjectivePoint]:
        """The front points minimizing f1 (a1) and f2 (a2)."""

    @abstractmethod
    def solve_scalarized(self, delta: ToleranceVec, tilde_v: float) -> SampleResult:
        """The front point whose v-coordinate equals tilde_v."""


class AnalyticalBackend(Backend):
    """Backend defined by an explicit decreasing curve f2 = g(f1).

    v is strictly increasing in f1 along any such curve, so the scalarized
    sample is found by bisection on f1.  Also powers the uniform-spacing
    baselines, which need many constrained solves.
    """

    @abstractmethod
    def front_f2(self, f1: float) -> float:
        """Value of the front curve at f1."""

    @property
    @abstractmethod
    def f1_range(self) -> tuple[float, float]:
        """Closed f1-interval covered by the front."""

    def anchors(self) -> tuple[ObjectivePoint, ObjectivePoint]:
        lo, hi = self.f1_range
        return (
            ObjectivePoint(z1=lo, z2=self.front_f2(lo)),
            ObjectivePoint(z1=hi, z2=self.front_f2(hi)),
        )

    def point_at_f1(self, f1: float) -> ObjectivePoint:
        return ObjectivePoint(z1=f1, z2=self.front_f2(f1))

    def front_f1(self, f2: float) -> float:
        """f1 at which the curve attains f2; bisection on the decreasing curve."""
        lo, hi = self.f1_range
        g_lo, g_hi = self.front_f2(lo), self.front_f2(hi)
        if not g_hi <= f2 <= g_lo:
            raise OutOfDomainError(f"f2={f2!r} outside [{g_hi!r}, {g_lo!r}]")
        if f2 == g_lo:
            return lo
        if f2 == g_hi:
            return hi
        for _ in range(BISECTION_MAX_ITER):
            mid = _bisection_midpoint(lo, hi)
            if mid <= lo or mid >= hi:
                break
            if self.front_f2(mid) > f2:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def solve_scalarized(self, delta: ToleranceVec, tilde_v: float) -> SampleResult:
        t = make_transform(delta)

        def v_of(f1: float) -> float:
            return to_vq(t, self.point_at_f1(f1)).v

        lo, hi = self.f1_range
        v_lo, v_hi = v_of(lo), v_of(hi)
        if not v_lo < v_hi:
            raise SamplerFailureError(
                f"degenerate front: v({lo}) = {v_lo!r} !< v({hi}) = {v_hi!r}"
            )
        tol = BISECTION_REL_TOL * (v_hi - v_lo)
        if tilde_v <= v_lo + tol and tilde_v >= v_lo - tol:
            return SampleResult(z=self.point_at_f1(lo))
        if tilde_v >= v_hi - tol and tilde_v <= v_hi + tol:
            return SampleResult(z=self.point_at_f1(hi))
        assert v_lo < tilde_v < v_hi, "bisection bracket lost for in-span target"

        best_f1, best_err = lo, abs(v_lo - tilde_v)
        for _ in range(BISECTION_MAX_ITER):
            mid = _bisection_midpoint(lo, hi)
            if mid <= lo or mid >= hi:
                break  # interval exhausted at float resolution
            v_mid = v_of(mid)
            err = abs(v_mid - tilde_v)
            if err < best_err:
                best_f1, best_err = mid, err
            if err <= tol:
                break
            if v_mid < tilde_v:
                lo = mid
            else:
                hi = mid
        return SampleResult(z=self.point_at_f1(best_f1))


@dataclass(frozen=True)
class FrontFamily(AnalyticalBackend):
    """Power-curve front family  f2 = (s^p - f1^p)^(1/p)  on [0, s], s = 10.

    Convex toward the origin for p < 1, linear at p = 1, concave for p > 1.
    The anchors are exactly (0, s) and (s, 0) for every exponent.
    """

    p: float
    scale: float = 10.0

    def __post_init__(self):
        if not (math.isfinite(self.p) and self.p > 0.0):
            raise ValueError(f"front exponent must be positive, got {self.p!r}")

    name = "front-family"

    @property
    def f1_range(self) -> tuple[float, float]:
        return (0.0, self.scale)

    def front_f2(self, f1: float) -> float:
        if not 0.0 <= f1 <= self.scale:
            raise OutOfDomainError(f"f1={f1!r} outside [0, {self.scale}]")
        if f1 == 0.0:
            return self.scale
        if f1 == self.scale:
            return 0.0
        # s * (1 - (f1/s)^p)^(1/p); expm1/log keeps full precision where
        # (f1/s)^p approaches 1 and the plain difference would cancel.
        inner = -math.expm1(self.p * math.log(f1 / self.scale))
        return self.scale * inner ** (1.0 / self.p)

    def front_f1(self, f2: float) -> float:
        if not 0.0 <= f2 <= self.scale:
            raise OutOfDomainError(f"f2={f2!r} outside [0, {self.scale}]")
        if f2 == 0.0:
            return self.scale
        if f2 == self.scale:
            return 0.0
        inner = -math.expm1(self.p * math.log(f2 / self.scale))
        return self.scale * inner ** (1.0 / self.p)


def front_value(fam: FrontFamily, f1: float) -> float:
    """Front curve value f2 at the given f1 (endpoints map exactly)."""
    return fam.front_f2(f1)


class FunctionFront(AnalyticalBackend):
    """In-memory front given by an arbitrary strictly decreasing callable."""

    name = "function-front"

    def __init__(self, front, f1_lo: float, f1_hi: float):
        if not f1_lo < f1_hi:
            raise ValueError(f"need f1_lo < f1_hi, got {f1_lo!r}, {f1_hi!r}")
        self._front = front
        self._range = (float(f1_lo), float(f1_hi))

    @property
    def f1_range(self) -> tuple[float, float]:
        return self._range

    def front_f2(self, f1: float) -> float:
        return float(self._front(f1))


class PluginBackend(Backend):
    """External solver driven over a one-JSON-line-per-call protocol.

    Each request spawns the user command once; the request object is written
    to its stdin as a single JSON line and the first stdout line must be
    ``{"z": [f1, f2], "x": [...]}`` (``x`` optional).  Nonzero exit status,
    malformed output, or exceeding the per-call timeout (environment
    variable ROBBO_PLUGIN_TIMEOUT_S, default 300) is a sampler failure.
    Calls are serialized per instance; distinct problems are independent.
    """

    name = "plugin"

    def __init__(self, command):
        self._argv = shlex.split(command) if isinstance(command, str) else list(command)
        if not self._argv:
            raise ValueError("empty plugin command")
        self._lock = threading.Lock()
        self._anchors: tuple[ObjectivePoint, ObjectivePoint] | None = None

    def _call(self, request: dict) -> SampleResult:
        timeout = float(os.environ.get(PLUGIN_TIMEOUT_ENV, PLUGIN_TIMEOUT_DEFAULT_S))
        payload = json.dumps(request) + "\n"
        with self._lock:
            try:
                proc = subprocess.run(
                    self._argv,
                    input=payload,
                    capture_output=True,
                    text=True,
                    timeout=timeout,
                )
            except subprocess.TimeoutExpired as exc:
                raise SamplerFailureError(
                    f"plugin timed out after {timeout:g}s: {self._argv}"
                ) from exc
            except OSError as exc:
                raise SamplerFailureError(f"plugin could not start: {exc}") from exc
        if proc.returncode != 0:
            raise SamplerFailureError(
                f"plugin exited with status {proc.returncode};"
                f" stderr: {proc.stderr.strip()!r}"
            )
        line = proc.stdout.strip().splitlines()
        try:
            reply = json.loads(line[0]) if line else {}
            z = reply["z"]
            point = ObjectivePoint(z1=float(z[0]), z2=float(z[1]))
            x = tuple(float(u) for u in reply["x"]) if "x" in reply else None
        except (ValueError, KeyError, TypeError, IndexError) as exc:
            raise SamplerFailureError(
                f"plugin reply is not a valid sample line: {proc.stdout.strip()!r}"
            ) from exc
        return SampleResult(z=point, x=x)

    def anchors(self) -> tuple[ObjectivePoint, ObjectivePoint]:
        if self._anchors is None:
            a1 = self._call({"kind": "anchor", "which": "a1"}).z
            a2 = self._call({"kind": "anchor", "which": "a2"}).z
            self._anchors = (a1, a2)
        return self._anchors

    def solve_scalarized(self, delta: ToleranceVec, tilde_v: float) -> SampleResult:
        return self._call(
            {"kind": "sample", "tilde_v": tilde_v, "delta": list(delta.as_tuple())}
        )


@dataclass(frozen=True)
class Problem:
    """A bi-objective problem as seen by the estimation machinery."""

    delta: ToleranceVec
    backend: Backend

    def v_span(self) -> tuple[float, float]:
        """Anchor v-interval under this problem's tolerances."""
        t = make_transform(self.delta)
        a1, a2 = self.backend.anchors()
        return (to_vq(t, a1).v, to_vq(t, a2).v)


def sample_anchor(problem: Problem, which: str) -> ObjectivePoint:
    """Fetch one anchor point ("a1" minimizes f1, "a2" minimizes f2)."""
    if which not in ("a1", "a2"):
        raise ValueError(f"which must be 'a1' or 'a2', got {which!r}")
    a1, a2 = problem.backend.anchors()
    return a1 if which == "a1" else a2


def sample_at(problem: Problem, tilde_v: float) -> SampleResult:
    """Sample the front at the requested v-coordinate.

    The result is checked against the v-match tolerance regardless of the
    backend; a plugin returning a point at the wrong v is an inconsistent
    sample, not silently accepted.
    """
    v_lo, v_hi = problem.v_span()
    span = v_hi - v_lo
    edge = 1e-12 * span
    if tilde_v < v_lo - edge or tilde_v > v_hi + edge:
        raise OutOfDomainError(
            f"tilde_v={tilde_v!r} outside anchor span [{v_lo!r}, {v_hi!r}]"
        )
    tilde_v = min(max(tilde_v, v_lo), v_hi)
    result = problem.backend.solve_scalarized(problem.delta, tilde_v)
    t = make_transform(problem.delta)
    got_v = to_vq(t, result.z).v
    if abs(got_v - tilde_v) > V_MATCH_REL_TOL * span:
        raise InconsistentSampleError(
            f"sample at v={got_v!r} does not match requested tilde_v={tilde_v!r}"
            f" within {V_MATCH_REL_TOL * span:g}"
        )
    return result


@dataclass(frozen=True)
class SampleValidation:
    """Outcome of screening a sample against the current dataset."""

    accepted: bool
    duplicate_of: int | None = None
    conflict_index: int | None = None
    reason: str | None = None


def validate_sample(d: Dataset, s: SampleResult) -> SampleValidation:
    """Screen a new sample before it may enter the dataset.

    Accepted iff its rotated q lies within the current optimal bounds (with
    a small scale-free slack) and it is mutually non-dominated with every
    sample.  A point coinciding in v with an existing sample is accepted as
    a no-op merge.  A rejection names the offending sample.
    """
    r = to_vq(d.transform, s.z)
    span = d.span_width
    dup_tol = DUPLICATE_V_REL_TOL * span

    nearest = int(min(range(d.size), key=lambda i: abs(float(d.v[i]) - r.v)))
    if abs(float(d.v[nearest]) - r.v) < dup_tol:
        return SampleValidation(
            accepted=True,
            duplicate_of=nearest,
            reason="coincides with an existing sample; no-op merge",
        )

    v_lo, v_hi = d.v_span
    if r.v < v_lo - dup_tol or r.v > v_hi + dup_tol:
        return SampleValidation(
            accepted=False,
            reason=f"v={r.v!r} outside the anchor span [{v_lo!r}, {v_hi!r}]",
        )

    b = bounds_at(d, r.v)
    if r.q < b.lower - dup_tol or r.q > b.upper + dup_tol:
        return SampleValidation(
            accepted=False,
            reason=f"q={r.q!r} outside the optimal bounds"
            f" [{b.lower!r}, {b.upper!r}] at v={r.v!r}",
        )

    for i in range(d.size):
        s1, s2 = float(d.z1[i]), float(d.z2[i])
        new_dominates = s.z.z1 <= s1 and s.z.z2 <= s2 and (s.z.z1 < s1 or s.z.z2 < s2)
        old_dominates = s1 <= s.z.z1 and s2 <= s.z.z2 and (s1 < s.z.z1 or s2 < s.z.z2)
        if new_dominates or old_dominates:
            verb = "dominates" if new_dominates else "is dominated by"
            return SampleValidation(
                accepted=False,
                conflict_index=i,
                reason=f"new point {verb} sample {i} at ({s1!r}, {s2!r})",
            )
    return SampleValidation(accepted=True)
