"""Benchmark sweep over the power-curve front family.

Runs every configured strategy across a grid of front exponents in both
tolerance modes (equal 1.5%/1.5% or skewed 1%/3% of the anchor ranges) and
tabulates the terminal sample counts.  Rows are keyed by (exponent,
strategy) and identical specs reproduce identical tables byte for byte.
"""

import json
from dataclasses import dataclass

import numpy as np

from .algorithms import ALL_GUARANTEE_STRATEGIES, StrategySpec, run_variant
from .errors import RobboError
from .planner import ranges_from_anchors
from .sampler import FrontFamily, Problem
from .transform import Dataset, ToleranceVec

TOLERANCE_MODES = {
    "equal": (0.015, 0.015),
    "skew": (0.01, 0.03),
}

P_RANGE = (0.01, 7.0)
DEFAULT_P_COUNT = 40


def default_p_grid(n: int = DEFAULT_P_COUNT) -> tuple[float, ...]:
    """Log-spaced exponent grid resolving the near-linear transition."""
    lo, hi = P_RANGE
    return tuple(float(p) for p in np.logspace(np.log10(lo), np.log10(hi), n))


@dataclass(frozen=True)
class SweepSpec:
    """What the sweep runs: exponents, tolerance mode, strategies."""

    p_values: tuple[float, ...]
    tolerance_mode: str
    strategies: tuple[StrategySpec, ...] = ALL_GUARANTEE_STRATEGIES

    def __post_init__(self):
        if not self.p_values:
            raise ValueError("sweep needs at least one exponent")
        if not self.strategies:
            raise ValueError("sweep needs at least one strategy")
        if self.tolerance_mode not in TOLERANCE_MODES:
            raise ValueError(
                f"unknown tolerance mode {self.tolerance_mode!r};"
                f" expected one of {sorted(TOLERANCE_MODES)}"
            )

    def to_dict(self) -> dict:
        return {
            "p_values": list(self.p_values),
            "tolerance_mode": self.tolerance_mode,
            "strategies": [s.label for s in self.strategies],
        }


@dataclass(frozen=True)
class SweepRow:
    p: float
    strategy: str
    sample_count: int | None
    terminated_by: str
    error: str = ""


def problem_for(p: float, mode: str) -> Problem:
    """Family problem with tolerances resolved from the anchor ranges."""
    pct1, pct2 = TOLERANCE_MODES[mode]
    backend = FrontFamily(p=p)
    a1, a2 = backend.anchors()
    ranges = ranges_from_anchors(a1, a2)
    delta = ToleranceVec(delta1=pct1 * ranges.Delta1, delta2=pct2 * ranges.Delta2)
    return Problem(delta=delta, backend=backend)


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    """One run per (exponent, strategy); failures land in their row."""
    rows = []
    for p in spec.p_values:
        for strat in spec.strategies:
            try:
                report = run_variant(problem_for(p, spec.tolerance_mode), strat)
                rows.append(
                    SweepRow(
                        p=p,
                        strategy=strat.label,
                        sample_count=report.total_samples,
                        terminated_by=report.terminated_by,
                    )
                )
            except RobboError as exc:
                rows.append(
                    SweepRow(
                        p=p,
                        strategy=strat.label,
                        sample_count=None,
                        terminated_by="failed",
                        error=str(exc),
                    )
                )
    rows.sort(key=lambda r: (r.p, r.strategy))
    return rows


def sweep_to_csv(rows: list[SweepRow]) -> str:
    lines = ["p,strategy,sample_count,terminated_by,error"]
    for r in rows:
        count = "" if r.sample_count is None else str(r.sample_count)
        err = r.error.replace(",", ";").replace("\n", " ")
        lines.append(f"{r.p:.17g},{r.strategy},{count},{r.terminated_by},{err}")
    return "\n".join(lines) + "\n"


def sweep_spec_to_json(spec: SweepSpec) -> str:
    return json.dumps(spec.to_dict(), indent=2) + "\n"


def verify_nn_condition(dataset: Dataset, delta: ToleranceVec) -> bool:
    """Whether every consecutive pair is within one tolerance per objective.

    A 1e-12 relative slack absorbs float dust from curve evaluation; the
    check is otherwise exact.
    """
    d1 = np.abs(np.diff(dataset.z1))
    d2 = np.abs(np.diff(dataset.z2))
    s = 1.0 + 1e-12
    return bool(np.all(d1 <= delta.delta1 * s) and np.all(d2 <= delta.delta2 * s))
