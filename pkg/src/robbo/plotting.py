"""Figure rendering for the CLI report paths.

Figures are written to files next to the delimited outputs; no interactive
backend is ever touched.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bounds import bounds_on_grid, local_error_on_grid
from .estimator import Estimate, estimate_on_grid
from .transform import Dataset

_GRID = 512


def _objective_coords(d: Dataset, v: np.ndarray, q: np.ndarray):
    d1, d2 = d.delta.as_tuple()
    s = np.sqrt(2.0)
    return d1 * (v + q) / s, d2 * (q - v) / s


def save_estimate_figure(estimate: Estimate, path: str) -> None:
    """Front estimate with its uncertainty region, plus per-objective bands."""
    d = estimate.dataset
    v = np.linspace(d.v[0], d.v[-1], _GRID)
    lower, upper = bounds_on_grid(d, v)
    q = estimate_on_grid(estimate, v)
    lam = upper - lower

    f1, f2 = _objective_coords(d, v, q)
    f1_lo, f2_lo = _objective_coords(d, v, lower)
    f1_up, f2_up = _objective_coords(d, v, upper)

    fig, (ax, axb) = plt.subplots(2, 1, figsize=(6.4, 7.2), height_ratios=[2, 1])
    ax.fill(
        np.concatenate([f1_lo, f1_up[::-1]]),
        np.concatenate([f2_lo, f2_up[::-1]]),
        color="0.85",
        label="bound region",
    )
    ax.plot(f1, f2, "-", color="tab:red", label=f"{estimate.kind} estimate")
    ax.plot(d.z1, d.z2, "o", color="tab:blue", ms=4, label="samples")
    ax.set_xlabel("f1")
    ax.set_ylabel("f2")
    ax.legend(loc="best", fontsize=8)
    ax.set_title("front estimate")

    c = np.sqrt(2.0) / 2.0
    d1, d2 = d.delta.as_tuple()
    axb.plot(f1, d1 * c * lam, label="band f1")
    axb.plot(f1, d2 * c * lam, label="band f2")
    axb.axhline(d1, color="tab:blue", ls=":", lw=0.8)
    axb.axhline(d2, color="tab:orange", ls=":", lw=0.8)
    axb.set_xlabel("f1")
    axb.set_ylabel("worst-case error")
    axb.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_bounds_figure(d: Dataset, path: str) -> None:
    """Optimal bound envelopes and samples in estimation coordinates."""
    v = np.linspace(d.v[0], d.v[-1], _GRID)
    lower, upper = bounds_on_grid(d, v)
    lam = local_error_on_grid(d, v)

    fig, (ax, axl) = plt.subplots(2, 1, figsize=(6.4, 7.2), height_ratios=[2, 1])
    ax.fill_between(v, lower, upper, color="0.85")
    ax.plot(v, upper, "-", color="tab:green", lw=1, label="upper bound")
    ax.plot(v, lower, "-", color="tab:purple", lw=1, label="lower bound")
    ax.plot(d.v, d.q, "o", color="tab:blue", ms=4, label="samples")
    ax.set_xlabel("v")
    ax.set_ylabel("q")
    ax.legend(loc="best", fontsize=8)
    ax.set_title("optimal bounds")

    axl.plot(v, lam, color="tab:red")
    axl.set_xlabel("v")
    axl.set_ylabel("bound gap")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_sweep_figure(rows, path: str) -> None:
    """Terminal sample counts versus front exponent, one line per strategy."""
    strategies = sorted({r.strategy for r in rows})
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for strat in strategies:
        pts = [(r.p, r.sample_count) for r in rows if r.strategy == strat and r.sample_count]
        if not pts:
            continue
        ps, counts = zip(*sorted(pts))
        ax.semilogx(ps, counts, "o-", ms=3, lw=1, label=strat)
    ax.set_xlabel("front exponent p")
    ax.set_ylabel("samples to guarantee")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
