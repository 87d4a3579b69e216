"""Command-line entry point.

Subcommands: plan (closed-form counts), estimate (run a strategy against a
front family or plugin), realize (map a candidate to an actual front point),
bounds (export the bound envelopes on a grid), bench (strategy sweep).
Report paths write delimited data plus a rendered figure alongside, unless
--no-plot is given.  Exit codes: 0 success, 1 domain error, 2 usage error;
every error path prints one {"error": ...} JSON line on stderr.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .algorithms import (
    GREEDY_BISECTION,
    GREEDY_MAX_UNCERTAINTY,
    StrategySpec,
    UNIFORM_GRID,
    run_robbo_budget,
    run_variant,
)
from .bounds import bounds_on_grid
from .errors import RobboError
from .estimator import CENTRAL, Estimate, LINEAR, estimate_curve, estimate_on_grid, realize
from .planner import (
    BudgetSpec,
    RangeSpec,
    budget_tolerances,
    max_samples_greedy,
    min_samples_central,
    min_samples_robust,
    q0_offset,
    samples_ec,
    samples_nbi,
    v_span,
)
from .sampler import FrontFamily, PluginBackend, Problem, sample_anchor
from .transform import ToleranceVec, dataset_from_json

STRATEGY_LABELS = {
    "central-uniform": StrategySpec(CENTRAL, UNIFORM_GRID),
    "central-bisection": StrategySpec(CENTRAL, GREEDY_BISECTION),
    "linear-uniform": StrategySpec(LINEAR, UNIFORM_GRID),
    "linear-bisection": StrategySpec(LINEAR, GREEDY_BISECTION),
    "linear-maxu": StrategySpec(LINEAR, GREEDY_MAX_UNCERTAINTY),
}


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(json.dumps({"error": message}), file=sys.stderr)
        self.print_usage(sys.stderr)
        raise SystemExit(2)


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated values, got {text!r}")
    return (float(parts[0]), float(parts[1]))


def _front_exponent(text: str) -> float:
    body = text.split("=", 1)[1] if text.startswith("p=") else text
    return float(body)


def _backend_from(args):
    if getattr(args, "front", None) is not None:
        return FrontFamily(p=args.front)
    if getattr(args, "plugin", None) is not None:
        return PluginBackend(args.plugin)
    raise _UsageError("a sampling backend is required: pass --front or --plugin")


def _resolve_delta(args, backend) -> ToleranceVec:
    if args.delta is not None:
        return ToleranceVec(*args.delta)
    if args.delta_pct is not None:
        a1, a2 = backend.anchors()
        return ToleranceVec(
            delta1=args.delta_pct[0] * (a2.z1 - a1.z1),
            delta2=args.delta_pct[1] * (a1.z2 - a2.z2),
        )
    raise _UsageError("tolerances are required: pass --delta or --delta-pct")


def cmd_plan(args) -> int:
    ranges = RangeSpec(Delta1=args.ranges[0], Delta2=args.ranges[1])
    out: dict = {"ranges": list(args.ranges)}
    if args.budget is not None:
        if args.alpha is None:
            raise _UsageError("--budget needs --alpha")
        spec = BudgetSpec(n_B=args.budget, alpha=args.alpha)
        delta = budget_tolerances(spec, ranges)
        out["budget"] = args.budget
        out["alpha"] = args.alpha
        out["budget_tolerances"] = list(delta.as_tuple())
    elif args.delta is not None:
        delta = ToleranceVec(*args.delta)
    else:
        raise _UsageError("pass --delta d1,d2 or --budget N --alpha A")
    out["delta"] = list(delta.as_tuple())
    out["v_span"] = v_span(delta, ranges)
    out["min_samples_robust"] = min_samples_robust(delta, ranges)
    out["min_samples_central"] = min_samples_central(delta, ranges)
    out["max_samples_greedy"] = max_samples_greedy(delta, ranges)
    out["samples_ec"] = samples_ec(delta, ranges)
    out["samples_nbi"] = samples_nbi(delta, ranges)
    if args.delta_pct is not None:
        out["q0_offset"] = q0_offset(*args.delta_pct)
    print(json.dumps(out, indent=2))
    return 0


def cmd_estimate(args) -> int:
    backend = _backend_from(args)
    if args.budget is not None:
        if args.alpha is None:
            raise _UsageError("--budget needs --alpha")
        # Tolerances are derived from the budget; any provided ones are
        # only a placeholder for the problem object.
        provisional = ToleranceVec(*args.delta) if args.delta else ToleranceVec(1.0, 1.0)
        problem = Problem(delta=provisional, backend=backend)
        report = run_robbo_budget(problem, args.budget, args.alpha)
    else:
        delta = _resolve_delta(args, backend)
        problem = Problem(delta=delta, backend=backend)
        spec = STRATEGY_LABELS.get(args.strategy)
        if spec is None:
            raise _UsageError(
                f"unknown strategy {args.strategy!r};"
                f" choose from {sorted(STRATEGY_LABELS)}"
            )
        report = run_variant(problem, spec)

    payload = json.dumps(report.to_dict(), indent=2)
    print(payload)
    if args.out is not None:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "report.json").write_text(payload + "\n")
        est = Estimate(dataset=report.dataset, kind=report.strategy.estimate_kind)
        rows = estimate_curve(est, args.grid)
        lines = ["v,q,f1,f2,lambda"]
        lines += [",".join(_fmt(u) for u in row) for row in rows]
        (outdir / "curve.csv").write_text("\n".join(lines) + "\n")
        if not args.no_plot:
            from .plotting import save_estimate_figure

            save_estimate_figure(est, str(outdir / "front.png"))
    return 0


def cmd_realize(args) -> int:
    dataset = dataset_from_json(Path(args.dataset).read_text())
    backend = _backend_from(args)
    problem = Problem(delta=dataset.delta, backend=backend)
    est = Estimate(dataset=dataset, kind=args.kind)
    if args.v is not None:
        v = args.v
    elif args.f1 is not None:
        v = _v_for_f1(est, args.f1)
    else:
        raise _UsageError("pass a candidate via --v or --f1")
    report = realize(est, problem, v)
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def _v_for_f1(est: Estimate, f1_target: float) -> float:
    """v-coordinate at which the estimate curve attains the given f1."""
    d = est.dataset
    lo, hi = d.v_span
    d1 = d.delta.delta1
    s = 2.0**0.5

    def f1_at(v: float) -> float:
        q = float(estimate_on_grid(est, np.array([v]))[0])
        return d1 * (v + q) / s

    f_lo, f_hi = f1_at(lo), f1_at(hi)
    if not (min(f_lo, f_hi) <= f1_target <= max(f_lo, f_hi)):
        raise _UsageError(
            f"--f1 {f1_target!r} outside the estimate's range [{f_lo!r}, {f_hi!r}]"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f1_at(mid) < f1_target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def cmd_bounds(args) -> int:
    dataset = dataset_from_json(Path(args.dataset).read_text())
    v = np.linspace(dataset.v[0], dataset.v[-1], args.grid)
    lower, upper = bounds_on_grid(dataset, v)
    lam = upper - lower
    d1, d2 = dataset.delta.as_tuple()
    s = 2.0**0.5
    lines = ["v,q_lower,q_upper,lambda,f1_lower,f2_lower,f1_upper,f2_upper"]
    for i in range(v.size):
        f1_lo, f2_lo = d1 * (v[i] + lower[i]) / s, d2 * (lower[i] - v[i]) / s
        f1_up, f2_up = d1 * (v[i] + upper[i]) / s, d2 * (upper[i] - v[i]) / s
        lines.append(
            ",".join(
                _fmt(u)
                for u in (v[i], lower[i], upper[i], lam[i], f1_lo, f2_lo, f1_up, f2_up)
            )
        )
    text = "\n".join(lines) + "\n"
    if args.out is not None:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        if not args.no_plot:
            from .plotting import save_bounds_figure

            save_bounds_figure(dataset, str(out.with_suffix(".png")))
    else:
        sys.stdout.write(text)
    return 0


def cmd_bench(args) -> int:
    strategies = bench_mod.ALL_GUARANTEE_STRATEGIES
    if args.strategies is not None:
        try:
            strategies = tuple(STRATEGY_LABELS[s] for s in args.strategies.split(","))
        except KeyError as exc:
            raise _UsageError(f"unknown strategy {exc.args[0]!r}") from exc
    spec = bench_mod.SweepSpec(
        p_values=bench_mod.default_p_grid(args.p_grid),
        tolerance_mode=args.mode,
        strategies=strategies,
    )
    rows = bench_mod.run_sweep(spec)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "sweep.csv").write_text(bench_mod.sweep_to_csv(rows))
    (outdir / "sweep.spec.json").write_text(bench_mod.sweep_spec_to_json(spec))
    if not args.no_plot:
        from .plotting import save_sweep_figure

        save_sweep_figure(rows, str(outdir / "sweep.png"))
    return 0


def _add_backend_flags(p):
    p.add_argument("--front", type=_front_exponent, metavar="p=VAL",
                   help="analytical power-curve family with the given exponent")
    p.add_argument("--plugin", metavar="CMD",
                   help="external sampler command (one JSON line per call)")


def build_parser() -> _Parser:
    parser = _Parser(prog="robbo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="closed-form sample counts and budget tolerances")
    p.add_argument("--delta", type=_pair, metavar="D1,D2")
    p.add_argument("--delta-pct", type=_pair, metavar="P1,P2",
                   help="percentage tolerances (fractions), used for the q-offset")
    p.add_argument("--ranges", type=_pair, metavar="R1,R2", required=True)
    p.add_argument("--budget", type=int)
    p.add_argument("--alpha", type=float)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("estimate", help="run an estimation strategy to termination")
    _add_backend_flags(p)
    p.add_argument("--delta", type=_pair, metavar="D1,D2")
    p.add_argument("--delta-pct", type=_pair, metavar="P1,P2",
                   help="tolerances as fractions of the anchor ranges")
    p.add_argument("--strategy", default="central-uniform",
                   help=f"one of {sorted(STRATEGY_LABELS)}")
    p.add_argument("--budget", type=int, help="fixed sampling budget")
    p.add_argument("--alpha", type=float, help="wanted tolerance ratio for --budget")
    p.add_argument("--grid", type=int, default=512, help="curve export grid size")
    p.add_argument("--out", help="directory for report.json, curve.csv and the figure")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("realize", help="realize a candidate from a stored dataset")
    p.add_argument("--dataset", required=True)
    _add_backend_flags(p)
    p.add_argument("--v", type=float, help="candidate v-coordinate")
    p.add_argument("--f1", type=float, help="candidate f1, converted through the estimate")
    p.add_argument("--kind", choices=[CENTRAL, LINEAR], default=CENTRAL)
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("bounds", help="export bound envelopes on a uniform grid")
    p.add_argument("--dataset", required=True)
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--out", help="CSV path; a figure lands next to it")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("bench", help="strategy sweep over the front family")
    p.add_argument("--mode", choices=sorted(bench_mod.TOLERANCE_MODES), required=True)
    p.add_argument("--p-grid", type=int, default=bench_mod.DEFAULT_P_COUNT)
    p.add_argument("--strategies", help="comma-separated strategy labels")
    p.add_argument("--out", required=True)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_bench)
    return parser


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except _UsageError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2
    except (RobboError, ValueError, OSError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 1


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
