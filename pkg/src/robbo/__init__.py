"""Bi-objective Pareto front estimation with guaranteed per-objective accuracy.

The front is studied as a scalar function in tolerance-scaled rotated
coordinates, where optimal upper/lower bounds on all fronts consistent with
the samples are available in closed form.  Iterative sampling drives the
worst-case bound gap below the threshold at which a realization meeting the
decision maker's tolerances exists for every candidate on the estimate.
"""

from .algorithms import (
    ALL_GUARANTEE_STRATEGIES,
    FIXED_BUDGET,
    GREEDY_BISECTION,
    GREEDY_MAX_UNCERTAINTY,
    RunReport,
    StrategySpec,
    TOLERANCE_GUARANTEE,
    UNIFORM_GRID,
    run_convex_combination,
    run_ec,
    run_nbi,
    run_robbo,
    run_robbo_budget,
    run_variant,
)
from .bench import (
    SweepRow,
    SweepSpec,
    default_p_grid,
    run_sweep,
    verify_nn_condition,
)
from .bounds import (
    BoundPair,
    Interval,
    WorstSegment,
    bounds_at,
    bounds_on_grid,
    global_error,
    intervals,
    local_error,
    worst_segment,
)
from .errors import (
    DuplicateSampleError,
    InconsistentSampleError,
    InsufficientDataError,
    InvalidToleranceError,
    NonParetoDatasetError,
    OutOfDomainError,
    RobboError,
    SamplerFailureError,
    UnsupportedBaselineError,
)
from .estimator import (
    ANY_ESTIMATE_GAP_LIMIT,
    CENTRAL,
    CENTRAL_ESTIMATE_GAP_LIMIT,
    Estimate,
    LINEAR,
    RealizationReport,
    certified_gap,
    error_bands,
    estimate_at,
    estimate_curve,
    realize,
    realize_point,
    worst_case_interval_error,
)
from .planner import (
    BudgetSpec,
    RangeSpec,
    budget_tolerances,
    max_samples_greedy,
    min_samples_central,
    min_samples_robust,
    q0_offset,
    ranges_from_anchors,
    samples_ec,
    samples_nbi,
    v_span,
)
from .sampler import (
    AnalyticalBackend,
    Backend,
    FrontFamily,
    FunctionFront,
    PluginBackend,
    Problem,
    SampleRequest,
    SampleResult,
    SampleValidation,
    front_value,
    sample_anchor,
    sample_at,
    validate_sample,
)
from .transform import (
    Dataset,
    ObjectivePoint,
    RotatedPoint,
    ToleranceVec,
    Transform,
    build_dataset,
    dataset_from_dict,
    dataset_from_json,
    dataset_to_dict,
    dataset_to_json,
    from_vq,
    make_transform,
    to_vq,
)

__version__ = "0.1.0"
