"""Two-period testing-stigma game: equilibrium chain, welfare analysis,
and an agent-based cross-check, with a policy CLI on top."""

from .distributions import (
    DistributionSpec,
    QuadratureError,
    cdf,
    integrate,
    mean,
    partial_expectation,
    piecewise_linear_cdf,
    sample,
    uniform,
)
from .signaling import (
    AssumptionReport,
    AssumptionViolation,
    ModelParams,
    Period2Outcome,
    best_response_interact,
    best_response_test,
    check_assumptions,
    continuation_values,
    period2_outcome,
    pointwise_continuation,
    stigma_level,
    testing_rates,
    testing_threshold,
)
from .coordination import (
    Period1Outcome,
    high_risk_fraction,
    hot_fraction,
    hot_threshold,
    pair_outcome,
    period1_outcome,
)
from .welfare import (
    OptimizeResult,
    PolicyDecomposition,
    PresentBiasLoss,
    SweepRow,
    WelfareReport,
    decomposition,
    evaluate_point,
    first_best_benchmark,
    optimize,
    present_bias_loss,
    sweep,
    welfare,
)
from .montecarlo import (
    ConvergenceRow,
    SimConfig,
    SimResult,
    analytic_targets,
    convergence_report,
    simulate,
)

__version__ = "0.1.0"
