"""Two-period budget-constrained reward scheme laboratory.

Evaluate agent behavior and expected performance under any joint cost law
with uniform marginals, compute closed-form optimal reward rules, jointly
optimize rules and FGM dependence, construct the bound-attaining schemes,
and cross-check everything against a seeded Monte Carlo oracle.
"""

from .analytic import (
    REGIME_BOUNDARIES,
    W_HIGH,
    W_LOW,
    OptimalRules,
    Regime,
    ThresholdPerformance,
    fgm_rule_performance,
    fgm_sufficient_performance,
    fgm_sustained_performance,
    objective_partials,
    optimal_rule_iid,
    optimal_second_increment,
    optimal_skip_reward,
    regime,
    skip_reward_unclamped,
)
from .errors import (
    DomainError,
    InfeasibilityError,
    KernelError,
    ParameterError,
    QuadratureError,
    RegimeError,
    SchemeLabError,
)
from .kernels import (
    CostKernel,
    FgmKernel,
    GridDensityKernel,
    IidKernel,
    PurelySufficientKernel,
    PurelySustainedKernel,
    dependence_summary,
    fgm_cdf,
    fgm_conditional_cdf,
    fgm_conditional_mean,
    fgm_conditional_quantile,
    load_grid_kernel,
    make_purely_sufficient_kernel,
    make_purely_sustained_kernel,
    marginal_deviation,
    sample_pairs,
)
from .model import (
    RewardRule,
    SchemeEvaluation,
    agent_period1_decision,
    agent_period2_decision,
    evaluate_scheme,
    expected_surplus_uniform,
    performance_iid,
    period1_threshold_iid,
    upper_bound,
)
from .montecarlo import Counts, SimulationReport, compare_to_analytic, simulate
from .optimize import (
    OptimizationResult,
    SearchConfig,
    SweepRow,
    optimize_fgm,
    optimize_rule_iid,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "REGIME_BOUNDARIES",
    "W_HIGH",
    "W_LOW",
    "CostKernel",
    "Counts",
    "DomainError",
    "FgmKernel",
    "GridDensityKernel",
    "IidKernel",
    "InfeasibilityError",
    "KernelError",
    "OptimalRules",
    "OptimizationResult",
    "ParameterError",
    "PurelySufficientKernel",
    "PurelySustainedKernel",
    "QuadratureError",
    "Regime",
    "RegimeError",
    "RewardRule",
    "SchemeEvaluation",
    "SchemeLabError",
    "SearchConfig",
    "SimulationReport",
    "SweepRow",
    "ThresholdPerformance",
    "agent_period1_decision",
    "agent_period2_decision",
    "compare_to_analytic",
    "dependence_summary",
    "evaluate_scheme",
    "expected_surplus_uniform",
    "fgm_cdf",
    "fgm_conditional_cdf",
    "fgm_conditional_mean",
    "fgm_conditional_quantile",
    "fgm_rule_performance",
    "fgm_sufficient_performance",
    "fgm_sustained_performance",
    "load_grid_kernel",
    "make_purely_sufficient_kernel",
    "make_purely_sustained_kernel",
    "marginal_deviation",
    "objective_partials",
    "optimal_rule_iid",
    "optimal_second_increment",
    "optimal_skip_reward",
    "optimize_fgm",
    "optimize_rule_iid",
    "performance_iid",
    "period1_threshold_iid",
    "regime",
    "sample_pairs",
    "skip_reward_unclamped",
    "simulate",
    "sweep",
    "upper_bound",
]
