"""Decision fusion for one bit relayed through independent biased binary channels.

Builds channel systems, evaluates the error-optimal decision rule, computes
exact minimum error probabilities over several routes, quantifies the gain
of fully-biased over unbiased channels at matched error rates, and
cross-validates everything with seeded simulation.
"""

from ._backend import BACKEND as KERNEL_BACKEND
from .decision import (
    DecisionPolicy,
    LikelihoodPair,
    LlrWeights,
    index_to_outcome,
    likelihoods,
    llr_weights,
    map_decide,
    outcome_to_index,
    policy_table,
    policy_table_from_json,
    policy_table_to_json,
)
from .error_analysis import (
    BiasSweep,
    ErrorReport,
    bias_sweep,
    exact_error_probability,
    extreme_bias_floor,
    fully_biased_error,
    identical_error_probability,
    likelihood_vectors,
    llr_rate_constrained_derivative,
    log_identical_error_probability,
    policy_error_probability,
    sweep_to_csv,
)
from .gains import (
    ConvergenceRow,
    GainBounds,
    claim1_check,
    convergence_table,
    convergence_to_csv,
    exact_gain_ratio,
    exact_log_gain,
    gain_bounds,
)
from .model import (
    CanonicalTransform,
    Channel,
    Prior,
    SizeGuardError,
    SystemSpec,
    canonicalize,
    error_rate,
    make_fully_biased_system,
    make_unbiased_system,
    random_system_with_rates,
)
from .montecarlo import SimConfig, SimResult, simulate, simulate_policy_comparison

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "KERNEL_BACKEND",
    # model
    "Prior",
    "Channel",
    "SystemSpec",
    "CanonicalTransform",
    "SizeGuardError",
    "error_rate",
    "canonicalize",
    "make_unbiased_system",
    "make_fully_biased_system",
    "random_system_with_rates",
    # decision
    "LikelihoodPair",
    "LlrWeights",
    "DecisionPolicy",
    "outcome_to_index",
    "index_to_outcome",
    "likelihoods",
    "map_decide",
    "llr_weights",
    "policy_table",
    "policy_table_to_json",
    "policy_table_from_json",
    # error analysis
    "ErrorReport",
    "BiasSweep",
    "exact_error_probability",
    "identical_error_probability",
    "log_identical_error_probability",
    "fully_biased_error",
    "extreme_bias_floor",
    "bias_sweep",
    "llr_rate_constrained_derivative",
    "likelihood_vectors",
    "policy_error_probability",
    "sweep_to_csv",
    # gains
    "GainBounds",
    "ConvergenceRow",
    "gain_bounds",
    "exact_log_gain",
    "exact_gain_ratio",
    "convergence_table",
    "convergence_to_csv",
    "claim1_check",
    # simulation
    "SimConfig",
    "SimResult",
    "simulate",
    "simulate_policy_comparison",
]
