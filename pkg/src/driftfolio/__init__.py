"""Robust constrained portfolio choice under ellipsoidal drift uncertainty."""

from .asymptotics import (
    ConstraintComparison,
    DiagnosticsRow,
    RobustnessReport,
    asymptotic_diagnostics,
    compare_constraint_levels,
    compute_coa_rdr,
    limit_strategy,
)
from .errors import (
    ConvergenceError,
    DegenerateDirectionError,
    DegenerateSpectrumError,
    DriftfolioError,
    InternalConsistencyError,
    KernelMismatchError,
    NotPositiveDefiniteError,
    SingularGeometryError,
    SpecError,
    UtilityRangeError,
    ValidationError,
)
from .geometry import (
    ConstraintGeometry,
    IdentityReport,
    build_constraint_geometry,
    build_difference_matrix,
    check_identities,
)
from .model import InvestorProfile, MarketModel, UncertaintySet
from .oracles import (
    McEstimate,
    brute_force_worst_case,
    mc_estimate_utility,
    mc_expected_utility,
    simulate_terminal_wealth,
)
from .solver import (
    RobustSolution,
    SaddleReport,
    evaluate_g,
    merton_constrained,
    optimal_value_given_mu,
    robust_strategy,
    solve_psi,
    solve_robust,
    verify_saddle_point,
    worst_case_drift,
    worst_case_drift_for_strategy,
)
from .specio import ProblemSpec, bundled_spec_path, load_problem_spec, problem_spec_from_dict
from .spectral import SpectralData, cholesky_factor, spectral_decompose
from .utility import (
    bond_only_optimal,
    certainty_equivalent,
    certainty_equivalent_constant,
    expected_utility_constant,
)

__version__ = "0.1.0"

__all__ = [
    "MarketModel", "InvestorProfile", "UncertaintySet",
    "ConstraintGeometry", "IdentityReport",
    "build_difference_matrix", "build_constraint_geometry", "check_identities",
    "expected_utility_constant", "certainty_equivalent",
    "certainty_equivalent_constant", "bond_only_optimal",
    "SpectralData", "cholesky_factor", "spectral_decompose",
    "RobustSolution", "SaddleReport", "merton_constrained",
    "optimal_value_given_mu", "evaluate_g", "solve_psi", "worst_case_drift",
    "robust_strategy", "worst_case_drift_for_strategy", "solve_robust",
    "verify_saddle_point",
    "RobustnessReport", "DiagnosticsRow", "ConstraintComparison",
    "limit_strategy", "asymptotic_diagnostics", "compute_coa_rdr",
    "compare_constraint_levels",
    "McEstimate", "brute_force_worst_case", "simulate_terminal_wealth",
    "mc_expected_utility", "mc_estimate_utility",
    "ProblemSpec", "load_problem_spec", "problem_spec_from_dict",
    "bundled_spec_path",
    "DriftfolioError", "ValidationError", "SpecError", "SingularGeometryError",
    "NotPositiveDefiniteError", "DegenerateSpectrumError", "KernelMismatchError",
    "ConvergenceError", "DegenerateDirectionError", "UtilityRangeError",
    "InternalConsistencyError",
]
