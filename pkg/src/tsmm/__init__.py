"""Data-driven model order reduction by two-sided moment matching for SISO LTI systems."""

from .benchmark import building_interpolation_sets, building_model
from .estimators import (
    Algorithm1Result,
    EstimateTrace,
    LsEstimate,
    Tolerances,
    UpsilonBResult,
    estimate_cpi,
    estimate_upi,
    estimate_upi_inverse,
    estimate_upsilon_b,
    run_algorithm1,
    run_upsilon_b_experiment,
)
from .generators import (
    AssumptionReport,
    AssumptionViolation,
    GeneratorPair,
    InterpolationSet,
    build_generator_pair,
    check_assumptions,
)
from .interconnect import (
    NoiseSpec,
    Trajectory,
    simulate_d_dynamics,
    simulate_direct,
    simulate_swapped_impulse,
    simulate_two_sided,
)
from .lti import (
    PoleProximityError,
    StateSpaceModel,
    ValidationReport,
    exact_discretize,
    frequency_response,
    matrix_exponential,
    transfer_eval,
    validate_model,
)
from .oracle import (
    MomentMatrices,
    SylvesterUniquenessError,
    exact_moment_matrices,
    solve_sylvester_pi,
    solve_sylvester_upsilon,
)
from .reducer import (
    InvertibilityError,
    MomentMatchReport,
    Provenance,
    ReducedOrderModel,
    build_rom_q_form,
    build_rom_s_form,
    interpolation_points,
    moment_match_report,
)

__version__ = "0.1.0"

__all__ = [
    "Algorithm1Result",
    "AssumptionReport",
    "AssumptionViolation",
    "EstimateTrace",
    "GeneratorPair",
    "InterpolationSet",
    "InvertibilityError",
    "LsEstimate",
    "MomentMatchReport",
    "MomentMatrices",
    "NoiseSpec",
    "PoleProximityError",
    "Provenance",
    "ReducedOrderModel",
    "StateSpaceModel",
    "SylvesterUniquenessError",
    "Tolerances",
    "Trajectory",
    "UpsilonBResult",
    "ValidationReport",
    "build_generator_pair",
    "build_rom_q_form",
    "build_rom_s_form",
    "building_interpolation_sets",
    "building_model",
    "check_assumptions",
    "estimate_cpi",
    "estimate_upi",
    "estimate_upi_inverse",
    "estimate_upsilon_b",
    "exact_discretize",
    "exact_moment_matrices",
    "frequency_response",
    "interpolation_points",
    "matrix_exponential",
    "moment_match_report",
    "run_algorithm1",
    "run_upsilon_b_experiment",
    "simulate_d_dynamics",
    "simulate_direct",
    "simulate_swapped_impulse",
    "simulate_two_sided",
    "solve_sylvester_pi",
    "solve_sylvester_upsilon",
    "transfer_eval",
    "validate_model",
]
