"""Moment states of constrained systems and their gauge flow."""
from .basis import CommutantBasis, commutant_generators, enumerate_commutant_basis
from .checks import (cauchy_schwarz_check, check_almost_positive, covariance,
                     frame_incompatibility_check, nonpositivity_witness,
                     uncertainty_product_check)
from .extension import ConstraintExtension
from .flow import Trajectory, classical_limit_check, evolve, gauge_flow_rhs, gauge_generator, step_schedule
from .gaussian import gaussian_moments, gaussian_state
from .matrix import MatrixPlan, MomentMatrix, moment_matrix, positivity_on_commutant
from .state import (MomentState, NumericPlan, SymbolicMomentState, extend_from_reduced,
                    moment_symbol)

__all__ = [
    "CommutantBasis", "commutant_generators", "enumerate_commutant_basis",
    "cauchy_schwarz_check", "check_almost_positive", "covariance",
    "frame_incompatibility_check", "nonpositivity_witness", "uncertainty_product_check",
    "ConstraintExtension", "Trajectory", "classical_limit_check", "evolve",
    "gauge_flow_rhs", "gauge_generator", "step_schedule", "gaussian_moments", "gaussian_state",
    "MatrixPlan", "MomentMatrix", "moment_matrix", "positivity_on_commutant",
    "MomentState", "NumericPlan", "SymbolicMomentState", "extend_from_reduced",
    "moment_symbol",
]
