"""Two-term reductions of the general Heun recurrence.

The expansion u(z) = sum_n c_n 2F1(alpha, beta; gamma+epsilon+n; z) turns
the four-singular-point equation into a three-term recurrence for the c_n.
This package finds the parameter choices (delta = N+2, q on a degree-(N+1)
polynomial condition, auxiliary shifts e_1..e_N) that collapse the
recurrence to two terms, builds the resulting gamma-function coefficient
closed forms, sums the expansion with exact tail resummation, and certifies
every step against an independent power-series oracle.

Backend selection: hot kernels are compiled with numba when available; set
HEUNX_NUMBA=0 to force the pure-numpy fallback (same code paths, no jit).
"""

from ._jit import JIT_ENABLED, backend_name
from .errors import (DivisionByZeroError, DomainError, HeunxError,
                     NonConvergenceError, NoSolutionError, NumericalError,
                     PoleError, PreconditionError, SingularPointError,
                     ValidationError)
from .evaluator import (detect_truncation, evaluate_expansion,
                        evaluate_expansion_deriv, evaluation_table,
                        forcing_constant, forcing_defect, ode_residual)
from .oracle import (FrobeniusSeries, cross_check, frobenius_coefficients,
                     frobenius_eval)
from .params import (HeunParams, IssueCode, ValidatedHeunParams,
                     ValidationIssue, collect_issues, delta_from_fuchsian,
                     is_nonpos_int, load_params_file, params_from_dict,
                     params_to_dict, require_valid, validate_params)
from .recurrence import (CoefficientSource, CoefficientStream, coeff_P,
                         coeff_Q, coeff_R, recurrence_residual, residual_rows,
                         stream_to_csv, termination_index,
                         three_term_coefficients, two_term_coefficients)
from .reduction import (ConstraintReport, ReductionCase, case_to_dict,
                        degree_claim_defect, delta_for_reduction,
                        identity_lhs, identity_scale, leading_difference,
                        q_candidates_N0, q_candidates_N1, q_candidates_N2,
                        q_for_N0, solve_reduction_general, verify_reduction)
from .special import (EvalResult, EvalStatus, SeriesControl, gauss_2f1,
                      gauss_2f1_deriv, pochhammer)

__version__ = "0.1.0"

__all__ = [
    "CoefficientSource", "CoefficientStream", "ConstraintReport",
    "DivisionByZeroError", "DomainError", "EvalResult", "EvalStatus",
    "FrobeniusSeries", "HeunParams", "HeunxError", "IssueCode",
    "JIT_ENABLED", "NoSolutionError", "NonConvergenceError",
    "NumericalError", "PoleError", "PreconditionError", "ReductionCase",
    "SeriesControl", "SingularPointError", "ValidatedHeunParams",
    "ValidationError", "ValidationIssue", "backend_name", "case_to_dict",
    "coeff_P", "coeff_Q", "coeff_R", "collect_issues", "cross_check",
    "degree_claim_defect", "delta_for_reduction", "delta_from_fuchsian",
    "detect_truncation", "evaluate_expansion", "evaluate_expansion_deriv",
    "evaluation_table", "forcing_constant", "forcing_defect",
    "frobenius_coefficients", "frobenius_eval", "gauss_2f1",
    "gauss_2f1_deriv", "identity_lhs", "identity_scale", "is_nonpos_int",
    "leading_difference", "load_params_file", "ode_residual", "params_from_dict",
    "params_to_dict", "pochhammer", "q_candidates_N0", "q_candidates_N1",
    "q_candidates_N2", "q_for_N0", "recurrence_residual", "require_valid",
    "residual_rows", "solve_reduction_general", "stream_to_csv",
    "termination_index", "three_term_coefficients", "two_term_coefficients",
    "validate_params", "verify_reduction",
]
