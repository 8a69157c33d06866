"""Orthogonal polynomials and weighted inequalities for exponential weights
w = exp(-Q) of Freud and Erdos type."""

from .errors import (BracketFailure, DegenerateSum, ExpWeightsError, IllConditioned,
                     NearDiagonal, NonFinite, OverflowDomain, QuadratureUnderresolved,
                     SingularPoint, TheoremRangeViolation)
from .harness import (NormConfig, verify_bernstein, verify_lemma27,
                      verify_restricted_range, verify_vp_theorem, weighted_norm)
from .mrs import MrsTable, growth_exponent, lemma21_report, lemma26_fit, mrs_number
from .operators import (TestFunction, cd_kernel, christoffel, christoffel_oracle,
                        default_suite, fourier_coeffs, partial_sum, verify_prop32,
                        vp_mean)
from .orthopoly import (RecurrenceTable, build_recurrence, eval_weighted,
                        orthonormality_residual, verify_34, weighted_basis)
from .reports import RatioReport
from .weights import WeightSpec, class_report, q_jet, q_value, t_func, weight_eval

__version__ = "0.1.0"
