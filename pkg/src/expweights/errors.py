"""Exception hierarchy.

Numerical gate failures carry a ``gate`` name so the CLI can report which
check tripped.
"""


class ExpWeightsError(Exception):
    gate = "error"


class OverflowDomain(ExpWeightsError, OverflowError):
    """Q(x) left the representable exponent budget."""

    gate = "overflow-domain"


class SingularPoint(ExpWeightsError, ValueError):
    """Evaluation requested at a point where the quantity is undefined."""

    gate = "singular-point"


class BracketFailure(ExpWeightsError, RuntimeError):
    gate = "mrs-bracket"


class QuadratureUnderresolved(ExpWeightsError, RuntimeError):
    gate = "quadrature"


class NearDiagonal(ExpWeightsError, ValueError):
    """The Christoffel-Darboux quotient is unstable for |x - t| this small.

    The directly summed kernel value is kept on ``direct``.
    """

    gate = "near-diagonal"

    def __init__(self, msg, direct=None):
        super().__init__(msg)
        self.direct = direct


class DegenerateSum(ExpWeightsError, ArithmeticError):
    gate = "degenerate-sum"


class IllConditioned(ExpWeightsError, ArithmeticError):
    gate = "ill-conditioned"


class NonFinite(ExpWeightsError, ValueError):
    gate = "non-finite"


class TheoremRangeViolation(ExpWeightsError, ValueError):
    gate = "theorem-range"
