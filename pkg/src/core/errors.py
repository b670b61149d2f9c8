"""
Exception hierarchy for the fuzzy-psi algebra
"""


class AlgebraError(ValueError):
    """Base class for every error raised by the algebra layers"""


class ParseError(AlgebraError):
    """Text could not be parsed as a coefficient or label"""


class NotDivisible(AlgebraError):
    """Exact division is not available for the given divisor"""


class NotEpsDivisible(AlgebraError):
    """An element expected to carry a factor of eps does not"""


class InvalidLabel(AlgebraError):
    """A basis label (n, r, m) violates the label constraints"""


class UnsupportedGenerator(AlgebraError):
    """The eps -> 0 adjoint is only defined for the quadratic generators"""


class SectorMismatch(AlgebraError):
    """An element is not supported on the required Ad K0 sector"""


class NonTerminating(AlgebraError):
    """A hypergeometric series does not terminate"""


class InvalidCoupling(AlgebraError):
    """Angular momentum labels violate the coupling constraints"""


class SymbolicPointUnsupported(AlgebraError):
    """The operation needs a numeric (eps, Rh) point"""


class MixedParity(AlgebraError):
    """Support mixes integer and half-integer n"""


class CapExceeded(AlgebraError):
    """Requested label range exceeds the configured hard cap"""


class InconsistentReduction(AlgebraError):
    """Reduced matrix elements differ between m-pairs"""


class SelectionRuleViolation(AlgebraError):
    """A product produced a label outside the coupling selection rules"""
