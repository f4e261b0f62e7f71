"""Exception hierarchy shared by all modules."""


class RedwalkError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RedwalkError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularMatrixError(RedwalkError, ArithmeticError):
    """Exact Gaussian elimination found no nonzero pivot."""


class ConfigError(RedwalkError, ValueError):
    """A triangle configuration violates the angle axiom.

    ``pair`` names the offending pair of line indices (1-based) when the
    failure is pairwise.
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class DescentAmbiguityError(RedwalkError):
    """A separation test fell inside the tolerance band."""


class NonconvergentInputError(RedwalkError):
    """A real-argument stream ran out of budget before reaching the target width."""


class InternalInvariantError(RedwalkError, AssertionError):
    """An internal consistency check failed; indicates a bug, not bad input."""
