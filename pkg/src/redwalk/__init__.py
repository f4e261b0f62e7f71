"""Reduced random walks in hyperbolic triangle groups.

Exact arithmetic for the question-mark and interrobang functions, the
closed-form boundary law for PGL2(Z), and a seeded simulator whose
certified brackets can be compared against it.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ConfigError,
    DescentAmbiguityError,
    DomainError,
    InternalInvariantError,
    NonconvergentInputError,
    RedwalkError,
    SingularMatrixError,
)
