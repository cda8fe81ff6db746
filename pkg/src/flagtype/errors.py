"""Exception hierarchy for the flagtype package."""


class FlagTypeError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(FlagTypeError):
    """Operands have incompatible shapes or ranks."""


class ValidationError(FlagTypeError):
    """Input fails a structural invariant (determinant, finiteness, ...)."""


class NotRegular(FlagTypeError):
    """Element has eigenvalue-modulus ties; no unique attractor flag."""


class MembershipUndecidable(FlagTypeError):
    """Membership has no decision procedure for this semigroup variant."""


class NoRegularWordFound(FlagTypeError):
    """Sampling budget exhausted without producing a regular word."""


class RejectionBudgetExhausted(FlagTypeError):
    """Constrained word sampling ran out of proposal attempts."""


class ConfigError(FlagTypeError):
    """Run configuration file is malformed or inconsistent."""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


class NumericFailure(FlagTypeError):
    """A linear-algebra routine failed to converge or returned non-finite data."""
