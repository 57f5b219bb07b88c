"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Operands live in spaces of different dimension."""


class DomainError(ValueError):
    """A point lies outside the domain of the function being evaluated."""


class ConvergenceError(ArithmeticError):
    """A truncated series could not reach the requested tolerance."""
