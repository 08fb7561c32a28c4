"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the admissible parameter range."""


class NumericError(ArithmeticError):
    """A numerical routine failed (non-convergence, NaN, indefinite matrix)."""
