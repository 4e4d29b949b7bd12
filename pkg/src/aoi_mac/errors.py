"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class NumericFailureError(ArithmeticError):
    """A numerical routine could not reach its accuracy target."""


class DivergentAoIError(NumericFailureError):
    """Average AoI is unbounded because every packet fails (PER = 1)."""
