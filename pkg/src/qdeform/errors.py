"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the region where a quantity is defined."""


class ConvergenceError(ArithmeticError):
    """An iterative routine exhausted its budget without converging."""
