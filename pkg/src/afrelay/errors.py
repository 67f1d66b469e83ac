"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of the operation."""


class RegimeError(ValueError):
    """Inputs are valid but outside the asymptotic regime where a formula applies."""


class ConfigError(ValueError):
    """A run configuration is malformed or inconsistent."""


class ConvergenceError(RuntimeError):
    """An iterative routine ran out of budget.

    Carries the best estimate so callers can decide whether it is usable.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
