"""Exception types shared across the package."""


class ContractError(ValueError):
    """A caller violated a documented precondition."""


class DomainError(ContractError):
    """Argument outside the domain of a function."""


class QuadratureError(RuntimeError):
    """Quadrature did not reach its tolerance.

    The partial value and error estimate are kept on the exception so that
    callers can decide whether they are usable.
    """

    def __init__(self, message, value=float("nan"), error=float("inf")):
        super().__init__(message)
        self.value = value
        self.error = error


class DivergenceError(QuadratureError):
    """An improper integral or series does not appear to converge."""


class ResourceError(RuntimeError):
    """Request exceeds the configured computational budget or sample size."""
