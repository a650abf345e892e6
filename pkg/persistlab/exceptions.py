class PersistlabError(Exception):
    """Base exception for persistence pipeline errors."""

    pass


class InvalidParametersError(PersistlabError):
    """Raised when user-supplied parameters are out of range."""

    pass


class DimensionMismatchError(PersistlabError):
    """Raised when matrix, vector or parameter-count dimensions disagree."""

    pass


class InputFormatError(PersistlabError):
    """Raised when an input file cannot be parsed."""

    pass


class MonotonicityViolation(PersistlabError):
    """Raised when a filtration value on a face exceeds the value on a coface."""

    def __init__(self, sigma, tau, component):
        self.sigma = tuple(sigma)
        self.tau = tuple(tau)
        self.component = component
        super().__init__(
            f"face {self.sigma} exceeds coface {self.tau} in component {component}"
        )


class StratumBoundary(PersistlabError):
    """Raised at points where the persistence map is not differentiable."""

    pass


class ResolutionTooLong(PersistlabError):
    """Raised when a relative resolution exceeds the global dimension bound."""

    pass


class CapExceeded(PersistlabError):
    """Raised when an input is larger than an exhaustive routine accepts."""

    pass


class CommutativityViolation(PersistlabError):
    """Raised when a grid module square does not commute."""

    def __init__(self, cell, axes):
        self.cell = tuple(cell)
        self.axes = tuple(axes)
        super().__init__(f"square at cell {self.cell} on axes {self.axes} does not commute")


class MalformedBlock(PersistlabError):
    """Raised when a lifted vector does not decode into bars."""

    pass


class NonFiniteValue(PersistlabError):
    """Raised when a functional or its subgradient is not finite."""

    pass


class BoundednessWarning(UserWarning):
    """Issued when descent iterates leave the configured norm bound."""

    pass
