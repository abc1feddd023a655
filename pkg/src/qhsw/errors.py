"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class InvalidStateError(DomainError):
    """A matrix fails one of the density-matrix invariants."""


class NotCompletelyPositiveError(DomainError):
    """A channel's Choi matrix has a negative eigenvalue beyond tolerance."""


class ResourceError(RuntimeError):
    """A requested object would exceed a configured dimension cap."""
