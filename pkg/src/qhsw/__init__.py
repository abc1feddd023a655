"""Classical capacity of qudit channels that are diagonal in the generalized Pauli basis."""
from .errors import DomainError, InvalidStateError, NotCompletelyPositiveError, ResourceError

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "InvalidStateError",
    "NotCompletelyPositiveError",
    "ResourceError",
]
