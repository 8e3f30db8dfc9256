class SymdynError(Exception):
    """Base class for library errors."""


class InputError(SymdynError, ValueError):
    """Malformed or out-of-range input (unknown symbol, bad length, bad file)."""


class DomainError(SymdynError, ValueError):
    """Arguments are well formed but outside the operation's domain."""


class PreconditionError(SymdynError, ValueError):
    """A mathematical precondition of the operation does not hold."""


class ResourceError(SymdynError, RuntimeError):
    """The requested enumeration is too large to run."""
