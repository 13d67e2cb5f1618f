"""Exception types shared across the package."""


class CritobsError(Exception):
    """Base class for all errors raised by this library."""


class ValidationError(CritobsError, ValueError):
    """Malformed or inconsistent input data."""


class ContractError(CritobsError, ValueError):
    """An operation was invoked outside its stated preconditions."""


class ResourceLimitError(CritobsError, RuntimeError):
    """A configured resource cap was exceeded."""
