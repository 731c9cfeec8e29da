"""Exceptions shared across the package."""


class CapExceededError(RuntimeError):
    """An enumeration or search exceeded its configured size cap."""


class PreconditionError(ValueError):
    """An operation was called with inputs violating its contract."""
