"""Exception types shared by all modules."""


class PermafinettiError(Exception):
    """Base class for errors raised by this package."""


class DomainError(PermafinettiError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ResourceLimitError(PermafinettiError, RuntimeError):
    """A computation would exceed a configured enumeration or memory cap."""
