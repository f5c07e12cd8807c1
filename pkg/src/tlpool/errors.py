"""Exception types raised by the pool machinery."""

__all__ = [
    "PoolError",
    "PoolConfigurationError",
    "PoolLifecycleError",
    "PoolOwnershipError",
    "PoolStateError",
]


class PoolError(Exception):
    """Base class for all pool-related errors."""


class PoolConfigurationError(PoolError):
    """A factory or registry is mis-configured (bad type id, id collision)."""


class PoolLifecycleError(PoolError):
    """An item was used against its lifecycle contract (e.g. double release)."""


class PoolOwnershipError(PoolError):
    """A pool or item was touched from a thread that does not own it."""


class PoolStateError(PoolError):
    """An operation arrived while the registry is in the wrong state."""
