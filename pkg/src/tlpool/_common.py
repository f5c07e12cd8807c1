"""Shared constants and small helpers used by both pool backends."""

from abc import ABC, abstractmethod
from typing import NamedTuple, Optional

#: Size of each thread's pool registry array. Type ids must fall in
#: ``[0, MAX_POOLED_TYPES)``. Fixed at run time; registries accept an
#: override at construction for special builds.
MAX_POOLED_TYPES = 10

#: Number of items a pool is pre-filled with unless configured otherwise.
DEFAULT_POOL_SIZE = 100_000


class PoolFactory(ABC):
    """Creates poolable items and names the registry slot they live in.

    Implementations must report a ``unique_type_id`` that is stable for
    the process lifetime and distinct per pooled type; it indexes the
    per-thread registry array, so it must lie in ``[0, MAX_POOLED_TYPES)``.
    """

    @property
    @abstractmethod
    def unique_type_id(self) -> int:
        """Registry slot index for this item type."""

    @abstractmethod
    def make_unmanaged(self, *args):
        """Create an item that belongs to no pool (release is a no-op)."""

    @abstractmethod
    def make_managed(self, pool, *args):
        """Create an item owned by ``pool``; used to pre-fill the pool."""


class PairsWorkerStats(NamedTuple):
    """Per-worker outcome of one pairs stress run."""

    total: float
    managed_acquires: int
    unmanaged_acquires: int
    wraps: int
    wrap_conservation_failures: int
    final_available: Optional[int]  # None in unpooled mode


def split_workload(total: int, parts: int) -> list[int]:
    """Split ``total`` work units over ``parts`` workers.

    The first ``parts - 1`` workers get ``total // parts`` units each and
    the last worker gets the remainder, which is always at least as large.
    """
    if parts < 1:
        raise ValueError("parts must be >= 1")
    if total < parts:
        raise ValueError(f"total ({total}) must be >= parts ({parts})")
    share = total // parts
    counts = [share] * (parts - 1)
    counts.append(total - share * (parts - 1))
    return counts
