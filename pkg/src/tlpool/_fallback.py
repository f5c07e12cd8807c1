"""Pure-Python pool core and benchmark kernels.

This module mirrors the compiled extension ``tlpool._core`` and is used
as the fallback when the extension is not built (or when forced via the
``TLPOOL_BACKEND`` environment variable). Both backends expose the same
names and must behave identically; the test suite runs against both.
"""

import threading

import numpy as np

from ._common import DEFAULT_POOL_SIZE, MAX_POOLED_TYPES, PairsWorkerStats, PoolFactory
from .errors import (
    PoolConfigurationError,
    PoolLifecycleError,
    PoolOwnershipError,
    PoolStateError,
)

BACKEND_NAME = "pure"

_TWO_PI = 2.0 * np.pi


class PoolableItem:
    """A recyclable object with pool-lifecycle state.

    Items are either *managed* (owned by a :class:`ThreadLocalPool`) or
    *unmanaged* (created when a pool was exhausted; ``release`` is a
    no-op for them). Managed items are strictly thread-confined: only
    the thread owning the pool may acquire or release them.
    """

    __slots__ = ("_pool", "_in_use", "debug_tag")

    def __init__(self, pool=None):
        self._pool = pool
        self._in_use = False
        self.debug_tag = None

    def set_data(self, *args):
        """Re-initialize the payload from ``args``; subclasses override."""
        raise NotImplementedError

    def release(self):
        """Return a managed item to its pool; no-op for unmanaged items."""
        pool = self._pool
        if pool is None:
            return
        if threading.get_ident() != pool._owner_thread:
            raise PoolOwnershipError(
                "release must happen on the thread owning the pool"
            )
        if not self._in_use:
            raise PoolLifecycleError("Object not currently used")
        self._in_use = False
        pool._push(self)

    @property
    def owner_pool(self):
        return self._pool

    @property
    def in_use(self):
        return self._in_use

    @property
    def is_managed(self):
        return self._pool is not None


class ThreadLocalPool:
    """Fixed-capacity LIFO stack of available items owned by one thread."""

    __slots__ = ("_slots", "_top_avail", "_capacity", "_owner_thread", "_factory_type")

    def __init__(self, capacity, factory, args=()):
        self._capacity = capacity
        self._owner_thread = threading.get_ident()
        self._factory_type = type(factory)
        self._slots = [None] * capacity
        self._top_avail = -1
        for i in range(capacity):
            item = factory.make_managed(self, *args)
            if not isinstance(item, PoolableItem) or item._pool is not self:
                raise PoolConfigurationError(
                    "make_managed must return a PoolableItem bound to the new pool"
                )
            self._slots[i] = item
        self._top_avail = capacity - 1

    def _pop(self):
        # Most recently released item first; slot cleared to drop the
        # pool's reference while the item is in use.
        top = self._top_avail
        if top < 0:
            return None
        item = self._slots[top]
        self._slots[top] = None
        self._top_avail = top - 1
        item._in_use = True
        return item

    def _push(self, item):
        top = self._top_avail + 1
        self._slots[top] = item
        self._top_avail = top

    @property
    def capacity(self):
        return self._capacity

    @property
    def top_avail(self):
        return self._top_avail

    @property
    def available(self):
        """Number of items currently available for acquisition."""
        return self._top_avail + 1

    @property
    def owner_thread(self):
        return self._owner_thread

    @property
    def slots(self):
        """Snapshot of the backing array (for inspection and tests)."""
        return tuple(self._slots)


class PoolRegistry:
    """Per-thread pools indexed by factory type id, plus the size gate.

    Each thread sees at most one pool per type id; lookup after creation
    is a plain array index. The pool size applies to pools created in
    the future and is frozen as soon as any thread instantiates a pool
    through this registry. The module-level API uses one process-wide
    registry; benchmarks create private registries so runs stay isolated.
    """

    def __init__(self, pool_size=DEFAULT_POOL_SIZE, max_types=MAX_POOLED_TYPES):
        if not isinstance(pool_size, int) or isinstance(pool_size, bool) or pool_size < 1:
            raise ValueError("pool_size must be a positive integer")
        if max_types < 1:
            raise ValueError("max_types must be >= 1")
        self._lock = threading.Lock()
        self._pool_size = pool_size
        self._size_reset_allowed = True
        self._max_types = max_types
        self._tls = threading.local()

    def set_pool_size(self, n):
        """Set the capacity used by future pool creations.

        Allowed only while no pool has ever been created through this
        registry, on any thread.
        """
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ValueError("pool size must be a positive integer")
        with self._lock:
            if not self._size_reset_allowed:
                raise PoolStateError(
                    "pool size can no longer be changed: a pool already exists"
                )
            self._pool_size = n

    def get_pool_size(self):
        with self._lock:
            return self._pool_size

    @property
    def size_reset_allowed(self):
        with self._lock:
            return self._size_reset_allowed

    @property
    def max_types(self):
        return self._max_types

    def _check_type_id(self, factory):
        type_id = factory.unique_type_id
        if not isinstance(type_id, int) or not 0 <= type_id < self._max_types:
            raise PoolConfigurationError(
                f"unique_type_id {type_id!r} outside [0, {self._max_types})"
            )
        return type_id

    def _thread_pools(self):
        pools = getattr(self._tls, "pools", None)
        if pools is None:
            pools = [None] * self._max_types
            self._tls.pools = pools
        return pools

    def get_thread_local_pool(self, factory, *args):
        """Return the calling thread's pool for this factory, creating it
        (and pre-filling it with ``pool_size`` managed items) on first use."""
        pools = self._thread_pools()
        type_id = self._check_type_id(factory)
        pool = pools[type_id]
        if pool is None:
            with self._lock:
                self._size_reset_allowed = False
                capacity = self._pool_size
            pool = ThreadLocalPool(capacity, factory, args)
            pools[type_id] = pool
        elif pool._factory_type is not type(factory):
            raise PoolConfigurationError(
                f"type id {type_id} already claimed by {pool._factory_type.__name__}, "
                f"now requested by {type(factory).__name__}"
            )
        return pool

    def existing_thread_local_pool(self, factory):
        """Lookup-only variant: the pool must already exist on this thread."""
        pools = getattr(self._tls, "pools", None)
        type_id = self._check_type_id(factory)
        pool = pools[type_id] if pools is not None else None
        if pool is None:
            raise PoolStateError(
                f"no pool for type id {type_id} exists on the calling thread"
            )
        if pool._factory_type is not type(factory):
            raise PoolConfigurationError(
                f"type id {type_id} already claimed by {pool._factory_type.__name__}, "
                f"now requested by {type(factory).__name__}"
            )
        return pool

    def delete_thread_local_pool(self, factory):
        """Drop the calling thread's pool for this factory; no-op if absent."""
        type_id = self._check_type_id(factory)
        pools = getattr(self._tls, "pools", None)
        if pools is not None:
            pools[type_id] = None

    def acquire(self, factory, *args):
        """Obtain an item, re-initialized from ``args``.

        Returns a managed item from the calling thread's pool when one is
        available, otherwise a fresh unmanaged item; acquisition never
        fails due to exhaustion.
        """
        pool = self.get_thread_local_pool(factory, *args)
        item = pool._pop()
        if item is None:
            item = factory.make_unmanaged(*args)
            if not isinstance(item, PoolableItem):
                raise PoolConfigurationError(
                    "make_unmanaged must return a PoolableItem"
                )
        item.set_data(*args)
        return item


class PairItem(PoolableItem):
    """Recyclable (item id, value) pair used by the pairs stress test."""

    __slots__ = ("_item_id", "_value")

    def __init__(self, pool=None):
        super().__init__(pool)
        self._item_id = 0
        self._value = 0.0

    def set_data(self, *args):
        if not args:
            return
        self._item_id = args[0]
        self._value = args[1]

    @property
    def item_id(self):
        return self._item_id

    @property
    def value(self):
        return self._value


class PairItemFactory:
    """Factory for :class:`PairItem`; claims registry slot ``type_id``."""

    __slots__ = ("_type_id",)

    def __init__(self, type_id=0):
        self._type_id = type_id

    @property
    def unique_type_id(self):
        return self._type_id

    def make_unmanaged(self, *args):
        return PairItem()

    def make_managed(self, pool, *args):
        return PairItem(pool)


PoolFactory.register(PairItemFactory)


def rastrigin(x):
    """Evaluate ``10 n + sum(x_i^2 - 10 cos(2 pi x_i))`` over a vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("rastrigin expects a non-empty 1-D vector")
    return 10.0 * x.size + float(np.sum(x * x - 10.0 * np.cos(_TWO_PI * x)))


def mc_worker(dim, low, rng_range, count, bit_generator, fresh):
    """Random-search worker: evaluate ``count`` uniform samples, keep the best.

    ``fresh`` allocates a new argument vector per evaluation; otherwise a
    single cached vector is overwritten in place. Both modes consume the
    random stream identically, so they find the same incumbent.
    """
    rng = np.random.Generator(bit_generator)
    cache = None if fresh else np.zeros(dim)
    best_val = np.inf
    best_point = None
    for _ in range(count):
        x = np.zeros(dim) if fresh else cache
        rng.random(out=x)
        x *= rng_range
        x += low
        y = rastrigin(x)
        if y < best_val:
            best_val = y
            best_point = x.copy()
    return best_val, best_point


def pairs_worker(offset, count, ring_size, pooled, factory, registry,
                 single_precision=False):
    """Stress-test worker: create/acquire ``count`` pairs through a ring buffer.

    Iterates ``i`` over ``[offset, offset + count)``, obtains a pair item
    (fresh construction when ``pooled`` is false, pool acquisition
    otherwise), stores ``(i, 2 i)``, and accumulates the stored value into
    a double-precision sum. Items live in a ring of ``ring_size`` slots;
    when the ring is full, pooled mode releases every slot back to the
    pool before reusing it, unpooled mode simply overwrites.
    """
    ring = [None] * ring_size
    ind = 0
    total = 0.0
    managed = unmanaged = wraps = bad_wraps = 0
    pool = None
    capacity = 0
    if pooled:
        pool = registry.get_thread_local_pool(factory)
        capacity = pool.capacity
    for i in range(offset, offset + count):
        if pooled:
            item = pool._pop()
            if item is None:
                item = factory.make_unmanaged()
                unmanaged += 1
            else:
                managed += 1
        else:
            item = PairItem()
        v = 2.0 * i
        if single_precision:
            v = float(np.float32(v))
        item.set_data(i, v)
        total += item.value
        ring[ind] = item
        ind += 1
        if ind == ring_size:
            if pooled:
                for slot in ring:
                    slot.release()
                if pool.available != capacity:
                    bad_wraps += 1
            wraps += 1
            ind = 0
    return PairsWorkerStats(
        total=total,
        managed_acquires=managed,
        unmanaged_acquires=unmanaged,
        wraps=wraps,
        wrap_conservation_failures=bad_wraps,
        final_available=pool.available if pooled else None,
    )
