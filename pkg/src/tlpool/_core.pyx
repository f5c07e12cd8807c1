# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
# cython: cdivision=True
# cython: initializedcheck=False
"""Compiled pool core and benchmark kernels.

Mirrors ``tlpool._fallback`` with identical semantics; the package picks
this module at import time when it is built. The pairs kernel runs the
whole per-worker loop at C speed, and the random-search kernel releases
the GIL so worker threads execute in parallel.
"""

import threading

import numpy as np

cimport cython
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.stdlib cimport calloc, free
from libc.string cimport memcpy
from libc.math cimport cos, M_PI, INFINITY

from numpy.random cimport bitgen_t

from ._common import DEFAULT_POOL_SIZE, MAX_POOLED_TYPES, PairsWorkerStats, PoolFactory
from .errors import (
    PoolConfigurationError,
    PoolLifecycleError,
    PoolOwnershipError,
    PoolStateError,
)

cdef extern from "pythread.h":
    unsigned long PyThread_get_thread_ident() nogil

BACKEND_NAME = "compiled"

cdef double TWO_PI = 2.0 * M_PI


cdef class ThreadLocalPool


cdef class PoolableItem:
    """A recyclable object with pool-lifecycle state.

    Items are either *managed* (owned by a :class:`ThreadLocalPool`) or
    *unmanaged* (created when a pool was exhausted; ``release`` is a
    no-op for them). Managed items are strictly thread-confined.
    """

    cdef ThreadLocalPool _pool
    cdef bint _in_use
    cdef public object debug_tag

    def __init__(self, pool=None):
        self._pool = pool

    def set_data(self, *args):
        """Re-initialize the payload from ``args``; subclasses override."""
        raise NotImplementedError

    cdef int _release(self) except -1:
        cdef ThreadLocalPool pool = self._pool
        if pool is None:
            return 0
        if PyThread_get_thread_ident() != pool._owner_thread:
            raise PoolOwnershipError(
                "release must happen on the thread owning the pool"
            )
        if not self._in_use:
            raise PoolLifecycleError("Object not currently used")
        self._in_use = False
        pool._push(self)
        return 0

    def release(self):
        """Return a managed item to its pool; no-op for unmanaged items."""
        self._release()

    @property
    def owner_pool(self):
        return self._pool

    @property
    def in_use(self):
        return self._in_use

    @property
    def is_managed(self):
        return self._pool is not None


@cython.final
cdef class PairItem(PoolableItem):
    """Recyclable (item id, value) pair used by the pairs stress test."""

    cdef long long _item_id
    cdef double _value

    def __init__(self, pool=None):
        PoolableItem.__init__(self, pool)

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


@cython.final
cdef class PairItemFactory:
    """Factory for :class:`PairItem`; claims registry slot ``type_id``."""

    cdef Py_ssize_t _type_id

    def __init__(self, type_id=0):
        self._type_id = type_id

    @property
    def unique_type_id(self):
        return self._type_id

    def make_unmanaged(self, *args):
        return PairItem.__new__(PairItem)

    def make_managed(self, pool, *args):
        cdef PairItem item = PairItem.__new__(PairItem)
        item._pool = pool
        return item


cdef class ThreadLocalPool:
    """Fixed-capacity LIFO stack of available items owned by one thread."""

    cdef list _slots
    cdef Py_ssize_t _top_avail
    cdef Py_ssize_t _capacity
    cdef unsigned long _owner_thread
    cdef object _factory_type

    def __init__(self, capacity, factory, args=()):
        cdef Py_ssize_t cap = capacity
        cdef Py_ssize_t i
        cdef PairItem pair
        self._capacity = cap
        self._owner_thread = PyThread_get_thread_ident()
        self._factory_type = type(factory)
        self._slots = [None] * cap
        self._top_avail = -1
        if type(factory) is PairItemFactory:
            # monomorphic pre-fill; equivalent to make_managed per slot
            for i in range(cap):
                pair = PairItem.__new__(PairItem)
                pair._pool = self
                self._slots[i] = pair
        else:
            for i in range(cap):
                item = factory.make_managed(self, *args)
                if not isinstance(item, PoolableItem) or (<PoolableItem>item)._pool is not self:
                    raise PoolConfigurationError(
                        "make_managed must return a PoolableItem bound to the new pool"
                    )
                self._slots[i] = item
        self._top_avail = cap - 1

    cdef inline PoolableItem _pop(self):
        # Most recently released item first; slot cleared to drop the
        # pool's reference while the item is in use.
        cdef Py_ssize_t top = self._top_avail
        cdef PoolableItem item
        if top < 0:
            return None
        item = <PoolableItem>self._slots[top]
        self._slots[top] = None
        self._top_avail = top - 1
        item._in_use = True
        return item

    cdef inline int _push(self, PoolableItem item) except -1:
        cdef Py_ssize_t top = self._top_avail + 1
        self._slots[top] = item
        self._top_avail = top
        return 0

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


cdef class PoolRegistry:
    """Per-thread pools indexed by factory type id, plus the size gate.

    Same contract as the pure-Python registry: one pool per (thread,
    type id), array-indexed lookup, and a pool size that freezes once
    any pool has been created through this registry.
    """

    cdef object _tls
    cdef object _lock
    cdef Py_ssize_t _pool_size
    cdef bint _size_reset_allowed
    cdef Py_ssize_t _max_types

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

    cdef inline Py_ssize_t _check_type_id(self, factory) except -2:
        type_id_obj = factory.unique_type_id
        if not isinstance(type_id_obj, int):
            raise PoolConfigurationError(
                f"unique_type_id {type_id_obj!r} outside [0, {self._max_types})"
            )
        cdef Py_ssize_t type_id = type_id_obj
        if type_id < 0 or type_id >= self._max_types:
            raise PoolConfigurationError(
                f"unique_type_id {type_id!r} outside [0, {self._max_types})"
            )
        return type_id

    cdef list _thread_pools(self):
        pools = getattr(self._tls, "pools", None)
        if pools is None:
            pools = [None] * self._max_types
            self._tls.pools = pools
        return <list>pools

    cdef ThreadLocalPool _get_pool(self, factory, tuple args):
        cdef list pools = self._thread_pools()
        cdef Py_ssize_t type_id = self._check_type_id(factory)
        cdef ThreadLocalPool pool
        cdef Py_ssize_t capacity
        pool_obj = pools[type_id]
        if pool_obj is None:
            with self._lock:
                self._size_reset_allowed = False
                capacity = self._pool_size
            pool = ThreadLocalPool(capacity, factory, args)
            pools[type_id] = pool
            return pool
        pool = <ThreadLocalPool>pool_obj
        if pool._factory_type is not type(factory):
            raise PoolConfigurationError(
                f"type id {type_id} already claimed by {pool._factory_type.__name__}, "
                f"now requested by {type(factory).__name__}"
            )
        return pool

    def get_thread_local_pool(self, factory, *args):
        """Return the calling thread's pool for this factory, creating it
        (and pre-filling it with ``pool_size`` managed items) on first use."""
        return self._get_pool(factory, args)

    def existing_thread_local_pool(self, factory):
        """Lookup-only variant: the pool must already exist on this thread."""
        cdef Py_ssize_t type_id = self._check_type_id(factory)
        pools = getattr(self._tls, "pools", None)
        pool_obj = pools[type_id] if pools is not None else None
        if pool_obj is None:
            raise PoolStateError(
                f"no pool for type id {type_id} exists on the calling thread"
            )
        cdef ThreadLocalPool pool = <ThreadLocalPool>pool_obj
        if pool._factory_type is not type(factory):
            raise PoolConfigurationError(
                f"type id {type_id} already claimed by {pool._factory_type.__name__}, "
                f"now requested by {type(factory).__name__}"
            )
        return pool

    def delete_thread_local_pool(self, factory):
        """Drop the calling thread's pool for this factory; no-op if absent."""
        cdef Py_ssize_t type_id = self._check_type_id(factory)
        pools = getattr(self._tls, "pools", None)
        if pools is not None:
            (<list>pools)[type_id] = None

    def acquire(self, factory, *args):
        """Obtain an item, re-initialized from ``args``.

        Returns a managed item from the calling thread's pool when one is
        available, otherwise a fresh unmanaged item; acquisition never
        fails due to exhaustion.
        """
        cdef ThreadLocalPool pool = self._get_pool(factory, args)
        cdef PoolableItem item = pool._pop()
        if item is None:
            item_obj = factory.make_unmanaged(*args)
            if not isinstance(item_obj, PoolableItem):
                raise PoolConfigurationError(
                    "make_unmanaged must return a PoolableItem"
                )
            item = <PoolableItem>item_obj
        item.set_data(*args)
        return item


def rastrigin(x):
    """Evaluate ``10 n + sum(x_i^2 - 10 cos(2 pi x_i))`` over a vector."""
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] == 0:
        raise ValueError("rastrigin expects a non-empty 1-D vector")
    cdef double[::1] xv = arr
    cdef Py_ssize_t n = xv.shape[0]
    return _rastrigin_c(&xv[0], n)


cdef inline double _rastrigin_c(const double *x, Py_ssize_t n) nogil:
    cdef double acc = 0.0
    cdef double xi
    cdef Py_ssize_t j
    for j in range(n):
        xi = x[j]
        acc += xi * xi - 10.0 * cos(TWO_PI * xi)
    return 10.0 * n + acc


def mc_worker(dim, low, rng_range, count, bit_generator, fresh):
    """Random-search worker: evaluate ``count`` uniform samples, keep the best.

    Consumes ``dim`` doubles per evaluation from ``bit_generator`` exactly
    like the pure backend, so both backends sample identical points. The
    whole loop runs without the GIL.
    """
    cdef Py_ssize_t n = dim
    cdef long long total = count
    cdef bint fresh_mode = fresh
    if total == 0:
        return float(INFINITY), None
    low_arr = np.ascontiguousarray(low, dtype=np.float64)
    range_arr = np.ascontiguousarray(rng_range, dtype=np.float64)
    if low_arr.shape[0] != n or range_arr.shape[0] != n:
        raise ValueError("bounds arrays must have length dim")
    capsule = bit_generator.capsule
    cdef bitgen_t *bg = <bitgen_t *>PyCapsule_GetPointer(capsule, "BitGenerator")
    best_np = np.empty(n, dtype=np.float64)
    cdef double[::1] best = best_np
    cdef double[::1] lo = low_arr
    cdef double[::1] rng_rg = range_arr
    cdef double best_val = INFINITY
    cdef double y
    cdef double *x = NULL
    cdef double *cache = NULL
    cdef long long k
    cdef Py_ssize_t j
    cdef bint oom = False
    with nogil:
        if not fresh_mode:
            cache = <double *>calloc(n, sizeof(double))
            if cache == NULL:
                oom = True
        if not oom:
            for k in range(total):
                if fresh_mode:
                    # fresh zero-initialized vector per evaluation
                    x = <double *>calloc(n, sizeof(double))
                    if x == NULL:
                        oom = True
                        break
                else:
                    x = cache
                for j in range(n):
                    x[j] = lo[j] + rng_rg[j] * bg.next_double(bg.state)
                y = _rastrigin_c(x, n)
                if y < best_val:
                    best_val = y
                    memcpy(&best[0], x, n * sizeof(double))
                if fresh_mode:
                    free(x)
        if cache != NULL:
            free(cache)
    if oom:
        raise MemoryError("argument vector allocation failed")
    return best_val, best_np


def pairs_worker(offset, count, ring_size, pooled, PairItemFactory factory,
                 PoolRegistry registry, single_precision=False):
    """Stress-test worker: create/acquire ``count`` pairs through a ring buffer.

    Same contract as the pure backend. With ``pooled`` the items come from
    the calling thread's pool (falling back to unmanaged items on
    exhaustion) and every ring wrap releases the whole ring; without it a
    fresh item is constructed per iteration and overwritten slots simply
    drop their object.
    """
    cdef long long start = offset
    cdef long long total = count
    cdef Py_ssize_t ring_n = ring_size
    cdef bint use_pool = pooled
    cdef bint single = single_precision
    if ring_n < 1:
        raise ValueError("ring_size must be >= 1")
    if use_pool and (factory is None or registry is None):
        raise ValueError("pooled mode needs a factory and a registry")
    cdef list ring = [None] * ring_n
    cdef Py_ssize_t ind = 0
    cdef double s = 0.0
    cdef double v
    cdef long long i
    cdef long long managed = 0
    cdef long long unmanaged = 0
    cdef long long wraps = 0
    cdef long long bad_wraps = 0
    cdef Py_ssize_t j
    cdef PairItem pi
    cdef ThreadLocalPool pool = None
    if use_pool:
        pool = registry._get_pool(factory, ())
    for i in range(start, start + total):
        if use_pool:
            pi = <PairItem>pool._pop()
            if pi is None:
                pi = PairItem.__new__(PairItem)
                unmanaged += 1
            else:
                managed += 1
        else:
            pi = PairItem.__new__(PairItem)
        v = 2.0 * i
        if single:
            v = <double><float>v
        pi._item_id = i
        pi._value = v
        s += pi._value
        ring[ind] = pi
        ind += 1
        if ind == ring_n:
            if use_pool:
                for j in range(ring_n):
                    (<PairItem>ring[j])._release()
                if pool._top_avail + 1 != pool._capacity:
                    bad_wraps += 1
            wraps += 1
            ind = 0
    return PairsWorkerStats(
        total=s,
        managed_acquires=managed,
        unmanaged_acquires=unmanaged,
        wraps=wraps,
        wrap_conservation_failures=bad_wraps,
        final_available=(pool._top_avail + 1) if use_pool else None,
    )


PoolFactory.register(PairItemFactory)
