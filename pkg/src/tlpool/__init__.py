"""Thread-confined object pools plus allocation-pressure benchmarks.

The pool core exists twice: a compiled extension (``tlpool._core``) used
when built, and a pure-Python fallback with identical semantics. The
classes exported here come from whichever backend is active; see
:mod:`tlpool.backend`. The module-level pool functions operate on one
process-wide registry, matching the usual single-registry deployment;
benchmarks and tests create private :class:`PoolRegistry` instances.
"""

from . import backend as _backend_mod
from ._common import DEFAULT_POOL_SIZE, MAX_POOLED_TYPES, PairsWorkerStats, PoolFactory
from .backend import active_backend, available_backends, get_backend
from .errors import (
    PoolConfigurationError,
    PoolError,
    PoolLifecycleError,
    PoolOwnershipError,
    PoolStateError,
)
from .harness import (
    BenchReport,
    BenchRow,
    DeterminismError,
    ExperimentConfig,
    emit_csv,
    parse_csv,
    run_experiment,
    summarize,
)
from .montecarlo import (
    ArgumentGenerator,
    BoxBounds,
    Incumbent,
    MonteCarloResult,
    monte_carlo_optimize,
    next_vector,
    rastrigin,
)
from .pairs import (
    PairsBenchResult,
    PairWorkload,
    expected_pairs_sum,
    run_pairs_benchmark,
    run_pairs_worker,
)

__version__ = "0.1.0"

_impl = _backend_mod.ACTIVE

PoolableItem = _impl.PoolableItem
ThreadLocalPool = _impl.ThreadLocalPool
PoolRegistry = _impl.PoolRegistry
PairItem = _impl.PairItem
PairItemFactory = _impl.PairItemFactory

#: Process-wide registry backing the module-level functions below.
default_registry = PoolRegistry()


def acquire(factory, *args):
    """Obtain an item of the factory's type, re-initialized from ``args``."""
    return default_registry.acquire(factory, *args)


def release(item) -> None:
    """Return ``item`` to its pool; no-op for unmanaged items."""
    item.release()


def get_thread_local_pool(factory, *args):
    """The calling thread's pool for this factory, created on first use."""
    return default_registry.get_thread_local_pool(factory, *args)


def existing_thread_local_pool(factory):
    """Lookup-only pool access; raises if this thread has no pool yet."""
    return default_registry.existing_thread_local_pool(factory)


def delete_thread_local_pool(factory) -> None:
    """Drop the calling thread's pool for this factory (no-op if absent)."""
    default_registry.delete_thread_local_pool(factory)


def set_pool_size(n: int) -> None:
    """Set the capacity of future pools; only before any pool exists."""
    default_registry.set_pool_size(n)


def get_pool_size() -> int:
    """Capacity used for future pool creations (default 100000)."""
    return default_registry.get_pool_size()


__all__ = [
    "DEFAULT_POOL_SIZE",
    "MAX_POOLED_TYPES",
    "ArgumentGenerator",
    "BenchReport",
    "BenchRow",
    "BoxBounds",
    "DeterminismError",
    "ExperimentConfig",
    "Incumbent",
    "MonteCarloResult",
    "PairItem",
    "PairItemFactory",
    "PairWorkload",
    "PairsBenchResult",
    "PairsWorkerStats",
    "PoolConfigurationError",
    "PoolError",
    "PoolFactory",
    "PoolLifecycleError",
    "PoolOwnershipError",
    "PoolRegistry",
    "PoolStateError",
    "PoolableItem",
    "ThreadLocalPool",
    "acquire",
    "active_backend",
    "available_backends",
    "default_registry",
    "delete_thread_local_pool",
    "emit_csv",
    "existing_thread_local_pool",
    "expected_pairs_sum",
    "get_backend",
    "get_pool_size",
    "get_thread_local_pool",
    "monte_carlo_optimize",
    "next_vector",
    "parse_csv",
    "rastrigin",
    "release",
    "run_experiment",
    "run_pairs_benchmark",
    "run_pairs_worker",
    "set_pool_size",
    "summarize",
]
