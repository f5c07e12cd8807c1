"""Multi-threaded stress test creating huge numbers of short-lived pairs.

Each worker iterates over its slice of ``[0, total_objects)``, obtains a
pair item per iteration (fresh construction in ``unpooled`` mode, pool
acquisition in ``pooled`` mode), stores ``(i, 2 i)``, adds the stored
value to a running double-precision sum, and parks the item in a ring
buffer so the last ``ring_size`` items stay alive. The grand total is
``N (N - 1)``, which the tests use as an exact checksum.
"""

import threading
import time
from dataclasses import dataclass

from . import memprobe
from ._common import DEFAULT_POOL_SIZE, PairsWorkerStats, split_workload
from .backend import resolve_backend

MODES = ("unpooled", "pooled")


@dataclass(frozen=True)
class PairWorkload:
    """Parameters of one pairs stress run.

    ``single_precision_values`` stores each item value rounded to single
    precision (as a float-typed field would); with it the checksum is no
    longer exactly ``N (N - 1)`` once ``2 i`` stops being representable.
    """

    total_objects: int
    threads: int
    ring_size: int = 10_000
    mode: str = "unpooled"
    pool_size: int = DEFAULT_POOL_SIZE
    single_precision_values: bool = False

    def __post_init__(self):
        if self.threads < 1 or self.total_objects < self.threads:
            raise ValueError("need total_objects >= threads >= 1")
        if self.ring_size < 1:
            raise ValueError("ring_size must be >= 1")
        if self.pool_size < 1:
            raise ValueError("pool_size must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class PairsBenchResult:
    total_value: float
    duration_ms: int
    peak_mem_bytes: int
    worker_stats: tuple[PairsWorkerStats, ...]


def expected_pairs_sum(total_objects: int) -> int:
    """Analytic checksum ``sum(2 i for i in range(N)) = N (N - 1)``.

    Computed in arbitrary precision so it stays exact at any scale.
    """
    if total_objects < 0:
        raise ValueError("total_objects must be >= 0")
    n = int(total_objects)
    return n * (n - 1) if n else 0


def run_pairs_benchmark(workload: PairWorkload, backend=None) -> PairsBenchResult:
    """Run the stress test and report (checksum, wall-clock, peak memory).

    Workers are spawned as plain threads, partitioned so the first
    ``threads - 1`` get ``total // threads`` objects and the last the
    remainder. Timing covers spawn to join; in pooled mode that includes
    each worker's lazy pool creation, which is part of the cost being
    measured. Pooled runs use a private registry so repeated runs with
    different pool sizes stay independent.
    """
    impl = resolve_backend(backend)
    counts = split_workload(workload.total_objects, workload.threads)
    pooled = workload.mode == "pooled"
    registry = impl.PoolRegistry(pool_size=workload.pool_size) if pooled else None
    factory = impl.PairItemFactory() if pooled else None

    stats: list = [None] * workload.threads
    failures: list = [None] * workload.threads

    def work(idx: int, offset: int, count: int) -> None:
        try:
            stats[idx] = impl.pairs_worker(
                offset, count, workload.ring_size, pooled, factory, registry,
                workload.single_precision_values,
            )
        except BaseException as exc:
            failures[idx] = exc

    workers = []
    offset = 0
    for i, count in enumerate(counts):
        workers.append(threading.Thread(
            target=work, args=(i, offset, count), name=f"pairs-worker-{i}",
        ))
        offset += count

    memprobe.reset_peak_rss()
    start = time.perf_counter()
    for t in workers:
        t.start()
    for t in workers:
        t.join()
    duration_ms = int(round((time.perf_counter() - start) * 1000))
    peak = memprobe.peak_rss_bytes()

    for i, exc in enumerate(failures):
        if exc is not None:
            raise RuntimeError(f"pairs worker {i} failed: {exc!r}") from exc

    total = 0.0
    for st in stats:
        total += st.total
    return PairsBenchResult(
        total_value=total,
        duration_ms=duration_ms,
        peak_mem_bytes=peak,
        worker_stats=tuple(stats),
    )


def run_pairs_worker(offset: int, count: int, ring_size: int, mode: str,
                     factory=None, registry=None, backend=None,
                     single_precision: bool = False) -> float:
    """Run one worker loop on the calling thread; returns its sum.

    Pooled calls without an explicit registry get a fresh private one, so
    stray invocations cannot freeze the process-wide pool-size gate.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    impl = resolve_backend(backend)
    pooled = mode == "pooled"
    if pooled:
        if registry is None:
            registry = impl.PoolRegistry()
        if factory is None:
            factory = impl.PairItemFactory()
    stats = impl.pairs_worker(
        offset, count, ring_size, pooled, factory, registry, single_precision
    )
    return stats.total
