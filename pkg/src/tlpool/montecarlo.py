"""Parallel pure random search over a box, with fresh or cached vectors.

The search minimizes a test function (the Rastrigin function by default;
see :func:`rastrigin`) by sampling uniform points. The two generator
modes differ only in allocation behavior: ``fresh`` builds a new argument
vector per evaluation while ``cached`` reuses one buffer per worker, so
both find bit-identical incumbents for the same seed.
"""

import threading
import time
from dataclasses import dataclass, field

import numpy as np

from ._common import split_workload
from .backend import resolve_backend

MODES = ("fresh", "cached")

#: Conventional half-width of the search box per coordinate.
DEFAULT_BOUND = 5.12


@dataclass(frozen=True)
class BoxBounds:
    """Per-coordinate closed interval bounds ``low[i] <= x[i] <= high[i]``."""

    low: np.ndarray
    high: np.ndarray
    span: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        low = np.ascontiguousarray(self.low, dtype=np.float64)
        high = np.ascontiguousarray(self.high, dtype=np.float64)
        if low.ndim != 1 or low.size == 0 or low.shape != high.shape:
            raise ValueError("bounds must be equal-length non-empty vectors")
        if not (np.isfinite(low).all() and np.isfinite(high).all()):
            raise ValueError("bounds must be finite")
        if (low > high).any():
            raise ValueError("low[i] must not exceed high[i]")
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)
        object.__setattr__(self, "span", high - low)

    @classmethod
    def symmetric(cls, dim: int, half_width: float = DEFAULT_BOUND) -> "BoxBounds":
        """The box ``[-half_width, half_width]^dim``."""
        return cls(np.full(dim, -half_width), np.full(dim, half_width))

    @property
    def dim(self) -> int:
        return self.low.shape[0]


class ArgumentGenerator:
    """Produces uniform random vectors, fresh per call or via a cached buffer.

    In ``cached`` mode the same array instance is overwritten and returned
    on every call of matching dimension; a dimension change reallocates.
    Both modes consume the random stream identically.
    """

    __slots__ = ("mode", "_cache")

    def __init__(self, mode: str = "fresh"):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        self.mode = mode
        self._cache = None

    def next_vector(self, bounds: BoxBounds, rng: np.random.Generator) -> np.ndarray:
        dim = bounds.dim
        if self.mode == "fresh":
            x = np.zeros(dim)
        else:
            if self._cache is None or self._cache.shape[0] != dim:
                self._cache = np.zeros(dim)
            x = self._cache
        rng.random(out=x)
        x *= bounds.span
        x += bounds.low
        return x


def next_vector(gen: ArgumentGenerator, bounds: BoxBounds,
                rng: np.random.Generator) -> np.ndarray:
    """Draw the next uniform vector from ``gen`` within ``bounds``."""
    return gen.next_vector(bounds, rng)


def rastrigin(x, backend=None) -> float:
    """Evaluate ``10 n + sum(x_i^2 - 10 cos(2 pi x_i))``; minimum 0 at 0."""
    return resolve_backend(backend).rastrigin(x)


@dataclass(frozen=True)
class Incumbent:
    """Best point found so far and its function value."""

    point: np.ndarray
    value: float


@dataclass(frozen=True)
class MonteCarloResult:
    incumbent: Incumbent
    duration_ms: int
    mode: str
    threads: int
    worker_evals: tuple[int, ...]


def _worker_bit_generators(seed: int, threads: int) -> list[np.random.PCG64]:
    # one independent, reproducible stream per worker index
    children = np.random.SeedSequence(seed).spawn(threads)
    return [np.random.PCG64(child) for child in children]


def monte_carlo_optimize(dim: int, total_evals: int, threads: int = 1,
                         seed: int = 0, mode: str = "fresh",
                         bounds: BoxBounds | None = None,
                         backend=None) -> MonteCarloResult:
    """Minimize the test function over ``total_evals`` uniform samples.

    Evaluations are split over ``threads`` workers (the first
    ``threads - 1`` get ``total_evals // threads`` each, the last the
    remainder). Each worker owns a private generator and a private
    random stream derived from ``(seed, worker index)``, tracks a local
    incumbent, and the global incumbent is reduced after all workers
    join, ties broken by lowest worker index. Results are reproducible
    for a fixed ``(threads, seed)``.
    """
    impl = resolve_backend(backend)
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if threads < 1 or total_evals < threads:
        raise ValueError("need total_evals >= threads >= 1")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if bounds is None:
        bounds = BoxBounds.symmetric(dim)
    elif bounds.dim != dim:
        raise ValueError(f"bounds have dimension {bounds.dim}, expected {dim}")

    counts = split_workload(total_evals, threads)
    bit_gens = _worker_bit_generators(seed, threads)
    fresh = mode == "fresh"
    results: list = [None] * threads
    failures: list = [None] * threads

    def work(idx: int) -> None:
        try:
            results[idx] = impl.mc_worker(
                dim, bounds.low, bounds.span, counts[idx], bit_gens[idx], fresh
            )
        except BaseException as exc:  # re-raised on the spawning thread
            failures[idx] = exc

    workers = [
        threading.Thread(target=work, args=(i,), name=f"mc-worker-{i}")
        for i in range(threads)
    ]
    start = time.perf_counter()
    for t in workers:
        t.start()
    for t in workers:
        t.join()
    duration_ms = int(round((time.perf_counter() - start) * 1000))

    for i, exc in enumerate(failures):
        if exc is not None:
            raise RuntimeError(f"search worker {i} failed: {exc!r}") from exc

    best_val = np.inf
    best_point = None
    for val, point in results:
        if val < best_val:
            best_val = val
            best_point = point
    return MonteCarloResult(
        incumbent=Incumbent(point=best_point, value=float(best_val)),
        duration_ms=duration_ms,
        mode=mode,
        threads=threads,
        worker_evals=tuple(counts),
    )
