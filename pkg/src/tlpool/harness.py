"""Experiment runner: parameter sweeps, repetition, CSV report, summary.

A report row is one timed run of one cell, where a cell is a
``(mode, threads, workload, dim)`` combination. Cells run strictly
sequentially in a fixed order - repetitions outermost, then dims,
workloads, threads, and modes innermost - so the two modes of a
comparison pair always run back to back under like conditions. The
first repetition of each cell is preceded by one untimed warm-up run
that never reaches the report.
"""

import csv
from dataclasses import dataclass

from . import memprobe
from ._common import DEFAULT_POOL_SIZE
from .backend import resolve_backend
from .montecarlo import MODES as MC_MODES
from .montecarlo import monte_carlo_optimize
from .pairs import MODES as PAIRS_MODES
from .pairs import PairWorkload, run_pairs_benchmark

BENCHMARKS = ("montecarlo", "pairs")

CSV_COLUMNS = (
    "benchmark", "mode", "threads", "workload", "dim",
    "repetition", "duration_ms", "peak_mem_bytes", "checksum",
)

#: Mode pair reported as a speedup ratio, slower-expected mode first.
RATIO_PAIRS = {"pairs": ("unpooled", "pooled"), "montecarlo": ("fresh", "cached")}


class DeterminismError(RuntimeError):
    """Repetitions of one deterministic cell disagreed on their checksum."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Sweep description: cross-product of modes, threads, workloads, dims."""

    benchmark: str
    modes: tuple[str, ...] = ()  # empty: both modes of the benchmark
    threads: tuple[int, ...] = (1,)
    workloads: tuple[int, ...] = ()  # evaluation or object counts
    dims: tuple[int, ...] = (1000,)  # montecarlo only
    ring_size: int = 10_000
    pool_size: int = DEFAULT_POOL_SIZE
    seed: int = 0
    repeats: int = 10
    csv_path: str | None = None  # consumed by the CLI, not by run_experiment


@dataclass(frozen=True)
class BenchRow:
    benchmark: str
    mode: str
    threads: int
    workload: int
    dim: int | None
    repetition: int
    duration_ms: int
    peak_mem_bytes: int
    checksum: float


@dataclass
class BenchReport:
    rows: list[BenchRow]


def _validated_modes(cfg: ExperimentConfig) -> tuple[str, ...]:
    if cfg.benchmark not in BENCHMARKS:
        raise ValueError(f"benchmark must be one of {BENCHMARKS}, got {cfg.benchmark!r}")
    valid = MC_MODES if cfg.benchmark == "montecarlo" else PAIRS_MODES
    modes = cfg.modes or valid
    bad = [m for m in modes if m not in valid]
    if not modes or bad:
        raise ValueError(f"modes for {cfg.benchmark} must be a non-empty subset of {valid}")
    return tuple(modes)


def _run_cell(impl, cfg: ExperimentConfig, mode: str, threads: int,
              workload: int, dim: int | None):
    """Execute one run; returns (duration_ms, peak_mem_bytes, checksum)."""
    if cfg.benchmark == "montecarlo":
        memprobe.reset_peak_rss()
        res = monte_carlo_optimize(
            dim=dim, total_evals=workload, threads=threads,
            seed=cfg.seed, mode=mode, backend=impl,
        )
        return res.duration_ms, memprobe.peak_rss_bytes(), res.incumbent.value
    result = run_pairs_benchmark(
        PairWorkload(
            total_objects=workload, threads=threads, ring_size=cfg.ring_size,
            mode=mode, pool_size=cfg.pool_size,
        ),
        backend=impl,
    )
    return result.duration_ms, result.peak_mem_bytes, result.total_value


def run_experiment(cfg: ExperimentConfig, backend=None) -> BenchReport:
    """Run the full sweep, ``cfg.repeats`` timed runs per cell.

    Aborts with :class:`DeterminismError` as soon as two repetitions of
    the same cell disagree on the checksum.
    """
    impl = resolve_backend(backend)
    modes = _validated_modes(cfg)
    if cfg.repeats < 1:
        raise ValueError("repeats must be >= 1")
    if not cfg.workloads:
        raise ValueError("workloads must be non-empty")
    if not cfg.threads or any(t < 1 for t in cfg.threads):
        raise ValueError("threads must be a non-empty list of positive ints")
    dims = cfg.dims if cfg.benchmark == "montecarlo" else (None,)
    if cfg.benchmark == "montecarlo" and (not dims or any(d < 1 for d in dims)):
        raise ValueError("dims must be a non-empty list of positive ints")

    rows: list[BenchRow] = []
    reference: dict[tuple, float] = {}
    for rep in range(cfg.repeats):
        for dim in dims:
            for workload in cfg.workloads:
                for threads in cfg.threads:
                    for mode in modes:
                        cell = (mode, threads, workload, dim)
                        if rep == 0:
                            _run_cell(impl, cfg, mode, threads, workload, dim)
                        duration_ms, peak, checksum = _run_cell(
                            impl, cfg, mode, threads, workload, dim
                        )
                        if cell in reference:
                            if checksum != reference[cell]:
                                raise DeterminismError(
                                    f"checksum drift in cell {cell}: repetition {rep} "
                                    f"produced {checksum!r}, expected {reference[cell]!r}"
                                )
                        else:
                            reference[cell] = checksum
                        rows.append(BenchRow(
                            benchmark=cfg.benchmark, mode=mode, threads=threads,
                            workload=workload, dim=dim, repetition=rep,
                            duration_ms=duration_ms, peak_mem_bytes=peak,
                            checksum=checksum,
                        ))
    return BenchReport(rows)


def emit_csv(report: BenchReport, path) -> None:
    """Write the report; header plus one comma-separated line per row."""
    try:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(CSV_COLUMNS)
            for r in report.rows:
                writer.writerow([
                    r.benchmark, r.mode, r.threads, r.workload,
                    "" if r.dim is None else r.dim, r.repetition,
                    r.duration_ms, r.peak_mem_bytes, repr(r.checksum),
                ])
    except OSError as exc:
        raise OSError(f"cannot write CSV report to {path}: {exc}") from exc


def parse_csv(path) -> BenchReport:
    """Read a report written by :func:`emit_csv` back into rows."""
    try:
        with open(path, newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header != list(CSV_COLUMNS):
                raise ValueError(f"unexpected CSV header in {path}: {header}")
            rows = [
                BenchRow(
                    benchmark=rec[0], mode=rec[1], threads=int(rec[2]),
                    workload=int(rec[3]), dim=int(rec[4]) if rec[4] else None,
                    repetition=int(rec[5]), duration_ms=int(rec[6]),
                    peak_mem_bytes=int(rec[7]), checksum=float(rec[8]),
                )
                for rec in reader if rec
            ]
    except OSError as exc:
        raise OSError(f"cannot read CSV report from {path}: {exc}") from exc
    return BenchReport(rows)


def _mean(values) -> float:
    return sum(values) / len(values)


def summarize(report: BenchReport) -> str:
    """Per-cell mean/min durations plus the mode-pair speedup ratio.

    The ratio divides the mean duration of the slower-expected mode by
    the mean of its counterpart (unpooled/pooled, fresh/cached) and is
    omitted with a note when a counterpart is missing.
    """
    groups: dict[tuple, dict[str, list[int]]] = {}
    for r in report.rows:
        key = (r.benchmark, r.threads, r.workload, r.dim)
        groups.setdefault(key, {}).setdefault(r.mode, []).append(r.duration_ms)

    lines = []
    for (benchmark, threads, workload, dim), by_mode in groups.items():
        dim_part = "" if dim is None else f" dim={dim}"
        lines.append(f"=== {benchmark} | threads={threads} workload={workload}{dim_part} ===")
        for mode, durations in by_mode.items():
            lines.append(
                f"  {mode:<9} mean {_mean(durations):10.1f} ms   "
                f"min {min(durations):8d} ms   runs {len(durations)}"
            )
        slow, fast = RATIO_PAIRS[benchmark]
        if slow in by_mode and fast in by_mode:
            mean_slow = _mean(by_mode[slow])
            mean_fast = _mean(by_mode[fast])
            if mean_fast > 0:
                ratio = f"{mean_slow / mean_fast:.3f}"
            else:
                ratio = "1.000" if mean_slow == 0 else "inf"
            lines.append(f"  {slow}/{fast} mean ratio: {ratio}")
        else:
            missing = slow if slow not in by_mode else fast
            lines.append(f"  ratio omitted: mode {missing!r} not in report")
    return "\n".join(lines)
