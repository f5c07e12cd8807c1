"""Command-line experiment runner.

Examples:

    tlpool-bench --benchmark pairs --modes pooled,unpooled \\
        --threads 1,2,4,8 --objects 50000000 --repeats 5 \\
        --csv pairs.csv --summary

    tlpool-bench --benchmark montecarlo --dims 100,200,400,800,1000 \\
        --evals 1000000 --threads 4 --repeats 10 --csv fig1a.csv --summary
"""

import argparse
import sys

from .errors import PoolError
from .harness import DeterminismError, ExperimentConfig, emit_csv, run_experiment, summarize


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list of integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected a non-empty comma list of integers")
    return values


def _mode_list(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tlpool-bench",
        description="Run the pooled-vs-unpooled allocation benchmarks and report timings.",
    )
    p.add_argument("--benchmark", required=True, choices=("montecarlo", "pairs"))
    p.add_argument("--modes", type=_mode_list, default=None,
                   help="comma list; default: both modes of the chosen benchmark")
    p.add_argument("--threads", type=_int_list, default=(1,),
                   help="comma list of worker counts (default: 1)")
    p.add_argument("--evals", type=_int_list, default=None,
                   help="montecarlo: comma list of evaluation counts (default: 1000000)")
    p.add_argument("--objects", type=_int_list, default=None,
                   help="pairs: comma list of object counts (default: 1000000)")
    p.add_argument("--dims", type=_int_list, default=None,
                   help="montecarlo: comma list of dimensions (default: 1000)")
    p.add_argument("--ring-size", type=int, default=10_000,
                   help="pairs: ring buffer length (default: 10000)")
    p.add_argument("--pool-size", type=int, default=100_000,
                   help="pairs: pool capacity in pooled mode (default: 100000)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=10,
                   help="timed runs per cell, after one untimed warm-up (default: 10)")
    p.add_argument("--csv", default=None, metavar="PATH",
                   help="write one row per timed run to PATH")
    p.add_argument("--summary", action="store_true",
                   help="print a mean/min/ratio table to standard output")
    return p


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    montecarlo = args.benchmark == "montecarlo"
    if montecarlo and args.objects is not None:
        raise ValueError("--objects applies to the pairs benchmark only")
    if not montecarlo and args.evals is not None:
        raise ValueError("--evals applies to the montecarlo benchmark only")
    if not montecarlo and args.dims is not None:
        raise ValueError("--dims applies to the montecarlo benchmark only")
    workloads = (args.evals if montecarlo else args.objects) or (1_000_000,)
    return ExperimentConfig(
        benchmark=args.benchmark,
        modes=args.modes or (),
        threads=args.threads,
        workloads=workloads,
        dims=args.dims or (1000,),
        ring_size=args.ring_size,
        pool_size=args.pool_size,
        seed=args.seed,
        repeats=args.repeats,
        csv_path=args.csv,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        report = run_experiment(cfg)
        if cfg.csv_path:
            emit_csv(report, cfg.csv_path)
            print(f"wrote {len(report.rows)} rows to {cfg.csv_path}", file=sys.stderr)
        if args.summary:
            print(summarize(report))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DeterminismError, PoolError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
