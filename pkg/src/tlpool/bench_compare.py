"""Compare the compiled kernels against the pure-Python fallback.

Runs both benchmarks in both modes on every available backend and prints
mean wall-clock times plus the compiled-over-pure speedup. Checksums are
cross-checked between backends: pairs totals must match exactly, search
incumbents to tight relative tolerance (the two backends sum the test
function in different association orders).

Usage: ``python -m tlpool.bench_compare [--objects N] [--evals N] ...``
"""

import argparse
import os
import sys

from .backend import available_backends, get_backend
from .harness import ExperimentConfig, run_experiment


def _mean_ms(report, mode):
    durations = [r.duration_ms for r in report.rows if r.mode == mode]
    return sum(durations) / len(durations)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--objects", type=int, default=2_000_000)
    p.add_argument("--evals", type=int, default=20_000)
    p.add_argument("--dim", type=int, default=200)
    p.add_argument("--threads", type=int, default=min(4, os.cpu_count() or 1))
    p.add_argument("--ring-size", type=int, default=10_000)
    p.add_argument("--pool-size", type=int, default=100_000)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    backends = available_backends()
    if "compiled" not in backends:
        print("note: compiled backend not built; reporting pure only", file=sys.stderr)

    configs = {
        "pairs": ExperimentConfig(
            benchmark="pairs", threads=(args.threads,), workloads=(args.objects,),
            ring_size=args.ring_size, pool_size=args.pool_size,
            seed=args.seed, repeats=args.repeats,
        ),
        "montecarlo": ExperimentConfig(
            benchmark="montecarlo", threads=(args.threads,), workloads=(args.evals,),
            dims=(args.dim,), seed=args.seed, repeats=args.repeats,
        ),
    }

    means: dict[tuple, float] = {}
    checksums: dict[tuple, float] = {}
    for name in backends:
        impl = get_backend(name)
        for benchmark, cfg in configs.items():
            report = run_experiment(cfg, backend=impl)
            for mode in {row.mode for row in report.rows}:
                means[benchmark, mode, name] = _mean_ms(report, mode)
                checksums[benchmark, mode, name] = next(
                    r.checksum for r in report.rows if r.mode == mode
                )

    print(f"{'benchmark':<11} {'mode':<9} " +
          " ".join(f"{b + ' ms':>12}" for b in backends) +
          ("  speedup" if len(backends) == 2 else ""))
    for benchmark in configs:
        for mode in ("unpooled", "pooled") if benchmark == "pairs" else ("fresh", "cached"):
            cells = [means[benchmark, mode, b] for b in backends]
            line = f"{benchmark:<11} {mode:<9} " + " ".join(f"{c:>12.1f}" for c in cells)
            if len(backends) == 2:
                compiled, pure = (means[benchmark, mode, "compiled"],
                                  means[benchmark, mode, "pure"])
                line += f"  {pure / compiled:>6.1f}x" if compiled > 0 else "       -"
            print(line)

    ok = True
    if len(backends) == 2:
        for (benchmark, mode) in {(b, m) for (b, m, _) in means}:
            a = checksums[benchmark, mode, "compiled"]
            b = checksums[benchmark, mode, "pure"]
            exact = benchmark == "pairs"
            agree = a == b if exact else abs(a - b) <= 1e-12 * max(abs(a), abs(b))
            if not agree:
                ok = False
                print(f"checksum mismatch: {benchmark}/{mode}: compiled={a!r} pure={b!r}",
                      file=sys.stderr)
        print("cross-backend checksums:", "ok" if ok else "MISMATCH")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
