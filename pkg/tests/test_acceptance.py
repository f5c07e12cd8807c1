"""Acceptance suite: the release criteria, one test each, pass/fail printed.

Run with ``pytest -s tests/test_acceptance.py`` to see the per-criterion
lines and the desk-scale performance report. These tests exercise the
active backend (the compiled core in a built package).
"""

import math
import os
import time
from contextlib import contextmanager

import numpy as np
import pytest

import tlpool
from tlpool import (
    ExperimentConfig,
    PairWorkload,
    emit_csv,
    expected_pairs_sum,
    monte_carlo_optimize,
    parse_csv,
    run_experiment,
    run_pairs_benchmark,
    summarize,
)
from tlpool.errors import PoolLifecycleError, PoolOwnershipError, PoolStateError

from conftest import call_in_thread


@contextmanager
def criterion(label):
    state = {"ok": False, "detail": ""}
    start = time.perf_counter()
    try:
        yield state
        state["ok"] = True
    finally:
        elapsed = time.perf_counter() - start
        line = f"criterion {label}: {'PASS' if state['ok'] else 'FAIL'} ({elapsed:.1f}s)"
        if state["detail"]:
            line += f" | {state['detail']}"
        print("\n" + line, flush=True)


def rastrigin_oracle(xs):
    return 10.0 * len(xs) + math.fsum(
        x * x - 10.0 * math.cos(2.0 * math.pi * x) for x in xs
    )


def test_criterion_1_pool_invariant_suite():
    with criterion("1 (pool invariants)") as state:
        start = time.perf_counter()

        # conservation under interleaved acquire/release, with exhaustion
        reg = tlpool.PoolRegistry(pool_size=3)
        f = tlpool.PairItemFactory()
        pool = reg.get_thread_local_pool(f)
        held = []
        for step in "aaaaarraarrrrrr":
            if step == "a":
                held.append(reg.acquire(f))
            elif held:
                held.pop().release()
            outstanding = sum(1 for it in held if it.is_managed)
            assert pool.available + outstanding == pool.capacity

        # LIFO order
        reg = tlpool.PoolRegistry(pool_size=4)
        a, b = reg.acquire(f), reg.acquire(f)
        a.release()
        b.release()
        assert reg.acquire(f) is b and reg.acquire(f) is a

        # double release carries the lifecycle message
        item = reg.acquire(f)
        item.release()
        with pytest.raises(PoolLifecycleError) as exc:
            item.release()
        assert str(exc.value) == "Object not currently used"

        # unmanaged release is a no-op
        reg = tlpool.PoolRegistry(pool_size=1)
        reg.acquire(f)
        extra = reg.acquire(f)
        assert not extra.is_managed
        extra.release()
        extra.release()

        # exhaustion fallback always succeeds and preserves results
        sums = {
            size: run_pairs_benchmark(
                PairWorkload(total_objects=5000, threads=2, ring_size=64,
                             mode="pooled", pool_size=size)).total_value
            for size in (1, 100_000)
        }
        assert sums[1] == sums[100_000] == expected_pairs_sum(5000)

        # cross-thread release detection
        reg = tlpool.PoolRegistry(pool_size=2)
        foreign = call_in_thread(reg.acquire, f)
        with pytest.raises(PoolOwnershipError):
            foreign.release()

        # pool-size gate: open before the first pool, closed after
        reg = tlpool.PoolRegistry()
        reg.set_pool_size(7)
        assert reg.get_pool_size() == 7
        reg.acquire(f)
        with pytest.raises(PoolStateError):
            reg.set_pool_size(9)

        # per-thread pool distinctness
        reg = tlpool.PoolRegistry(pool_size=2)
        mine = reg.get_thread_local_pool(f)
        theirs = call_in_thread(reg.get_thread_local_pool, f)
        assert mine is not theirs

        elapsed = time.perf_counter() - start
        state["detail"] = f"runtime {elapsed:.2f}s (< 5s)"
        assert elapsed < 5.0


def test_criterion_2_montecarlo_mode_equivalence():
    with criterion("2 (search mode equivalence)") as state:
        start = time.perf_counter()
        cells = 0
        for dim in (2, 10, 100):
            for evals in (1000, 100_000):
                for threads in (1, 4):
                    for seed in (0, 1, 42):
                        fresh = monte_carlo_optimize(
                            dim, evals, threads=threads, seed=seed, mode="fresh")
                        cached = monte_carlo_optimize(
                            dim, evals, threads=threads, seed=seed, mode="cached")
                        assert fresh.incumbent.value == cached.incumbent.value
                        assert (fresh.incumbent.point == cached.incumbent.point).all()
                        recomputed = tlpool.rastrigin(fresh.incumbent.point)
                        assert fresh.incumbent.value == recomputed
                        assert abs(fresh.incumbent.value
                                   - rastrigin_oracle(fresh.incumbent.point)) <= 1e-9
                        cells += 1
        elapsed = time.perf_counter() - start
        state["detail"] = f"{cells} cells, runtime {elapsed:.1f}s (< 30s)"
        assert elapsed < 30.0


def test_criterion_3_rastrigin_oracle():
    with criterion("3 (rastrigin oracle)") as state:
        for dim in (1, 10, 1000):
            assert tlpool.rastrigin(np.zeros(dim)) == 0.0
        for xs, expected in (([0.5], 20.25), ([1.0], 1.0)):
            got = tlpool.rastrigin(xs)
            assert abs(got - expected) <= 1e-9
            assert abs(got - rastrigin_oracle(xs)) <= 1e-9
        state["detail"] = "origin exact at dims 1/10/1000; 20.25 and 1.0 within 1e-9"


def test_criterion_4_pairs_checksum_oracle():
    with criterion("4 (pairs checksum oracle)") as state:
        start = time.perf_counter()
        runs = 0
        for total in (10, 1000, 1_000_000):
            expected = expected_pairs_sum(total)
            for threads in (1, 3, 8):
                if total < threads:
                    continue
                for ring_size in (1, 7, 10_000):
                    for pool_size in (1, 100, 100_000):
                        totals = {}
                        for mode in ("unpooled", "pooled"):
                            workload = PairWorkload(
                                total_objects=total, threads=threads,
                                ring_size=ring_size, mode=mode,
                                pool_size=pool_size)
                            totals[mode] = run_pairs_benchmark(workload).total_value
                            runs += 1
                        assert totals["unpooled"] == expected
                        assert totals["pooled"] == expected
        elapsed = time.perf_counter() - start
        state["detail"] = f"{runs} runs, runtime {elapsed:.1f}s (< 30s)"
        assert elapsed < 30.0


def test_criterion_5_desk_scale_performance_report():
    with criterion("5 (desk-scale performance report)") as state:
        cpus = os.cpu_count() or 1
        pairs_cfg = ExperimentConfig(
            benchmark="pairs", threads=(cpus,), workloads=(50_000_000,),
            repeats=5, seed=0,
        )
        pairs_report = run_experiment(pairs_cfg)
        print("\n" + summarize(pairs_report), flush=True)

        durations = {"unpooled": [], "pooled": []}
        for row in pairs_report.rows:
            durations[row.mode].append(row.duration_ms)
        mean_unpooled = sum(durations["unpooled"]) / len(durations["unpooled"])
        mean_pooled = sum(durations["pooled"]) / len(durations["pooled"])

        mc_cfg = ExperimentConfig(
            benchmark="montecarlo", threads=(cpus,), workloads=(1_000_000,),
            dims=(1000,), repeats=1, seed=0,
        )
        mc_report = run_experiment(mc_cfg)
        print(summarize(mc_report), flush=True)

        state["detail"] = (
            f"pairs unpooled/pooled ratio {mean_unpooled / mean_pooled:.2f} "
            f"at {cpus} threads (gate: pooled mean <= unpooled mean)"
        )
        # directional gate applies to the pairs benchmark only; the search
        # comparison is report-only
        assert mean_pooled <= mean_unpooled


def test_criterion_6_determinism_and_csv_round_trip(tmp_path):
    with criterion("6 (determinism gate)") as state:
        pairs_cfg = ExperimentConfig(
            benchmark="pairs", threads=(2,), workloads=(100_000,),
            ring_size=1000, pool_size=500, repeats=10,
        )
        pairs_report = run_experiment(pairs_cfg)  # gate raises on any drift
        for mode in ("unpooled", "pooled"):
            checksums = {r.checksum for r in pairs_report.rows if r.mode == mode}
            assert len(checksums) == 1

        mc_cfg = ExperimentConfig(
            benchmark="montecarlo", threads=(2,), workloads=(2000,),
            dims=(10,), repeats=10, seed=42,
        )
        mc_report = run_experiment(mc_cfg)
        for mode in ("fresh", "cached"):
            assert len({r.checksum for r in mc_report.rows if r.mode == mode}) == 1

        for report in (pairs_report, mc_report):
            path = tmp_path / "roundtrip.csv"
            emit_csv(report, path)
            assert parse_csv(path).rows == report.rows
        state["detail"] = "10/10 identical checksums per cell; CSV round trip exact"
