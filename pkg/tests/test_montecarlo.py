"""Random-search tests: rastrigin oracle, generators, and the full search."""

import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tlpool._common import split_workload
from tlpool.backend import available_backends, get_backend
from tlpool.montecarlo import (
    ArgumentGenerator,
    BoxBounds,
    monte_carlo_optimize,
    next_vector,
)


def rastrigin_oracle(xs):
    """Independent scripted evaluation (exact summation via fsum)."""
    return 10.0 * len(xs) + math.fsum(
        x * x - 10.0 * math.cos(2.0 * math.pi * x) for x in xs
    )


def reference_search(impl, dim, total_evals, threads, seed, bounds=None):
    """Brute-force re-implementation of the search through the public API."""
    bounds = bounds or BoxBounds.symmetric(dim)
    counts = split_workload(total_evals, threads)
    children = np.random.SeedSequence(seed).spawn(threads)
    locals_ = []
    for w in range(threads):
        rng = np.random.Generator(np.random.PCG64(children[w]))
        gen = ArgumentGenerator("fresh")
        best_val, best_point = np.inf, None
        for _ in range(counts[w]):
            x = gen.next_vector(bounds, rng)
            y = impl.rastrigin(x)
            if y < best_val:
                best_val, best_point = y, x.copy()
        locals_.append((best_val, best_point))
    best_val, best_point = np.inf, None
    for val, point in locals_:
        if val < best_val:
            best_val, best_point = val, point
    return best_val, best_point, locals_


class TestRastrigin:
    # oracle sanity: hand-derived values the assertions below rely on
    assert rastrigin_oracle([0.0]) == 0.0
    assert abs(rastrigin_oracle([1.0]) - 1.0) < 1e-12
    assert abs(rastrigin_oracle([0.5]) - 20.25) < 1e-12
    assert abs(rastrigin_oracle([0.5, 0.5]) - 40.5) < 1e-12

    @pytest.mark.parametrize("dim", [1, 10, 1000])
    def test_zero_vector_is_exact_minimum(self, backend, dim):
        assert backend.rastrigin(np.zeros(dim)) == 0.0

    @pytest.mark.parametrize("xs,expected", [
        ([1.0], 1.0),
        ([0.5], 20.25),
        ([0.5, 0.5], 40.5),
    ])
    def test_known_values(self, backend, xs, expected):
        got = backend.rastrigin(xs)
        assert abs(got - expected) <= 1e-9
        assert abs(got - rastrigin_oracle(xs)) <= 1e-9

    def test_rejects_empty_and_non_vector(self, backend):
        with pytest.raises(ValueError):
            backend.rastrigin([])
        with pytest.raises(ValueError):
            backend.rastrigin(np.zeros((2, 2)))

    @pytest.mark.parametrize("backend_name", available_backends())
    @settings(max_examples=80, deadline=None)
    @given(xs=st.lists(
        st.floats(-5.12, 5.12, allow_nan=False, allow_infinity=False),
        min_size=1, max_size=64,
    ))
    def test_matches_oracle(self, backend_name, xs):
        got = get_backend(backend_name).rastrigin(xs)
        want = rastrigin_oracle(xs)
        assert got == pytest.approx(want, rel=1e-12, abs=1e-9)


class TestBoxBounds:
    def test_symmetric_default(self):
        b = BoxBounds.symmetric(3)
        assert b.dim == 3
        assert (b.low == -5.12).all() and (b.high == 5.12).all()
        assert (b.span == 10.24).all()

    @pytest.mark.parametrize("low,high", [
        ([0.0], [1.0, 2.0]),  # length mismatch
        ([], []),             # empty
        ([1.0], [0.0]),       # inverted
        ([np.nan], [1.0]),    # not finite
    ])
    def test_validation(self, low, high):
        with pytest.raises(ValueError):
            BoxBounds(np.asarray(low), np.asarray(high))


class TestArgumentGenerator:
    def bounds(self, dim=6):
        return BoxBounds.symmetric(dim)

    def rng(self, seed=123):
        return np.random.Generator(np.random.PCG64(seed))

    def test_fresh_and_cached_emit_identical_sequences(self):
        fresh, cached = ArgumentGenerator("fresh"), ArgumentGenerator("cached")
        rng_f, rng_c = self.rng(), self.rng()
        for _ in range(5):
            xf = next_vector(fresh, self.bounds(), rng_f)
            xc = next_vector(cached, self.bounds(), rng_c)
            assert (xf == xc).all()

    def test_fresh_allocates_cached_reuses(self):
        fresh, cached = ArgumentGenerator("fresh"), ArgumentGenerator("cached")
        rng = self.rng()
        f1 = fresh.next_vector(self.bounds(), rng)
        f2 = fresh.next_vector(self.bounds(), rng)
        assert f1 is not f2
        c1 = cached.next_vector(self.bounds(), rng)
        first = c1.copy()
        c2 = cached.next_vector(self.bounds(), rng)
        assert c2 is c1  # same instance, fresh contents
        assert not (c2 == first).all()

    def test_cached_reallocates_on_dimension_change(self):
        cached = ArgumentGenerator("cached")
        rng = self.rng()
        c1 = cached.next_vector(self.bounds(4), rng)
        c2 = cached.next_vector(self.bounds(7), rng)
        assert c1 is not c2
        assert c2.shape == (7,)
        assert cached.next_vector(self.bounds(7), rng) is c2

    def test_degenerate_interval_returns_low_exactly(self):
        point = np.array([1.25, -3.5, 0.0])
        b = BoxBounds(point, point)
        x = ArgumentGenerator("fresh").next_vector(b, self.rng())
        assert (x == point).all()

    def test_coordinates_respect_bounds(self):
        b = BoxBounds(np.array([-1.0, 0.0]), np.array([-0.5, 2.0]))
        gen = ArgumentGenerator("cached")
        rng = self.rng()
        for _ in range(100):
            x = gen.next_vector(b, rng)
            assert (x >= b.low).all() and (x < b.high).all()

    def test_invalid_mode_rejected(self):
        with pytest.raises(ValueError):
            ArgumentGenerator("pooled")


class TestMonteCarloOptimize:
    def test_single_eval_incumbent_is_its_own_value(self, backend):
        res = monte_carlo_optimize(5, 1, threads=1, seed=9, backend=backend)
        assert res.incumbent.value == backend.rastrigin(res.incumbent.point)
        assert res.worker_evals == (1,)

    @pytest.mark.parametrize("threads", [1, 3])
    @pytest.mark.parametrize("seed", [0, 7])
    def test_fresh_and_cached_find_identical_incumbents(self, backend, threads, seed):
        a = monte_carlo_optimize(8, 500, threads=threads, seed=seed,
                                 mode="fresh", backend=backend)
        b = monte_carlo_optimize(8, 500, threads=threads, seed=seed,
                                 mode="cached", backend=backend)
        assert a.incumbent.value == b.incumbent.value
        assert (a.incumbent.point == b.incumbent.point).all()

    def test_matches_reference_search_exactly(self, backend):
        """Brute-force oracle: same points, same reduction, same incumbent."""
        res = monte_carlo_optimize(6, 400, threads=3, seed=21, backend=backend)
        want_val, want_point, locals_ = reference_search(backend, 6, 400, 3, 21)
        assert res.incumbent.value == want_val
        assert (res.incumbent.point == want_point).all()
        assert all(res.incumbent.value <= lv for lv, _ in locals_)

    def test_runs_are_bit_reproducible(self, backend):
        a = monte_carlo_optimize(12, 300, threads=2, seed=5, backend=backend)
        b = monte_carlo_optimize(12, 300, threads=2, seed=5, backend=backend)
        assert a.incumbent.value == b.incumbent.value
        assert (a.incumbent.point == b.incumbent.point).all()

    def test_incumbent_value_matches_recomputation(self, backend):
        res = monte_carlo_optimize(10, 200, threads=2, seed=3, backend=backend)
        assert res.incumbent.value == backend.rastrigin(res.incumbent.point)
        assert res.incumbent.value == pytest.approx(
            rastrigin_oracle(res.incumbent.point), rel=1e-12)

    def test_worker_eval_partition(self, backend):
        res = monte_carlo_optimize(2, 10, threads=4, seed=0, backend=backend)
        assert res.worker_evals == (2, 2, 2, 4)
        assert sum(res.worker_evals) == 10

    def test_custom_bounds(self, backend):
        b = BoxBounds(np.array([1.0, 1.0]), np.array([2.0, 3.0]))
        res = monte_carlo_optimize(2, 50, threads=1, seed=4, bounds=b,
                                   backend=backend)
        assert (res.incumbent.point >= b.low).all()
        assert (res.incumbent.point <= b.high).all()

    def test_argument_validation(self, backend):
        with pytest.raises(ValueError):
            monte_carlo_optimize(0, 10, backend=backend)
        with pytest.raises(ValueError):
            monte_carlo_optimize(2, 3, threads=4, backend=backend)
        with pytest.raises(ValueError):
            monte_carlo_optimize(2, 10, mode="pooled", backend=backend)
        with pytest.raises(ValueError):
            monte_carlo_optimize(2, 10, bounds=BoxBounds.symmetric(3),
                                 backend=backend)

    def test_worker_failure_aborts_with_diagnostic(self):
        def boom(*args):
            raise ZeroDivisionError("kernel exploded")

        fake = SimpleNamespace(mc_worker=boom)
        with pytest.raises(RuntimeError, match="worker 0 failed"):
            monte_carlo_optimize(2, 10, threads=1, backend=fake)

    def test_value_ties_go_to_lowest_worker_index(self):
        def tied_worker(dim, low, span, count, bit_gen, fresh):
            return 5.0, np.full(dim, float(count))

        fake = SimpleNamespace(mc_worker=tied_worker)
        res = monte_carlo_optimize(2, 3, threads=2, backend=fake)
        # workers got counts (1, 2); the tie must resolve to worker 0
        assert res.incumbent.value == 5.0
        assert (res.incumbent.point == 1.0).all()


class TestSplitWorkload:
    def test_tail_heavy_partition(self):
        assert split_workload(10, 4) == [2, 2, 2, 4]
        assert split_workload(12, 4) == [3, 3, 3, 3]
        assert split_workload(5, 1) == [5]
        assert split_workload(4, 4) == [1, 1, 1, 1]

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            split_workload(3, 4)
        with pytest.raises(ValueError):
            split_workload(3, 0)

    @settings(max_examples=100, deadline=None)
    @given(total=st.integers(1, 10**9), parts=st.integers(1, 64))
    def test_partition_properties(self, total, parts):
        if total < parts:
            total += parts
        counts = split_workload(total, parts)
        assert len(counts) == parts
        assert sum(counts) == total
        share = total // parts
        assert all(c == share for c in counts[:-1])
        assert counts[-1] >= share
