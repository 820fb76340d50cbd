"""Synthetic-study and scaling-harness tests."""

import numpy as np
import pytest

from hipllm.harness import (
    GroundTruth,
    default_ground_truth,
    fit_power_law,
    generate_counts,
    op_scenarios,
    run_rq5,
    run_scaling_sweep,
    summarize_method,
)
from hipllm.model import GridSpec, McSpec
from hipllm.numerics import RngState

FAST_GRID = GridSpec(n_mu=16, n_nu=12)
FAST_MC = McSpec(samples_per_config=500, configs_per_domain=16, master_seed=0, t_grid_size=101)


class TestGroundTruth:
    def test_reference_system_reliability(self):
        gt = default_ground_truth()
        assert gt.p_system == pytest.approx(0.5860, abs=1e-12)

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            GroundTruth(theta=(0.5, 0.5), op=(0.6, 0.6), sample_sizes=(10, 10), domain_sizes=(2,))


class TestGenerateCounts:
    def test_certain_success(self):
        gt = GroundTruth((1.0, 1.0), (0.5, 0.5), (50, 70), domain_sizes=(2,))
        counts = generate_counts(gt, seed=1)
        assert [c.correct for c in counts] == [50, 70]

    def test_certain_failure(self):
        gt = GroundTruth((0.0, 0.0), (0.5, 0.5), (50, 70), domain_sizes=(2,))
        counts = generate_counts(gt, seed=1)
        assert [c.correct for c in counts] == [0, 0]

    def test_three_sigma_binomial(self):
        gt = GroundTruth((0.75,), (1.0,), (100_000,), domain_sizes=(1,))
        counts = generate_counts(gt, seed=5)
        assert abs(counts[0].correct / counts[0].total - 0.75) <= 0.004

    def test_deterministic(self):
        gt = default_ground_truth()
        a = generate_counts(gt, seed=2)
        b = generate_counts(gt, seed=2)
        assert a == b


class TestOpScenarios:
    def test_dataset_proportional(self):
        gt = default_ground_truth()
        scen = op_scenarios(gt, noise=0.2, seed=0)
        np.testing.assert_allclose(
            scen["data"], np.array([100, 500, 1000, 300]) / 1900, atol=1e-10
        )
        assert scen["data"][0] == pytest.approx(0.0526, abs=5e-5)

    def test_zero_noise_recovers_ground_truth(self):
        gt = default_ground_truth()
        scen = op_scenarios(gt, noise=0.0, seed=0)
        np.testing.assert_allclose(scen["approx"], gt.op, atol=1e-15)

    def test_all_sum_to_one(self):
        gt = default_ground_truth()
        scen = op_scenarios(gt, noise=0.2, seed=9)
        for vec in scen.values():
            assert sum(vec) == pytest.approx(1.0, abs=1e-12)


class TestSummarizeMethod:
    def test_scalar_median_interpolation(self):
        samples = np.arange(1, 11) / 10.0
        s = summarize_method("x", samples, p_gt=0.5)
        assert s.median == (pytest.approx(0.55), pytest.approx(0.55))
        assert s.scalar

    def test_single_config_collapses(self):
        samples = [np.arange(1, 11) / 10.0]
        s = summarize_method("x", samples, p_gt=0.5)
        assert s.median[0] == s.median[1]
        assert s.scalar

    def test_two_config_bounds(self):
        a = np.full(11, 0.57)
        b = np.full(11, 0.58)
        s = summarize_method("x", [a, b], p_gt=0.586)
        assert s.median == (pytest.approx(0.57), pytest.approx(0.58))
        assert s.error[0] == pytest.approx(0.006)
        assert s.error[1] == pytest.approx(0.016)

    def test_permutation_invariant(self):
        rng = RngState(1)
        samples = rng.gen.random(101)
        shuffled = samples.copy()
        rng.gen.shuffle(shuffled)
        a = summarize_method("x", samples, 0.5)
        b = summarize_method("x", shuffled, 0.5)
        assert a == b


class TestRunRq5:
    def test_fast_smoke(self):
        gt = default_ground_truth()
        rows = run_rq5(gt, {"small": (100, 500, 1000, 300)}, seed=3, grid=FAST_GRID, mc=FAST_MC)
        assert len(rows) == 9  # 3 scenarios x 3 methods
        for row in rows:
            lo, hi = row.summary.median
            assert 0.0 <= lo <= hi <= 1.0
            # sanity: everything lands near the ground truth
            assert abs(row.summary.median_mid - 0.586) < 0.1

    def test_scenarios_identical_when_op_matches_data(self):
        # sizes proportional to the true weights and zero noise make all
        # three scenarios the same system, hence identical tables
        gt = GroundTruth(
            theta=(0.75, 0.65, 0.58, 0.45),
            op=(0.30, 0.10, 0.20, 0.40),
            sample_sizes=(300, 100, 200, 400),
        )
        rows = run_rq5(
            gt, {"r": (300, 100, 200, 400)}, noise=0.0, seed=4, grid=FAST_GRID, mc=FAST_MC
        )
        by_scenario = {}
        for row in rows:
            by_scenario.setdefault(row.summary.method, {})[row.scenario] = row.summary
        for method, summaries in by_scenario.items():
            vals = list(summaries.values())
            assert vals[0] == vals[1] == vals[2]


class TestScaling:
    def test_power_law_exact(self):
        c, a = fit_power_law([1, 2, 4, 8], [2, 4, 8, 16])
        assert c == pytest.approx(2.0, rel=1e-9)
        assert a == pytest.approx(1.0, abs=1e-9)

    def test_power_law_quadratic(self):
        xs = [1.0, 2.0, 3.0, 5.0]
        c, a = fit_power_law(xs, [3 * x ** 2 for x in xs])
        assert c == pytest.approx(3.0, rel=1e-9)
        assert a == pytest.approx(2.0, abs=1e-9)

    def test_power_law_with_noise(self):
        rng = RngState(6)
        xs = np.linspace(1, 50, 20)
        ys = 5 * xs ** 1.5 * (1 + rng.gen.uniform(-0.01, 0.01, size=xs.size))
        _, a = fit_power_law(xs, ys)
        assert 1.4 <= a <= 1.6

    def test_power_law_degenerate(self):
        with pytest.raises(ValueError):
            fit_power_law([2, 2, 2], [1, 2, 3])
        with pytest.raises(ValueError):
            fit_power_law([1, 2], [1, 2])

    def test_sweep_validation(self):
        with pytest.raises(ValueError):
            run_scaling_sweep("bogus", [1, 2, 3])
        with pytest.raises(ValueError):
            run_scaling_sweep("m", [4, 2, 1])

    def test_tiny_sweep_records(self):
        # minimal end-to-end run; acceptance covers the full-scale exponents
        import hipllm.harness as harness

        orig_mc, orig_grid = harness.default_mc, harness.default_grid
        harness.default_mc = lambda: FAST_MC
        harness.default_grid = lambda: FAST_GRID
        try:
            records = run_scaling_sweep("m", [1, 2], seed=1)
        finally:
            harness.default_mc, harness.default_grid = orig_mc, orig_grid
        assert [r.value for r in records] == [1.0, 2.0]
        assert all(r.seconds > 0 and r.peak_bytes > 0 for r in records)
