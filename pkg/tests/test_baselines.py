import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powertrpo import baselines, netmodel
from powertrpo.exceptions import NumericalError

CFG = netmodel.NetworkConfig()
PMAX = CFG.pmax_watts
Z = netmodel.noise_power(CFG)
SOLVERS = {"wmmse": baselines.wmmse, "fp": baselines.fp}


@pytest.fixture(scope="module")
def instances():
    rng = np.random.default_rng(2024)
    return [netmodel.sample_realization(CFG, rng) for _ in range(100)]


@pytest.fixture(scope="module")
def traces(instances):
    return {name: [solve(H, CFG) for H in instances] for name, solve in SOLVERS.items()}


class TestSimpleAllocators:
    def test_max_power(self):
        P = baselines.max_power(CFG)
        assert P.shape == (3, 2)
        np.testing.assert_allclose(P, 19.953, atol=5e-4)
        assert netmodel.is_feasible(P, PMAX)

    def test_max_power_sum_mode_projection(self):
        P = netmodel.project_powers(baselines.max_power(CFG), PMAX, "sum_power")
        np.testing.assert_allclose(P, PMAX / 2)

    def test_random_mean_and_bounds(self):
        rng = np.random.default_rng(0)
        draws = np.stack([baselines.random_power(CFG, rng) for _ in range(20_000)])  # 1.2e5 entries
        assert abs(draws.mean() - PMAX / 2) < 0.01 * PMAX / 2
        assert draws.min() >= 0 and draws.max() <= PMAX

    def test_random_seeded(self):
        a = baselines.random_power(CFG, np.random.default_rng(3))
        np.testing.assert_array_equal(a, baselines.random_power(CFG, np.random.default_rng(3)))


class TestIterativeSolvers:
    @pytest.mark.parametrize("name", SOLVERS)
    def test_monotone_traces(self, traces, name):
        for tr in traces[name]:
            se = np.asarray(tr.sum_rates) / CFG.bandwidth    # bits/s/Hz
            assert np.all(np.isfinite(se))
            assert np.all(np.diff(se) >= -1e-9)

    @pytest.mark.parametrize("name", SOLVERS)
    def test_iterates_feasible(self, traces, name):
        for tr in traces[name]:
            assert all(netmodel.is_feasible(P, PMAX) for P in tr.powers)
            assert len(tr.sum_rates) <= baselines.DEFAULT_MAX_ITERS + 1
            assert tr.converged

    @pytest.mark.parametrize("name", SOLVERS)
    def test_beat_simple_allocators(self, instances, traces, name):
        rng = np.random.default_rng(1)
        wins = 0
        for H, tr in zip(instances, traces[name]):
            r_max = netmodel.sum_rate(H, baselines.max_power(CFG), Z, CFG.bandwidth)
            r_rand = netmodel.sum_rate(H, baselines.random_power(CFG, rng), Z, CFG.bandwidth)
            wins += tr.final_rate >= r_max and tr.final_rate >= r_rand
        assert wins >= 95

    def test_solvers_agree_on_average(self, traces):
        fp = np.mean([t.final_rate for t in traces["fp"]])
        wm = np.mean([t.final_rate for t in traces["wmmse"]])
        assert abs(fp - wm) / wm < 0.03

    @pytest.mark.parametrize("name", SOLVERS)
    def test_single_link_full_power(self, name):
        cfg = netmodel.NetworkConfig(num_cells=1, users_per_cell=1)
        H = netmodel.sample_realization(cfg, np.random.default_rng(5))
        tr = SOLVERS[name](H, cfg)
        assert tr.final_powers[0, 0] == cfg.pmax_watts

    @pytest.mark.parametrize("name", SOLVERS)
    @given(phase=st.floats(0, 2 * np.pi), seed=st.integers(0, 1000))
    @settings(max_examples=15, deadline=None)
    def test_global_phase_invariance(self, name, phase, seed):
        H = netmodel.sample_realization(CFG, np.random.default_rng(seed))
        a = SOLVERS[name](H, CFG)
        b = SOLVERS[name](H * np.exp(1j * phase), CFG)
        np.testing.assert_allclose(b.final_powers, a.final_powers, rtol=1e-9)

    @pytest.mark.parametrize("name", SOLVERS)
    def test_deterministic_and_budget(self, instances, name):
        H = instances[0]
        a, b = SOLVERS[name](H, CFG, 2, 1e-12), SOLVERS[name](H, CFG, 2, 1e-12)
        assert a.iterations == 2 and not a.converged
        np.testing.assert_array_equal(a.final_powers, b.final_powers)

    def test_trace_rows(self, traces):
        tr = traces["fp"][0]
        rows = tr.rows()
        assert rows[0]["iterate"] == 0
        assert rows[-1]["sum_rate_mbps"] == tr.final_rate / 1e6

    @pytest.mark.parametrize("name", SOLVERS)
    def test_non_finite_iterate(self, name):
        H = np.full((3, 3, 2), np.nan, dtype=complex)
        with pytest.raises(NumericalError):
            SOLVERS[name](H, CFG)
