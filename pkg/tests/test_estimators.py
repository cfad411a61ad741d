import numpy as np
import pytest
from sklearn.base import clone

from powertrpo import baselines, netmodel
from powertrpo.estimators import (FPAllocator, MaxPowerAllocator, RandomPowerAllocator,
                                  TRPOPowerAllocator, WMMSEAllocator, check_channels)
from powertrpo.exceptions import ShapeError


@pytest.fixture(scope="module")
def X():
    return MaxPowerAllocator().sample_channels(30, random_state=0)


class TestCheckChannels:
    def test_promotes_single_tensor(self, X):
        assert check_channels(X[0]).shape == (1, 3, 3, 2)

    @pytest.mark.parametrize("bad", [np.zeros((2, 3, 2, 2)), np.zeros((0, 3, 3, 2)), np.zeros(5),
                                     np.full((1, 3, 3, 2), np.nan), np.array([["a"]])])
    def test_rejects(self, bad):
        with pytest.raises(ShapeError):
            check_channels(bad)

    def test_scenario_mismatch(self, X):
        with pytest.raises(ShapeError):
            check_channels(X, netmodel.NetworkConfig(users_per_cell=3))


class TestBaselineEstimators:
    def test_max_power(self, X):
        P = MaxPowerAllocator().fit().predict(X)
        assert P.shape == (30, 3, 2)
        np.testing.assert_array_equal(P, netmodel.NetworkConfig().pmax_watts)

    def test_score_is_mean_sum_rate(self, X):
        est = MaxPowerAllocator().fit()
        cfg = netmodel.NetworkConfig()
        expected = np.mean(netmodel.sum_rate(X, baselines.max_power(cfg), netmodel.noise_power(cfg), cfg.bandwidth))
        assert est.score(X) == pytest.approx(expected, rel=1e-12)

    def test_random_reproducible(self, X):
        a = RandomPowerAllocator(random_state=4).fit().predict(X)
        np.testing.assert_array_equal(a, RandomPowerAllocator(random_state=4).fit().predict(X))
        assert not np.array_equal(a, RandomPowerAllocator(random_state=5).fit().predict(X))

    @pytest.mark.parametrize("cls,solver", [(WMMSEAllocator, baselines.wmmse), (FPAllocator, baselines.fp)])
    def test_iterative_matches_solver(self, X, cls, solver):
        P = cls(max_iters=50).fit().predict(X[:3])
        for H, p in zip(X[:3], P):
            np.testing.assert_array_equal(p, solver(H, netmodel.NetworkConfig(), 50).final_powers)

    def test_solvers_outscore_max_power(self, X):
        assert FPAllocator().fit().score(X) > MaxPowerAllocator().fit().score(X)

    def test_unfitted(self, X):
        from sklearn.exceptions import NotFittedError
        with pytest.raises(NotFittedError):
            FPAllocator().predict(X)

    def test_clone_keeps_params(self):
        est = WMMSEAllocator(pmax_dbm=30.0, tol=1e-6)
        assert clone(est).get_params() == est.get_params()


@pytest.fixture(scope="module")
def fitted():
    return TRPOPowerAllocator(scheme="partial", iterations=3, episodes_per_iter=16,
                              hidden_sizes=(8,), random_state=1).fit()


class TestTRPOEstimator:
    def test_curve_and_predict(self, fitted, X):
        assert fitted.learning_curve().shape == (3,)
        assert fitted.learning_curve(smoothed=False).shape == (3,)
        P = fitted.predict(X)
        assert P.shape == (30, 3, 2)
        assert np.all((P >= 0) & (P <= netmodel.NetworkConfig().pmax_watts))
        assert fitted.score(X) > 0

    def test_refit_deterministic(self, fitted, X):
        again = clone(fitted).fit()
        np.testing.assert_array_equal(again.model_.theta, fitted.model_.theta)
        np.testing.assert_array_equal(again.predict(X), fitted.predict(X))

    @pytest.mark.parametrize("scheme", ["centralized", "full"])
    def test_fixed_channel_fit(self, X, scheme):
        est = TRPOPowerAllocator(scheme=scheme, iterations=2, episodes_per_iter=8, hidden_sizes=(4,))
        est.fit(X[:5])
        assert est.model_.task.fixed_channels.shape == (5, 3, 3, 2)
        assert est.predict(X[:2]).shape == (2, 3, 2)
