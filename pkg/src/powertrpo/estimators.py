"""scikit-learn style wrappers around the allocators.

Every allocator maps a stack of channel tensors ``X`` shaped ``(n, B, B, K)``
to power matrices ``(n, B, K)``; ``score`` is the mean network sum-rate in
bits/s, so higher is better as scikit-learn expects.  Learned allocators
train in :meth:`fit`; the model-based ones only record the scenario.

    >>> est = TRPOPowerAllocator(iterations=50, episodes_per_iter=50, hidden_sizes=(32, 32))
    >>> est.fit().score(X_test)  # doctest: +SKIP
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import agents, baselines, netmodel
from .exceptions import ShapeError
from .trpo import TrpoConfig


def check_channels(X, cfg: netmodel.NetworkConfig | None = None) -> np.ndarray:
    """Validate a channel stack and return it as a complex ``(n, B, B, K)`` array.

    A single ``(B, B, K)`` tensor is promoted to a stack of one.
    """
    X = np.asarray(X)
    if X.ndim == 3:
        X = X[None]
    if X.ndim != 4 or X.shape[1] != X.shape[2]:
        raise ShapeError(f"channels must be shaped (n, B, B, K), got {X.shape}")
    if X.shape[0] == 0:
        raise ShapeError("channel stack is empty")
    if cfg is not None and X.shape[1:] != (cfg.num_cells, cfg.num_cells, cfg.users_per_cell):
        raise ShapeError(f"channels {X.shape[1:]} do not match a {cfg.num_cells}-cell, "
                         f"{cfg.users_per_cell}-user scenario")
    if not np.issubdtype(X.dtype, np.number):
        raise ShapeError(f"channels must be numeric, got dtype {X.dtype}")
    X = X.astype(complex, copy=False)
    if not np.all(np.isfinite(X)):
        raise ShapeError("channels contain NaN or infinite entries")
    return X


class _ScenarioMixin:
    """Shared scenario parameters and the sum-rate score."""

    def _network(self) -> netmodel.NetworkConfig:
        return netmodel.NetworkConfig(
            num_cells=self.num_cells, users_per_cell=self.users_per_cell,
            pmax_dbm=self.pmax_dbm, pathloss_exponent=self.pathloss_exponent, layout=self.layout)

    def sample_channels(self, n: int, random_state=None) -> np.ndarray:
        """``n`` fresh realizations of the configured scenario."""
        rng = np.random.default_rng(random_state)
        cfg = self._network()
        return np.stack([netmodel.sample_realization(cfg, rng) for _ in range(n)])

    def score(self, X, y=None) -> float:
        """Mean network sum-rate (bits/s) of the predicted allocations."""
        cfg = self.network_
        X = check_channels(X, cfg)
        P = self.predict(X)
        return float(np.mean(netmodel.sum_rate(X, P, netmodel.noise_power(cfg), cfg.bandwidth)))


class _BaselineAllocator(_ScenarioMixin, BaseEstimator):
    def __init__(self, num_cells=3, users_per_cell=2, pmax_dbm=43.0, pathloss_exponent=3.76,
                 layout="line3"):
        self.num_cells = num_cells
        self.users_per_cell = users_per_cell
        self.pmax_dbm = pmax_dbm
        self.pathloss_exponent = pathloss_exponent
        self.layout = layout

    def fit(self, X=None, y=None):
        self.network_ = self._network()
        if X is not None:
            check_channels(X, self.network_)
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "network_")
        X = check_channels(X, self.network_)
        return np.stack([self._allocate(H, i) for i, H in enumerate(X)])


class MaxPowerAllocator(_BaselineAllocator):
    def _allocate(self, H, i):
        return baselines.max_power(self.network_)


class RandomPowerAllocator(_BaselineAllocator):
    def __init__(self, num_cells=3, users_per_cell=2, pmax_dbm=43.0, pathloss_exponent=3.76,
                 layout="line3", random_state=0):
        super().__init__(num_cells, users_per_cell, pmax_dbm, pathloss_exponent, layout)
        self.random_state = random_state

    def _allocate(self, H, i):
        rng = np.random.default_rng([self.random_state, i])
        return baselines.random_power(self.network_, rng)


class _IterativeAllocator(_BaselineAllocator):
    _solver = None

    def __init__(self, num_cells=3, users_per_cell=2, pmax_dbm=43.0, pathloss_exponent=3.76,
                 layout="line3", max_iters=baselines.DEFAULT_MAX_ITERS, tol=baselines.DEFAULT_TOL):
        super().__init__(num_cells, users_per_cell, pmax_dbm, pathloss_exponent, layout)
        self.max_iters = max_iters
        self.tol = tol

    def _allocate(self, H, i):
        return type(self)._solver(H, self.network_, self.max_iters, self.tol).final_powers


class WMMSEAllocator(_IterativeAllocator):
    _solver = staticmethod(baselines.wmmse)


class FPAllocator(_IterativeAllocator):
    _solver = staticmethod(baselines.fp)


class TRPOPowerAllocator(_ScenarioMixin, BaseEstimator):
    """Trust-region (or A2C) trained power-allocation policy.

    ``fit(X)`` with a channel stack trains on those realizations only (a
    contextual bandit over ``X``); ``fit()`` draws fresh realizations every
    episode, which is the usual setting.
    """

    def __init__(self, scheme="centralized", algorithm="trpo", num_cells=3, users_per_cell=2,
                 pmax_dbm=43.0, pathloss_exponent=3.76, layout="line3",
                 constraint_mode="per_user", iterations=300, episodes_per_iter=100,
                 hidden_sizes=(64, 64), kl_bound=0.01, step_decay=0.9, discount=0.99,
                 random_state=0):
        self.scheme = scheme
        self.algorithm = algorithm
        self.num_cells = num_cells
        self.users_per_cell = users_per_cell
        self.pmax_dbm = pmax_dbm
        self.pathloss_exponent = pathloss_exponent
        self.layout = layout
        self.constraint_mode = constraint_mode
        self.iterations = iterations
        self.episodes_per_iter = episodes_per_iter
        self.hidden_sizes = hidden_sizes
        self.kl_bound = kl_bound
        self.step_decay = step_decay
        self.discount = discount
        self.random_state = random_state

    def fit(self, X=None, y=None):
        cfg = self._network()
        fixed = None if X is None else check_channels(X, cfg)
        tcfg = TrpoConfig(kl_bound=self.kl_bound, step_decay=self.step_decay,
                          discount=self.discount, episodes_per_iter=self.episodes_per_iter,
                          hidden_sizes=tuple(self.hidden_sizes))
        result = agents.train(self.scheme, cfg, tcfg, self.iterations, self.random_state,
                              algorithm=self.algorithm, constraint_mode=self.constraint_mode,
                              fixed_channels=fixed)
        self.network_ = cfg
        self.model_ = result.model
        self.training_log_ = result.log
        return self

    def predict(self, X) -> np.ndarray:
        """Deterministic (mean-action) powers for each realization."""
        check_is_fitted(self, "model_")
        X = check_channels(X, self.network_)
        policy = self.model_.deploy()
        if self.scheme == "centralized":
            return np.stack([policy.central(H) for H in X])
        B = self.network_.num_cells
        out = np.empty((X.shape[0], B, self.network_.users_per_cell))
        for i, H in enumerate(X):
            for pos in range(B):
                if self.scheme == "full":
                    out[i, pos] = policy.bs(H[pos], agents.cyclic_order(pos, B))
                else:
                    order = np.arange(B)
                    out[i, pos] = policy.bs(H[pos], agents.partial_cell_order(order, pos),
                                            out[i, :pos])
        return out

    def learning_curve(self, smoothed: bool = True) -> np.ndarray:
        check_is_fitted(self, "training_log_")
        key = "smoothed_reward_bps" if smoothed else "mean_reward_bps"
        return np.array([row[key] for row in self.training_log_])


__all__ = ["check_channels", "TRPOPowerAllocator", "WMMSEAllocator", "FPAllocator",
           "MaxPowerAllocator", "RandomPowerAllocator"]
