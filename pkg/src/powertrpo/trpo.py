"""Trust-region policy updates over sampled episode batches.

The pieces compose as in one training iteration::

    adv, ret = estimate_advantages(batch, critic, phi, gamma)
    phi, loss = fit_critic(critic, phi, batch, ret, ...)
    g = policy_gradient_estimate(policy, theta, batch, adv, gamma)
    x = conjugate_gradient(make_fvp(policy, theta, batch, damping), g, ...).x
    step = natural_step(g, x, delta)
    result = line_search_update(policy, theta, step, batch, adv, cfg)

``trpo_update`` and ``a2c_update`` wrap the last four lines.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .exceptions import ConfigError, DegenerateStepError, NumericalError, TrainingError
from .neuralnet import GaussianPolicy, ValueNetwork


@dataclass(frozen=True)
class TrpoConfig:
    kl_bound: float = 0.01
    step_decay: float = 0.90
    discount: float = 0.99
    episodes_per_iter: int = 1000
    hidden_sizes: tuple[int, ...] = (256, 256, 256)
    cg_iters: int = 10
    cg_tol: float = 1e-8
    fisher_damping: float = 1e-2
    max_backtracks: int = 10
    critic_lr: float = 1e-3
    critic_epochs: int = 5
    critic_batch_size: int = 64
    a2c_step_size: float = 7e-4

    def __post_init__(self):
        object.__setattr__(self, "hidden_sizes", tuple(int(h) for h in self.hidden_sizes))
        if not self.kl_bound > 0:
            raise ConfigError("kl_bound must be positive")
        if not 0 < self.step_decay < 1:
            raise ConfigError("step_decay must lie in (0, 1)")
        if not 0 <= self.discount <= 1:
            raise ConfigError("discount must lie in [0, 1]")
        if self.episodes_per_iter < 1:
            raise ConfigError("episodes_per_iter must be >= 1")
        if self.fisher_damping < 0:
            raise ConfigError("fisher_damping must be >= 0")
        if not self.hidden_sizes:
            raise ConfigError("hidden_sizes must name at least one layer")
        if self.cg_iters < 1 or self.max_backtracks < 0 or self.critic_epochs < 0:
            raise ConfigError("iteration counts must be non-negative (cg_iters >= 1)")
        if self.critic_batch_size < 1:
            raise ConfigError("critic_batch_size must be >= 1")


@dataclass
class EpisodeBatch:
    """M equal-length episodes; every array is shaped ``(M, N, ...)``.

    ``critic_inputs`` encode (state, sampled action, log-std) for critic
    fitting; ``baseline_inputs`` the same with the policy-mean action, used
    for the value baseline.
    """

    states: np.ndarray
    raw_actions: np.ndarray
    actions: np.ndarray
    log_probs: np.ndarray
    rewards: np.ndarray
    critic_inputs: np.ndarray
    baseline_inputs: np.ndarray
    scheme: str = "centralized"
    reward_scale: float = 1.0
    extras: dict = field(default_factory=dict)

    @property
    def num_episodes(self) -> int:
        return self.rewards.shape[0]

    @property
    def horizon(self) -> int:
        return self.rewards.shape[1]

    @property
    def size(self) -> int:
        return self.rewards.size

    def flat(self, name: str) -> np.ndarray:
        arr = getattr(self, name)
        return arr.reshape(self.size, *arr.shape[2:])

    def episode_rewards(self) -> np.ndarray:
        """Undiscounted per-episode reward (the network sum-rate for one slot)."""
        return self.rewards.sum(axis=1)


def discounted_returns(rewards, gamma: float) -> np.ndarray:
    """``G_n = sum_{n' >= n} gamma^(n'-n) r_n'`` along the last axis."""
    rewards = np.asarray(rewards, dtype=float)
    out = np.empty_like(rewards)
    running = np.zeros(rewards.shape[:-1])
    for n in range(rewards.shape[-1] - 1, -1, -1):
        running = rewards[..., n] + gamma * running
        out[..., n] = running
    return out


def step_discounts(horizon: int, gamma: float) -> np.ndarray:
    """``gamma^(n-1)`` for steps n = 1..N (the first step is undiscounted)."""
    return gamma ** np.arange(horizon, dtype=float)


def normalize(x, eps: float = 1e-12) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    std = x.std()
    return (x - x.mean()) / (std if std > eps else 1.0)


def estimate_advantages(batch: EpisodeBatch, critic: ValueNetwork, phi, gamma: float,
                        normalized: bool = True):
    """Returns ``(advantages, returns)``, both ``(M, N)``.

    The critic predicts returns in units of ``batch.reward_scale``.
    """
    returns = discounted_returns(batch.rewards, gamma)
    baseline = critic.value(phi, batch.flat("baseline_inputs")).reshape(returns.shape)
    adv = returns - batch.reward_scale * baseline
    return (normalize(adv) if normalized else adv), returns


def fit_critic(critic: ValueNetwork, phi, batch: EpisodeBatch, returns, lr: float,
               epochs: int, batch_size: int, rng: np.random.Generator):
    """Mini-batch gradient descent on the squared error to scaled returns.

    Returns ``(phi_new, final_loss)`` where the loss is the full-batch MSE
    after the last epoch.
    """
    X = batch.flat("critic_inputs")
    y = np.asarray(returns, dtype=float).reshape(-1) / batch.reward_scale
    phi = np.array(phi, dtype=float, copy=True)
    n = y.size
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            idx = order[start:start + batch_size]
            _, grad = critic.mse_and_grad(phi, X[idx], y[idx])
            phi -= lr * grad
    loss, _ = critic.mse_and_grad(phi, X, y)
    if not (np.isfinite(loss) and np.all(np.isfinite(phi))):
        raise TrainingError(f"critic diverged (loss={loss})")
    return phi, loss


def _weights(batch: EpisodeBatch, adv, gamma: float) -> np.ndarray:
    disc = step_discounts(batch.horizon, gamma)
    return (np.asarray(adv) * disc).reshape(-1) / batch.size


def policy_gradient_estimate(policy: GaussianPolicy, theta, batch: EpisodeBatch, adv,
                             gamma: float) -> np.ndarray:
    """``1/(MN) sum gamma^(n-1) grad log pi(a|s) A(s, a)``."""
    return policy.score_vjp(theta, batch.flat("states"), batch.flat("raw_actions"),
                            _weights(batch, adv, gamma))


def fisher_vector_product(policy: GaussianPolicy, theta, batch: EpisodeBatch, v,
                          damping: float) -> np.ndarray:
    """``(1/(MN) sum s s^T + damping I) v`` with ``s`` the per-sample scores."""
    S, A = batch.flat("states"), batch.flat("raw_actions")
    dots = policy.score_jvp(theta, S, A, v)
    return policy.score_vjp(theta, S, A, dots / batch.size) + damping * np.asarray(v)


def make_fvp(policy: GaussianPolicy, theta, batch: EpisodeBatch,
             damping: float) -> Callable[[np.ndarray], np.ndarray]:
    S, A = batch.flat("states"), batch.flat("raw_actions")
    n = batch.size

    def fvp(v):
        dots = policy.score_jvp(theta, S, A, v)
        return policy.score_vjp(theta, S, A, dots / n) + damping * v

    return fvp


class CGResult(NamedTuple):
    x: np.ndarray
    residual_norm: float
    iterations: int


def conjugate_gradient(fvp: Callable, g, cg_iters: int = 10, cg_tol: float = 1e-8) -> CGResult:
    g = np.asarray(g, dtype=float)
    x = np.zeros_like(g)
    r = g.copy()
    p = r.copy()
    rr = r @ r
    it = 0
    while it < cg_iters and np.sqrt(rr) >= cg_tol:
        Ap = fvp(p)
        alpha = rr / (p @ Ap)
        x += alpha * p
        r -= alpha * Ap
        rr_new = r @ r
        it += 1
        if not (np.isfinite(alpha) and np.isfinite(rr_new)):
            raise NumericalError("conjugate gradient produced a non-finite iterate", partial=x)
        p = r + (rr_new / rr) * p
        rr = rr_new
    return CGResult(x, float(np.sqrt(rr)), it)


def natural_step(g, x, delta: float) -> np.ndarray:
    """Scale ``x ~ F^-1 g`` so the quadratic KL model equals ``delta``."""
    gx = float(np.dot(g, x))
    if not (np.isfinite(gx) and gx > 0):
        raise DegenerateStepError(f"g^T F^-1 g = {gx} is not positive")
    return np.sqrt(2.0 * delta / gx) * np.asarray(x)


def surrogate_L(policy: GaussianPolicy, theta_old, theta_new, batch: EpisodeBatch, adv,
                gamma: float) -> float:
    """Importance-sampled advantage minus its value at ``theta_new = theta_old``."""
    logp_new = policy.log_prob(theta_new, batch.flat("states"), batch.flat("raw_actions"))
    ratio = np.exp(logp_new - batch.flat("log_probs"))
    w = _weights(batch, adv, gamma)
    return float(np.sum(w * ratio) - np.sum(w))


def mean_kl(policy: GaussianPolicy, theta_old, theta_new, batch: EpisodeBatch) -> float:
    return float(np.mean(policy.kl(theta_new, theta_old, batch.flat("states"))))


class LineSearchResult(NamedTuple):
    theta: np.ndarray
    accepted: bool
    j_used: int
    kl: float
    surrogate: float


def line_search_update(policy: GaussianPolicy, theta, step, batch: EpisodeBatch, adv,
                       cfg: TrpoConfig) -> LineSearchResult:
    """Backtrack ``theta + zeta^j step`` until L >= 0 and mean KL <= delta."""
    kl = surr = float("nan")
    for j in range(cfg.max_backtracks + 1):
        cand = theta + cfg.step_decay ** j * step
        kl = mean_kl(policy, theta, cand, batch)
        surr = surrogate_L(policy, theta, cand, batch, adv, cfg.discount)
        if np.isfinite(kl) and np.isfinite(surr) and surr >= 0 and kl <= cfg.kl_bound:
            return LineSearchResult(cand, True, j, kl, surr)
    return LineSearchResult(np.array(theta, copy=True), False, cfg.max_backtracks, kl, surr)


def trpo_update(policy: GaussianPolicy, theta, batch: EpisodeBatch, adv,
                cfg: TrpoConfig) -> LineSearchResult:
    """Gradient, CG natural direction, scaled step and line search.

    A degenerate step leaves ``theta`` unchanged (``accepted=False``, ``j_used=-1``).
    """
    g = policy_gradient_estimate(policy, theta, batch, adv, cfg.discount)
    fvp = make_fvp(policy, theta, batch, cfg.fisher_damping)
    try:
        x = conjugate_gradient(fvp, g, cfg.cg_iters, cfg.cg_tol).x
        step = natural_step(g, x, cfg.kl_bound)
    except NumericalError:
        return LineSearchResult(np.array(theta, copy=True), False, -1, 0.0, 0.0)
    return line_search_update(policy, theta, step, batch, adv, cfg)


def a2c_update(policy: GaussianPolicy, theta, batch: EpisodeBatch, adv, gamma: float,
               step_size: float) -> LineSearchResult:
    """Fixed-size gradient ascent step; no KL check, no line search."""
    g = policy_gradient_estimate(policy, theta, batch, adv, gamma)
    new = theta + step_size * g
    kl = mean_kl(policy, theta, new, batch)
    surr = surrogate_L(policy, theta, new, batch, adv, gamma)
    return LineSearchResult(new, True, 0, kl, surr)
