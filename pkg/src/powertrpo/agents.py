"""Centralized, partially decentralized and fully decentralized power allocation agents.

State encodings
---------------
CSI enters the networks as one feature per complex channel, the power gain
in dB, affinely normalized.  Per-BS CSI blocks list the serving cell of the
acting BS first, so the shared policy always finds its own users in the
first ``K`` slots:

* ``centralized``: all ``B*B*K`` gains in ``(b_tx, b_cell, k)`` order.
* ``full``: own-BS gains, cells in cyclic order ``b, b+1, ..., b-1``.
* ``partial``: own-BS gains with cells ordered ``[own, earlier actors in
  acting order, later actors in acting order]``, followed by ``(B-1)*K``
  power slots ``p/Pmax`` for the earlier actors (zero-padded).  Power slot
  ``i`` and CSI cell slot ``i+1`` therefore refer to the same cell.

Critic inputs append the realized powers ``p/Pmax`` and ``log_std -
log(Pmax)`` to the state.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import netmodel
from .curves import smooth_curve
from .exceptions import ConfigError, ShapeError, TrainingError
from .neuralnet import GaussianHead, GaussianPolicy, ValueNetwork, gaussian_log_prob
from .trpo import (EpisodeBatch, TrpoConfig, a2c_update, estimate_advantages, fit_critic,
                   trpo_update)

SCHEMES = ("centralized", "partial", "full")
ALGORITHMS = ("trpo", "a2c")
SMOOTHING = 0.96

# stream tags for np.random.default_rng(seed_key(seed, tag, ...))
INIT_STREAM = 0
EPISODE_STREAM = 1
CRITIC_STREAM = 2
NORM_STREAM = 3


def seed_key(seed, *tags) -> list[int]:
    """Entropy list for ``np.random.default_rng``: ``seed`` may be an int or a sequence."""
    return [int(x) for x in np.atleast_1d(seed)] + [int(t) for t in tags]


def check_scheme(scheme: str) -> str:
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    return scheme


def state_dim(scheme: str, B: int, K: int) -> int:
    check_scheme(scheme)
    if scheme == "centralized":
        return K * B * B
    if scheme == "partial":
        return K * B + (B - 1) * K
    return K * B


def action_dim(scheme: str, B: int, K: int) -> int:
    return B * K if check_scheme(scheme) == "centralized" else K


def horizon(scheme: str, B: int) -> int:
    return 1 if check_scheme(scheme) == "centralized" else B


def gain_db(H) -> np.ndarray:
    return 10.0 * np.log10(np.maximum(netmodel.channel_gains(H), 1e-300))


@dataclass(frozen=True)
class NormalizationConstants:
    """Per-feature affine map ``(x_db - shift) / scale`` for the CSI block."""

    shift: np.ndarray
    scale: np.ndarray

    def __post_init__(self):
        if np.any(np.asarray(self.scale) <= 0):
            raise ConfigError("normalization scales must be positive")

    @classmethod
    def identity(cls, n: int) -> "NormalizationConstants":
        return cls(np.zeros(n), np.ones(n))

    @classmethod
    def from_samples(cls, features_db: np.ndarray, min_scale: float = 1e-6):
        std = features_db.std(axis=0)
        return cls(features_db.mean(axis=0), np.where(std > min_scale, std, 1.0))

    def apply(self, features_db):
        return (features_db - self.shift) / self.scale


def cyclic_order(bs: int, B: int) -> np.ndarray:
    return (bs + np.arange(B)) % B


def partial_cell_order(order, position: int) -> np.ndarray:
    order = np.asarray(order)
    return np.concatenate([order[position:position + 1], order[:position], order[position + 1:]])


def _per_bs_csi(gdb, bs, cell_orders) -> np.ndarray:
    """Gather own-BS rows ``gdb[m, bs[m], cell_orders[m], :]`` and flatten."""
    M = gdb.shape[0]
    rows = gdb[np.arange(M), bs]                                   # (M, B, K)
    rows = np.take_along_axis(rows, cell_orders[:, :, None], axis=1)
    return rows.reshape(M, -1)


def encode_csi(H, scheme: str, bs_index: int | None = None,
               norm: NormalizationConstants | None = None, cell_order=None) -> np.ndarray:
    H = np.asarray(H)
    B = H.shape[-3]
    gdb = gain_db(H)
    if check_scheme(scheme) == "centralized":
        feats = gdb.reshape(*gdb.shape[:-3], -1)
    else:
        if bs_index is None:
            raise ConfigError("per-BS schemes need bs_index")
        order = cyclic_order(bs_index, B) if cell_order is None else np.asarray(cell_order)
        feats = gdb[..., bs_index, order, :].reshape(*gdb.shape[:-3], -1)
    return feats if norm is None else norm.apply(feats)


def encode_partial_state(H, order, position: int, prior_powers, pmax: float,
                         norm: NormalizationConstants | None = None) -> np.ndarray:
    """State of the BS acting at ``position`` of the round-robin ``order``."""
    H = np.asarray(H)
    B, K = H.shape[-3], H.shape[-1]
    prior = np.asarray(prior_powers, dtype=float).reshape(-1)
    if prior.size != position * K:
        raise ShapeError(f"expected {position * K} prior powers at position {position}")
    csi = encode_csi(H, "partial", int(order[position]), norm, partial_cell_order(order, position))
    block = np.zeros((B - 1) * K)
    block[:prior.size] = prior / pmax
    return np.concatenate([csi, block])


class PowerControlTask:
    """Scheme-specific view of a network scenario: encodings and episode inputs.

    ``fixed_channels`` (one tensor or a stack) replaces random drops, which
    turns the problem into a contextual bandit over known realizations.
    """

    def __init__(self, cfg: netmodel.NetworkConfig, scheme: str, constraint_mode: str = "per_user",
                 norm: NormalizationConstants | None = None, fixed_channels=None):
        self.cfg = cfg
        self.scheme = check_scheme(scheme)
        if constraint_mode not in netmodel.POWER_MODES:
            raise ConfigError(f"unknown constraint mode {constraint_mode!r}")
        self.constraint_mode = constraint_mode
        B, K = cfg.shape
        self.state_dim = state_dim(scheme, B, K)
        self.action_dim = action_dim(scheme, B, K)
        self.horizon = horizon(scheme, B)
        self.csi_dim = K * B * B if scheme == "centralized" else K * B
        if fixed_channels is not None:
            fixed = np.asarray(fixed_channels)
            if fixed.ndim == 3:
                fixed = fixed[None]
            if fixed.shape[1:] != (B, B, K):
                raise ShapeError(f"fixed channels must be (n, {B}, {B}, {K}), got {fixed.shape}")
            fixed_channels = fixed
        self.fixed_channels = fixed_channels
        self.norm = norm if norm is not None else NormalizationConstants.identity(self.csi_dim)
        self.noise = netmodel.noise_power(cfg)

    @property
    def pmax(self) -> float:
        return self.cfg.pmax_watts

    @property
    def critic_dim(self) -> int:
        return self.state_dim + 2 * self.action_dim

    def with_config(self, cfg: netmodel.NetworkConfig) -> "PowerControlTask":
        return PowerControlTask(cfg, self.scheme, self.constraint_mode, self.norm, self.fixed_channels)

    def draw_channels(self, rng: np.random.Generator) -> np.ndarray:
        if self.fixed_channels is None:
            return netmodel.sample_realization(self.cfg, rng)
        n = self.fixed_channels.shape[0]
        return self.fixed_channels[0 if n == 1 else rng.integers(n)]

    def draw_episode(self, rng: np.random.Generator):
        """Channels, acting order and standard-normal action noise for one episode."""
        H = self.draw_channels(rng)
        B = self.cfg.num_cells
        order = rng.permutation(B) if self.scheme == "partial" else np.arange(B)
        noise = rng.standard_normal((self.horizon, self.action_dim))
        return H, order, noise

    def raw_csi_samples(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Un-normalized CSI blocks as they appear in encoded states."""
        B = self.cfg.num_cells
        H = np.stack([self.draw_channels(rng) for _ in range(n)])
        gdb = gain_db(H)
        if self.scheme == "centralized":
            return gdb.reshape(n, -1)
        bs = rng.integers(B, size=n)
        if self.scheme == "full":
            orders = (bs[:, None] + np.arange(B)) % B
        else:
            orders = np.empty((n, B), dtype=int)
            for m in range(n):
                order = rng.permutation(B)
                pos = int(np.flatnonzero(order == bs[m])[0])
                orders[m] = partial_cell_order(order, pos)
        return _per_bs_csi(gdb, bs, orders)

    def fit_normalization(self, rng: np.random.Generator, n: int = 10_000) -> NormalizationConstants:
        self.norm = NormalizationConstants.from_samples(self.raw_csi_samples(rng, n))
        return self.norm


def build_policy(task: PowerControlTask, hidden) -> GaussianPolicy:
    return GaussianPolicy(task.state_dim, task.action_dim, hidden, task.pmax)


def build_critic(task: PowerControlTask, hidden) -> ValueNetwork:
    return ValueNetwork(task.critic_dim, hidden)


def run_episodes(policy: GaussianPolicy, theta, task: PowerControlTask, channels, orders, noise,
                 std_floor: bool = False, power_scale: float = 1.0) -> EpisodeBatch:
    """Play ``M`` episodes given their channels, acting orders and action noise.

    ``power_scale`` multiplies raw policy outputs before clamping (used to
    run a policy at a different Pmax than it was trained for).
    """
    channels = np.asarray(channels)
    M = channels.shape[0]
    B, K = task.cfg.shape
    pmax = task.pmax
    N, A = task.horizon, task.action_dim
    gdb = gain_db(channels)
    powers = np.zeros((M, B, K))

    states = np.empty((M, N, task.state_dim))
    raws = np.empty((M, N, A))
    acts = np.empty((M, N, A))
    logps = np.empty((M, N))
    means = np.empty((M, N, A))
    log_stds = np.empty((M, N, A))

    def act(n, S):
        head = policy.head(theta, S)
        if std_floor:
            head = GaussianHead(head.mean, np.full_like(head.log_std, policy.log_std_min))
        raw = head.mean + np.exp(head.log_std) * noise[:, n]
        states[:, n], raws[:, n], means[:, n], log_stds[:, n] = S, raw, head.mean, head.log_std
        logps[:, n] = gaussian_log_prob(raw, head)
        return np.clip(raw * power_scale, 0.0, pmax)

    if task.scheme == "centralized":
        S = task.norm.apply(gdb.reshape(M, -1))
        a = act(0, S).reshape(M, B, K)
        powers = netmodel.project_powers(a, pmax, task.constraint_mode)
        acts[:, 0] = powers.reshape(M, -1)
    else:
        rows = np.arange(M)
        for n in range(B):
            bs = orders[:, n]
            if task.scheme == "full":
                cell_orders = (bs[:, None] + np.arange(B)) % B
            else:
                cell_orders = np.concatenate([orders[:, n:n + 1], orders[:, :n], orders[:, n + 1:]], axis=1)
            S = task.norm.apply(_per_bs_csi(gdb, bs, cell_orders))
            if task.scheme == "partial":
                block = np.zeros((M, (B - 1) * K))
                prior = powers[rows[:, None], orders[:, :n]].reshape(M, -1)
                block[:, :prior.shape[1]] = prior / pmax
                S = np.hstack([S, block])
            a = netmodel.project_powers(act(n, S), pmax, task.constraint_mode)
            powers[rows, bs] = a
            acts[:, n] = a

    rate = netmodel.sum_rate(channels, powers, task.noise, task.cfg.bandwidth)
    rewards = np.zeros((M, N))
    rewards[:, -1] = rate

    def critic_features(action_watts):
        return np.concatenate([states, action_watts / pmax, log_stds - np.log(pmax)], axis=2)

    mean_actions = np.clip(means * power_scale, 0.0, pmax)
    if task.scheme == "centralized":
        mean_actions = netmodel.project_powers(mean_actions.reshape(M, B, K), pmax,
                                               task.constraint_mode).reshape(M, 1, -1)
    else:
        mean_actions = netmodel.project_powers(mean_actions, pmax, task.constraint_mode)
    return EpisodeBatch(
        states=states, raw_actions=raws, actions=acts, log_probs=logps, rewards=rewards,
        critic_inputs=critic_features(acts), baseline_inputs=critic_features(mean_actions),
        scheme=task.scheme, reward_scale=task.cfg.bandwidth,
        extras={"channels": channels, "powers": powers, "orders": np.asarray(orders)},
    )


def rollout(policy: GaussianPolicy, theta, task: PowerControlTask, rngs, **kwargs) -> EpisodeBatch:
    """One episode per generator in ``rngs``, batched through the networks."""
    drawn = [task.draw_episode(rng) for rng in rngs]
    H = np.stack([d[0] for d in drawn])
    orders = np.stack([d[1] for d in drawn])
    noise = np.stack([d[2] for d in drawn])
    return run_episodes(policy, theta, task, H, orders, noise, **kwargs)


def _single(scheme):
    def run(policy, theta, task, rng, **kwargs):
        if task.scheme != scheme:
            raise ConfigError(f"task is configured for {task.scheme!r}, not {scheme!r}")
        return rollout(policy, theta, task, [rng], **kwargs)
    run.__name__ = f"rollout_{scheme}"
    run.__doc__ = f"Single {scheme} episode."
    return run


rollout_centralized = _single("centralized")
rollout_partial = _single("partial")
rollout_full = _single("full")


@dataclass
class PolicyModel:
    """A trained (or initial) agent: networks, parameters and encoding constants."""

    task: PowerControlTask
    policy: GaussianPolicy
    theta: np.ndarray
    critic: ValueNetwork
    phi: np.ndarray
    hidden_sizes: tuple[int, ...]
    algorithm: str = "trpo"

    @property
    def scheme(self) -> str:
        return self.task.scheme

    def allocate(self, H, rng: np.random.Generator, cfg: netmodel.NetworkConfig | None = None,
                 std_floor: bool = True) -> np.ndarray:
        """Power matrix for one realization (or a stack) using the deployed policy."""
        task = self.task if cfg is None else self.task.with_config(cfg)
        H = np.asarray(H)
        single = H.ndim == 3
        H = H[None] if single else H
        M = H.shape[0]
        B = task.cfg.num_cells
        orders = (np.stack([rng.permutation(B) for _ in range(M)]) if task.scheme == "partial"
                  else np.tile(np.arange(B), (M, 1)))
        noise = rng.standard_normal((M, task.horizon, task.action_dim))
        batch = run_episodes(self.policy, self.theta, task, H, orders, noise,
                             std_floor=std_floor, power_scale=task.pmax / self.policy.pmax)
        P = batch.extras["powers"]
        return P[0] if single else P

    def deploy(self, power_scale: float = 1.0) -> "DeployedPolicy":
        return DeployedPolicy(self, power_scale)

    def to_state(self) -> dict:
        cfg = self.task.cfg
        return {
            "format": "powertrpo-checkpoint",
            "version": 1,
            "scheme": self.scheme,
            "algorithm": self.algorithm,
            "constraint_mode": self.task.constraint_mode,
            "network": {k: getattr(cfg, k) for k in cfg.__dataclass_fields__},
            "hidden_sizes": list(self.hidden_sizes),
            "policy_layers": list(self.policy.net.sizes),
            "critic_layers": list(self.critic.net.sizes),
            "norm_shift": self.task.norm.shift.tolist(),
            "norm_scale": self.task.norm.scale.tolist(),
            "theta": self.theta.tolist(),
            "phi": self.phi.tolist(),
        }

    @classmethod
    def from_state(cls, state: dict) -> "PolicyModel":
        if state.get("format") != "powertrpo-checkpoint":
            raise ConfigError("not a powertrpo checkpoint")
        if state.get("version") != 1:
            raise ConfigError(f"unsupported checkpoint version {state.get('version')}")
        cfg = netmodel.NetworkConfig(**state["network"])
        norm = NormalizationConstants(np.asarray(state["norm_shift"]), np.asarray(state["norm_scale"]))
        task = PowerControlTask(cfg, state["scheme"], state["constraint_mode"], norm)
        hidden = tuple(state["hidden_sizes"])
        policy, critic = build_policy(task, hidden), build_critic(task, hidden)
        if list(policy.net.sizes) != state["policy_layers"] or list(critic.net.sizes) != state["critic_layers"]:
            raise ConfigError("checkpoint layer sizes do not match its scenario")
        return cls(task, policy, np.asarray(state["theta"], dtype=float), critic,
                   np.asarray(state["phi"], dtype=float), hidden, state.get("algorithm", "trpo"))


class DeployedPolicy:
    """Inference-only view of a trained policy acting on its mean action.

    Weights are unpacked once, the mean/power scaling is folded into the
    output layer and the log-std half of the head is dropped, so a decision
    is just feature encoding plus one forward pass.
    """

    def __init__(self, model: PolicyModel, power_scale: float = 1.0):
        task, policy = model.task, model.policy
        layers = [(W.copy(), b.copy()) for W, b in policy.net.unflatten(model.theta)]
        A = policy.action_dim
        W_out, b_out = layers[-1]
        scale = policy.mean_scale * power_scale
        self.hidden = layers[:-1]
        n_csi = task.csi_dim
        W_in, b_in = self.hidden[0]
        # first layer split into CSI rows and relayed-power rows (pre-divided by Pmax)
        self.W_csi = W_in[:n_csi]
        self.W_prior = W_in[n_csi:] / (task.pmax * power_scale)
        self.b_in = b_in
        self.W_out = W_out[:, :A] * scale
        self.b_out = b_out[:A] * scale
        self.shift = task.norm.shift
        self.inv_scale = 1.0 / task.norm.scale
        self.scheme = task.scheme
        self.mode = task.constraint_mode
        self.shape = task.cfg.shape
        self.pmax = task.pmax * power_scale

    def _powers(self, x, prior=None):
        z = x @ self.W_csi + self.b_in
        if prior is not None and prior.size:
            z = z + prior @ self.W_prior[:prior.size]
        x = np.where(z > 0, z, np.expm1(np.minimum(z, 0.0)))
        for W, b in self.hidden[1:]:
            z = x @ W + b
            x = np.where(z > 0, z, np.expm1(np.minimum(z, 0.0)))
        a = np.minimum(np.maximum(x @ self.W_out + self.b_out, 0.0), self.pmax)
        if self.mode == "sum_power":
            a = netmodel.project_powers(a.reshape(-1, self.shape[1]), self.pmax, self.mode)
        return a

    @staticmethod
    def _gain_db(H):
        return 10.0 * np.log10(np.maximum(H.real ** 2 + H.imag ** 2, 1e-300))

    def central(self, H) -> np.ndarray:
        """Centralized powers ``(B, K)`` from the full CSI tensor."""
        x = (self._gain_db(H).ravel() - self.shift) * self.inv_scale
        return self._powers(x).reshape(self.shape)

    def bs(self, H_bs, cell_order, prior_powers=None) -> np.ndarray:
        """One BS's ``K`` powers from its own channel row ``H_bs`` (``(B, K)``).

        For ``partial``, ``prior_powers`` holds the watts already chosen by
        the earlier actors, in acting order.
        """
        x = (self._gain_db(H_bs)[cell_order].ravel() - self.shift) * self.inv_scale
        prior = None
        if self.scheme == "partial" and prior_powers is not None:
            prior = np.ravel(prior_powers)
        return self._powers(x, prior).reshape(self.shape[1])


def init_model(task: PowerControlTask, hidden, seed, algorithm: str = "trpo") -> PolicyModel:
    rng = np.random.default_rng(seed_key(seed, INIT_STREAM))
    policy, critic = build_policy(task, hidden), build_critic(task, hidden)
    theta = policy.init(rng)
    phi = critic.init(rng)
    return PolicyModel(task, policy, theta, critic, phi, tuple(hidden), algorithm)


LOG_FIELDS = ("iteration", "mean_reward_bps", "smoothed_reward_bps", "mean_kl", "surrogate",
              "j_used", "accepted", "critic_loss", "wall_ms")


@dataclass
class TrainingResult:
    model: PolicyModel
    log: list[dict] = field(default_factory=list)

    def curve(self, key: str = "mean_reward_bps") -> np.ndarray:
        return np.array([row[key] for row in self.log], dtype=float)


def episode_rngs(seed, iteration: int, count: int) -> list[np.random.Generator]:
    return [np.random.default_rng(seed_key(seed, EPISODE_STREAM, iteration, m)) for m in range(count)]


def train(scheme: str, cfg: netmodel.NetworkConfig, tcfg: TrpoConfig, iterations: int, seed,
          algorithm: str = "trpo", constraint_mode: str = "per_user", fixed_channels=None,
          norm_samples: int = 10_000, smoothing: float = SMOOTHING, callback=None) -> TrainingResult:
    """Train one shared policy for ``scheme`` with TRPO (or the A2C baseline).

    Every random draw derives from ``seed``: initialization, per-episode
    streams ``(seed, iteration, episode)`` and critic mini-batch shuffles.
    """
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algorithm!r}")
    task = PowerControlTask(cfg, scheme, constraint_mode, fixed_channels=fixed_channels)
    task.fit_normalization(np.random.default_rng(seed_key(seed, NORM_STREAM)), norm_samples)
    model = init_model(task, tcfg.hidden_sizes, seed, algorithm)
    result = TrainingResult(model)
    smoothed = None
    for it in range(iterations):
        t0 = time.perf_counter()
        batch = rollout(model.policy, model.theta, task, episode_rngs(seed, it, tcfg.episodes_per_iter))
        adv, returns = estimate_advantages(batch, model.critic, model.phi, tcfg.discount)
        phi, critic_loss = fit_critic(model.critic, model.phi, batch, returns, tcfg.critic_lr,
                                      tcfg.critic_epochs, tcfg.critic_batch_size,
                                      np.random.default_rng(seed_key(seed, CRITIC_STREAM, it)))
        if algorithm == "trpo":
            step = trpo_update(model.policy, model.theta, batch, adv, tcfg)
        else:
            step = a2c_update(model.policy, model.theta, batch, adv, tcfg.discount, tcfg.a2c_step_size)
        if not np.all(np.isfinite(step.theta)):
            raise TrainingError(f"non-finite policy parameters at iteration {it}",
                                checkpoint=model.to_state())
        model.theta, model.phi = step.theta, phi
        reward = float(batch.episode_rewards().mean())
        smoothed = reward if smoothed is None else smoothing * reward + (1 - smoothing) * smoothed
        row = {
            "iteration": it,
            "mean_reward_bps": reward,
            "smoothed_reward_bps": smoothed,
            "mean_kl": step.kl,
            "surrogate": step.surrogate,
            "j_used": step.j_used,
            "accepted": bool(step.accepted),
            "critic_loss": critic_loss,
            "wall_ms": 1e3 * (time.perf_counter() - t0),
        }
        result.log.append(row)
        if callback is not None:
            callback(row, model)
    return result


@dataclass
class EvaluationSummary:
    scheme: str
    rates_bps: np.ndarray
    decision_ms: np.ndarray

    @property
    def mean(self) -> float:
        return float(self.rates_bps.mean())

    @property
    def std(self) -> float:
        return float(self.rates_bps.std())

    def percentile(self, q) -> float:
        return float(np.percentile(self.rates_bps, q))

    def as_row(self) -> dict:
        return {
            "mean_mbps": self.mean / 1e6, "std_mbps": self.std / 1e6,
            "p05": self.percentile(5) / 1e6, "p50": self.percentile(50) / 1e6,
            "p95": self.percentile(95) / 1e6, "mean_decision_ms": float(self.decision_ms.mean()),
        }


def evaluate(model: PolicyModel, channels, noise_rngs, cfg: netmodel.NetworkConfig | None = None
             ) -> EvaluationSummary:
    """Sum-rate of the deployed (std-floor) policy on each given realization.

    ``channels`` is a stack ``(n, B, B, K)``; ``noise_rngs`` supplies one
    generator per realization for the acting order and residual noise.
    """
    task = model.task if cfg is None else model.task.with_config(cfg)
    rates = np.empty(len(channels))
    times = np.empty(len(channels))
    for i, (H, rng) in enumerate(zip(channels, noise_rngs)):
        t0 = time.perf_counter()
        P = model.allocate(H, rng, cfg=task.cfg)
        times[i] = 1e3 * (time.perf_counter() - t0)
        rates[i] = netmodel.sum_rate(H, P, task.noise, task.cfg.bandwidth)
    return EvaluationSummary(model.scheme, rates, times)


__all__ = [
    "SCHEMES", "NormalizationConstants", "PowerControlTask", "PolicyModel", "DeployedPolicy", "TrainingResult",
    "EvaluationSummary", "encode_csi", "encode_partial_state", "run_episodes", "rollout",
    "rollout_centralized", "rollout_partial", "rollout_full", "train", "evaluate", "init_model",
    "smooth_curve", "state_dim", "action_dim", "horizon",
]
