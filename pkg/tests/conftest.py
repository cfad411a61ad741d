import numpy as np
import pytest

from powertrpo import neuralnet as nn
from powertrpo.trpo import EpisodeBatch


def make_batch(policy: nn.GaussianPolicy, theta, M: int, N: int, rng, rewards=None,
               states=None) -> EpisodeBatch:
    """Episodes sampled from ``policy`` on random (or given) states.

    Critic inputs are the state followed by the raw action, which is all the
    trpo unit tests need.
    """
    if states is None:
        states = rng.standard_normal((M, N, policy.net.n_inputs))
    flat = states.reshape(M * N, -1)
    head = policy.head(theta, flat)
    _, raw, logp = nn.sample_action(head, rng, np.inf)
    A = policy.action_dim
    raw = raw.reshape(M, N, A)
    if rewards is None:
        rewards = np.zeros((M, N))
        rewards[:, -1] = rng.standard_normal(M)
    inputs = np.concatenate([states, raw], axis=2)
    means = head.mean.reshape(M, N, A)
    return EpisodeBatch(states=states, raw_actions=raw, actions=raw, log_probs=logp.reshape(M, N),
                        rewards=np.asarray(rewards, dtype=float), critic_inputs=inputs,
                        baseline_inputs=np.concatenate([states, means], axis=2))


@pytest.fixture
def small_policy():
    policy = nn.GaussianPolicy(3, 2, (6,), pmax=1.0)
    theta = policy.init(np.random.default_rng(10))
    theta += 0.2 * np.random.default_rng(11).standard_normal(theta.size)
    return policy, theta
