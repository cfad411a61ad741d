"""Small numpy MLPs with ELU hidden units and flat parameter vectors.

Parameters live in one 1-D array (``theta``/``phi``) so the trust-region
code can treat them as plain vectors; :class:`MLP` is the layout descriptor
that maps slices of that vector to per-layer weights and biases.

Besides ordinary backprop (vector-Jacobian products) the MLP supports a
forward-mode Jacobian-vector product, which together give Fisher-vector
products without ever materialising per-sample gradients.
"""
from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .exceptions import ConfigError, ShapeError

LOG_2PI = np.log(2.0 * np.pi)


def elu(z):
    z = np.asarray(z, dtype=float)
    return np.where(z > 0, z, np.expm1(np.minimum(z, 0.0)))


def elu_grad(z):
    z = np.asarray(z, dtype=float)
    return np.where(z > 0, 1.0, np.exp(np.minimum(z, 0.0)))


class MLP:
    """Layout and arithmetic for a fully connected ELU network with linear output."""

    def __init__(self, sizes: Sequence[int]):
        sizes = [int(s) for s in sizes]
        if len(sizes) < 3:
            raise ConfigError("an MLP needs input, at least one hidden layer and output sizes")
        if min(sizes) < 1:
            raise ConfigError("layer sizes must be positive")
        self.sizes = sizes
        self.slices = []
        offset = 0
        for n_in, n_out in zip(sizes[:-1], sizes[1:]):
            w = slice(offset, offset + n_in * n_out)
            offset += n_in * n_out
            b = slice(offset, offset + n_out)
            offset += n_out
            self.slices.append((w, b))
        self.size = offset

    def __repr__(self):
        return f"MLP({self.sizes})"

    @property
    def n_inputs(self) -> int:
        return self.sizes[0]

    @property
    def n_outputs(self) -> int:
        return self.sizes[-1]

    def unflatten(self, theta: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
        """Views ``(W, b)`` per layer, ``W`` shaped ``(n_in, n_out)``."""
        theta = np.asarray(theta)
        if theta.shape != (self.size,):
            raise ShapeError(f"expected {self.size} parameters, got shape {theta.shape}")
        out = []
        for (w, b), n_in, n_out in zip(self.slices, self.sizes[:-1], self.sizes[1:]):
            out.append((theta[w].reshape(n_in, n_out), theta[b]))
        return out

    def flatten(self, layers) -> np.ndarray:
        theta = np.empty(self.size)
        for (w, b), (W, bias) in zip(self.slices, layers):
            theta[w] = np.asarray(W).ravel()
            theta[b] = bias
        return theta

    def init(self, rng: np.random.Generator) -> np.ndarray:
        """Zero-mean normal weights with std ``1/sqrt(fan_in)``, zero biases."""
        theta = np.zeros(self.size)
        for (w, _), n_in, n_out in zip(self.slices, self.sizes[:-1], self.sizes[1:]):
            theta[w] = rng.standard_normal(n_in * n_out) / np.sqrt(n_in)
        return theta

    def _check_input(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.n_inputs:
            raise ShapeError(f"expected inputs of width {self.n_inputs}, got shape {X.shape}")
        return X

    def forward(self, theta, X):
        """Returns ``(outputs, cache)``; the cache feeds :meth:`backward`."""
        X = self._check_input(X)
        layers = self.unflatten(theta)
        cache = []
        a = X
        for i, (W, b) in enumerate(layers):
            z = a @ W + b
            cache.append((a, z))
            a = z if i == len(layers) - 1 else elu(z)
        return a, cache

    def backward(self, theta, cache, dout) -> np.ndarray:
        """Gradient of ``sum(dout * outputs)`` with respect to ``theta``."""
        layers = self.unflatten(theta)
        grad = np.empty(self.size)
        delta = np.asarray(dout, dtype=float)
        for i in range(len(layers) - 1, -1, -1):
            a, z = cache[i]
            if i < len(layers) - 1:
                delta = delta * elu_grad(z)
            w, b = self.slices[i]
            grad[w] = (a.T @ delta).ravel()
            grad[b] = delta.sum(axis=0)
            if i > 0:
                delta = delta @ layers[i][0].T
        return grad

    def jvp(self, theta, X, v) -> np.ndarray:
        """Directional derivative of the outputs along parameter direction ``v``."""
        X = self._check_input(X)
        layers = self.unflatten(theta)
        tangents = self.unflatten(np.asarray(v, dtype=float))
        a, da = X, np.zeros_like(X)
        for i, ((W, b), (dW, db)) in enumerate(zip(layers, tangents)):
            z = a @ W + b
            dz = da @ W + a @ dW + db
            if i == len(layers) - 1:
                return dz
            a, da = elu(z), elu_grad(z) * dz
        raise AssertionError("unreachable")

    def per_sample_grads(self, theta, cache, dout) -> np.ndarray:
        """Row ``i`` is the gradient of ``dout[i] . outputs[i]``; small nets only."""
        layers = self.unflatten(theta)
        delta = np.asarray(dout, dtype=float)
        n = delta.shape[0]
        grads = np.empty((n, self.size))
        for i in range(len(layers) - 1, -1, -1):
            a, z = cache[i]
            if i < len(layers) - 1:
                delta = delta * elu_grad(z)
            w, b = self.slices[i]
            grads[:, w] = np.einsum("ni,no->nio", a, delta).reshape(n, -1)
            grads[:, b] = delta
            if i > 0:
                delta = delta @ layers[i][0].T
        return grads


def init_network(layer_sizes: Sequence[int], rng: np.random.Generator) -> np.ndarray:
    return MLP(layer_sizes).init(rng)


class GaussianHead(NamedTuple):
    mean: np.ndarray     # watts
    log_std: np.ndarray  # log-watts


def kl_diag_gaussian(new: GaussianHead, old: GaussianHead) -> np.ndarray:
    """``KL(new || old)`` summed over the last axis."""
    var_new = np.exp(2.0 * new.log_std)
    var_old = np.exp(2.0 * old.log_std)
    terms = (old.log_std - new.log_std
             + (var_new + (new.mean - old.mean) ** 2) / (2.0 * var_old) - 0.5)
    return terms.sum(axis=-1)


def gaussian_log_prob(actions, head: GaussianHead) -> np.ndarray:
    std = np.exp(head.log_std)
    u = (actions - head.mean) / std
    return (-0.5 * u ** 2 - head.log_std - 0.5 * LOG_2PI).sum(axis=-1)


def sample_action(head: GaussianHead, rng: np.random.Generator, pmax: float):
    """Draw from the head, clamp to ``[0, pmax]``.

    Returns ``(action, raw, logp)``; ``logp`` is the density of the raw
    (pre-clamp) draw, which is what the score function differentiates.
    """
    raw = head.mean + np.exp(head.log_std) * rng.standard_normal(np.shape(head.mean))
    return np.clip(raw, 0.0, pmax), raw, gaussian_log_prob(raw, head)


class GaussianPolicy:
    """State -> diagonal Gaussian over per-user powers.

    The network emits ``2 * action_dim`` values: a linear mean, read in units
    of ``mean_scale`` watts (``pmax`` by default), and a raw log-std in
    log-watts that is clamped to ``[log(1e-3 pmax), log(pmax)]``.
    """

    def __init__(self, n_inputs: int, action_dim: int, hidden: Sequence[int], pmax: float,
                 init_std_fraction: float = 0.25, min_std_fraction: float = 1e-3,
                 mean_scale: float | None = None):
        if len(hidden) < 1:
            raise ConfigError("policy needs at least one hidden layer")
        self.net = MLP([n_inputs, *hidden, 2 * action_dim])
        self.action_dim = action_dim
        self.pmax = float(pmax)
        self.mean_scale = float(pmax if mean_scale is None else mean_scale)
        self.init_std_fraction = init_std_fraction
        self.log_std_min = float(np.log(min_std_fraction * pmax))
        self.log_std_max = float(np.log(pmax))

    @property
    def size(self) -> int:
        return self.net.size

    def init(self, rng: np.random.Generator) -> np.ndarray:
        """Network init, then a state-independent log-std head at ``init_std_fraction * pmax``."""
        theta = self.net.init(rng)
        w_out, b_out = self.net.slices[-1]
        W = theta[w_out].reshape(self.net.sizes[-2], self.net.sizes[-1])
        W[:, self.action_dim:] = 0.0
        theta[w_out] = W.ravel()
        theta[b_out.start + self.action_dim:b_out.stop] = np.log(self.init_std_fraction * self.pmax)
        return theta

    def _split(self, out):
        mean = self.mean_scale * out[:, :self.action_dim]
        raw = out[:, self.action_dim:]
        log_std = np.clip(raw, self.log_std_min, self.log_std_max)
        mask = (raw > self.log_std_min) & (raw < self.log_std_max)
        return GaussianHead(mean, log_std), mask

    def head(self, theta, states) -> GaussianHead:
        out, _ = self.net.forward(theta, states)
        return self._split(out)[0]

    def log_prob(self, theta, states, actions) -> np.ndarray:
        return gaussian_log_prob(np.asarray(actions, dtype=float), self.head(theta, states))

    def _score_outputs(self, theta, states, actions):
        """d logp / d(network outputs), plus the forward cache."""
        out, cache = self.net.forward(theta, states)
        head, mask = self._split(out)
        actions = np.asarray(actions, dtype=float).reshape(head.mean.shape)
        inv_var = np.exp(-2.0 * head.log_std)
        diff = actions - head.mean
        d_mean = self.mean_scale * diff * inv_var
        d_log_std = (diff ** 2 * inv_var - 1.0) * mask
        return np.hstack([d_mean, d_log_std]), cache, head, actions

    def log_prob_and_grad(self, theta, state, action):
        """Log-density of one raw action and its exact gradient in ``theta``."""
        dout, cache, head, actions = self._score_outputs(theta, state, action)
        logp = float(gaussian_log_prob(actions, head)[0])
        return logp, self.net.backward(theta, cache, dout)

    def score_vjp(self, theta, states, actions, weights) -> np.ndarray:
        """``sum_i weights[i] * grad log pi(a_i | s_i)``."""
        dout, cache, _, _ = self._score_outputs(theta, states, actions)
        return self.net.backward(theta, cache, dout * np.asarray(weights)[:, None])

    def score_jvp(self, theta, states, actions, v) -> np.ndarray:
        """Per-sample ``grad log pi(a_i | s_i) . v``."""
        dout, _, _, _ = self._score_outputs(theta, states, actions)
        return (self.net.jvp(theta, states, v) * dout).sum(axis=1)

    def scores(self, theta, states, actions) -> np.ndarray:
        """Explicit per-sample score matrix ``(n, n_params)``; for small nets and tests."""
        dout, cache, _, _ = self._score_outputs(theta, states, actions)
        return self.net.per_sample_grads(theta, cache, dout)

    def kl(self, theta_new, theta_old, states) -> np.ndarray:
        return kl_diag_gaussian(self.head(theta_new, states), self.head(theta_old, states))


class ValueNetwork:
    """Scalar critic over a concatenated (state, action-encoding) input."""

    def __init__(self, n_inputs: int, hidden: Sequence[int]):
        self.net = MLP([n_inputs, *hidden, 1])

    @property
    def size(self) -> int:
        return self.net.size

    def init(self, rng: np.random.Generator) -> np.ndarray:
        return self.net.init(rng)

    def value(self, phi, inputs) -> np.ndarray:
        out, _ = self.net.forward(phi, inputs)
        return out[:, 0]

    def mse_and_grad(self, phi, inputs, targets):
        """Mean squared error against ``targets`` and its gradient."""
        out, cache = self.net.forward(phi, inputs)
        err = out[:, 0] - np.asarray(targets, dtype=float)
        loss = float(np.mean(err ** 2))
        grad = self.net.backward(phi, cache, (2.0 / err.size) * err[:, None])
        return loss, grad


def forward_policy(policy: GaussianPolicy, theta, state) -> GaussianHead:
    head = policy.head(theta, state)
    if np.ndim(state) == 1:
        return GaussianHead(head.mean[0], head.log_std[0])
    return head


def forward_value(critic: ValueNetwork, phi, state, action_features) -> float | np.ndarray:
    x = np.concatenate([np.atleast_2d(state), np.atleast_2d(action_features)], axis=1)
    v = critic.value(phi, x)
    return float(v[0]) if np.ndim(state) == 1 else v
