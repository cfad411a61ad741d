import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powertrpo import neuralnet as nn
from powertrpo.exceptions import ConfigError, ShapeError


def central_diff(f, theta, direction, h=1e-5):
    return (f(theta + h * direction) - f(theta - h * direction)) / (2 * h)


def fd_gradient(f, theta, h=1e-5):
    g = np.empty_like(theta)
    for i in range(theta.size):
        e = np.zeros_like(theta)
        e[i] = 1.0
        g[i] = central_diff(f, theta, e, h)
    return g


def rel_err(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-12)


@pytest.fixture
def tiny_policy():
    policy = nn.GaussianPolicy(3, 2, (5,), pmax=2.0)
    theta = policy.init(np.random.default_rng(0))
    theta += 0.1 * np.random.default_rng(1).standard_normal(theta.size)
    return policy, theta


class TestElu:
    def test_examples(self):
        np.testing.assert_allclose(nn.elu([0.0, 1.0, -1.0]), [0.0, 1.0, np.exp(-1) - 1])
        np.testing.assert_allclose(nn.elu(-1.0), -0.6321, atol=1e-4)

    def test_gradient_matches_finite_difference(self):
        z = np.array([-2.0, -0.3, 0.4, 3.0])
        fd = (nn.elu(z + 1e-6) - nn.elu(z - 1e-6)) / 2e-6
        np.testing.assert_allclose(nn.elu_grad(z), fd, rtol=1e-6)


class TestMLP:
    def test_parameter_count_full_size_policy(self):
        sizes = [18, 256, 256, 256, 12]
        by_layer = sum(n_in * n_out + n_out for n_in, n_out in zip(sizes[:-1], sizes[1:]))
        assert by_layer == 139_532
        assert nn.MLP(sizes).size == 139_532

    def test_init_deterministic_and_scaled(self):
        a = nn.init_network([18, 256, 256, 256, 12], np.random.default_rng(4))
        b = nn.init_network([18, 256, 256, 256, 12], np.random.default_rng(4))
        np.testing.assert_array_equal(a, b)
        net = nn.MLP([18, 256, 256, 256, 12])
        W, bias = net.unflatten(a)[1]
        np.testing.assert_allclose(W.std(), 1 / 16, rtol=0.02)
        assert np.all(bias == 0)

    def test_too_few_layers(self):
        with pytest.raises(ConfigError):
            nn.MLP([3, 2])
        with pytest.raises(ConfigError):
            nn.init_network([], np.random.default_rng(0))

    @given(st.integers(0, 1000))
    @settings(max_examples=20)
    def test_flatten_round_trip(self, seed):
        net = nn.MLP([4, 6, 3, 2])
        theta = np.random.default_rng(seed).standard_normal(net.size)
        np.testing.assert_array_equal(net.flatten(net.unflatten(theta)), theta)

    def test_shape_errors(self):
        net = nn.MLP([4, 6, 2])
        theta = net.init(np.random.default_rng(0))
        with pytest.raises(ShapeError):
            net.forward(theta, np.ones((2, 5)))
        with pytest.raises(ShapeError):
            net.forward(theta[:-1], np.ones((2, 4)))

    def test_backward_matches_finite_differences(self):
        net = nn.MLP([3, 6, 4, 2])
        rng = np.random.default_rng(2)
        theta, X, dout = rng.standard_normal(net.size), rng.standard_normal((7, 3)), rng.standard_normal((7, 2))
        assert net.size <= 200
        _, cache = net.forward(theta, X)
        g = net.backward(theta, cache, dout)
        fd = fd_gradient(lambda t: float(np.sum(net.forward(t, X)[0] * dout)), theta)
        assert rel_err(g, fd) < 1e-4

    def test_jvp_matches_finite_differences(self):
        net = nn.MLP([3, 6, 2])
        rng = np.random.default_rng(3)
        theta, X, v = rng.standard_normal(net.size), rng.standard_normal((5, 3)), rng.standard_normal(net.size)
        fd = central_diff(lambda t: net.forward(t, X)[0], theta, v)
        np.testing.assert_allclose(net.jvp(theta, X, v), fd, rtol=1e-6, atol=1e-8)

    def test_per_sample_grads_sum_to_backward(self):
        net = nn.MLP([3, 6, 2])
        rng = np.random.default_rng(5)
        theta, X, dout = rng.standard_normal(net.size), rng.standard_normal((4, 3)), rng.standard_normal((4, 2))
        _, cache = net.forward(theta, X)
        per = net.per_sample_grads(theta, cache, dout)
        np.testing.assert_allclose(per.sum(axis=0), net.backward(theta, cache, dout), atol=1e-12)
        _, c0 = net.forward(theta, X[:1])
        np.testing.assert_allclose(per[0], net.backward(theta, c0, dout[:1]), atol=1e-12)


class TestGaussianPolicy:
    def test_zero_network(self):
        policy = nn.GaussianPolicy(18, 6, (8, 8), pmax=19.95)
        head = nn.forward_policy(policy, np.zeros(policy.size), np.ones(18))
        np.testing.assert_array_equal(head.mean, 0.0)
        np.testing.assert_array_equal(head.log_std, 0.0)
        assert head.mean.shape == (6,)

    def test_output_width_centralized(self):
        policy = nn.GaussianPolicy(18, 6, (256, 256, 256), pmax=19.95)
        assert policy.net.n_outputs == 12

    def test_initial_std(self):
        policy = nn.GaussianPolicy(4, 3, (8,), pmax=19.95)
        theta = policy.init(np.random.default_rng(0))
        head = policy.head(theta, np.random.default_rng(1).standard_normal((6, 4)))
        np.testing.assert_allclose(np.exp(head.log_std), 0.25 * 19.95, rtol=1e-12)

    def test_log_std_clamped(self):
        policy = nn.GaussianPolicy(2, 1, (3,), pmax=10.0)
        theta = np.zeros(policy.size)
        _, b_out = policy.net.slices[-1]
        theta[b_out.stop - 1] = 50.0
        assert np.isclose(policy.head(theta, np.zeros(2)).log_std[0, 0], np.log(10.0))
        theta[b_out.stop - 1] = -50.0
        assert np.isclose(policy.head(theta, np.zeros(2)).log_std[0, 0], np.log(1e-2))

    def test_forward_pure(self, tiny_policy):
        policy, theta = tiny_policy
        s = np.array([0.3, -1.0, 2.0])
        a, b = nn.forward_policy(policy, theta, s), nn.forward_policy(policy, theta, s)
        np.testing.assert_array_equal(a.mean, b.mean)
        np.testing.assert_array_equal(a.log_std, b.log_std)

    def test_log_prob_at_mean(self, tiny_policy):
        policy, theta = tiny_policy
        s = np.array([0.3, -1.0, 2.0])
        head = nn.forward_policy(policy, theta, s)
        logp, _ = policy.log_prob_and_grad(theta, s, head.mean)
        np.testing.assert_allclose(logp, np.sum(-np.log(np.exp(head.log_std) * np.sqrt(2 * np.pi))))

    @pytest.mark.parametrize("seed", range(4))
    def test_log_prob_gradient_directional(self, tiny_policy, seed):
        policy, theta = tiny_policy
        assert policy.size <= 200
        rng = np.random.default_rng(seed)
        s, a, v = rng.standard_normal(3), rng.uniform(0, 2, 2), rng.standard_normal(policy.size)
        _, grad = policy.log_prob_and_grad(theta, s, a)
        fd = central_diff(lambda t: policy.log_prob(t, s, a)[0], theta, v)
        assert abs(grad @ v - fd) / max(abs(fd), 1e-12) < 1e-4
        assert np.all(np.isfinite(grad))

    def test_log_prob_gradient_every_segment(self, tiny_policy):
        policy, theta = tiny_policy
        s, a = np.array([0.5, 0.1, -0.7]), np.array([0.4, 1.3])
        _, grad = policy.log_prob_and_grad(theta, s, a)
        fd = fd_gradient(lambda t: policy.log_prob(t, s, a)[0], theta)
        for w, b in policy.net.slices:
            assert rel_err(grad[w], fd[w]) < 1e-4
            assert rel_err(grad[b], fd[b]) < 1e-4

    def test_score_matrix_matches_vjp_and_jvp(self, tiny_policy):
        policy, theta = tiny_policy
        rng = np.random.default_rng(8)
        S, A = rng.standard_normal((6, 3)), rng.uniform(0, 2, (6, 2))
        scores = policy.scores(theta, S, A)
        w, v = rng.standard_normal(6), rng.standard_normal(policy.size)
        np.testing.assert_allclose(policy.score_vjp(theta, S, A, w), w @ scores, atol=1e-10)
        np.testing.assert_allclose(policy.score_jvp(theta, S, A, v), scores @ v, atol=1e-10)


class TestValueNetwork:
    def test_zero_network_and_input_width(self):
        critic = nn.ValueNetwork(30, (8,))
        assert nn.forward_value(critic, np.zeros(critic.size), np.ones(18), np.ones(12)) == 0.0

    def test_mse_gradient_matches_finite_differences(self):
        critic = nn.ValueNetwork(4, (6, 5))
        assert critic.size <= 200
        rng = np.random.default_rng(0)
        phi, X, y = rng.standard_normal(critic.size), rng.standard_normal((9, 4)), rng.standard_normal(9)
        _, grad = critic.mse_and_grad(phi, X, y)
        fd = fd_gradient(lambda p: critic.mse_and_grad(p, X, y)[0], phi)
        assert rel_err(grad, fd) < 1e-4

    def test_value_pure(self):
        critic = nn.ValueNetwork(4, (6,))
        phi = critic.init(np.random.default_rng(0))
        x = np.arange(4.0)
        assert nn.forward_value(critic, phi, x[:2], x[2:]) == nn.forward_value(critic, phi, x[:2], x[2:])


heads = st.tuples(
    st.lists(st.floats(-5, 5), min_size=3, max_size=3),
    st.lists(st.floats(-3, 2), min_size=3, max_size=3),
).map(lambda t: nn.GaussianHead(np.array(t[0]), np.array(t[1])))


class TestKLAndSampling:
    def test_unit_shift_example(self):
        new = nn.GaussianHead(np.array([1.0]), np.array([0.0]))
        old = nn.GaussianHead(np.array([0.0]), np.array([0.0]))
        assert nn.kl_diag_gaussian(new, old) == pytest.approx(0.5)

    @given(heads)
    def test_kl_self_zero(self, h):
        assert nn.kl_diag_gaussian(h, h) == pytest.approx(0.0, abs=1e-12)

    @given(heads, heads)
    def test_kl_nonnegative(self, a, b):
        assert nn.kl_diag_gaussian(a, b) >= -1e-12

    def test_kl_orientation_against_monte_carlo(self):
        new = nn.GaussianHead(np.array([0.3]), np.array([np.log(0.5)]))
        old = nn.GaussianHead(np.array([0.0]), np.array([0.0]))
        x = np.random.default_rng(0).normal(0.3, 0.5, size=(400_000, 1))
        mc = np.mean(nn.gaussian_log_prob(x, new) - nn.gaussian_log_prob(x, old))
        np.testing.assert_allclose(nn.kl_diag_gaussian(new, old), mc, atol=5e-3)

    def test_concentrated_sample(self):
        pmax = 20.0
        head = nn.GaussianHead(np.full(4, pmax / 2), np.full(4, np.log(1e-3 * pmax)))
        action, _, _ = nn.sample_action(head, np.random.default_rng(0), pmax)
        assert np.all(np.abs(action - pmax / 2) < 4e-3 * pmax)

    def test_clamped_sample(self):
        pmax = 20.0
        head = nn.GaussianHead(np.full(4, 2 * pmax), np.full(4, np.log(1e-3 * pmax)))
        action, raw, _ = nn.sample_action(head, np.random.default_rng(0), pmax)
        np.testing.assert_array_equal(action, pmax)
        assert np.all(raw > pmax)

    def test_empirical_mean(self):
        mu, sigma = 5.0, 0.5
        head = nn.GaussianHead(np.full(100_000, mu), np.full(100_000, np.log(sigma)))
        _, raw, _ = nn.sample_action(head, np.random.default_rng(1), 1e9)
        assert abs(raw.mean() - mu) < 4 * sigma / np.sqrt(100_000)

    def test_logp_uses_pre_clamp_sample(self):
        head = nn.GaussianHead(np.array([-1.0, 3.0]), np.array([0.0, 0.0]))
        action, raw, logp = nn.sample_action(head, np.random.default_rng(2), 2.0)
        np.testing.assert_allclose(logp, nn.gaussian_log_prob(raw, head))
        assert np.all((action >= 0) & (action <= 2.0))
