import math

import numpy as np
import pytest

from ampnet import (
    Amplify,
    Attenuate,
    ConfigError,
    DomainError,
    Identity,
    LayerSpec,
    Network,
    NetworkConfig,
    NeuronRole,
    ParametricSoftplus,
    backward,
    build_multiplier_network,
    build_network,
    composite_activate,
    forward,
    forward_with_trace,
    mse_loss,
    predict_batch,
)

from conftest import (
    assert_gradient_close,
    finite_difference_gradients,
    random_role_config,
)


def plain_config(depth=5, width=10, input_dim=1):
    return NetworkConfig(
        input_dim, tuple(LayerSpec(width) for _ in range(depth)), 1
    )


class TestLayerSpec:
    def test_roles_ordering(self):
        spec = LayerSpec(5, n_amplifying=2, n_attenuating=1)
        roles = spec.roles()
        assert [type(r.secondary) for r in roles] == [
            Amplify, Amplify, Attenuate, type(None), type(None)
        ]
        assert all(r.primary == ParametricSoftplus(0.3) for r in roles)

    def test_counts_must_fit(self):
        with pytest.raises(ConfigError):
            LayerSpec(10, n_amplifying=11)
        with pytest.raises(ConfigError):
            LayerSpec(10, n_amplifying=6, n_attenuating=5)

    def test_attenuate_b_checked(self):
        with pytest.raises(ConfigError):
            LayerSpec(4, n_attenuating=1, attenuate_b=0.0)


class TestNetworkConfig:
    def test_special_range_outside_layers_rejected(self):
        layers = (LayerSpec(10, 4, 1), LayerSpec(10), LayerSpec(10, 4, 1))
        with pytest.raises(ConfigError):
            NetworkConfig(1, layers, 1, special_layer_range=(1, 2))

    def test_special_range_bounds_checked(self):
        with pytest.raises(ConfigError):
            NetworkConfig(1, (LayerSpec(10),), 1, special_layer_range=(1, 2))

    def test_output_layer_roles_are_linear(self):
        roles = plain_config().layer_roles()
        assert roles[-1] == tuple(NeuronRole(Identity(), None) for _ in range(1))

    def test_no_hidden_layers_is_a_linear_model(self):
        config = NetworkConfig(3, (), 2)
        net = build_network(config, 0)
        assert net.dims == (3, 2)


class TestBuildNetwork:
    def test_same_seed_same_weights(self):
        config = plain_config()
        a = build_network(config, 42)
        b = build_network(config, 42)
        for wa, wb in zip(a.weights, b.weights):
            np.testing.assert_array_equal(wa, wb)

    def test_different_seeds_differ(self):
        config = plain_config()
        a = build_network(config, 1)
        b = build_network(config, 2)
        assert any((wa != wb).any() for wa, wb in zip(a.weights, b.weights))

    def test_glorot_bound_width_10(self):
        net = build_network(plain_config(depth=2), 3)
        w = net.weights[1]  # 10 <- 10
        assert np.all(np.abs(w) <= math.sqrt(6.0 / 20.0))

    def test_biases_start_at_zero(self):
        net = build_network(plain_config(), 5)
        for b in net.biases:
            np.testing.assert_array_equal(b, 0.0)

    def test_invalid_counts_raise(self):
        with pytest.raises(ConfigError):
            NetworkConfig(1, (LayerSpec(10, n_amplifying=11),), 1)

    def test_rejects_non_finite_weights(self):
        config = NetworkConfig(1, (), 1)
        with pytest.raises(ConfigError):
            Network(config, weights=[np.array([[math.inf]])], biases=[np.zeros(1)])


class TestForward:
    def test_zero_network_outputs_zero(self):
        net = Network(plain_config())  # all weights and biases zero
        assert forward(net, np.array([1.7]))[0] == 0.0

    def test_single_amplifying_identity_neuron_squares(self):
        config = NetworkConfig(
            1, (LayerSpec(1, n_amplifying=1, primary=Identity()),), 1
        )
        net = Network(config, weights=[[[1.0]], [[1.0]]], biases=[[0.0], [0.0]])
        assert forward(net, np.array([-2.0]))[0] == 4.0

    def test_dimension_mismatch(self):
        net = build_network(plain_config(), 0)
        with pytest.raises(DomainError):
            forward(net, np.array([1.0, 2.0]))

    def test_non_finite_input(self):
        net = build_network(plain_config(), 0)
        with pytest.raises(DomainError):
            forward(net, np.array([math.nan]))

    def test_agrees_with_traced_forward_bitwise(self, rng):
        for _ in range(100):
            config = random_role_config(rng, max_depth=4, max_width=6)
            net = build_network(config, int(rng.integers(1 << 31)))
            x = rng.uniform(-3, 3, config.input_dim)
            out_plain = forward(net, x)
            out_traced, _ = forward_with_trace(net, x)
            np.testing.assert_array_equal(out_plain, out_traced)


class TestForwardTrace:
    def test_trace_shapes_match_layer_widths(self, small_mixed_net):
        _, trace = forward_with_trace(small_mixed_net, np.array([0.5]))
        widths = small_mixed_net.dims[1:]
        assert tuple(len(y) for y in trace.y) == widths
        assert tuple(len(f) for f in trace.f_prime) == widths
        assert tuple(len(z) for z in trace.pre_activation) == widths

    def test_single_amplifying_softplus_neuron_values(self):
        config = NetworkConfig(1, (LayerSpec(1, n_amplifying=1),), 1)
        net = Network(config, weights=[[[1.0]], [[1.0]]], biases=[[0.0], [0.0]])
        _, trace = forward_with_trace(net, np.array([0.0]))
        assert trace.y[0][0] == pytest.approx(0.2354219768199187, rel=1e-14)
        assert trace.f_prime[0][0] == pytest.approx(0.63076393430955023, rel=1e-14)

    def test_attenuator_extremum_kills_gradient(self):
        # pre-activation driven to h=1 makes (b-h^2)/(h^2+b)^2 vanish
        config = NetworkConfig(
            1, (LayerSpec(1, n_attenuating=1, primary=Identity()),), 1
        )
        net = Network(config, weights=[[[1.0]], [[1.0]]], biases=[[0.0], [0.0]])
        _, trace = forward_with_trace(net, np.array([1.0]))
        assert trace.f_prime[0][0] == 0.0
        assert trace.y[0][0] == 0.5

    def test_trace_is_componentwise_composite_activate(self, rng):
        """Every (y, F') pair must equal composite_activate at the stored
        pre-activation, bit for bit."""
        for _ in range(20):
            config = random_role_config(rng, max_depth=3, max_width=5)
            net = build_network(config, int(rng.integers(1 << 31)))
            x = rng.uniform(-2, 2, config.input_dim)
            _, trace = forward_with_trace(net, x)
            for roles, y, fp, z in zip(
                net.roles(), trace.y, trace.f_prime, trace.pre_activation
            ):
                for role, yi, fpi, zi in zip(roles, y, fp, z):
                    value, deriv = composite_activate(
                        role.primary, role.secondary, float(zi)
                    )
                    assert value == yi
                    assert deriv == fpi


class TestBackward:
    def test_zero_output_error_gives_zero_gradients(self, small_mixed_net):
        x = np.array([0.7])
        _, trace = forward_with_trace(small_mixed_net, x)
        g = backward(small_mixed_net, trace, x, np.zeros(1))
        for gw in g.weights:
            np.testing.assert_array_equal(gw, 0.0)
        for gb in g.biases:
            np.testing.assert_array_equal(gb, 0.0)

    def test_single_linear_neuron(self):
        config = NetworkConfig(1, (), 1)
        net = Network(config, weights=[[[0.5]]], biases=[[0.1]])
        x = np.array([2.0])
        _, trace = forward_with_trace(net, x)
        g = backward(net, trace, x, np.array([1.0]))
        assert g.weights[0][0, 0] == 2.0
        assert g.biases[0][0] == 1.0

    def test_matches_finite_differences_across_role_mixtures(self, rng):
        """Spot check here; the full 50-network sweep runs in the
        acceptance suite."""
        for _ in range(10):
            config = random_role_config(rng, max_depth=5, max_width=6)
            net = build_network(config, int(rng.integers(1 << 31)))
            x = rng.uniform(-1, 1, config.input_dim)
            target = rng.uniform(-1, 1, 1)
            out, trace = forward_with_trace(net, x)
            _, d = mse_loss(out, target)
            g = backward(net, trace, x, d)
            fd_w, fd_b = finite_difference_gradients(net, x, target)
            for gw, fw in zip(g.weights, fd_w):
                for idx in np.ndindex(gw.shape):
                    assert_gradient_close(gw[idx], fw[idx])
            for gb, fb in zip(g.biases, fd_b):
                for idx in np.ndindex(gb.shape):
                    assert_gradient_close(gb[idx], fb[idx])

    def test_output_error_shape_checked(self, small_mixed_net):
        x = np.array([0.5])
        _, trace = forward_with_trace(small_mixed_net, x)
        with pytest.raises(DomainError):
            backward(small_mixed_net, trace, x, np.zeros(2))


class TestPlainMlpReduction:
    """With every secondary set to None the machinery must be an exact no-op
    relative to a straightforward MLP implementation."""

    @staticmethod
    def _reference_mlp(net, x):
        """Textbook loop-based MLP using the same activation scalars."""
        roles = net.roles()
        ys = []
        fps = []
        prev = list(x)
        for k, (W, b) in enumerate(zip(net.weights, net.biases)):
            y_layer = []
            fp_layer = []
            for i in range(W.shape[0]):
                acc = b[i]
                for j in range(W.shape[1]):
                    acc += W[i, j] * prev[j]
                value, deriv = composite_activate(
                    roles[k][i].primary, roles[k][i].secondary, acc
                )
                y_layer.append(value)
                fp_layer.append(deriv)
            ys.append(y_layer)
            fps.append(fp_layer)
            prev = y_layer
        return ys, fps

    @staticmethod
    def _reference_backward(net, x, ys, fps, out_err):
        deltas = [None] * net.n_layers
        deltas[-1] = [e * f for e, f in zip(out_err, fps[-1])]
        for k in range(net.n_layers - 2, -1, -1):
            W_up = net.weights[k + 1]
            deltas[k] = [
                fps[k][j] * sum(W_up[i, j] * deltas[k + 1][i] for i in range(W_up.shape[0]))
                for j in range(W_up.shape[1])
            ]
        gws = []
        gbs = []
        for k, W in enumerate(net.weights):
            prev = list(x) if k == 0 else ys[k - 1]
            gws.append(
                [[deltas[k][i] * prev[j] for j in range(W.shape[1])] for i in range(W.shape[0])]
            )
            gbs.append(list(deltas[k]))
        return gws, gbs

    def test_outputs_and_gradients_bitwise_equal(self, rng):
        config = NetworkConfig(2, (LayerSpec(6), LayerSpec(5)), 1)
        for seed in range(5):
            net = build_network(config, seed)
            x = rng.uniform(-2, 2, 2)
            out, trace = forward_with_trace(net, x)
            ys, fps = self._reference_mlp(net, x)
            for traced, ref in zip(trace.y, ys):
                np.testing.assert_array_equal(traced, np.asarray(ref))
            assert out[0] == ys[-1][0]
            out_err = np.array([0.75])
            g = backward(net, trace, x, out_err)
            gws, gbs = self._reference_backward(net, x, ys, fps, out_err)
            for gw, ref in zip(g.weights, gws):
                np.testing.assert_array_equal(gw, np.asarray(ref))
            for gb, ref in zip(g.biases, gbs):
                np.testing.assert_array_equal(gb, np.asarray(ref))


class TestMultiplierNetwork:
    def test_published_examples(self):
        net = build_multiplier_network()
        assert forward(net, np.array([2.0, 3.0]))[0] == pytest.approx(6.0, abs=1e-12)
        assert forward(net, np.array([-4.0, 5.0]))[0] == pytest.approx(-20.0, abs=1e-12)

    def test_multiplication_by_zero(self):
        net = build_multiplier_network()
        for x in (-10.0, -0.5, 0.0, 3.25, 10.0):
            assert forward(net, np.array([x, 0.0]))[0] == 0.0

    def test_exact_on_integer_grid(self):
        net = build_multiplier_network()
        for x in range(-10, 11):
            for y in range(-10, 11):
                got = forward(net, np.array([float(x), float(y)]))[0]
                assert abs(got - x * y) < 1e-9


class TestPredictBatch:
    def test_empty_batch(self, small_mixed_net):
        assert predict_batch(small_mixed_net, np.zeros((0, 1))).shape == (0, 1)

    def test_singleton_matches_forward(self, small_mixed_net):
        x = np.array([0.3])
        np.testing.assert_array_equal(
            predict_batch(small_mixed_net, x[None, :])[0], forward(small_mixed_net, x)
        )

    def test_order_preserved(self, small_mixed_net, rng):
        xs = rng.uniform(-2, 2, (194, 1))
        outs = predict_batch(small_mixed_net, xs)
        assert outs.shape == (194, 1)
        for i in (0, 50, 193):
            np.testing.assert_array_equal(outs[i], forward(small_mixed_net, xs[i]))

    def test_first_invalid_input_reported(self, small_mixed_net):
        xs = np.array([[0.1], [math.nan], [0.2]])
        with pytest.raises(DomainError, match="input 1"):
            predict_batch(small_mixed_net, xs)


class TestFinitePropagation:
    def test_preset_style_networks_stay_finite(self, rng):
        """Glorot-initialized networks shaped like the benchmark presets must
        propagate finite values across the whole input domain."""
        layers = tuple(LayerSpec(10, 4, 1) for _ in range(5))
        config = NetworkConfig(1, layers, 1)
        for seed in range(10):
            net = build_network(config, seed)
            for x in rng.uniform(-10, 10, 20):
                _, trace = forward_with_trace(net, np.array([x]))
                for y, fp, z in zip(trace.y, trace.f_prime, trace.pre_activation):
                    assert np.all(np.isfinite(y))
                    assert np.all(np.isfinite(fp))
                    assert np.all(np.isfinite(z))
