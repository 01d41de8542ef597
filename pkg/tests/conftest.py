import numpy as np
import pytest

from ampnet import (
    Amplify,
    Attenuate,
    Identity,
    LayerSpec,
    NetworkConfig,
    ParametricSoftplus,
    ReLU,
    build_network,
    forward,
    mse_loss,
)

ALL_PRIMARIES = (ParametricSoftplus(0.3), Identity(), ReLU())
ALL_SECONDARIES = (None, Amplify(), Attenuate(1.0))


def central_difference(f, x, h=1e-6):
    return (f(x + h) - f(x - h)) / (2.0 * h)


def assert_gradient_close(analytic, numeric, rel=1e-5, small=1e-3, abs_tol=1e-8):
    """Spec tolerance: relative below `rel`, absolute below `abs_tol` when
    the analytic value is tiny."""
    if abs(analytic) < small:
        assert abs(analytic - numeric) < abs_tol, (analytic, numeric)
    else:
        assert abs(analytic - numeric) / abs(analytic) < rel, (analytic, numeric)


def random_role_config(rng, max_depth=9, max_width=10):
    """A random topology mixing plain, amplifying, and attenuating neurons.

    Occasionally produces layers that are 100% amplifying or 100%
    attenuating, which is the hardest case for gradient flow.
    """
    depth = int(rng.integers(1, max_depth + 1))
    layers = []
    for _ in range(depth):
        width = int(rng.integers(1, max_width + 1))
        style = rng.integers(0, 4)
        if style == 0:
            n_amp, n_att = width, 0
        elif style == 1:
            n_amp, n_att = 0, width
        else:
            n_amp = int(rng.integers(0, width + 1))
            n_att = int(rng.integers(0, width - n_amp + 1))
        layers.append(LayerSpec(width, n_amp, n_att))
    return NetworkConfig(
        input_dim=int(rng.integers(1, 3)),
        hidden_layers=tuple(layers),
        output_dim=1,
    )


def finite_difference_gradients(net, x, target, h=1e-6):
    """Central-difference gradient of the squared-error loss, parameter by
    parameter; the oracle against which backward is checked."""

    def loss():
        return mse_loss(forward(net, x), target)[0]

    grads_w = []
    for W in net.weights:
        g = np.zeros_like(W)
        for idx in np.ndindex(W.shape):
            orig = W[idx]
            W[idx] = orig + h
            up = loss()
            W[idx] = orig - h
            down = loss()
            W[idx] = orig
            g[idx] = (up - down) / (2.0 * h)
        grads_w.append(g)
    grads_b = []
    for b in net.biases:
        g = np.zeros_like(b)
        for idx in np.ndindex(b.shape):
            orig = b[idx]
            b[idx] = orig + h
            up = loss()
            b[idx] = orig - h
            down = loss()
            b[idx] = orig
            g[idx] = (up - down) / (2.0 * h)
        grads_b.append(g)
    return grads_w, grads_b


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


@pytest.fixture
def small_mixed_net():
    config = NetworkConfig(1, (LayerSpec(5, 2, 1), LayerSpec(4, 1, 2)), 1)
    return build_network(config, 11)
