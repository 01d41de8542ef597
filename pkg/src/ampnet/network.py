"""Layered feed-forward network with per-neuron secondary-activation roles.

A network is the map y -> F(W y) applied layer by layer. Hidden neurons may
carry an amplifying or attenuating secondary activation on top of their
primary one; output neurons are always linear (identity primary, no
secondary). The forward pass records, per neuron, the post-secondary value y
and the composite derivative F', which is everything backpropagation needs;
the pre-secondary value is discarded as soon as the secondary function has
been applied.

Parameters are stored in flat float64 buffers; the `weights` and `biases`
lists expose per-layer views into them, so in-place edits through either
side stay consistent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .activations import (
    ActivationKind,
    Amplify,
    Attenuate,
    Identity,
    ParametricSoftplus,
    SecondaryKind,
    primary_code,
    secondary_code,
)
from .exceptions import ConfigError, DomainError, NonFinitePropagationError


@dataclass(frozen=True)
class NeuronRole:
    """Activation assignment of a single neuron."""

    primary: ActivationKind
    secondary: SecondaryKind = None


@dataclass(frozen=True)
class LayerSpec:
    """One hidden layer: width plus how many of its neurons amplify/attenuate.

    The first `n_amplifying` neurons amplify, the next `n_attenuating`
    attenuate (with parameter `attenuate_b`), and the rest are plain; in a
    fully-connected layer the positions are interchangeable, only the counts
    matter.
    """

    width: int
    n_amplifying: int = 0
    n_attenuating: int = 0
    primary: ActivationKind = ParametricSoftplus(0.3)
    attenuate_b: float = 1.0

    def __post_init__(self):
        if self.width < 1:
            raise ConfigError(f"layer width must be >= 1, got {self.width}")
        if self.n_amplifying < 0 or self.n_attenuating < 0:
            raise ConfigError("neuron counts must be non-negative")
        if self.n_amplifying + self.n_attenuating > self.width:
            raise ConfigError(
                f"n_amplifying + n_attenuating = "
                f"{self.n_amplifying + self.n_attenuating} exceeds layer "
                f"width {self.width}"
            )
        # Constructing the kind validates b > 0.
        if self.n_attenuating > 0:
            Attenuate(self.attenuate_b)

    def roles(self) -> tuple[NeuronRole, ...]:
        out = []
        for i in range(self.width):
            if i < self.n_amplifying:
                sec: SecondaryKind = Amplify()
            elif i < self.n_amplifying + self.n_attenuating:
                sec = Attenuate(self.attenuate_b)
            else:
                sec = None
            out.append(NeuronRole(self.primary, sec))
        return tuple(out)


@dataclass(frozen=True)
class NetworkConfig:
    """Topology and role assignment of a network.

    `special_layer_range` is the inclusive 1-based span of hidden layers
    allowed to hold amplifying/attenuating neurons (defaults to all of
    them); layers outside it must have zero special neurons.

    `hidden_layers` may be empty, giving a purely linear input->output map.
    """

    input_dim: int
    hidden_layers: tuple[LayerSpec, ...]
    output_dim: int
    special_layer_range: tuple[int, int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "hidden_layers", tuple(self.hidden_layers))
        if self.special_layer_range is not None:
            object.__setattr__(
                self, "special_layer_range", tuple(self.special_layer_range)
            )
        if self.input_dim < 1:
            raise ConfigError(f"input_dim must be >= 1, got {self.input_dim}")
        if self.output_dim < 1:
            raise ConfigError(f"output_dim must be >= 1, got {self.output_dim}")
        depth = len(self.hidden_layers)
        rng = self.special_layer_range
        if rng is not None:
            if depth == 0:
                raise ConfigError(
                    "special_layer_range given but there are no hidden layers"
                )
            lo, hi = rng
            if not (1 <= lo <= hi <= depth):
                raise ConfigError(
                    f"special_layer_range {rng} outside [1, {depth}]"
                )
        lo, hi = self.effective_special_range()
        for idx, layer in enumerate(self.hidden_layers, start=1):
            if (layer.n_amplifying or layer.n_attenuating) and not (lo <= idx <= hi):
                raise ConfigError(
                    f"hidden layer {idx} has special neurons but lies outside "
                    f"special_layer_range [{lo}, {hi}]"
                )

    @property
    def depth(self) -> int:
        return len(self.hidden_layers)

    def effective_special_range(self) -> tuple[int, int]:
        if self.special_layer_range is not None:
            return self.special_layer_range
        return (1, self.depth) if self.depth else (1, 0)

    def layer_roles(self) -> tuple[tuple[NeuronRole, ...], ...]:
        """Roles for every non-input layer, output layer included."""
        hidden = tuple(spec.roles() for spec in self.hidden_layers)
        output = tuple(NeuronRole(Identity(), None) for _ in range(self.output_dim))
        return hidden + (output,)


@dataclass
class ForwardTrace:
    """Per-neuron record of one forward pass over all non-input layers."""

    y: tuple[np.ndarray, ...]
    f_prime: tuple[np.ndarray, ...]
    pre_activation: tuple[np.ndarray, ...]
    _y_flat: np.ndarray = field(repr=False)
    _fp_flat: np.ndarray = field(repr=False)


@dataclass
class Gradient:
    """dLoss/dW and dLoss/dbias, shaped like the network's parameters."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    _w_flat: np.ndarray = field(repr=False)
    _b_flat: np.ndarray = field(repr=False)


class Network:
    """A configured network with concrete weights and biases."""

    def __init__(self, config: NetworkConfig, weights=None, biases=None):
        self.config = config
        dims = [config.input_dim]
        dims += [spec.width for spec in config.hidden_layers]
        dims.append(config.output_dim)
        self._dims = np.asarray(dims, dtype=np.int64)
        n_layers = len(dims) - 1

        w_sizes = [dims[k + 1] * dims[k] for k in range(n_layers)]
        n_sizes = dims[1:]
        self._w_off = np.asarray(
            np.concatenate(([0], np.cumsum(w_sizes)[:-1])), dtype=np.int64
        )
        self._n_off = np.asarray(
            np.concatenate(([0], np.cumsum(n_sizes)[:-1])), dtype=np.int64
        )
        total_w = int(sum(w_sizes))
        total_n = int(sum(n_sizes))
        self._w_flat = np.zeros(total_w)
        self._b_flat = np.zeros(total_n)

        self._w_views = [
            self._w_flat[self._w_off[k]: self._w_off[k] + w_sizes[k]].reshape(
                dims[k + 1], dims[k]
            )
            for k in range(n_layers)
        ]
        self._b_views = [
            self._b_flat[self._n_off[k]: self._n_off[k] + n_sizes[k]]
            for k in range(n_layers)
        ]

        roles = config.layer_roles()
        self._pcode = np.zeros(total_n, dtype=np.int64)
        self._pa = np.zeros(total_n)
        self._scode = np.zeros(total_n, dtype=np.int64)
        self._sb = np.zeros(total_n)
        pos = 0
        for layer in roles:
            for role in layer:
                self._pcode[pos], self._pa[pos] = primary_code(role.primary)
                self._scode[pos], self._sb[pos] = secondary_code(role.secondary)
                pos += 1

        if weights is not None:
            if len(weights) != n_layers:
                raise ConfigError(
                    f"expected {n_layers} weight matrices, got {len(weights)}"
                )
            for k, w in enumerate(weights):
                w = np.asarray(w, dtype=np.float64)
                if w.shape != self._w_views[k].shape:
                    raise ConfigError(
                        f"weight matrix {k + 1} has shape {w.shape}, expected "
                        f"{self._w_views[k].shape}"
                    )
                self._w_views[k][...] = w
        if biases is not None:
            if len(biases) != n_layers:
                raise ConfigError(
                    f"expected {n_layers} bias vectors, got {len(biases)}"
                )
            for k, b in enumerate(biases):
                b = np.asarray(b, dtype=np.float64)
                if b.shape != self._b_views[k].shape:
                    raise ConfigError(
                        f"bias vector {k + 1} has shape {b.shape}, expected "
                        f"{self._b_views[k].shape}"
                    )
                self._b_views[k][...] = b
        if not (np.all(np.isfinite(self._w_flat)) and np.all(np.isfinite(self._b_flat))):
            raise ConfigError("weights and biases must be finite")

    @property
    def weights(self) -> list[np.ndarray]:
        """Per-layer (fan_out, fan_in) weight matrices (views, mutable)."""
        return self._w_views

    @property
    def biases(self) -> list[np.ndarray]:
        """Per-layer bias vectors (views, mutable)."""
        return self._b_views

    @property
    def dims(self) -> tuple[int, ...]:
        """Layer widths, input layer first."""
        return tuple(int(d) for d in self._dims)

    @property
    def n_layers(self) -> int:
        return len(self._dims) - 1

    @property
    def n_parameters(self) -> int:
        return self._w_flat.size + self._b_flat.size

    def roles(self) -> tuple[tuple[NeuronRole, ...], ...]:
        return self.config.layer_roles()

    def copy(self) -> "Network":
        return Network(self.config, weights=self.weights, biases=self.biases)

    def __repr__(self):
        return (
            f"Network(dims={self.dims}, parameters={self.n_parameters})"
        )


def build_network(config: NetworkConfig, init_seed: int) -> Network:
    """Glorot-uniform initialized network; biases start at zero.

    Weights of layer k are drawn from U(-c, c) with
    c = sqrt(6 / (fan_in + fan_out)), layer by layer from a generator seeded
    with `init_seed`, so the same seed reproduces the same network bit for
    bit.
    """
    net = Network(config)
    rng = np.random.default_rng(init_seed)
    for w in net.weights:
        fan_out, fan_in = w.shape
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        w[...] = rng.uniform(-limit, limit, size=(fan_out, fan_in))
    return net


def _check_input(net: Network, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.shape != (net.config.input_dim,):
        raise DomainError(
            f"input has shape {x.shape}, expected ({net.config.input_dim},)"
        )
    if not np.all(np.isfinite(x)):
        raise DomainError("input contains non-finite values")
    return x


def forward_with_trace(net: Network, x) -> tuple[np.ndarray, ForwardTrace]:
    """Output vector plus the per-neuron (y, F', pre-activation) trace."""
    x = _check_input(net, x)
    total_n = net._b_flat.size
    z = np.empty(total_n)
    y = np.empty(total_n)
    fp = np.empty(total_n)
    bad = _kernels.forward_trace(
        net._dims, net._w_off, net._n_off, net._w_flat, net._b_flat,
        net._pcode, net._pa, net._scode, net._sb, x, z, y, fp,
    )
    if bad != 0:
        raise NonFinitePropagationError(int(bad))
    dims = net.dims
    offs = net._n_off
    y_views = tuple(
        y[offs[k]: offs[k] + dims[k + 1]] for k in range(net.n_layers)
    )
    fp_views = tuple(
        fp[offs[k]: offs[k] + dims[k + 1]] for k in range(net.n_layers)
    )
    z_views = tuple(
        z[offs[k]: offs[k] + dims[k + 1]] for k in range(net.n_layers)
    )
    trace = ForwardTrace(y_views, fp_views, z_views, y, fp)
    return y_views[-1].copy(), trace


def forward(net: Network, x) -> np.ndarray:
    """Output vector for one input; identical to the traced pass's output."""
    out, _ = forward_with_trace(net, x)
    return out


def backward(net: Network, trace: ForwardTrace, x, output_error) -> Gradient:
    """Gradients of the loss w.r.t. every weight and bias.

    `output_error` is dLoss/d(output) for the pass that produced `trace`.
    """
    x = _check_input(net, x)
    output_error = np.asarray(output_error, dtype=np.float64)
    if output_error.shape != (net.config.output_dim,):
        raise DomainError(
            f"output_error has shape {output_error.shape}, expected "
            f"({net.config.output_dim},)"
        )
    if trace._y_flat.size != net._b_flat.size:
        raise ConfigError("trace does not match network shape")
    gw = np.empty_like(net._w_flat)
    gb = np.empty_like(net._b_flat)
    delta = np.empty_like(net._b_flat)
    _kernels.backward(
        net._dims, net._w_off, net._n_off, net._w_flat, x,
        trace._y_flat, trace._fp_flat, output_error, gw, gb, delta,
    )
    dims = net.dims
    w_views = [
        gw[net._w_off[k]: net._w_off[k] + dims[k + 1] * dims[k]].reshape(
            dims[k + 1], dims[k]
        )
        for k in range(net.n_layers)
    ]
    b_views = [
        gb[net._n_off[k]: net._n_off[k] + dims[k + 1]]
        for k in range(net.n_layers)
    ]
    return Gradient(w_views, b_views, gw, gb)


def predict_batch(net: Network, xs) -> np.ndarray:
    """Row-wise forward pass; returns an (n, output_dim) array in input order."""
    xs = np.asarray(xs, dtype=np.float64)
    if xs.size == 0:
        return np.zeros((0, net.config.output_dim))
    if xs.ndim == 1:
        xs = xs[:, None]
    if xs.ndim != 2 or xs.shape[1] != net.config.input_dim:
        raise DomainError(
            f"inputs have shape {xs.shape}, expected (n, {net.config.input_dim})"
        )
    finite = np.isfinite(xs).all(axis=1)
    if not finite.all():
        idx = int(np.argmin(finite))
        raise DomainError(f"input {idx} contains non-finite values")
    outs = np.empty((xs.shape[0], net.config.output_dim))
    row, layer = _kernels.predict_into(
        net._dims, net._w_off, net._n_off, net._w_flat, net._b_flat,
        net._pcode, net._pa, net._scode, net._sb,
        np.ascontiguousarray(xs), outs,
    )
    if row >= 0:
        raise NonFinitePropagationError(
            int(layer), f"non-finite value in layer {layer} for input {row}"
        )
    return outs


def build_multiplier_network() -> Network:
    """Exact two-input multiplier from two amplifying identity neurons.

    Uses x*y = ((x+y)^2 - (x-y)^2) / 4: the hidden layer forms x+y and x-y,
    squares both, and the output weights 1/4 and -1/4 take the difference.
    """
    config = NetworkConfig(
        input_dim=2,
        hidden_layers=(LayerSpec(width=2, n_amplifying=2, primary=Identity()),),
        output_dim=1,
    )
    weights = [
        np.array([[1.0, 1.0], [1.0, -1.0]]),
        np.array([[0.25, -0.25]]),
    ]
    return Network(config, weights=weights, biases=[np.zeros(2), np.zeros(1)])
