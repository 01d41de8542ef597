"""Training protocol: per-sample Adam on squared error with L2 weight decay.

Every update step handles exactly one sample (batch size 1). A run is fully
determined by its two seeds: `init_seed` fixes the initial weights and
`shuffle_seed` fixes the per-epoch visit order. `best_of_n` repeats the run
with derived seeds and keeps the result with the lowest evaluation MAE.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable

import numpy as np

from . import _kernels
from .exceptions import (
    AllRunsDivergedError,
    ConfigError,
    DomainError,
    TrainingDivergedError,
)
from .network import Gradient, Network, NetworkConfig, build_network

if TYPE_CHECKING:
    from .datasets import Dataset
    from .evaluation import EvalReport


@dataclass(frozen=True)
class TrainingConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    l2_lambda: float = 1e-5
    epochs: int = 20000
    shuffle_seed: int = 0
    init_seed: int = 0

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigError("beta1 and beta2 must lie in [0, 1)")
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")
        if self.l2_lambda < 0:
            raise ConfigError(f"l2_lambda must be >= 0, got {self.l2_lambda}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")


class AdamState:
    """First/second moment estimates, shaped like the network parameters."""

    def __init__(self, net: Network):
        self._m_w = np.zeros_like(net._w_flat)
        self._v_w = np.zeros_like(net._w_flat)
        self._m_b = np.zeros_like(net._b_flat)
        self._v_b = np.zeros_like(net._b_flat)
        self.t = 0
        self._shape_key = (net._w_flat.size, net._b_flat.size)

    def _layer_views(self, flat, net):
        dims = net.dims
        if flat.size == net._w_flat.size:
            return [
                flat[net._w_off[k]: net._w_off[k] + dims[k + 1] * dims[k]]
                .reshape(dims[k + 1], dims[k])
                for k in range(net.n_layers)
            ]
        return [
            flat[net._n_off[k]: net._n_off[k] + dims[k + 1]]
            for k in range(net.n_layers)
        ]

    def m(self, net: Network):
        """(weight moments, bias moments) as per-layer views."""
        return self._layer_views(self._m_w, net), self._layer_views(self._m_b, net)

    def v(self, net: Network):
        return self._layer_views(self._v_w, net), self._layer_views(self._v_b, net)


@dataclass
class RunResult:
    trained: Network
    final_train_loss: float
    eval: "EvalReport | None"
    run_seed: int
    epoch_losses: np.ndarray


@dataclass
class RunFailure:
    """Record of an aborted (diverged) training run."""

    run_index: int
    init_seed: int
    shuffle_seed: int
    epoch: int
    sample: int
    message: str


def mse_loss(predicted, target) -> tuple[float, np.ndarray]:
    """(0.5 * sum of squared errors, gradient w.r.t. the prediction)."""
    predicted = np.asarray(predicted, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if predicted.shape != target.shape:
        raise DomainError(
            f"prediction shape {predicted.shape} != target shape {target.shape}"
        )
    d = predicted - target
    return 0.5 * float(np.sum(d * d)), d


def l2_penalty(net: Network, lam: float) -> tuple[float, list[np.ndarray]]:
    """L2 weight penalty (lam/2)*sum(w^2) and its per-weight gradient lam*w.

    Biases are not regularized.
    """
    if lam < 0:
        raise ConfigError(f"l2 strength must be >= 0, got {lam}")
    penalty = 0.5 * lam * float(np.sum(net._w_flat * net._w_flat))
    return penalty, [lam * w for w in net.weights]


def adam_step(
    net: Network, grads: Gradient, state: AdamState, cfg: TrainingConfig
) -> tuple[Network, AdamState]:
    """Advance `state` and update parameters in place; returns both."""
    if grads._w_flat.size != net._w_flat.size or grads._b_flat.size != net._b_flat.size:
        raise ConfigError("gradient does not match network shape")
    if state._shape_key != (net._w_flat.size, net._b_flat.size):
        raise ConfigError("Adam state does not match network shape")
    t = state.t + 1
    bad = _kernels.adam_update(
        net._w_flat, net._b_flat, grads._w_flat, grads._b_flat,
        state._m_w, state._v_w, state._m_b, state._v_b,
        t, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon,
    )
    if bad >= 0:
        nw = net._w_flat.size
        kind, flat = ("weight", bad) if bad < nw else ("bias", bad - nw)
        raise DomainError(f"non-finite gradient in {kind} component {flat}")
    state.t = t
    return net, state


def _epoch_orders(n_samples: int, epochs: int, shuffle_seed: int) -> np.ndarray:
    """Visit order per epoch, each epoch seeded by (shuffle_seed, epoch)."""
    perms = np.empty((epochs, n_samples), dtype=np.int64)
    for e in range(epochs):
        perms[e] = np.random.default_rng([shuffle_seed, e]).permutation(n_samples)
    return perms


def train(
    config: NetworkConfig,
    tcfg: TrainingConfig,
    data: "Dataset",
    evaluator: "Callable[[Network], EvalReport] | None" = None,
) -> RunResult:
    """One deterministic training run over the dataset.

    Visits all samples once per epoch in a freshly shuffled order; each visit
    is forward -> squared-error loss -> backward -> L2 contribution -> Adam
    update. If `evaluator` is omitted and the dataset knows its target
    function, the trained network is evaluated against it on the default
    grid.

    Raises TrainingDivergedError (with epoch and sample indices) if any loss,
    gradient, or parameter becomes non-finite.
    """
    xs = np.ascontiguousarray(np.atleast_2d(np.asarray(data.inputs, dtype=np.float64)))
    ys = np.asarray(data.targets, dtype=np.float64)
    if ys.ndim == 1:
        ys = ys[:, None]
    ys = np.ascontiguousarray(ys)
    n = xs.shape[0]
    if n == 0:
        raise ConfigError("dataset is empty")
    if xs.shape[1] != config.input_dim or ys.shape[1] != config.output_dim:
        raise ConfigError(
            f"dataset shapes {xs.shape}/{ys.shape} do not match network "
            f"dims {config.input_dim}->{config.output_dim}"
        )

    net = build_network(config, tcfg.init_seed)
    state = AdamState(net)
    perms = _epoch_orders(n, tcfg.epochs, tcfg.shuffle_seed)
    epoch_losses = np.empty(tcfg.epochs)
    status, epoch, sample, t = _kernels.train_loop(
        net._dims, net._w_off, net._n_off, net._w_flat, net._b_flat,
        net._pcode, net._pa, net._scode, net._sb,
        xs, ys, perms,
        tcfg.learning_rate, tcfg.beta1, tcfg.beta2, tcfg.epsilon,
        tcfg.l2_lambda,
        state._m_w, state._v_w, state._m_b, state._v_b,
        state.t, epoch_losses,
    )
    state.t = int(t)
    if status != 0:
        what = "loss" if status == 1 else "gradient"
        raise TrainingDivergedError(
            int(epoch), int(sample),
            f"non-finite {what} at epoch {epoch}, sample {sample}",
        )
    if not (np.all(np.isfinite(net._w_flat)) and np.all(np.isfinite(net._b_flat))):
        raise TrainingDivergedError(
            tcfg.epochs - 1, int(perms[-1, -1]), "non-finite parameters after training"
        )

    if evaluator is None and data.target is not None:
        from .evaluation import evaluate

        target = data.target
        evaluator = lambda trained: evaluate(trained, target)  # noqa: E731
    report = evaluator(net) if evaluator is not None else None
    return RunResult(
        trained=net,
        final_train_loss=float(epoch_losses[-1]),
        eval=report,
        run_seed=tcfg.init_seed,
        epoch_losses=epoch_losses,
    )


def best_of_n(
    config: NetworkConfig,
    tcfg: TrainingConfig,
    data: "Dataset",
    n: int,
    base_seed: int,
    evaluator: "Callable[[Network], EvalReport] | None" = None,
    n_jobs: int = 1,
) -> tuple[RunResult, list[RunResult | RunFailure]]:
    """n independent runs; the one with the lowest evaluation MAE wins.

    Run k uses init_seed = base_seed + k and
    shuffle_seed = base_seed + 10000 + k. Diverged runs are recorded as
    RunFailure entries and skipped for the ranking; ties break toward the
    lower run index. Runs may execute concurrently (`n_jobs` threads) —
    results are ordered by run index either way.
    """
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")

    def one(k: int) -> RunResult | RunFailure:
        run_cfg = dataclasses.replace(
            tcfg, init_seed=base_seed + k, shuffle_seed=base_seed + 10000 + k
        )
        try:
            return train(config, run_cfg, data, evaluator)
        except TrainingDivergedError as err:
            return RunFailure(
                run_index=k,
                init_seed=run_cfg.init_seed,
                shuffle_seed=run_cfg.shuffle_seed,
                epoch=err.epoch,
                sample=err.sample,
                message=str(err),
            )

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(one, range(n)))
    else:
        results = [one(k) for k in range(n)]

    best = None
    for res in results:
        if isinstance(res, RunFailure):
            continue
        if res.eval is None:
            raise ConfigError(
                "best_of_n needs an evaluation to rank runs; pass an "
                "evaluator or use a dataset with a known target"
            )
        if best is None or res.eval.mae < best.eval.mae:
            best = res
    if best is None:
        raise AllRunsDivergedError([r for r in results if isinstance(r, RunFailure)])
    return best, results
