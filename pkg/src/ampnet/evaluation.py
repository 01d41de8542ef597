"""Error metrics over dense evaluation grids."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import Dataset
from .exceptions import ConfigError, DomainError
from .network import Network, predict_batch
from .targets import TargetFunction

DEFAULT_GRID_1D = 2001
DEFAULT_GRID_2D = 201


@dataclass
class EvalReport:
    """MAE and standard deviation of the signed error over a dense grid.

    `sd` uses population normalization. The location of the largest absolute
    error is kept to study where the fit breaks down.
    """

    mae: float
    sd: float
    grid_spec: str
    max_abs_error: float
    max_error_location: np.ndarray

    def __post_init__(self):
        if self.mae < 0 or self.sd < 0:
            raise ConfigError("mae and sd must be non-negative")


def evaluation_grid(fn: TargetFunction, grid_resolution: int | None = None):
    """Uniform grid over the target's domain, endpoints included.

    1D: `grid_resolution` points. 2D: a grid_resolution^2 lattice ordered by
    ascending x, then ascending y.
    """
    if grid_resolution is None:
        grid_resolution = DEFAULT_GRID_1D if fn.input_dim == 1 else DEFAULT_GRID_2D
    if grid_resolution < 2:
        raise ConfigError(f"grid resolution must be >= 2, got {grid_resolution}")
    axes = [np.linspace(lo, hi, grid_resolution) for lo, hi in fn.domain]
    if fn.input_dim == 1:
        return axes[0][:, None]
    xg, yg = np.meshgrid(axes[0], axes[1], indexing="ij")
    return np.column_stack([xg.ravel(), yg.ravel()])


def evaluate(
    net: Network, fn: TargetFunction, grid_resolution: int | None = None
) -> EvalReport:
    """Compare the network against the exact solution on a dense grid."""
    if net.config.input_dim != fn.input_dim:
        raise DomainError(
            f"network takes {net.config.input_dim} inputs but target "
            f"{fn.name} has {fn.input_dim}"
        )
    if net.config.output_dim != 1:
        raise DomainError("evaluation expects a scalar-output network")
    pts = evaluation_grid(fn, grid_resolution)
    preds = predict_batch(net, pts)[:, 0]
    errors = preds - fn(pts)
    worst = int(np.argmax(np.abs(errors)))
    n = pts.shape[0] if fn.input_dim == 1 else int(np.sqrt(pts.shape[0]))
    return EvalReport(
        mae=float(np.mean(np.abs(errors))),
        sd=float(np.std(errors)),
        grid_spec=f"uniform:{fn.name}:{n}",
        max_abs_error=float(np.abs(errors[worst])),
        max_error_location=pts[worst].copy(),
    )


def nearest_training_distances(data: Dataset) -> np.ndarray:
    """Each training point's distance to its nearest other training point."""
    pts = data.inputs
    diff = pts[:, None, :] - pts[None, :, :]
    dists = np.sqrt(np.sum(diff * diff, axis=-1))
    np.fill_diagonal(dists, np.inf)
    return dists.min(axis=1)


def extrapolation_gap(report: EvalReport, data: Dataset) -> tuple[float, float]:
    """(distance from the max-error point to the training set,
    median nearest-neighbor distance within the training set).

    The first exceeding the second means the worst error sits farther from
    the data than typical training points sit from each other.
    """
    loc = np.asarray(report.max_error_location, dtype=np.float64)
    gap = float(np.min(np.sqrt(np.sum((data.inputs - loc) ** 2, axis=1))))
    median_nn = float(np.median(nearest_training_distances(data)))
    return gap, median_nn
