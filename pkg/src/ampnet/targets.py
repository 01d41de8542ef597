"""The two exact benchmark functions and their domains."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import DomainError

TAU = 2.0 * math.pi

DOMAIN_1D: tuple[tuple[float, float], ...] = ((0.0, TAU),)
DOMAIN_2D: tuple[tuple[float, float], ...] = ((-3.0, 3.0), (-3.0, 3.0))


def target_1d(x):
    """ln(x + 0.5) plus a fixed mix of sines; defined for x > -0.5.

    The sum of transcendental terms has no finite Taylor series, which is
    what makes it a useful regression benchmark. Accepts scalars or arrays.
    """
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise DomainError("input contains non-finite values")
    if np.any(x <= -0.5):
        raise DomainError("target_1d requires x > -0.5")
    y = (
        np.log(x + 0.5)
        + 0.2 * np.sin(x)
        + 0.4 * np.sin(2 * x)
        + 0.3 * np.sin(3 * x)
        - 0.1 * np.sin(5 * x)
        - 0.2 * np.sin(7 * x)
        + 0.15 * np.sin(20 * x)
    )
    return float(y) if y.ndim == 0 else y


def target_ackley(x, y):
    """Two-dimensional Ackley function: global minimum 0 at the origin.

    Accepts scalars or arrays (broadcast together).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DomainError("input contains non-finite values")
    r = np.sqrt((x * x + y * y) / 2.0)
    z = (
        -20.0 * np.exp(-0.2 * r)
        - np.exp((np.cos(TAU * x) + np.cos(TAU * y)) / 2.0)
        + 20.0
        + math.e
    )
    return float(z) if z.ndim == 0 else z


@dataclass(frozen=True)
class TargetFunction:
    """A named exact solution with its input dimension and domain box."""

    name: str
    input_dim: int
    domain: tuple[tuple[float, float], ...]
    fn: Callable[[np.ndarray], np.ndarray] = field(compare=False)

    def __call__(self, points):
        """Evaluate at an (n, input_dim) array (or a single point)."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if pts.shape[1] != self.input_dim:
            raise DomainError(
                f"points have {pts.shape[1]} coordinates, expected {self.input_dim}"
            )
        vals = np.atleast_1d(np.asarray(self.fn(pts), dtype=np.float64))
        return float(vals[0]) if np.asarray(points).ndim <= 1 else vals

    def contains(self, points) -> np.ndarray:
        """Boolean mask of rows inside the domain box."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        ok = np.ones(pts.shape[0], dtype=bool)
        for d, (lo, hi) in enumerate(self.domain):
            ok &= (pts[:, d] >= lo) & (pts[:, d] <= hi)
        return ok


TARGET_1D = TargetFunction("1d", 1, DOMAIN_1D, fn=lambda pts: target_1d(pts[:, 0]))
TARGET_ACKLEY = TargetFunction(
    "ackley2d", 2, DOMAIN_2D, fn=lambda pts: target_ackley(pts[:, 0], pts[:, 1])
)

_BY_NAME = {"1d": TARGET_1D, "ackley2d": TARGET_ACKLEY}


def target_by_name(name: str) -> TargetFunction:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise DomainError(
            f"unknown target {name!r}; choose from {sorted(_BY_NAME)}"
        ) from None
