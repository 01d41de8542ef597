"""Training datasets: generation, CSV round-trip, and validation."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import ConfigError, DataValidationError
from .targets import TARGET_1D, TARGET_ACKLEY, TAU, TargetFunction

TARGET_MATCH_TOL = 1e-6


@dataclass
class Dataset:
    """Input points, target values, and where they came from."""

    inputs: np.ndarray  # (n, input_dim)
    targets: np.ndarray  # (n,)
    provenance: str
    target: TargetFunction | None = None

    def __post_init__(self):
        self.inputs = np.atleast_2d(np.asarray(self.inputs, dtype=np.float64))
        self.targets = np.asarray(self.targets, dtype=np.float64)
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise ConfigError(
                f"{self.inputs.shape[0]} inputs but {self.targets.shape[0]} targets"
            )
        if self.target is not None and not bool(
            np.all(self.target.contains(self.inputs))
        ):
            raise ConfigError("dataset contains points outside the target domain")

    def __len__(self) -> int:
        return self.inputs.shape[0]


def generate_1d_dataset(n: int = 194, seed: int = 0, source: str = "grid") -> Dataset:
    """Uniform grid on [0, 2*pi] with exact targets, or a CSV file.

    `source` is either "grid" (n evenly spaced points including both
    endpoints; `seed` is unused) or a path to a CSV accepted by
    `load_dataset`, whose targets are validated against the exact solution.
    """
    if source == "grid":
        if n < 2:
            raise ConfigError(f"grid mode needs n >= 2, got {n}")
        xs = np.linspace(0.0, TAU, n)
        from .targets import target_1d

        return Dataset(
            inputs=xs[:, None],
            targets=target_1d(xs),
            provenance=f"grid:{n}@[0,{TAU!r}]",
            target=TARGET_1D,
        )
    return load_dataset(source, TARGET_1D)


def generate_2d_dataset(n: int = 300, seed: int = 0) -> Dataset:
    """n points drawn uniformly from [-3, 3]^2 with exact Ackley targets."""
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-3.0, 3.0, size=(n, 2))
    from .targets import target_ackley

    return Dataset(
        inputs=pts,
        targets=target_ackley(pts[:, 0], pts[:, 1]),
        provenance=f"random2d:{n}:seed={seed}",
        target=TARGET_ACKLEY,
    )


def save_dataset(data: Dataset, path) -> None:
    """CSV with header x,y (1D) or x,y,z (2D); values round-trip exactly."""
    path = Path(path)
    dim = data.inputs.shape[1]
    if dim not in (1, 2):
        raise ConfigError(f"can only serialize 1D or 2D datasets, got dim {dim}")
    header = "x,y" if dim == 1 else "x,y,z"
    lines = [header]
    for row, t in zip(data.inputs, data.targets):
        cells = [repr(float(v)) for v in row] + [repr(float(t))]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_dataset(path, target: TargetFunction) -> Dataset:
    """Load and validate a dataset CSV for the given target function.

    Rejects malformed rows (with line numbers), points outside the target's
    domain, and targets that disagree with the exact solution by more than
    TARGET_MATCH_TOL.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise DataValidationError("empty dataset file")
    expected_header = "x,y" if target.input_dim == 1 else "x,y,z"
    if lines[0].strip() != expected_header:
        raise DataValidationError(
            f"expected header {expected_header!r}, got {lines[0].strip()!r}", line=1
        )
    n_cols = target.input_dim + 1
    inputs = []
    targets = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        cells = raw.split(",")
        if len(cells) != n_cols:
            raise DataValidationError(
                f"expected {n_cols} columns, got {len(cells)}", line=lineno
            )
        try:
            values = [float(c) for c in cells]
        except ValueError as err:
            raise DataValidationError(f"malformed number: {err}", line=lineno) from err
        point = values[:-1]
        if not bool(target.contains([point])[0]):
            raise DataValidationError(
                f"point {point} outside the {target.name} domain", line=lineno
            )
        exact = float(target(point))
        if abs(values[-1] - exact) > TARGET_MATCH_TOL:
            raise DataValidationError(
                f"target {values[-1]!r} deviates from exact value {exact!r}",
                line=lineno,
            )
        inputs.append(point)
        targets.append(values[-1])
    if not inputs:
        raise DataValidationError("dataset file has no data rows")
    return Dataset(
        inputs=np.asarray(inputs),
        targets=np.asarray(targets),
        provenance=f"file:{path}",
        target=target,
    )
