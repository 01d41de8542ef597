"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of the operation."""


class ConfigError(ValueError):
    """A configuration object violates one of its invariants."""


class NonFinitePropagationError(ArithmeticError):
    """A forward pass produced a non-finite value.

    `layer` is the 1-based index of the offending non-input layer.
    """

    def __init__(self, layer: int, message: str | None = None):
        self.layer = layer
        super().__init__(message or f"non-finite value in layer {layer}")


class TrainingDivergedError(ArithmeticError):
    """Training produced a non-finite loss, gradient, or parameter."""

    def __init__(self, epoch: int, sample: int, message: str | None = None):
        self.epoch = epoch
        self.sample = sample
        super().__init__(
            message
            or f"training diverged at epoch {epoch}, sample {sample}"
        )


class AllRunsDivergedError(ArithmeticError):
    """Every independent training run diverged; no best run exists."""

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__(
            f"all {len(self.failures)} training runs diverged"
        )


class DataValidationError(ValueError):
    """A dataset file failed validation (parse, domain, or target mismatch)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
