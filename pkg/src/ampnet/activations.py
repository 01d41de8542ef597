"""Primary and secondary activation functions with exact analytic derivatives.

A neuron's primary activation H is applied to its weighted input; amplifying
and attenuating neurons compose a secondary function G on top of it, so the
neuron computes F = G(H(x)). `composite_activate` evaluates both the value
and the chain-rule derivative F'(x) = G'(H(x)) * H'(x) in one pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _kernels
from .exceptions import ConfigError, DomainError


@dataclass(frozen=True)
class ParametricSoftplus:
    """f(x) = a*x + (1-a)*ln(1 + e^x), a smooth leaky-linear/softplus blend.

    Requires 0 <= a < 1; a = 1 would collapse to the identity.
    """

    a: float = 0.3

    def __post_init__(self):
        if not (isinstance(self.a, (int, float)) and math.isfinite(self.a)):
            raise ConfigError(f"softplus parameter a must be finite, got {self.a!r}")
        if not 0.0 <= self.a < 1.0:
            raise ConfigError(f"softplus parameter a must lie in [0, 1), got {self.a}")


@dataclass(frozen=True)
class Identity:
    """Pass-through activation; used for output layers and exact constructions."""


@dataclass(frozen=True)
class ReLU:
    """max(0, x); derivative at 0 is taken to be 0."""


ActivationKind = ParametricSoftplus | Identity | ReLU


@dataclass(frozen=True)
class Amplify:
    """Secondary activation G(h) = h^2 (the amplifying neuron)."""


@dataclass(frozen=True)
class Attenuate:
    """Secondary activation G(h) = h / (h^2 + b), a bounded reciprocal.

    Requires b > 0; b = 0 would reintroduce the 1/h singularity.
    """

    b: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.b, (int, float)) and math.isfinite(self.b)):
            raise ConfigError(f"attenuate parameter b must be finite, got {self.b!r}")
        if self.b <= 0.0:
            raise ConfigError(f"attenuate parameter b must be positive, got {self.b}")


# A plain neuron has no secondary activation at all, encoded as None.
SecondaryKind = Amplify | Attenuate | None


def primary_code(kind: ActivationKind) -> tuple[int, float]:
    """(kernel code, parameter) pair for a primary activation."""
    if isinstance(kind, ParametricSoftplus):
        return _kernels.PRIM_SOFTPLUS, kind.a
    if isinstance(kind, Identity):
        return _kernels.PRIM_IDENTITY, 0.0
    if isinstance(kind, ReLU):
        return _kernels.PRIM_RELU, 0.0
    raise ConfigError(f"unknown primary activation {kind!r}")


def secondary_code(kind: SecondaryKind) -> tuple[int, float]:
    """(kernel code, parameter) pair for a secondary activation."""
    if kind is None:
        return _kernels.SEC_NONE, 0.0
    if isinstance(kind, Amplify):
        return _kernels.SEC_AMPLIFY, 0.0
    if isinstance(kind, Attenuate):
        return _kernels.SEC_ATTENUATE, kind.b
    raise ConfigError(f"unknown secondary activation {kind!r}")


def primary_from_code(code: int, param: float) -> ActivationKind:
    if code == _kernels.PRIM_SOFTPLUS:
        return ParametricSoftplus(param)
    if code == _kernels.PRIM_IDENTITY:
        return Identity()
    if code == _kernels.PRIM_RELU:
        return ReLU()
    raise ConfigError(f"unknown primary activation code {code}")


def secondary_from_code(code: int, param: float) -> SecondaryKind:
    if code == _kernels.SEC_NONE:
        return None
    if code == _kernels.SEC_AMPLIFY:
        return Amplify()
    if code == _kernels.SEC_ATTENUATE:
        return Attenuate(param)
    raise ConfigError(f"unknown secondary activation code {code}")


def _finite(x) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"input must be finite, got {x}")
    return x


def primary_activate(kind: ActivationKind, x: float) -> float:
    """H(x) for the given primary activation."""
    code, a = primary_code(kind)
    return _kernels.primary_value(code, a, _finite(x))


def primary_derivative(kind: ActivationKind, x: float) -> float:
    """H'(x) for the given primary activation."""
    code, a = primary_code(kind)
    return _kernels.primary_derivative(code, a, _finite(x))


def secondary_activate(kind: SecondaryKind, h: float) -> float:
    """G(h) for the given secondary activation (h for None)."""
    code, b = secondary_code(kind)
    return _kernels.secondary_value(code, b, _finite(h))


def secondary_derivative(kind: SecondaryKind, h: float) -> float:
    """dG/dh at h (1 for None)."""
    code, b = secondary_code(kind)
    return _kernels.secondary_derivative(code, b, _finite(h))


def composite_activate(
    primary: ActivationKind, secondary: SecondaryKind, x: float
) -> tuple[float, float]:
    """(G(H(x)), G'(H(x)) * H'(x)); reduces to (H(x), H'(x)) when secondary
    is None."""
    pcode, pa = primary_code(primary)
    scode, sb = secondary_code(secondary)
    return _kernels.composite(pcode, pa, scode, sb, _finite(x))
