"""Model parameters and the elementary kernels of the CEV diffusion.

The process is dX = mu * X dt + sigma * (X^+)^p dW with x^+ = max(x, 0),
elasticity exponent p in [1/2, 1), sigma > 0 and a positive start value.
Zero is absorbing.  Everything here is a pure function on immutable values.
"""

import math
from dataclasses import dataclass

import numpy as np


class CevError(Exception):
    """Base class for all library errors."""


class ParameterError(CevError, ValueError):
    """A model parameter violates its admissible range."""


class NonPositiveSigma(ParameterError):
    pass


class ExponentOutOfRange(ParameterError):
    pass


class NonPositiveInitialValue(ParameterError):
    pass


class ExponentNotHalf(CevError, ValueError):
    """The closed-form ruin probability is only available for p = 1/2."""


@dataclass(frozen=True)
class ModelParams:
    """CEV coefficients (mu, sigma, p) and the initial value x0.

    Constraints: sigma > 0, p in [1/2, 1), x0 > 0.  Violations raise the
    matching ParameterError subclass.
    """

    mu: float
    sigma: float
    p: float
    x0: float

    def __post_init__(self):
        if not (self.sigma > 0.0):
            raise NonPositiveSigma(f"sigma must be > 0, got {self.sigma}")
        if not (0.5 <= self.p < 1.0):
            raise ExponentOutOfRange(f"p must lie in [1/2, 1), got {self.p}")
        if not (self.x0 > 0.0):
            raise NonPositiveInitialValue(f"x0 must be > 0, got {self.x0}")


@dataclass(frozen=True)
class SimGrid:
    """Equidistant time grid on [0, horizon] with `steps` intervals."""

    horizon: float
    steps: int

    def __post_init__(self):
        if not (self.horizon > 0.0):
            raise ParameterError(f"horizon must be > 0, got {self.horizon}")
        if self.steps < 1:
            raise ParameterError(f"steps must be >= 1, got {self.steps}")

    @property
    def dt(self) -> float:
        return self.horizon / self.steps

    def times(self) -> np.ndarray:
        return np.arange(self.steps + 1) * self.dt


def validate(mu, sigma, p, x0) -> ModelParams:
    """Build ModelParams from raw values, raising a descriptive error on
    the first violated constraint."""
    return ModelParams(float(mu), float(sigma), float(p), float(x0))


def pos_pow(x, p):
    """(x^+)^p: zero for x <= 0, x**p otherwise.  Accepts scalars or arrays."""
    if np.isscalar(x):
        if x <= 0.0:
            return 0.0
        return math.sqrt(x) if p == 0.5 else x ** p
    xp = np.maximum(x, 0.0)
    return np.sqrt(xp) if p == 0.5 else np.power(xp, p)


def holder_gap_bound(x: float, y: float, p: float) -> float:
    """Upper bound for |(x^+)^{2p} - (y^+)^{2p}|.

    Equals |x - y| when p = 1/2 and (2 + |x| + |y|) |x - y|^p otherwise.
    """
    if p == 0.5:
        return abs(x - y)
    return (2.0 + abs(x) + abs(y)) * abs(x - y) ** p


def closed_form_ruin(params: ModelParams) -> float:
    """Infinite-horizon ruin probability min(1, exp(-2 mu x0 / sigma^2)).

    Only defined for p = 1/2 (exact equality on the representable 0.5).
    For mu <= 0 the exponential exceeds 1 and is clamped: ruin is certain
    under nonpositive drift.
    """
    if params.p != 0.5:
        raise ExponentNotHalf(f"closed form requires p = 1/2, got p={params.p}")
    return min(1.0, math.exp(-2.0 * params.mu * params.x0 / params.sigma ** 2))
