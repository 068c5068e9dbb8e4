"""Continuous interpolation of a path skeleton via Brownian bridges.

Within each grid step the interpolant keeps the step's frozen coefficients:

    Xtilde(t) = X_{k-1} + mu X_{k-1}^+ (t - t_{k-1})
                        + sigma (X_{k-1}^+)^p B(t - t_{k-1}),

where B is a Brownian path on [0, dt] conditioned to end at the step's
total increment sqrt(dt) xi_k.  The interpolant therefore coincides with
the skeleton at every coarse grid point, and the sup distance between the
two is estimated from below on the refined grid.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .model import CevError, ModelParams, pos_pow
from .em import PathSkeleton


class MismatchedPaths(CevError, ValueError):
    """A refined path was compared against a skeleton it was not built from."""


@dataclass
class RefinedPath:
    """Bridge-refined values at m sub-points per coarse step."""

    refinement: int
    times: np.ndarray
    values: np.ndarray
    parent: PathSkeleton


def _bridge_interiors(increments: np.ndarray, dt: float, m: int, z: np.ndarray) -> np.ndarray:
    """Discrete Brownian bridges on [0, dt] for a batch of steps.

    increments : (n,) endpoint value of each bridge.
    z : (n, m-1) standard normals.
    Returns (n, m+1) bridge values with column 0 == 0 and column m == the
    increment; interior points are sampled sequentially from the bridge
    conditionals (mean b + (w-b)/r, variance ds (r-1)/r over the r
    remaining sub-steps).
    """
    n = len(increments)
    ds = dt / m
    out = np.empty((n, m + 1))
    out[:, 0] = 0.0
    out[:, m] = increments
    b = np.zeros(n)
    for j in range(1, m):
        r = m - (j - 1)
        mean = b + (increments - b) / r
        sd = math.sqrt(ds * (r - 1) / r)
        b = mean + sd * z[:, j - 1]
        out[:, j] = b
    return out


def bridge_fill(total_increment: float, dt: float, m: int, gen: np.random.Generator) -> np.ndarray:
    """Interior values (m-1 of them) of one Brownian bridge on [0, dt]
    ending at total_increment."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if m == 1:
        return np.empty(0)
    z = rng.standard_normals(gen, (1, m - 1))
    return _bridge_interiors(np.array([total_increment]), dt, m, z)[0, 1:m]


def refine_path(parent: PathSkeleton, params: ModelParams, m: int,
                gen: np.random.Generator) -> RefinedPath:
    """Refine a skeleton onto m sub-points per step.

    The step-k endpoint increment is sqrt(dt) xi_k from the parent's own
    noise, so the refinement is coupled to the skeleton; interior Brownian
    points come from `gen`.  Coarse grid values are copied from the parent
    verbatim.
    """
    if parent.noise is None:
        raise ValueError("parent skeleton carries no noise; cannot couple the refinement")
    if m < 1:
        raise ValueError("m must be >= 1")
    n = parent.grid.steps
    dt = parent.grid.dt
    ds = dt / m
    values_c = parent.values

    if m == 1:
        z = np.empty((n, 0))
    else:
        z = rng.standard_normals(gen, (n, m - 1))
    bridges = _bridge_interiors(math.sqrt(dt) * parent.noise.xi, dt, m, z)

    xp = np.maximum(values_c[:-1], 0.0)
    drift_c = params.mu * xp
    diff_c = params.sigma * pos_pow(values_c[:-1], params.p)
    sub_t = np.arange(m) * ds

    refined = np.empty(n * m + 1)
    refined[: n * m] = (
        values_c[:-1, None] + drift_c[:, None] * sub_t[None, :] + diff_c[:, None] * bridges[:, :m]
    ).ravel()
    refined[n * m] = values_c[n]
    refined[:: m] = values_c  # exact coupling at the coarse grid points

    times = np.arange(n * m + 1) * ds
    return RefinedPath(refinement=m, times=times, values=refined, parent=parent)


def piecewise_constant(parent: PathSkeleton, m: int) -> np.ndarray:
    """The skeleton as a right-continuous step function on the refined grid."""
    n = parent.grid.steps
    out = np.empty(n * m + 1)
    out[: n * m] = np.repeat(parent.values[:-1], m)
    out[n * m] = parent.values[n]
    return out


def sup_distance(parent: PathSkeleton, refined: RefinedPath) -> float:
    """Max over refined sample points of |interpolant - step function|.

    A lower estimate of the true sup over the continuum; zero iff the
    interpolant is constant on every step.
    """
    if refined.parent is not parent:
        raise MismatchedPaths("refined path was not built from this skeleton")
    return float(np.max(np.abs(refined.values - piecewise_constant(parent, refined.refinement))))
