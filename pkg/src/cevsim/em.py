"""The discrete Euler-Maruyama recursion on an equidistant grid.

X_0 = x0,  X_k = X_{k-1} + mu dt X_{k-1}^+ + sigma (X_{k-1}^+)^p sqrt(dt) xi_k,
with absorption at the first grid index where the value drops to <= 0.
Once absorbed both positive-part terms vanish, so the path is frozen; we
skip the arithmetic entirely, which also makes the freeze bit-exact.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import rng
from .model import CevError, ModelParams, SimGrid


class NonFiniteState(CevError, FloatingPointError):
    """A path state overflowed to inf/nan (dt too coarse for the drift)."""

    def __init__(self, msg, path_index=None):
        super().__init__(msg)
        self.path_index = path_index


@dataclass(frozen=True)
class NoiseSkeleton:
    """The i.i.d. N(0,1) draws driving one path, with a reproducibility tag."""

    xi: np.ndarray
    seed_tag: str = ""

    def __len__(self):
        return len(self.xi)


@dataclass
class PathSkeleton:
    """Grid values of one simulated path.

    values has length steps+1 with values[0] = x0; absorption_index is the
    first k with values[k] <= 0 (None if the path stays positive); after
    absorption the values are frozen.  noise is kept so the path can be
    refined onto a finer grid with the same Brownian increments.
    """

    values: np.ndarray
    absorption_index: Optional[int]
    grid: SimGrid
    noise: Optional[NoiseSkeleton] = None


def make_noise(grid: SimGrid, master_seed: int, path_index: int = 0) -> NoiseSkeleton:
    """Counter-based noise for path `path_index`: a pure function of
    (master_seed, path_index), independent of scheduling."""
    xi = rng.path_normals(master_seed, path_index, grid.steps, rng.SKELETON_STREAM)
    return NoiseSkeleton(xi=xi, seed_tag=f"philox:{master_seed}:{path_index}")


def em_step(x_prev: float, params: ModelParams, dt: float, xi: float) -> float:
    """One step of the recursion; absorbing states (x_prev <= 0) pass through."""
    if math.isnan(x_prev):
        raise NonFiniteState("NaN state fed to em_step")
    if x_prev <= 0.0:
        return x_prev
    g = math.sqrt(x_prev) if params.p == 0.5 else x_prev ** params.p
    return x_prev + (params.mu * dt) * x_prev + ((params.sigma * math.sqrt(dt)) * g) * xi


def simulate_skeleton(params: ModelParams, grid: SimGrid, noise: NoiseSkeleton) -> PathSkeleton:
    """Iterate em_step over the grid; deterministic given (params, grid, noise)."""
    if len(noise) != grid.steps:
        raise ValueError(f"noise length {len(noise)} != grid.steps {grid.steps}")
    dt = grid.dt
    values = np.empty(grid.steps + 1)
    values[0] = params.x0
    x = params.x0
    absorbed_at = None
    for k in range(grid.steps):
        if absorbed_at is None:
            x = em_step(x, params, dt, float(noise.xi[k]))
            if not math.isfinite(x):
                raise NonFiniteState(f"non-finite state at step {k + 1}")
            if x <= 0.0:
                absorbed_at = k + 1
        values[k + 1] = x
    return PathSkeleton(values=values, absorption_index=absorbed_at, grid=grid, noise=noise)


def hitting_index(path: PathSkeleton) -> Optional[int]:
    """Grid index of the discrete hitting time: smallest k with values[k] <= 0."""
    hits = np.flatnonzero(path.values <= 0.0)
    return int(hits[0]) if hits.size else None
