"""Pure-numpy path kernels: vectorized across paths, looped over steps.

These are the fallback for the compiled kernels in _kernels_cy; both
expose the same signatures and the same arithmetic (identical operation
order, sqrt special-cased for p = 1/2) so results agree to the last few
ulps across backends.
"""

import math

import numpy as np

BACKEND = "python"


def em_block(x0, mu, sigma, p, dt, xi):
    """Euler-Maruyama recursion for a block of paths.

    xi : (N, n) array of N(0,1) draws, one row per path.
    Returns (terminal (N,), absorb_idx (N,) int64 with -1 for never
    absorbed, max_abs (N,) running max of |X| along each path).
    Paths freeze at the first grid value <= 0.
    """
    xi = np.asarray(xi, dtype=np.float64)
    npaths, nsteps = xi.shape
    muh = mu * dt
    sigh = sigma * math.sqrt(dt)
    half = p == 0.5

    x = np.full(npaths, x0, dtype=np.float64)
    absorb = np.full(npaths, -1, dtype=np.int64)
    amax = np.full(npaths, abs(x0), dtype=np.float64)
    for k in range(nsteps):
        xp = np.maximum(x, 0.0)
        g = np.sqrt(xp) if half else np.power(xp, p)
        xn = x + muh * xp + (sigh * g) * xi[:, k]
        x = np.where(x > 0.0, xn, x)
        np.maximum(amax, np.abs(x), out=amax)
        newly = (absorb < 0) & (x <= 0.0)
        if newly.any():
            absorb[newly] = k + 1
    return x, absorb, amax


def em_block_full(x0, mu, sigma, p, dt, xi):
    """As em_block but returns every grid value: (values (N, n+1), absorb_idx)."""
    xi = np.asarray(xi, dtype=np.float64)
    npaths, nsteps = xi.shape
    muh = mu * dt
    sigh = sigma * math.sqrt(dt)
    half = p == 0.5

    values = np.empty((npaths, nsteps + 1), dtype=np.float64)
    values[:, 0] = x0
    x = values[:, 0].copy()
    absorb = np.full(npaths, -1, dtype=np.int64)
    for k in range(nsteps):
        xp = np.maximum(x, 0.0)
        g = np.sqrt(xp) if half else np.power(xp, p)
        xn = x + muh * xp + (sigh * g) * xi[:, k]
        x = np.where(x > 0.0, xn, x)
        values[:, k + 1] = x
        newly = (absorb < 0) & (x <= 0.0)
        if newly.any():
            absorb[newly] = k + 1
    return values, absorb


def trunc_block(x0, mu, sigma, p, floor, dt, xi):
    """Lipschitz-truncated diffusion dX = mu X dt + sigma (floor v |X|)^p dW.

    Paths freeze at the first grid value <= floor (floor > 0, so the state
    stays positive while running).  Returns (terminal, stop_idx) with
    stop_idx = -1 for paths that never cross.
    """
    xi = np.asarray(xi, dtype=np.float64)
    npaths, nsteps = xi.shape
    muh = mu * dt
    sigh = sigma * math.sqrt(dt)
    half = p == 0.5

    x = np.full(npaths, x0, dtype=np.float64)
    stop = np.full(npaths, -1, dtype=np.int64)
    for k in range(nsteps):
        running = stop < 0
        c = np.maximum(floor, np.abs(x))
        g = np.sqrt(c) if half else np.power(c, p)
        xn = x + muh * x + (sigh * g) * xi[:, k]
        x = np.where(running, xn, x)
        newly = running & (x <= floor)
        if newly.any():
            stop[newly] = k + 1
    return x, stop
