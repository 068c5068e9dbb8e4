"""Parallel Monte-Carlo ensembles, empirical terminal CDFs, and the
atom-bracketing of the ruin probability.

The terminal distribution of the scheme has an atom at zero (mass =
probability of absorption before the horizon), where plain weak
convergence of the marginals gives no pointwise guarantee.  The bracket
[F_n(-eps) - eps, F_n(eps) + eps] localizes the atom: absorbed paths
terminate at small *negative* frozen values, so F_n(-eps) captures the
atom mass for eps below the overshoot scale while F_n(eps) adds only the
few survivors near zero.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import backend, rng
from .em import NonFiniteState
from .model import ModelParams, SimGrid

_CHUNK = 512


@dataclass(frozen=True)
class McConfig:
    """Ensemble size, master seed and (advisory) worker count.

    Results are a pure function of (params, grid, num_paths, master_seed);
    workers only affects scheduling.
    """

    num_paths: int
    master_seed: int
    workers: int = 1


@dataclass
class EmpiricalCdf:
    """Sorted terminal samples; a right-continuous step function."""

    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.sort(np.asarray(self.samples, dtype=np.float64))


@dataclass(frozen=True)
class RuinBracket:
    """(eps, F_n(-eps) - eps, F_n(eps) + eps); raw, unclamped values."""

    epsilon: float
    lower: float
    upper: float

    @property
    def lower_clamped(self) -> float:
        return min(1.0, max(0.0, self.lower))

    @property
    def upper_clamped(self) -> float:
        return min(1.0, max(0.0, self.upper))


def ensemble_arrays(params: ModelParams, grid: SimGrid, mc: McConfig,
                    stream: int = rng.SKELETON_STREAM):
    """Simulate mc.num_paths independent skeletons.

    Returns (terminal, absorb_idx, max_abs) arrays indexed by path, so the
    output is identical for any worker count or chunk schedule.
    """
    n = grid.steps
    dt = grid.dt
    terminals = np.empty(mc.num_paths)
    absorb = np.empty(mc.num_paths, dtype=np.int64)
    amax = np.empty(mc.num_paths)
    # cap per-chunk noise at ~5e6 doubles so memory stays bounded for fine grids
    chunk = max(4, min(_CHUNK, int(5e6) // n))

    def run_chunk(lo: int):
        hi = min(lo + chunk, mc.num_paths)
        xi = np.empty((hi - lo, n))
        for j in range(lo, hi):
            xi[j - lo] = rng.path_normals(mc.master_seed, j, n, stream)
        t, a, mx = backend.em_block(params.x0, params.mu, params.sigma, params.p, dt, xi)
        terminals[lo:hi] = t
        absorb[lo:hi] = a
        amax[lo:hi] = mx
        return lo

    starts = range(0, mc.num_paths, chunk)
    if mc.workers > 1:
        with ThreadPoolExecutor(max_workers=mc.workers) as pool:
            list(pool.map(run_chunk, starts))
    else:
        for lo in starts:
            run_chunk(lo)

    bad = np.flatnonzero(~np.isfinite(terminals))
    if bad.size:
        raise NonFiniteState(
            f"path {bad[0]} overflowed to a non-finite state (n={n} too coarse?)",
            path_index=int(bad[0]),
        )
    return terminals, absorb, amax


def run_ensemble(params: ModelParams, grid: SimGrid, mc: McConfig):
    """Terminal-value CDF and absorbed-path count of an ensemble.

    Absorbed paths contribute their frozen (usually slightly negative)
    terminal values; they are not rounded to zero.
    """
    terminals, absorb, _ = ensemble_arrays(params, grid, mc)
    return EmpiricalCdf(terminals), int(np.count_nonzero(absorb >= 0))


def cdf_eval(cdf: EmpiricalCdf, x: float) -> float:
    """Fraction of samples <= x (ties included)."""
    return float(np.searchsorted(cdf.samples, x, side="right")) / len(cdf.samples)


def levy_bracket(cdf: EmpiricalCdf, epsilon: float) -> RuinBracket:
    """The bracket [F_n(-eps) - eps, F_n(eps) + eps] around the atom at 0."""
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    return RuinBracket(
        epsilon=epsilon,
        lower=cdf_eval(cdf, -epsilon) - epsilon,
        upper=cdf_eval(cdf, epsilon) + epsilon,
    )


def default_eps_schedule(cdf: EmpiricalCdf, start: float = 1e-4,
                         factor: float = 10.0, max_len: int = 12) -> list:
    """Geometric schedule start, start/factor, ... stopping at the first
    eps whose interval (-eps, eps] contains no sample: at that point the
    bracket width has reached the atom-resolution floor."""
    schedule = []
    eps = start
    for _ in range(max_len):
        schedule.append(eps)
        inside = cdf_eval(cdf, eps) - cdf_eval(cdf, -eps)
        if inside == 0.0:
            break
        eps /= factor
    return schedule


def ruin_table(params: ModelParams, grid: SimGrid, mc: McConfig,
               eps_schedule: Optional[Sequence[float]] = None):
    """One shared ensemble, one bracket per eps (widths nonincreasing down
    to the atom-resolution floor).  Returns (brackets, cdf, absorbed_count)."""
    cdf, absorbed = run_ensemble(params, grid, mc)
    if eps_schedule is None:
        eps_schedule = default_eps_schedule(cdf)
    else:
        eps_schedule = list(eps_schedule)
        if any(b >= a for a, b in zip(eps_schedule, eps_schedule[1:])):
            raise ValueError("eps schedule must be strictly decreasing")
        if any(e <= 0 for e in eps_schedule):
            raise ValueError("eps values must be > 0")
    brackets = [levy_bracket(cdf, e) for e in eps_schedule]
    return brackets, cdf, absorbed


def standard_error(p_hat: float, n_samples: int) -> float:
    """Binomial standard error sqrt(p (1-p) / n)."""
    if not (0.0 <= p_hat <= 1.0):
        raise ValueError(f"p_hat must lie in [0, 1], got {p_hat}")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    return math.sqrt(p_hat * (1.0 - p_hat) / n_samples)


def format_ruin_csv(brackets: Sequence[RuinBracket], params: ModelParams,
                    grid: SimGrid, mc: McConfig, version: str) -> str:
    """CSV with one row per eps; the header comments embed everything
    needed to reproduce the rows."""
    lines = [
        f"# cevsim {version}",
        f"# mu={params.mu!r} sigma={params.sigma!r} p={params.p!r} x0={params.x0!r}",
        f"# T={grid.horizon!r} n={grid.steps} N={mc.num_paths} seed={mc.master_seed}",
        "epsilon,lower_raw,upper_raw,lower_clamped,upper_clamped,n_paths,n_steps,seed",
    ]
    for b in brackets:
        lines.append(
            f"{b.epsilon:.6g},{b.lower:.6g},{b.upper:.6g},"
            f"{b.lower_clamped:.6g},{b.upper_clamped:.6g},"
            f"{mc.num_paths},{grid.steps},{mc.master_seed}"
        )
    return "\n".join(lines) + "\n"
