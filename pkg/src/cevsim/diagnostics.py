"""Empirical verification suites for the scheme's supporting estimates.

Each check reports estimate, bound, slack and sample size, never a bare
boolean.  Statistical checks use a 3-standard-error slack estimated from
the same (seeded, reproducible) run; per-path inequality checks are
exact.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import backend, rng
from .bridge import RefinedPath, refine_path, sup_distance
from .em import PathSkeleton, NoiseSkeleton
from .model import CevError, ModelParams, SimGrid, pos_pow
from .montecarlo import McConfig, ensemble_arrays


class EmptySample(CevError, ValueError):
    pass


@dataclass
class MomentReport:
    """Outcome of one moment check: estimate vs bound with its slack."""

    check: str
    n: int
    k: int
    estimate: float
    bound: float
    slack: float
    passed: bool
    reps: int = 0

    def line(self) -> str:
        return (
            f"{self.check}: n={self.n} k={self.k} estimate={self.estimate:.6g} "
            f"bound={self.bound:.6g} slack={self.slack:.6g} reps={self.reps} "
            f"pass={self.passed}"
        )


def abs_moment_normal(k: int) -> float:
    """E|Z|^k for Z standard normal."""
    return 2.0 ** (k / 2.0) * math.gamma((k + 1) / 2.0) / math.sqrt(math.pi)


def max_increment_moment(n: int, k: int, reps: int, seed: int,
                         sub: int = 64) -> MomentReport:
    """k-th moment of the largest within-interval Brownian oscillation.

    M = max over the n intervals of [0,1] of sup |W_t - W_(interval start)|,
    the sup approximated on `sub` points per interval (an under-estimate,
    which is the safe direction against the upper bound).  The bound is
    C_k n^(1-k/2) with C_k = 2^(k+2) E|Z|^k.
    """
    gen = np.random.Generator(np.random.Philox(key=[seed, n * 1000 + k]))
    sd = math.sqrt(1.0 / (n * sub))
    samples = np.empty(reps)
    batch = max(1, int(2e7 // (n * sub)))
    done = 0
    while done < reps:
        b = min(batch, reps - done)
        z = gen.standard_normal((b, n, sub))
        z *= sd
        np.cumsum(z, axis=2, out=z)  # within-interval partial sums
        np.abs(z, out=z)
        samples[done:done + b] = z.max(axis=(1, 2))
        done += b
    mk = samples ** k
    estimate = float(mk.mean())
    se = float(mk.std(ddof=1) / math.sqrt(reps))
    bound = 2.0 ** (k + 2) * abs_moment_normal(k) * n ** (1.0 - k / 2.0)
    slack = 3.0 * se
    return MomentReport(
        check="max_increment_moment", n=n, k=k, estimate=estimate,
        bound=bound, slack=slack, passed=estimate <= bound + slack, reps=reps,
    )


def doob_check(alpha_fn: Callable[[int, np.ndarray], np.ndarray], n: int,
               reps: int, seed: int) -> MomentReport:
    """Maximal inequality for martingale transforms sum alpha_(j-1) xi_j.

    alpha_fn(j, partial_sums) must return the coefficients for step j+1
    using only information up to step j (predictability).  Compares the
    estimated E max_k |S_k|^2 against 4 sum E alpha^2, with multiplicative
    slack (1 + 3/sqrt(reps)).
    """
    gen = np.random.Generator(np.random.Philox(key=[seed, n]))
    z = gen.standard_normal((reps, n))
    s = np.zeros(reps)
    smax = np.zeros(reps)
    alpha_sq_sum = 0.0
    for j in range(n):
        a = np.broadcast_to(np.asarray(alpha_fn(j, s), dtype=np.float64), (reps,))
        alpha_sq_sum += float(np.mean(a ** 2))
        s = s + a * z[:, j]
        np.maximum(smax, np.abs(s), out=smax)
    estimate = float(np.mean(smax ** 2))
    bound = 4.0 * alpha_sq_sum
    slack = bound * 3.0 / math.sqrt(reps)
    return MomentReport(
        check="doob_check", n=n, k=2, estimate=estimate, bound=bound,
        slack=slack, passed=estimate <= bound + slack, reps=reps,
    )


def second_moment_sweep(params: ModelParams, horizon: float,
                        n_list: Sequence[int], num_paths: int,
                        master_seed: int, workers: int = 1,
                        band: float = 1.5):
    """E max_k |X_k|^2 across grid sizes; the estimates must stay within a
    multiplicative band of each other (no growth trend in n)."""
    estimates = []
    for n in n_list:
        grid = SimGrid(horizon=horizon, steps=n)
        _, _, amax = ensemble_arrays(params, grid, McConfig(num_paths, master_seed, workers))
        estimates.append(float(np.mean(amax ** 2)))
    floor_est = min(estimates)
    reports = []
    for n, est in zip(n_list, estimates):
        bound = band * floor_est
        reports.append(MomentReport(
            check="second_moment_sweep", n=n, k=2, estimate=est, bound=bound,
            slack=0.0, passed=est <= bound, reps=num_paths,
        ))
    return reports


def simulate_full_block(params: ModelParams, grid: SimGrid, num_paths: int,
                        master_seed: int):
    """All grid values for a block of paths, with their noise rows."""
    xi = np.empty((num_paths, grid.steps))
    for j in range(num_paths):
        xi[j] = rng.path_normals(master_seed, j, grid.steps, rng.SKELETON_STREAM)
    values, absorb = backend.em_block_full(
        params.x0, params.mu, params.sigma, params.p, grid.dt, xi
    )
    return values, absorb, xi


def coupled_skeletons(params: ModelParams, grid: SimGrid, num_paths: int,
                      master_seed: int, m: int):
    """(skeleton, refinement) pairs for a block of paths, coupled through
    shared increments; bridge interiors use each path's dedicated stream."""
    values, absorb, xi = simulate_full_block(params, grid, num_paths, master_seed)
    pairs = []
    for j in range(num_paths):
        aidx = int(absorb[j]) if absorb[j] >= 0 else None
        skel = PathSkeleton(
            values=values[j], absorption_index=aidx, grid=grid,
            noise=NoiseSkeleton(xi=xi[j], seed_tag=f"philox:{master_seed}:{j}"),
        )
        gen = rng.stream_generator(master_seed, j, rng.BRIDGE_STREAM)
        pairs.append((skel, refine_path(skel, params, m, gen)))
    return pairs


def rho_convergence(params: ModelParams, horizon: float, n_list: Sequence[int],
                    num_paths: int, m: int, master_seed: int):
    """Mean squared sup-distance between skeleton and interpolant per grid
    size; should decrease as the grid refines.  Returns [(n, mean_rho2, se)]."""
    out = []
    for n in n_list:
        grid = SimGrid(horizon=horizon, steps=n)
        rho2 = np.empty(num_paths)
        for j, (skel, ref) in enumerate(
            coupled_skeletons(params, grid, num_paths, master_seed, m)
        ):
            rho2[j] = sup_distance(skel, ref) ** 2
        out.append((n, float(rho2.mean()), float(rho2.std(ddof=1) / math.sqrt(num_paths))))
    return out


def qv_drift_gaps(params: ModelParams, grid: SimGrid, refined: RefinedPath):
    """Left-endpoint Riemann sums of the drift gap and the
    quadratic-variation gap between interpolant and step function.

    drift_gap = |mu| sum_k int |Xtilde_s - X_(k-1)| ds
    qv_gap    = sigma^2 sum_k int |(Xtilde_s^+)^2p - (X_(k-1)^+)^2p| ds

    Evaluated on the same sub-points the sup-distance estimate uses, so
    drift_gap <= T |mu| rho holds per path by construction, as do the
    p-cased qv bounds.
    """
    parent = refined.parent
    n = grid.steps
    m = refined.refinement
    ds = grid.dt / m
    sub = refined.values[: n * m].reshape(n, m)
    base = parent.values[:-1, None]
    drift_gap = abs(params.mu) * ds * float(np.abs(sub - base).sum())
    q = 2.0 * params.p
    qv_gap = params.sigma ** 2 * ds * float(
        np.abs(np.maximum(sub, 0.0) ** q - np.maximum(base, 0.0) ** q).sum()
    )
    return drift_gap, qv_gap


def qv_gap_bound(params: ModelParams, grid: SimGrid, skel: PathSkeleton,
                 refined: RefinedPath, rho: float) -> float:
    """The per-path upper bound matching qv_drift_gaps' qv term."""
    T = grid.horizon
    if params.p == 0.5:
        return params.sigma ** 2 * T * rho
    sup_ref = float(np.max(np.abs(refined.values)))
    sup_skel = float(np.max(np.abs(skel.values)))
    return T * params.sigma ** 2 * (2.0 + sup_ref + sup_skel) * rho ** params.p


def ks_two_sample(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic: sup |F_a - F_b| over the
    pooled sample points."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise EmptySample("both samples must be nonempty")
    pooled = np.concatenate([a, b])
    fa = np.searchsorted(a, pooled, side="right") / a.size
    fb = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_critical(n_a: int, n_b: int, alpha: float = 0.01) -> float:
    """Asymptotic two-sample KS critical value at level alpha."""
    c = math.sqrt(-0.5 * math.log(alpha / 2.0))
    return c * math.sqrt((n_a + n_b) / (n_a * n_b))


def holder_gap_sweep(num: int, seed: int, scale: float = 1e3):
    """Random sweep of the positive-part power-gap inequality.

    Draws (x, y, p) with x, y spanning signs and magnitudes up to `scale`
    and p in {1/2} union (1/2, 1).  Returns (violations, num): the count of
    triples where |(x^+)^2p - (y^+)^2p| exceeds the bound (beyond a 1e-9
    relative rounding allowance).
    """
    gen = np.random.Generator(np.random.Philox(key=[seed, 23]))
    x = gen.uniform(-scale, scale, num)
    y = gen.uniform(-scale, scale, num)
    p = np.where(gen.random(num) < 0.25, 0.5, gen.uniform(0.5, 1.0, num))
    lhs = np.abs(np.maximum(x, 0.0) ** (2 * p) - np.maximum(y, 0.0) ** (2 * p))
    rhs = np.where(
        p == 0.5, np.abs(x - y), (2.0 + np.abs(x) + np.abs(y)) * np.abs(x - y) ** p
    )
    violations = int(np.count_nonzero(lhs > rhs * (1.0 + 1e-9)))
    return violations, num


def audit_paths(params: ModelParams, grid: SimGrid, num_paths: int, m: int,
                master_seed: int):
    """Exact per-path audit: freeze after absorption, coupling at coarse
    grid points, and the drift/qv gap bounds.  Returns (failures, checked,
    messages)."""
    failures = 0
    msgs = []
    pairs = coupled_skeletons(params, grid, num_paths, master_seed, m)
    T = grid.horizon
    for j, (skel, ref) in enumerate(pairs):
        ok = True
        if skel.absorption_index is not None:
            a = skel.absorption_index
            if not np.all(skel.values[a:] == skel.values[a]):
                ok = False
                msgs.append(f"path {j}: values not frozen after absorption")
            if skel.values[a] > 0.0 or np.any(skel.values[:a] <= 0.0):
                ok = False
                msgs.append(f"path {j}: absorption index inconsistent")
        if not np.array_equal(ref.values[:: m], skel.values):
            ok = False
            msgs.append(f"path {j}: refinement decoupled at coarse grid points")
        rho = sup_distance(skel, ref)
        drift_gap, qv_gap = qv_drift_gaps(params, grid, ref)
        tol = 1.0 + 1e-9
        if drift_gap > T * abs(params.mu) * rho * tol + 1e-300:
            ok = False
            msgs.append(f"path {j}: drift gap {drift_gap} exceeds bound")
        if qv_gap > qv_gap_bound(params, grid, skel, ref, rho) * tol + 1e-300:
            ok = False
            msgs.append(f"path {j}: qv gap {qv_gap} exceeds bound")
        if not ok:
            failures += 1
    return failures, num_paths, msgs
