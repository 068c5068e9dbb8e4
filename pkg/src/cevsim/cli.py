"""Reproducible experiment driver.

Configuration comes from an optional flat key-value file (lines of
`key = value`, `#` comments) plus command-line flags; flags win.  Keys
mirror the model symbols: mu, sigma, p, x0, T, n, N, seed, workers, eps,
out.  The default seed can be set with the CEVSIM_SEED environment
variable.  Exit codes: 0 ok, 1 check failure, 2 usage error.
"""

import os
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__, backend, diagnostics, rng
from .cases import CASES
from .model import ModelParams, ParameterError, SimGrid, closed_form_ruin
from .montecarlo import (
    McConfig,
    cdf_eval,
    format_ruin_csv,
    ruin_table,
    run_ensemble,
    standard_error,
)
from .oracle import TruncationLevel, oracle_terminals


def _default_seed() -> int:
    return int(os.environ.get("CEVSIM_SEED", "20240501"))


def read_config(path) -> dict:
    """Parse the flat key-value config grammar."""
    cfg = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise click.UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        cfg[key] = val
    return cfg


def _merged(config, **flags):
    cfg = read_config(config) if config else {}
    for k, v in flags.items():
        if v is not None:
            cfg[k] = v
    return cfg


def _build_run(cfg):
    try:
        params = ModelParams(
            mu=float(cfg.get("mu", 1.0)),
            sigma=float(cfg.get("sigma", 1.0)),
            p=float(cfg.get("p", 0.5)),
            x0=float(cfg.get("x0", 1.0)),
        )
    except ParameterError as exc:
        raise click.UsageError(str(exc))
    horizon = float(cfg.get("T", 9.0))
    # default grid: 10^4 steps per unit horizon
    steps = int(cfg["n"]) if "n" in cfg else max(1, round(1e4 * horizon))
    grid = SimGrid(horizon=horizon, steps=steps)
    mc = McConfig(
        num_paths=int(cfg.get("N", 1000)),
        master_seed=int(cfg.get("seed", _default_seed())),
        workers=int(cfg.get("workers", 1)),
    )
    eps = None
    if "eps" in cfg and cfg["eps"]:
        eps = [float(s) for s in str(cfg["eps"]).split(",")]
    return params, grid, mc, eps


def _emit(text, out):
    if out:
        Path(out).write_text(text)
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


_shared = [
    click.option("--config", type=click.Path(exists=True), default=None,
                 help="flat key-value config file; flags override it"),
    click.option("--mu", type=float, default=None, help="drift rate"),
    click.option("--sigma", type=float, default=None, help="diffusion scale (> 0)"),
    click.option("--p", type=float, default=None,
                 help="elasticity exponent in [1/2, 1); the closed-form ruin "
                      "comparison requires p equal to 0.5 exactly"),
    click.option("--x0", type=float, default=None, help="initial value (> 0)"),
    click.option("-T", "--horizon", "T", type=float, default=None, help="time horizon"),
    click.option("-n", "--steps", "n", type=int, default=None,
                 help="grid steps (default: 10^4 per unit horizon)"),
    click.option("-N", "--paths", "N", type=int, default=None, help="Monte-Carlo paths"),
    click.option("--seed", type=int, default=None, help="master seed (env CEVSIM_SEED)"),
    click.option("--workers", type=int, default=None, help="worker threads (never affects output)"),
    click.option("--out", type=click.Path(), default=None, help="output file (default stdout)"),
]


def shared_options(fn):
    for opt in reversed(_shared):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(__version__)
def main():
    """CEV diffusion simulation: ruin-probability brackets and convergence checks."""


@main.command()
@shared_options
@click.option("--eps", default=None,
              help="comma-separated strictly decreasing bracket half-widths")
def ruin(config, eps, out, **flags):
    """Estimate the terminal atom at zero and write the bracket table CSV."""
    params, grid, mc, eps_schedule = _build_run(_merged(config, eps=eps, out=out, **flags))
    brackets, _, _ = ruin_table(params, grid, mc, eps_schedule)
    _emit(format_ruin_csv(brackets, params, grid, mc, __version__), out)


@main.command()
@click.option("--out-dir", type=click.Path(), default="tables", help="output directory")
@click.option("-N", "--paths", "N", type=int, default=1000)
@click.option("-n", "--steps", "n", type=int, default=10000)
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=1)
def tables(out_dir, N, n, seed, workers):
    """Run all eight canned reference cases and a summary comparison."""
    seed = _default_seed() if seed is None else seed
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = ["case,atom_estimate,reference_lo,reference_hi,se,delta_in_se,note"]
    for case in CASES:
        grid = SimGrid(horizon=case.horizon, steps=n)
        mc = McConfig(num_paths=N, master_seed=seed, workers=workers)
        brackets, cdf, absorbed = ruin_table(params=case.params, grid=grid, mc=mc,
                                             eps_schedule=case.eps_schedule)
        (out / f"{case.name}.csv").write_text(
            format_ruin_csv(brackets, case.params, grid, mc, __version__)
        )
        atom = absorbed / N
        se = standard_error(atom, N) or 1e-12
        delta = (atom - case.reference_mid) / se
        note = case.note or ""
        if note:
            click.echo(f"warning: {case.name}: {note}", err=True)
        summary.append(
            f"{case.name},{atom:.6g},{case.reference[0]:.6g},{case.reference[1]:.6g},"
            f"{se:.6g},{delta:.6g},{note}"
        )
    (out / "summary.csv").write_text("\n".join(summary) + "\n")
    click.echo(f"wrote {out}/case1..case8.csv and {out}/summary.csv")


@main.command()
@shared_options
@click.option("--n-list", default="100,1000,10000", help="grid sizes for the sweep")
@click.option("--refinement", "-m", type=int, default=16, help="sub-points per step")
def convergence(config, n_list, refinement, out, **flags):
    """Grid-refinement diagnostics: second-moment sweep and the decay of
    the skeleton-vs-interpolant sup distance."""
    params, grid, mc, _ = _build_run(_merged(config, out=out, **flags))
    ns = [int(s) for s in n_list.split(",")]
    lines = [f"# cevsim {__version__} convergence seed={mc.master_seed} N={mc.num_paths}"]
    for rep in diagnostics.second_moment_sweep(
        params, grid.horizon, ns, mc.num_paths, mc.master_seed, mc.workers
    ):
        lines.append(rep.line())
    rho = diagnostics.rho_convergence(
        params, grid.horizon, ns, min(mc.num_paths, 1000), refinement, mc.master_seed
    )
    decreasing = all(b[1] < a[1] for a, b in zip(rho, rho[1:]))
    for n_, mean2, se in rho:
        lines.append(f"rho_convergence: n={n_} mean_rho2={mean2:.6g} se={se:.6g}")
    lines.append(f"rho_convergence decreasing: {decreasing}")
    _emit("\n".join(lines) + "\n", out)
    if not decreasing:
        sys.exit(1)


@main.command("oracle-check")
@shared_options
@click.option("--level", type=int, default=1000, help="final truncation index (floor 1/level)")
@click.option("--fine-factor", type=int, default=10,
              help="oracle grid refinement relative to the comparison grid")
def oracle_check(config, level, fine_factor, out, **flags):
    """Two-sample KS test between the scheme's terminal distribution and
    the Lipschitz-truncation construction."""
    params, grid, mc, _ = _build_run(_merged(config, out=out, **flags))
    cdf, _ = run_ensemble(params, grid, mc)
    em_terms = np.maximum(cdf.samples, 0.0)
    fine = SimGrid(horizon=grid.horizon, steps=grid.steps * fine_factor)
    orc_terms = oracle_terminals(
        params, TruncationLevel(level), fine, mc.num_paths, mc.master_seed, mc.workers
    )
    stat = diagnostics.ks_two_sample(em_terms, orc_terms)
    crit = diagnostics.ks_critical(len(em_terms), len(orc_terms), alpha=0.01)
    ok = stat < crit
    _emit(
        f"ks_statistic={stat:.6g} critical_1pct={crit:.6g} "
        f"N={mc.num_paths} n={grid.steps} fine_n={fine.steps} pass={ok}\n",
        out,
    )
    if not ok:
        sys.exit(1)


@main.command("lemma-check")
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
def lemma_check(seed, out):
    """Inequality suites: power-gap bound sweep, Brownian max-increment
    moments, and the martingale maximal inequality."""
    seed = _default_seed() if seed is None else seed
    lines = []
    failed = False

    viol, num = diagnostics.holder_gap_sweep(100_000, seed)
    lines.append(f"holder_gap_sweep: violations={viol}/{num} pass={viol == 0}")
    failed |= viol != 0

    for n in (10, 100, 1000):
        rep = diagnostics.max_increment_moment(n, k=4, reps=2000, seed=seed)
        lines.append(rep.line())
        failed |= not rep.passed

    rep = diagnostics.doob_check(lambda j, s: np.ones(len(s)), n=100, reps=10_000, seed=seed)
    lines.append(rep.line())
    failed |= not rep.passed

    _emit("\n".join(lines) + "\n", out)
    if failed:
        sys.exit(1)


@main.command("diagnostics")
@shared_options
@click.option("--audit-paths", "n_audit", type=int, default=200,
              help="paths for the exact per-path audit")
def diagnostics_cmd(config, n_audit, out, **flags):
    """Full diagnostic report; exit 1 if any exact per-path check fails."""
    params, grid, mc, _ = _build_run(_merged(config, out=out, **flags))
    lines = [f"# cevsim {__version__} backend={backend.BACKEND} seed={mc.master_seed}"]
    exact_failed = False

    audit_grid = SimGrid(horizon=grid.horizon, steps=min(grid.steps, 1000))
    failures, checked, msgs = diagnostics.audit_paths(
        params, audit_grid, n_audit, m=8, master_seed=mc.master_seed
    )
    lines.append(f"path_audit: failures={failures}/{checked} pass={failures == 0}")
    lines.extend(msgs[:20])
    exact_failed |= failures > 0

    viol, num = diagnostics.holder_gap_sweep(100_000, mc.master_seed)
    lines.append(f"holder_gap_sweep: violations={viol}/{num} pass={viol == 0}")
    exact_failed |= viol != 0

    for n in (10, 100, 1000):
        rep = diagnostics.max_increment_moment(n, k=4, reps=2000, seed=mc.master_seed)
        lines.append(rep.line())
    for rep in diagnostics.second_moment_sweep(
        params, grid.horizon, [100, 1000, 10000], mc.num_paths, mc.master_seed, mc.workers
    ):
        lines.append(rep.line())
    for n_, mean2, se in diagnostics.rho_convergence(
        params, grid.horizon, [100, 1000], min(mc.num_paths, 500), 16, mc.master_seed
    ):
        lines.append(f"rho_convergence: n={n_} mean_rho2={mean2:.6g} se={se:.6g}")

    if params.p == 0.5 and params.mu > 0:
        cdf, absorbed = run_ensemble(params, grid, mc)
        est = absorbed / mc.num_paths
        cf = closed_form_ruin(params)
        se = standard_error(est, mc.num_paths)
        lines.append(
            f"closed_form_bound: estimate={est:.6g} infinite_horizon={cf:.6g} "
            f"se={se:.6g} pass={est <= cf + 3 * se}"
        )

    _emit("\n".join(lines) + "\n", out)
    if exact_failed:
        sys.exit(1)


if __name__ == "__main__":
    main()
