"""Euler-Maruyama simulation of the CEV diffusion with absorption at zero,
Monte-Carlo ruin-probability brackets, and convergence diagnostics."""

__version__ = "0.1.0"

from .backend import BACKEND
from .model import (
    ModelParams,
    SimGrid,
    closed_form_ruin,
    holder_gap_bound,
    pos_pow,
    validate,
)
from .em import NoiseSkeleton, PathSkeleton, em_step, hitting_index, make_noise, simulate_skeleton
from .bridge import RefinedPath, bridge_fill, refine_path, sup_distance
from .montecarlo import (
    EmpiricalCdf,
    McConfig,
    RuinBracket,
    cdf_eval,
    levy_bracket,
    ruin_table,
    run_ensemble,
    standard_error,
)
from .oracle import TruncationLevel, prolong, simulate_truncated, truncated_diffusion

__all__ = [
    "BACKEND",
    "EmpiricalCdf",
    "McConfig",
    "ModelParams",
    "NoiseSkeleton",
    "PathSkeleton",
    "RefinedPath",
    "RuinBracket",
    "SimGrid",
    "TruncationLevel",
    "bridge_fill",
    "cdf_eval",
    "closed_form_ruin",
    "em_step",
    "hitting_index",
    "holder_gap_bound",
    "levy_bracket",
    "make_noise",
    "pos_pow",
    "prolong",
    "refine_path",
    "ruin_table",
    "run_ensemble",
    "simulate_skeleton",
    "simulate_truncated",
    "standard_error",
    "sup_distance",
    "truncated_diffusion",
    "validate",
]
