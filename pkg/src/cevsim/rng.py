"""Counter-based noise streams.

Every stream is a pure function of (master_seed, path_index, stream tag),
realized with the Philox counter-based generator.  Normal draws come from
the inverse-CDF transform of the Philox uniform stream, so a path's noise
never depends on scheduling, worker count, or how many paths ran before it.
"""

import numpy as np
from scipy.special import ndtri

# Stream tags keep the skeleton noise, the bridge-refinement noise and the
# truncated-oracle noise statistically independent for the same master seed.
SKELETON_STREAM = 0
BRIDGE_STREAM = 1
ORACLE_STREAM = 2
DIAG_STREAM = 3

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# smallest uniform fed to the inverse CDF; gen.random() can return exactly 0
_TINY = 2.0 ** -64


def stream_generator(master_seed: int, path_index: int, stream: int = SKELETON_STREAM) -> np.random.Generator:
    """Philox generator keyed by (master_seed, stream, path_index)."""
    key0 = (int(master_seed) + stream * _GOLDEN) & _MASK64
    return np.random.Generator(np.random.Philox(key=[key0, int(path_index) & _MASK64]))


def standard_normals(rng: np.random.Generator, size) -> np.ndarray:
    """Standard normals by inverse CDF of the uniform stream."""
    u = rng.random(size)
    np.maximum(u, _TINY, out=u)
    return ndtri(u)


def path_normals(master_seed: int, path_index: int, count: int, stream: int = SKELETON_STREAM) -> np.ndarray:
    """The `count` N(0,1) draws of a path's dedicated stream."""
    return standard_normals(stream_generator(master_seed, path_index, stream), count)
