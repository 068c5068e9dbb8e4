"""Kernel backend selection.

The compiled Cython kernels are used when the extension built; otherwise
the pure-numpy fallback.  CEVSIM_BACKEND=python|compiled overrides (useful
for the benchmark and for cross-checking the two implementations).
"""

import os

from . import _kernels_py

try:
    from . import _kernels_cy
except ImportError:
    _kernels_cy = None

_forced = os.environ.get("CEVSIM_BACKEND")
if _forced == "python":
    _impl = _kernels_py
elif _forced == "compiled":
    if _kernels_cy is None:
        raise ImportError("CEVSIM_BACKEND=compiled but the extension is not built")
    _impl = _kernels_cy
elif _forced:
    raise ValueError(f"unknown CEVSIM_BACKEND {_forced!r}")
else:
    _impl = _kernels_cy if _kernels_cy is not None else _kernels_py

BACKEND = _impl.BACKEND
em_block = _impl.em_block
em_block_full = _impl.em_block_full
trunc_block = _impl.trunc_block


def available_backends():
    out = {"python": _kernels_py}
    if _kernels_cy is not None:
        out["compiled"] = _kernels_cy
    return out
