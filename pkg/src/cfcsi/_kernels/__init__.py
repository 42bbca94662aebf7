"""Nearest-codeword search kernel: compiled core with a numpy fallback.

`assign_nearest` dominates the runtime of codebook training and of per-trial
quantization, so it is implemented twice: a Cython extension (built at install
time when a compiler is available) and a vectorized numpy version. Both
accumulate squared distances dimension-by-dimension in the same order and
break ties toward the lowest index, so they are bit-for-bit interchangeable.

Set CFCSI_KERNEL=numpy (or =cython) to force a backend.
"""

import os

_forced = os.environ.get("CFCSI_KERNEL", "").strip().lower()

if _forced == "numpy":
    from .numpy_backend import assign_nearest

    BACKEND = "numpy"
elif _forced in ("", "cython"):
    try:
        from ._nn import assign_nearest  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        if _forced == "cython":
            raise
        from .numpy_backend import assign_nearest  # type: ignore[no-redef]

        BACKEND = "numpy"
else:
    raise ValueError(f"CFCSI_KERNEL must be 'numpy' or 'cython', got {_forced!r}")

__all__ = ["assign_nearest", "BACKEND"]
