"""Kernel backend selection.

The compiled extension is preferred when present; ``A4L_PURE_PYTHON=1``
forces the pure-Python twin (useful for debugging and benchmarking).
"""

import os

if os.environ.get("A4L_PURE_PYTHON"):
    from . import _pure as kernels

    BACKEND = "pure-python"
else:
    try:
        from . import _ckernels as kernels  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        from . import _pure as kernels  # type: ignore[no-redef]

        BACKEND = "pure-python"


def kernel_backend() -> str:
    """Name of the kernel backend selected at import time."""
    return BACKEND
