"""Kernel backend selection.

The compiled extension is used when importable; setting the environment
variable ``ETSTABLE_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

if os.environ.get("ETSTABLE_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as kernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as kernels
        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
