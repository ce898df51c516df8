"""Select the compiled kernels when available, else the numpy fallback.

Set ``CHDL_PURE_PYTHON=1`` to force the fallback.
"""
import os

BACKEND = "python"

if os.environ.get("CHDL_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from ._kernels import best_mixture  # noqa: F401
        BACKEND = "cython"
    except ImportError:
        pass

if BACKEND == "python":
    from ._kernels_py import best_mixture  # noqa: F401

__all__ = ["BACKEND", "best_mixture"]
