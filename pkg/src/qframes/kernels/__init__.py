"""Hot numerical kernels.

The compiled extension is used when it was built; set
``QFRAMES_PURE_PYTHON=1`` to force the NumPy fallback.
"""
import os

from . import fallback

if os.environ.get("QFRAMES_PURE_PYTHON", "") not in ("", "0"):
    rk4_poly = fallback.rk4_poly
    BACKEND = "python"
else:
    try:
        from ._rk4 import rk4_poly
        BACKEND = "cython"
    except ImportError:
        rk4_poly = fallback.rk4_poly
        BACKEND = "python"

__all__ = ["rk4_poly", "BACKEND", "fallback"]
