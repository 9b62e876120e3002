"""Gibbs sweep kernels: compiled when available, numpy otherwise.

Set ``DIGRAPHON_PURE_PYTHON=1`` to force the numpy kernels.
"""
import os

from . import _sweep_py

if os.environ.get("DIGRAPHON_PURE_PYTHON", "") not in ("", "0"):
    kernels = _sweep_py
    BACKEND = "python"
else:
    try:
        from . import _sweep_cy as kernels
        BACKEND = "cython"
    except ImportError:
        kernels = _sweep_py
        BACKEND = "python"

BACKENDS = {"python": _sweep_py}
try:
    from . import _sweep_cy
    BACKENDS["cython"] = _sweep_cy
except ImportError:
    pass
