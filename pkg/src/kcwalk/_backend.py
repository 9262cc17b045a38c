"""Select the walk propagation kernel.

The compiled extension is used when it was built; setting
``KCWALK_PURE_PYTHON=1`` forces the numpy fallback.
"""
import os

from kcwalk import _walk_py
from kcwalk._walk_py import LatticeBoundaryError

BACKEND = "python"
propagate = _walk_py.propagate

if not os.environ.get("KCWALK_PURE_PYTHON"):
    try:
        from kcwalk import _walk_core
    except ImportError:
        pass
    else:
        propagate = _walk_core.propagate
        BACKEND = "cython"

__all__ = ["BACKEND", "LatticeBoundaryError", "propagate"]
