"""Selects the reachability kernel: compiled extension when built, else pure Python.

Set ``SPECTRIM_PURE_PYTHON=1`` to force the fallback.
"""

import os

from spectrim import _reach_py

IMPLEMENTATION = "python"
reach = _reach_py.reach

if os.environ.get("SPECTRIM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from spectrim import _reach_ext
    except ImportError:
        pass
    else:
        reach = _reach_ext.reach
        IMPLEMENTATION = "cython"


def available_kernels():
    kernels = {"python": _reach_py.reach}
    try:
        from spectrim import _reach_ext
    except ImportError:
        pass
    else:
        kernels["cython"] = _reach_ext.reach
    return kernels
