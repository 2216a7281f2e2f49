"""Selects the compiled kernels when built, else the NumPy fallback.

Set ``PDL_OPTICS_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("PDL_OPTICS_PURE_PYTHON", "").strip() not in ("", "0"):
    from ._kernels_py import BACKEND, cmul, edge_mass, intensity, moments, phase_rotate
else:
    try:
        from ._kernels import BACKEND, cmul, edge_mass, intensity, moments, phase_rotate
    except ImportError:
        from ._kernels_py import BACKEND, cmul, edge_mass, intensity, moments, phase_rotate

__all__ = ["BACKEND", "cmul", "edge_mass", "intensity", "moments", "phase_rotate"]
