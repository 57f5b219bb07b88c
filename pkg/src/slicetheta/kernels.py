"""Backend selection for the lattice kernels.

The compiled extension is preferred; set ``SLICETHETA_PURE_PYTHON=1`` to
force the numpy fallback.  Both backends expose ``ball_coefficients`` and
``exp_sum`` with identical signatures.
"""
from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

try:
    if os.environ.get("SLICETHETA_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python kernels requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

HAVE_COMPILED = _compiled is not None
BACKEND = "compiled" if HAVE_COMPILED else "python"

_active = _compiled if HAVE_COMPILED else _kernels_py


def backend_module(name: str | None = None):
    """Kernel module for ``name`` (``"compiled"`` or ``"python"``), default active."""
    if name is None:
        return _active
    if name == "python":
        return _kernels_py
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not available")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def ball_coefficients(R, radius_sq, slack, backend=None):
    R = np.ascontiguousarray(R, dtype=np.float64)
    return backend_module(backend).ball_coefficients(R, float(radius_sq), float(slack))


def exp_sum(coords, a, shift, lin, weights=None, backend=None):
    coords = np.ascontiguousarray(coords, dtype=np.float64)
    shift = np.ascontiguousarray(shift, dtype=np.complex128)
    lin = np.ascontiguousarray(lin, dtype=np.complex128)
    if weights is not None:
        weights = np.ascontiguousarray(weights, dtype=np.float64)
    return backend_module(backend).exp_sum(coords, complex(a), shift, lin, weights)
