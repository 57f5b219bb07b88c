"""Reference (numpy) implementation of the lattice kernels.

Used when the compiled ``_kernels`` extension is unavailable or disabled
with ``SLICETHETA_PURE_PYTHON=1``.
"""
from __future__ import annotations

import math

import numpy as np


def ball_coefficients(R: np.ndarray, radius_sq: float, slack: float) -> np.ndarray:
    """Integer vectors m with ``||R m||^2 <= radius_sq`` (plus ``slack``).

    Fincke-Pohst recursion over the upper Cholesky factor ``R`` of the Gram
    matrix, last coordinate first.  Returns a superset of the exact ball.
    """
    d = R.shape[0]
    if radius_sq < 0:
        return np.empty((0, d), dtype=np.int64)
    found: list[np.ndarray] = []
    m = np.zeros(d, dtype=np.int64)

    def interval(level: int, center: float, budget: float) -> tuple[int, int]:
        half = math.sqrt(budget) / R[level, level]
        return math.ceil(center - half - 1e-9), math.floor(center + half + 1e-9)

    def descend(level: int, budget: float) -> None:
        s = float(np.dot(R[level, level + 1:], m[level + 1:]))
        center = -s / R[level, level]
        lo, hi = interval(level, center, budget)
        if level == 0:
            if hi < lo:
                return
            block = np.tile(m, (hi - lo + 1, 1))
            block[:, 0] = np.arange(lo, hi + 1)
            found.append(block)
            return
        for mi in range(lo, hi + 1):
            t = R[level, level] * (mi - center)
            rem = budget - t * t
            if rem < -slack:
                continue
            m[level] = mi
            descend(level - 1, max(rem, 0.0))
        m[level] = 0

    descend(d - 1, radius_sq + slack)
    if not found:
        return np.empty((0, d), dtype=np.int64)
    return np.concatenate(found)


def exp_sum(coords, a, shift, lin, weights=None) -> complex:
    """``sum_q w_q exp(a * sum_i (q_i + shift_i)^2 + sum_i lin_i q_i)``.

    Terms are built vectorised; real and imaginary parts are reduced with
    :func:`math.fsum`.
    """
    coords = np.asarray(coords, dtype=np.float64)
    if coords.shape[0] == 0:
        return 0j
    t = coords + np.asarray(shift, dtype=np.complex128)
    e = a * np.sum(t * t, axis=1) + coords @ np.asarray(lin, dtype=np.complex128)
    mag = np.exp(e.real)
    if weights is not None:
        mag = mag * np.asarray(weights, dtype=np.float64)
    return complex(math.fsum(mag * np.cos(e.imag)), math.fsum(mag * np.sin(e.imag)))
