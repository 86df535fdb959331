"""Finite-difference helpers shared by the symbol and weight checks."""

from __future__ import annotations

import numpy as np

# fourth-order-accurate central first derivative on five points
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0


def diff_along(values: np.ndarray, order: int, spacing: float, axis: int = -1) -> np.ndarray:
    """Repeated fourth-order central differencing along one axis.

    Each application trims two points from either end of the axis; callers
    must supply enough margin.  order = 0 returns the input unchanged.
    """
    out = np.asarray(values)
    for _ in range(order):
        out = np.moveaxis(out, axis, -1)
        acc = np.zeros(out.shape[:-1] + (out.shape[-1] - 4,), dtype=out.dtype)
        for k, c in enumerate(_D1):
            if c != 0.0:
                acc += c * out[..., k : out.shape[-1] - 4 + k]
        out = np.moveaxis(acc / spacing, -1, axis)
    return out


def trim_along(values: np.ndarray, order: int, axis: int = -1) -> np.ndarray:
    """Trim an untouched array to the valid region left by diff_along(order)."""
    if order == 0:
        return np.asarray(values)
    sl = [slice(None)] * np.ndim(values)
    sl[axis] = slice(2 * order, np.shape(values)[axis] - 2 * order)
    return np.asarray(values)[tuple(sl)]
