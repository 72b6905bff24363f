"""Tensor-product quadrature: trapezoid on non-periodic sides, rectangle rule on periodic ones."""

from functools import lru_cache
from typing import Optional, Union

import numpy as np

from ..errors import GridError
from .grid import Grid2D, ScalarField


def weights_1d(n: int, h: float, periodic: bool) -> np.ndarray:
    weights = np.full(n, h)
    if not periodic and n > 1:
        weights[0] = weights[-1] = 0.5 * h
    return weights


@lru_cache(maxsize=64)
def quadrature_weights(grid: Grid2D) -> np.ndarray:
    """Read-only (n_s, n_t) weights; the (s, t) -> (x, z) map is a rotation, so no Jacobian."""
    weights = np.outer(
        weights_1d(grid.n_s, grid.h_s, periodic=False),
        weights_1d(grid.n_t, grid.h_t, grid.periodic_t),
    )
    weights.setflags(write=False)
    return weights


def integrate(f: Union[ScalarField, np.ndarray], grid: Optional[Grid2D] = None, mask: Optional[np.ndarray] = None) -> float:
    """Integral of a field over its grid, optionally restricted to a boolean mask.

    Plain arrays need the grid passed explicitly. The sum is numpy's pairwise reduction
    over a fixed row-major order, so the result does not depend on threading.
    """
    if isinstance(f, ScalarField):
        grid, values = f.grid, f.full()
    else:
        if grid is None:
            raise GridError("integrate() needs a grid for plain arrays")
        values = np.asarray(f, dtype=float)
        if values.shape != grid.shape:
            raise GridError(f"Array shape {values.shape} does not match grid {grid.shape}")
    weighted = quadrature_weights(grid) * values
    if mask is not None:
        weighted = np.where(mask, weighted, 0.0)
    return float(np.sum(weighted))


def row_integrals(values: np.ndarray, grid: Grid2D) -> np.ndarray:
    """Integrals along t for every s row (weights included), shape (n_s,)."""
    return np.sum(quadrature_weights(grid) * values, axis=1)
