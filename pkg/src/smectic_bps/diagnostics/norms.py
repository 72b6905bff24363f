"""Lp norms, rate fits, an indicative H^-k norm and concentration statistics."""

import math
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from ..core.grid import Grid2D, ScalarField, VectorField2
from ..core.quadrature import integrate, row_integrals, weights_1d
from ..errors import ConfigError, GridError

Samples = Union[ScalarField, np.ndarray]


def _unpack(f: Samples, grid: Optional[Grid2D]) -> Tuple[np.ndarray, Grid2D]:
    if isinstance(f, ScalarField):
        return f.full(), f.grid
    if grid is None:
        raise GridError("Plain arrays need their grid")
    return np.asarray(f, dtype=float), grid


def lp_norm(f: Samples, p: float, grid: Optional[Grid2D] = None) -> float:
    """(int |f|^p)^(1/p); p = inf gives the max of |f|."""
    if not p >= 1:
        raise ConfigError(f"Lp norms need p >= 1, got {p}")
    values, grid = _unpack(f, grid)
    if math.isinf(p):
        return float(np.max(np.abs(values)))
    return integrate(np.abs(values) ** p, grid) ** (1.0 / p)


def gradient_distance(a: VectorField2, b: VectorField2, p: float) -> float:
    """Lp distance of two vector fields, pointwise Euclidean."""
    if a.grid != b.grid:
        raise GridError("Vector fields live on different grids")
    return lp_norm(np.hypot(a.first - b.first, a.second - b.second), p, a.grid)


def rate_fit(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float]:
    """Least-squares slope of ys against xs and the Pearson correlation."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape:
        raise ConfigError(f"Series lengths differ: {xs.size} vs {ys.size}")
    if xs.size < 3:
        raise ConfigError(f"A rate fit needs at least 3 points, got {xs.size}")
    fit = stats.linregress(xs, ys)
    return float(fit.slope), float(fit.rvalue)


def negative_sobolev_norm(f: ScalarField, order: int = 1) -> float:
    """Spectral H^-order seminorm along the periodic tau direction, averaged over s.

    The zero mode is dropped. Indicative only.
    """
    grid = f.grid
    if not grid.periodic_t:
        raise GridError("The spectral H^-k norm needs a periodic tau direction")
    if order < 1:
        raise ConfigError(f"order must be >= 1, got {order}")
    period = grid.length_t
    coefficients = np.fft.rfft(f.values, axis=1) / grid.n_t
    wavenumbers = 2.0 * np.pi * np.fft.rfftfreq(grid.n_t, d=grid.h_t)
    multiplicity = np.full(wavenumbers.size, 2.0)
    multiplicity[0] = 0.0
    if grid.n_t % 2 == 0:
        multiplicity[-1] = 1.0
    safe = np.where(wavenumbers > 0, wavenumbers, 1.0)
    per_row = period * np.sum(multiplicity * np.abs(coefficients) ** 2 / safe ** (2 * order), axis=1)
    w_s = weights_1d(grid.n_s, grid.h_s, periodic=False)
    return float(math.sqrt(np.sum(w_s * per_row) / np.sum(w_s)))


def _row_mass(density: Samples, grid: Optional[Grid2D]) -> Tuple[np.ndarray, np.ndarray]:
    values, grid = _unpack(density, grid)
    return grid.s(), row_integrals(np.abs(values), grid)


def mass_fraction_within(density: Samples, radius: float, grid: Optional[Grid2D] = None, center: float = 0.0) -> float:
    """Share of the L1 mass on rows with |s - center| <= radius."""
    s, mass = _row_mass(density, grid)
    total = float(np.sum(mass))
    if total == 0.0:
        return 1.0
    return float(np.sum(mass[np.abs(s - center) <= radius]) / total)


def concentration_radius(density: Samples, grid: Optional[Grid2D] = None, fraction: float = 0.95, center: float = 0.0) -> float:
    """Smallest |s - center| band holding the given share of the L1 mass."""
    if not 0.0 < fraction <= 1.0:
        raise ConfigError(f"fraction must lie in (0, 1], got {fraction}")
    s, mass = _row_mass(density, grid)
    total = float(np.sum(mass))
    if total == 0.0:
        return 0.0
    distance = np.abs(s - center)
    order = np.argsort(distance, kind="stable")
    cumulative = np.cumsum(mass[order]) / total
    index = int(np.searchsorted(cumulative, fraction * (1.0 - 1e-12)))
    return float(distance[order][min(index, order.size - 1)])
