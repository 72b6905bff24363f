"""Sampling grids and fields on a lattice aligned with an orthonormal frame (nu, tau)."""

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from ..errors import GridError

FRAME_TOLERANCE = 1e-14


def unit_frame(nu: Tuple[float, float]) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """Normalize nu and return (nu, tau) with tau = nu rotated by +90 degrees."""
    norm = math.hypot(nu[0], nu[1])
    if norm == 0.0 or not math.isfinite(norm):
        raise GridError(f"Frame normal must be a finite nonzero vector, got {nu}")
    n1, n2 = nu[0] / norm, nu[1] / norm
    return (n1, n2), (-n2, n1)


@dataclass(frozen=True)
class Grid2D:
    """Uniform samples s_i = s0 + i*h_s (along nu) and t_j = t0 + j*h_t (along tau).

    Physical coordinates are (x, z) = s*nu + t*tau. The s direction is never periodic;
    with periodic_t the last sample is one spacing short of the period n_t*h_t.
    """

    n_s: int
    n_t: int
    h_s: float
    h_t: float
    nu: Tuple[float, float] = (1.0, 0.0)
    tau: Tuple[float, float] = (0.0, 1.0)
    periodic_t: bool = False
    s0: float = 0.0
    t0: float = 0.0

    def __post_init__(self):
        if self.n_s < 1 or self.n_t < 1:
            raise GridError(f"Grid needs at least one sample per direction, got {self.n_s}x{self.n_t}")
        if not (self.h_s > 0 and self.h_t > 0):
            raise GridError(f"Grid spacings must be strictly positive, got h_s={self.h_s}, h_t={self.h_t}")
        nu1, nu2 = self.nu
        tau1, tau2 = self.tau
        if abs(math.hypot(nu1, nu2) - 1.0) > FRAME_TOLERANCE or abs(math.hypot(tau1, tau2) - 1.0) > FRAME_TOLERANCE:
            raise GridError(f"Frame vectors must be unit length: nu={self.nu}, tau={self.tau}")
        if abs(nu1 * tau1 + nu2 * tau2) > FRAME_TOLERANCE:
            raise GridError(f"Frame vectors must be orthogonal: nu={self.nu}, tau={self.tau}")

    @classmethod
    def rectangle(
        cls,
        n_s: int,
        n_t: int,
        lengths: Tuple[float, float] = (1.0, 1.0),
        origin: Tuple[float, float] = (-0.5, -0.5),
        nu: Tuple[float, float] = (1.0, 0.0),
        periodic_t: bool = False,
    ) -> "Grid2D":
        """Grid covering [origin_s, origin_s + L_s] x [origin_t, origin_t + L_t] in (s, t)."""
        if n_s < 2 or (n_t < 2 and not periodic_t):
            raise GridError("A rectangle needs at least two samples along each non-periodic side")
        nu_unit, tau_unit = unit_frame(nu)
        h_s = lengths[0] / (n_s - 1)
        h_t = lengths[1] / n_t if periodic_t else lengths[1] / (n_t - 1)
        return cls(n_s, n_t, h_s, h_t, nu_unit, tau_unit, periodic_t, origin[0], origin[1])

    @classmethod
    def cell(cls, n_s: int, n_t: int, nu: Tuple[float, float] = (1.0, 0.0)) -> "Grid2D":
        """The unit square |s| <= 1/2, |t| <= 1/2, periodic with period 1 along tau."""
        return cls.rectangle(n_s, n_t, (1.0, 1.0), (-0.5, -0.5), nu, periodic_t=True)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n_s, self.n_t)

    @property
    def length_s(self) -> float:
        return (self.n_s - 1) * self.h_s

    @property
    def length_t(self) -> float:
        return self.n_t * self.h_t if self.periodic_t else (self.n_t - 1) * self.h_t

    @property
    def axis_aligned(self) -> bool:
        return self.nu == (1.0, 0.0) and self.tau == (0.0, 1.0)

    def s(self) -> np.ndarray:
        return self.s0 + self.h_s * np.arange(self.n_s)

    def t(self) -> np.ndarray:
        return self.t0 + self.h_t * np.arange(self.n_t)

    def st_mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.s(), self.t(), indexing="ij")

    def xz_mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        """Physical coordinates of every sample."""
        s, t = self.st_mesh()
        x = s * self.nu[0] + t * self.tau[0]
        z = s * self.nu[1] + t * self.tau[1]
        return x, z

    def refined(self) -> "Grid2D":
        """Same domain with spacings halved."""
        n_t = 2 * self.n_t if self.periodic_t else 2 * self.n_t - 1
        return Grid2D(2 * self.n_s - 1, n_t, self.h_s / 2, self.h_t / 2, self.nu, self.tau, self.periodic_t, self.s0, self.t0)


def _as_checked_array(grid: Grid2D, values, label: str) -> np.ndarray:
    array = np.asarray(values, dtype=float)
    if array.shape != grid.shape:
        raise GridError(f"{label} has shape {array.shape}, grid expects {grid.shape}")
    if not np.all(np.isfinite(array)):
        raise GridError(f"{label} contains non-finite values")
    return array


@dataclass
class ScalarField:
    """Samples of a scalar on a grid.

    On periodic grids a displacement u whose gradient is periodic may still grow
    linearly along tau; that part is kept in tau_slope so that u = values + tau_slope * t
    with periodic values.
    """

    grid: Grid2D
    values: np.ndarray
    tau_slope: float = 0.0

    def __post_init__(self):
        self.values = _as_checked_array(self.grid, self.values, "ScalarField values")
        if not math.isfinite(self.tau_slope):
            raise GridError("tau_slope must be finite")

    @classmethod
    def from_function(cls, grid: Grid2D, func, tau_slope: float = 0.0) -> "ScalarField":
        """Sample func(x, z) on the grid."""
        x, z = grid.xz_mesh()
        return cls(grid, func(x, z), tau_slope)

    def full(self) -> np.ndarray:
        """Samples of the represented function including the linear tau part."""
        if self.tau_slope == 0.0:
            return self.values
        _, t = self.grid.st_mesh()
        return self.values + self.tau_slope * t


@dataclass
class VectorField2:
    """Two component arrays sampled on a grid (a gradient, a rotated gradient or Sigma)."""

    grid: Grid2D
    first: np.ndarray
    second: np.ndarray
    label: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        self.first = _as_checked_array(self.grid, self.first, "VectorField2 first component")
        self.second = _as_checked_array(self.grid, self.second, "VectorField2 second component")
