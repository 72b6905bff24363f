"""Discrete energy of the cell problem and its exact gradient.

With mx = Dx v + tau1 sigma, mz = Dz v + tau2 sigma, k = Dxx v, C = mz - mx^2/2 and
quadrature weights w,

    E_h(v) = sum w (C^2/(2 eps) + eps k^2/2)
    dE_h/dv = Dz^T (w C/eps) - Dx^T (w C mx/eps) + Dxx^T (eps w k)

which is the same discretization energy_eps integrates, differentiated exactly.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..core.grid import ScalarField
from ..core.quadrature import quadrature_weights
from ..core.stencils import operators
from ..energy.functional import check_epsilon
from ..errors import BoundaryConstraintError, GridError
from .cell_problem import CellProblem

logger = logging.getLogger(__name__)

PIN_TOL = 1e-12


class EnergyModel:
    """Flattened energy/gradient evaluation for one cell problem and one eps."""

    def __init__(self, cp: CellProblem, eps: Optional[float] = None):
        self.cp = cp
        self.eps = check_epsilon(cp.eps if eps is None else eps)
        grid = cp.grid
        ops = operators(grid)
        self.dx = ops.dx
        self.dz = ops.dz
        self.dxx = ops.dxx
        self.dx_t = ops.dx.T.tocsr()
        self.dz_t = ops.dz.T.tocsr()
        self.dxx_t = ops.dxx.T.tocsr()
        self.weights = quadrature_weights(grid).reshape(-1)
        self.free = ~cp.pinned.reshape(-1)
        self.shift_x = grid.tau[0] * cp.tau_slope
        self.shift_z = grid.tau[1] * cp.tau_slope

    def densities(self, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Slope dx u, strain C and curvature dxx u at every node."""
        mx = self.dx @ v + self.shift_x
        mz = self.dz @ v + self.shift_z
        k = self.dxx @ v
        return mx, mz - 0.5 * mx * mx, k

    def energy(self, v: np.ndarray) -> float:
        _, strain, k = self.densities(v)
        density = strain * strain / (2.0 * self.eps) + 0.5 * self.eps * k * k
        return float(np.sum(self.weights * density))

    def energy_and_gradient(self, v: np.ndarray) -> Tuple[float, np.ndarray]:
        mx, strain, k = self.densities(v)
        w = self.weights
        density = strain * strain / (2.0 * self.eps) + 0.5 * self.eps * k * k
        weighted_strain = w * strain / self.eps
        grad = self.dz_t @ weighted_strain - self.dx_t @ (weighted_strain * mx) + self.dxx_t @ (self.eps * w * k)
        grad[~self.free] = 0.0
        return float(np.sum(w * density)), grad

    def gradient_norm(self, grad: np.ndarray) -> float:
        """max |g/w| over free nodes."""
        return float(np.max(np.abs(grad[self.free] / self.weights[self.free])))


def check_boundary_rows(u: ScalarField, cp: CellProblem) -> None:
    if u.grid != cp.grid:
        raise GridError("Field and cell problem live on different grids")
    target = cp.boundary_rows[cp.pinned]
    actual = u.values[cp.pinned]
    scale = max(1.0, float(np.max(np.abs(target))))
    worst = float(np.max(np.abs(actual - target)))
    if worst > PIN_TOL * scale:
        raise BoundaryConstraintError(f"Pinned rows are off their boundary values by {worst:.3e}")


def discrete_energy(u: ScalarField, eps: float, cp: CellProblem) -> float:
    return EnergyModel(cp, eps).energy(u.values.reshape(-1))


def discrete_energy_gradient(u: ScalarField, eps: float, cp: CellProblem) -> ScalarField:
    """dE_h/du on the free nodes; zero on the pinned rows."""
    check_boundary_rows(u, cp)
    _, grad = EnergyModel(cp, eps).energy_and_gradient(u.values.reshape(-1))
    return ScalarField(cp.grid, grad.reshape(cp.grid.shape))


@dataclass
class GradientCheck:
    directions: int
    step: float
    max_relative_error: float
    worst_direction: int

    def passed(self, tol: float = 1e-6) -> bool:
        return self.max_relative_error < tol


def random_direction(cp: CellProblem, rng: np.random.Generator, modes: int = 3) -> np.ndarray:
    """Smooth random perturbation of the free nodes, max-normalized.

    Low sine modes in s times low Fourier modes in t; rough noise would let the cubic
    term of the central difference swamp the comparison.
    """
    s, t = cp.grid.st_mesh()
    d = np.zeros(cp.grid.shape)
    for k in range(1, modes + 1):
        for l in range(2):
            amplitude, phase = rng.standard_normal(), rng.uniform(0.0, 2.0 * np.pi)
            d += amplitude * np.sin(np.pi * k * (s + 0.5)) * np.cos(2.0 * np.pi * l * t + phase)
    d[cp.pinned] = 0.0
    return (d / np.max(np.abs(d))).reshape(-1)


def check_gradient(
    u: ScalarField,
    cp: CellProblem,
    directions: int = 100,
    step: float = 1e-5,
    seed: int = 0,
    model: Optional[EnergyModel] = None,
) -> GradientCheck:
    """Compare <grad, d> with central differences along random free-node directions.

    E_h is quartic in v, so the central difference is off by exactly step^2/6 E'''(d, d, d).
    """
    model = model or EnergyModel(cp)
    v = u.values.reshape(-1)
    _, grad = model.energy_and_gradient(v)
    rng = np.random.default_rng(seed)
    worst, worst_index = 0.0, -1
    for index in range(directions):
        d = random_direction(cp, rng)
        exact = float(grad @ d)
        approx = (model.energy(v + step * d) - model.energy(v - step * d)) / (2.0 * step)
        error = abs(approx - exact) / max(abs(exact), np.finfo(float).tiny)
        if error > worst:
            worst, worst_index = error, index
    logger.debug("Gradient check: %d directions, worst relative error %.3e", directions, worst)
    return GradientCheck(directions, step, worst, worst_index)
