"""BPS solutions through the Hopf-Cole map u = 2 eps ln(phi).

With this substitution the BPS equation dz u - (dx u)^2/2 - eps dxx u = 0 becomes the heat
equation phi_z = eps phi_xx, with z playing the role of time. phi is advanced by
Crank-Nicolson on an axis-aligned grid (s = x, t = z) with Dirichlet data at both x ends.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np
import sympy
from scipy import sparse
from scipy.sparse.linalg import splu

from ..core.grid import Grid2D, ScalarField
from ..energy.functional import check_epsilon
from ..errors import ConfigError, GridError, InvalidHeatDataError

logger = logging.getLogger(__name__)

HeatData = Callable[[np.ndarray, np.ndarray], np.ndarray]

MAX_MESH_RATIO = 0.5


def verify_hopf_cole_substitution() -> sympy.Expr:
    """Simplified BPS residual of u = 2 eps ln(phi); equals 2 eps (phi_z - eps phi_xx)/phi."""
    x, z = sympy.symbols("x z", real=True)
    eps = sympy.symbols("epsilon", positive=True)
    phi = sympy.Function("phi", positive=True)(x, z)
    u = 2 * eps * sympy.log(phi)
    residual = sympy.diff(u, z) - sympy.diff(u, x) ** 2 / 2 - eps * sympy.diff(u, x, 2)
    return sympy.simplify(residual)


def hopf_cole_reduces_to_heat() -> bool:
    """True when the residual is exactly 2 eps (phi_z - eps phi_xx)/phi."""
    x, z = sympy.symbols("x z", real=True)
    eps = sympy.symbols("epsilon", positive=True)
    phi = sympy.Function("phi", positive=True)(x, z)
    target = 2 * eps * (sympy.diff(phi, z) - eps * sympy.diff(phi, x, 2)) / phi
    return sympy.simplify(verify_hopf_cole_substitution() - target) == 0


@dataclass
class HeatBoundaryData:
    """Initial line phi(x, z0) and the Dirichlet values phi(x_edge, z), all as callables of (x, z)."""

    initial: HeatData
    left: HeatData
    right: HeatData

    @classmethod
    def from_function(cls, phi: HeatData) -> "HeatBoundaryData":
        return cls(phi, phi, phi)

    @classmethod
    def from_exponentials(cls, terms: Sequence[Tuple[float, float]], eps: float) -> "HeatBoundaryData":
        """phi = sum of A exp(k x + eps k^2 z); every term is an exact heat solution."""
        eps = check_epsilon(eps)
        if not terms:
            raise ConfigError("At least one exponential term is required")
        pairs = [(float(a), float(k)) for a, k in terms]

        def phi(x, z):
            x = np.asarray(x, dtype=float)
            z = np.asarray(z, dtype=float)
            return sum(a * np.exp(k * x + eps * k * k * z) for a, k in pairs)

        return cls.from_function(phi)

    @classmethod
    def for_jump(cls, a_minus: float, a_plus: float, eps: float) -> "HeatBoundaryData":
        """Two exponentials whose Hopf-Cole image is the travelling layer between slopes a- and a+."""
        eps = check_epsilon(eps)
        return cls.from_exponentials([(1.0, a_minus / (2.0 * eps)), (1.0, a_plus / (2.0 * eps))], eps)


def _require_heat_grid(grid: Grid2D) -> None:
    if not grid.axis_aligned:
        raise GridError("The heat solve needs an axis-aligned grid (s = x, t = z)")
    if grid.periodic_t:
        raise GridError("z is the evolution direction and cannot be periodic")
    if grid.n_s < 3 or grid.n_t < 2:
        raise GridError(f"Heat grid too small: {grid.n_s}x{grid.n_t}")


def _check_positive(values: np.ndarray, where: str) -> None:
    if not np.all(np.isfinite(values)):
        raise InvalidHeatDataError(f"Non-finite heat values {where}")
    if np.any(values <= 0.0):
        raise InvalidHeatDataError(f"phi <= 0 {where} (min {values.min():.3e}); ln(phi) is undefined")


def solve_heat(data: HeatBoundaryData, eps: float, grid: Grid2D, max_mesh_ratio: float = MAX_MESH_RATIO) -> np.ndarray:
    """phi on the grid, shape (n_x, n_z), by Crank-Nicolson in z.

    Each z spacing is split into equal substeps with eps dz_sub/dx^2 <= max_mesh_ratio, so
    the time error stays a fixed small fraction of the O(dx^2) space error under refinement.
    """
    eps = check_epsilon(eps)
    _require_heat_grid(grid)
    if not max_mesh_ratio > 0:
        raise ConfigError(f"max_mesh_ratio must be positive, got {max_mesh_ratio}")
    x, z = grid.s(), grid.t()
    n = grid.n_s - 2
    substeps = max(1, math.ceil(eps * grid.h_t / (grid.h_s * grid.h_s * max_mesh_ratio)))
    dz = grid.h_t / substeps
    r = eps * dz / (grid.h_s * grid.h_s)

    lap = sparse.diags([np.ones(n - 1), -2.0 * np.ones(n), np.ones(n - 1)], [-1, 0, 1], format="csc")
    eye = sparse.identity(n, format="csc")
    implicit = splu((eye - 0.5 * r * lap).tocsc())
    explicit = (eye + 0.5 * r * lap).tocsr()

    def edges(z_value: float) -> Tuple[float, float]:
        left = float(np.asarray(data.left(x[:1], np.full(1, z_value)), dtype=float)[0])
        right = float(np.asarray(data.right(x[-1:], np.full(1, z_value)), dtype=float)[0])
        return left, right

    phi = np.empty(grid.shape)
    phi[:, 0] = data.initial(x, np.full_like(x, z[0]))
    edge_left = np.asarray(data.left(np.full_like(z, x[0]), z), dtype=float)
    edge_right = np.asarray(data.right(np.full_like(z, x[-1]), z), dtype=float)
    _check_positive(phi[:, 0], "on the initial line")
    _check_positive(edge_left, "on the left edge")
    _check_positive(edge_right, "on the right edge")

    interior = phi[1:-1, 0].copy()
    before = (edge_left[0], edge_right[0])
    for k in range(grid.n_t - 1):
        for step in range(1, substeps + 1):
            after = (edge_left[k + 1], edge_right[k + 1]) if step == substeps else edges(z[k] + step * dz)
            rhs = explicit @ interior
            rhs[0] += 0.5 * r * (before[0] + after[0])
            rhs[-1] += 0.5 * r * (before[1] + after[1])
            interior = implicit.solve(rhs)
            before = after
        phi[1:-1, k + 1] = interior
        phi[0, k + 1] = edge_left[k + 1]
        phi[-1, k + 1] = edge_right[k + 1]

    _check_positive(phi, "in the heat solution")
    logger.debug("Heat solve on %dx%d grid, %d substeps, r = eps dz/dx^2 = %.3g", grid.n_s, grid.n_t, substeps, r)
    return phi


def hopf_cole_field(
    boundary_data: HeatBoundaryData, eps: float, grid: Grid2D, max_mesh_ratio: float = MAX_MESH_RATIO
) -> ScalarField:
    """u = 2 eps ln(phi) with phi from the Crank-Nicolson heat solve."""
    eps = check_epsilon(eps)
    phi = solve_heat(boundary_data, eps, grid, max_mesh_ratio)
    return ScalarField(grid, 2.0 * eps * np.log(phi))


def exact_hopf_cole_field(phi: HeatData, eps: float, grid: Grid2D) -> ScalarField:
    """u = 2 eps ln(phi) for a closed-form heat solution, sampled without time stepping."""
    eps = check_epsilon(eps)
    x, z = grid.xz_mesh()
    values = np.asarray(phi(x, z), dtype=float)
    _check_positive(values, "in the closed-form heat solution")
    return ScalarField(grid, 2.0 * eps * np.log(values))

