"""Entropy quantities of the conservation-law rewrite, with v = dx u.

    dz v + dx f(v) = -dx(m2 + m1^2/2),   m = (dx u, -dz u),  f(v) = -v^2/2
    dz f(v) + dx F(v) = -v dx(dz u - v^2/2),   F(v) = v^3/3
"""

from typing import Optional, Tuple

import numpy as np

from ..core.grid import ScalarField, VectorField2
from ..core.quadrature import integrate
from ..core.stencils import deriv_x, deriv_z, operators
from ..jump.states import JumpSpec


def flux_f(v):
    return -0.5 * v * v


def flux_F(v):
    return v**3 / 3.0


def entropy_production(u: ScalarField) -> Tuple[ScalarField, float]:
    """dz f(v) + dx F(v) on the grid and its L1 mass."""
    ops = operators(u.grid)
    v = deriv_x(u).values
    production = ops.apply(ops.dz, flux_f(v)) + ops.apply(ops.dx, flux_F(v))
    field = ScalarField(u.grid, production)
    return field, integrate(np.abs(production), u.grid)


def entropy_identity_residual(u: ScalarField) -> ScalarField:
    """Production in conservative form minus its product form -v dx(dz u - v^2/2); O(h^2)."""
    ops = operators(u.grid)
    v = deriv_x(u).values
    strain = deriv_z(u).values - 0.5 * v * v
    production, _ = entropy_production(u)
    return ScalarField(u.grid, production.values + v * ops.apply(ops.dx, strain))


def rewrite_residual(u: ScalarField) -> ScalarField:
    """dz v + dx f(v) + dx(m2 + m1^2/2); zero up to rounding since Ds and Dt commute."""
    ops = operators(u.grid)
    m = rotated_field(u)
    v = m.first
    left = ops.apply(ops.dz, v) + ops.apply(ops.dx, flux_f(v))
    right = -ops.apply(ops.dx, m.second + 0.5 * m.first**2)
    return ScalarField(u.grid, left - right)


def jump_production(j: JumpSpec) -> float:
    """|[F(v)] nu1 + [f(v)] nu2| across a sharp jump, the limit of the production mass."""
    if j.degenerate:
        return 0.0
    a_minus, a_plus = j.minus.a, j.plus.a
    nu1, nu2 = j.nu
    return abs((flux_F(a_plus) - flux_F(a_minus)) * nu1 + (flux_f(a_plus) - flux_f(a_minus)) * nu2)


def rotated_field(u: ScalarField) -> VectorField2:
    """m = (dx u, -dz u)."""
    return VectorField2(u.grid, deriv_x(u).values, -deriv_z(u).values, label="rotated gradient")


def div_check(m: VectorField2, mask: Optional[np.ndarray] = None) -> float:
    """max |dz m1 + dx m2|, optionally over a mask."""
    ops = operators(m.grid)
    divergence = np.abs(ops.apply(ops.dz, m.first) + ops.apply(ops.dx, m.second))
    if mask is not None:
        divergence = np.where(mask, divergence, 0.0)
    return float(divergence.max())
