"""The energy E_eps, its BPS decomposition and the entropy field Sigma.

    E_eps(u) = 1/2 int (dz u - (dx u)^2/2)^2 / eps + eps (dxx u)^2
             = 1/2 int (dz u - (dx u)^2/2 - eps dxx u)^2 / eps  +  int div Sigma(grad u)

with Sigma(m) = (m1 m2 - m1^3/6, -m1^2/2) and div Sigma(grad u) = dxx u (dz u - (dx u)^2/2).
"""

import json
import math
from dataclasses import asdict, dataclass
from typing import Dict, Optional

import numpy as np

from ..core.grid import ScalarField, VectorField2
from ..core.quadrature import integrate, weights_1d
from ..core.stencils import deriv_xx, divergence, gradient
from ..errors import ConfigError


@dataclass
class EnergyBreakdown:
    """Integrated terms of E_eps; residual = total - (bps_square + bps_flux)."""

    compression: float
    bending: float
    total: float
    bps_square: float
    bps_flux: float
    epsilon: float
    residual: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass
class EnergyDensities:
    """Pointwise ingredients shared by the energy, its gradient and the diagnostics."""

    strain: np.ndarray  # dz u - (dx u)^2 / 2
    curvature: np.ndarray  # dxx u
    slope: np.ndarray  # dx u
    epsilon: float

    @property
    def compression(self) -> np.ndarray:
        return self.strain**2 / (2.0 * self.epsilon)

    @property
    def bending(self) -> np.ndarray:
        return 0.5 * self.epsilon * self.curvature**2

    @property
    def bps_square(self) -> np.ndarray:
        return (self.strain - self.epsilon * self.curvature) ** 2 / (2.0 * self.epsilon)

    @property
    def product(self) -> np.ndarray:
        return self.curvature * self.strain


def check_epsilon(eps: float) -> float:
    eps = float(eps)
    if not (eps > 0 and math.isfinite(eps)):
        raise ConfigError(f"eps must be a positive finite number, got {eps}")
    return eps


def energy_densities(u: ScalarField, eps: float) -> EnergyDensities:
    eps = check_epsilon(eps)
    grad = gradient(u)
    strain = grad.second - 0.5 * grad.first**2
    return EnergyDensities(strain, deriv_xx(u).values, grad.first, eps)


def energy_eps(u: ScalarField, eps: float, mask: Optional[np.ndarray] = None) -> EnergyBreakdown:
    """All five integrated terms, optionally restricted to a region of the grid."""
    densities = energy_densities(u, eps)
    grid = u.grid
    compression = integrate(densities.compression, grid, mask)
    bending = integrate(densities.bending, grid, mask)
    total = compression + bending
    bps_square = integrate(densities.bps_square, grid, mask)
    bps_flux = integrate(div_sigma(u).values, grid, mask)
    return EnergyBreakdown(
        compression=compression,
        bending=bending,
        total=total,
        bps_square=bps_square,
        bps_flux=bps_flux,
        epsilon=densities.epsilon,
        residual=total - (bps_square + bps_flux),
    )


def sigma_components(m1, m2):
    """Sigma(m) for scalars or arrays."""
    return m1 * m2 - m1**3 / 6.0, -0.5 * m1**2


def sigma(m: VectorField2) -> VectorField2:
    first, second = sigma_components(m.first, m.second)
    return VectorField2(m.grid, first, second, label="sigma")


def div_sigma(u: ScalarField) -> ScalarField:
    """Discrete divergence of Sigma(grad u)."""
    return divergence(sigma(gradient(u)))


def product_form(u: ScalarField) -> ScalarField:
    """dxx u * (dz u - (dx u)^2/2), the smooth-field value of div Sigma(grad u)."""
    # the product carries no eps
    return ScalarField(u.grid, energy_densities(u, 1.0).product)


def divergence_residual(u: ScalarField) -> ScalarField:
    return ScalarField(u.grid, div_sigma(u).values - product_form(u).values)


def bps_residual(u: ScalarField, eps: float) -> ScalarField:
    """dz u - (dx u)^2/2 - eps dxx u; zero on solutions of the BPS equation."""
    densities = energy_densities(u, eps)
    return ScalarField(u.grid, densities.strain - densities.epsilon * densities.curvature)


def bps_boundary_flux(u: ScalarField) -> float:
    """Outward flux of Sigma(grad u) through the sampled rectangle.

    Periodic t faces cancel and are skipped. Cross-check for the volume form of bps_flux.
    """
    grid = u.grid
    field = sigma(gradient(u))
    along_nu = field.first * grid.nu[0] + field.second * grid.nu[1]
    w_t = weights_1d(grid.n_t, grid.h_t, grid.periodic_t)
    flux = float(np.sum(w_t * along_nu[-1]) - np.sum(w_t * along_nu[0]))
    if not grid.periodic_t:
        along_tau = field.first * grid.tau[0] + field.second * grid.tau[1]
        w_s = weights_1d(grid.n_s, grid.h_s, periodic=False)
        flux += float(np.sum(w_s * along_tau[:, -1]) - np.sum(w_s * along_tau[:, 0]))
    return flux
