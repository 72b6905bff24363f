"""Tests for the energy functional and its BPS decomposition."""

import numpy as np
import pytest

from src.smectic_bps.core.grid import Grid2D, ScalarField
from src.smectic_bps.core.quadrature import integrate
from src.smectic_bps.energy.functional import (
    bps_boundary_flux,
    bps_residual,
    check_epsilon,
    divergence_residual,
    energy_densities,
    energy_eps,
    sigma_components,
)
from src.smectic_bps.errors import ConfigError
from src.smectic_bps.jump.states import JumpSpec
from src.smectic_bps.profile.ansatz import build_ansatz, oned_energy


def smooth(x, z):
    return 0.3 * np.sin(2.0 * np.pi * x + 0.4) * np.cos(2.0 * np.pi * z) + 0.2 * x * z


class TestEnergyFunctional:
    """Test cases for energy_eps and the entropy field."""

    def setup_method(self):
        """Set up test fixtures."""
        self.grid = Grid2D.rectangle(21, 21)

    def test_parabola_states_cost_nothing(self):
        """Affine fields with gradient on the parabola have zero energy."""
        a = 0.7
        u = ScalarField.from_function(self.grid, lambda x, z: a * x + 0.5 * a * a * z)
        breakdown = energy_eps(u, 0.1)
        assert breakdown.total == pytest.approx(0.0, abs=1e-24)
        assert breakdown.residual == pytest.approx(0.0, abs=1e-12)

    def test_pure_compression(self):
        """u = z has strain 1, so E = area / (2 eps)."""
        u = ScalarField.from_function(self.grid, lambda x, z: z)
        breakdown = energy_eps(u, 0.5)
        assert breakdown.compression == pytest.approx(1.0)
        assert breakdown.bending == pytest.approx(0.0, abs=1e-20)
        assert breakdown.epsilon == 0.5

    def test_pure_bending(self):
        """u = x^2/2 on a strip has curvature 1 and strain -x^2/2."""
        u = ScalarField.from_function(self.grid, lambda x, z: 0.5 * x * x)
        densities = energy_densities(u, 0.25)
        assert np.allclose(densities.curvature, 1.0, atol=1e-9)
        assert energy_eps(u, 0.25).bending == pytest.approx(0.125, rel=1e-9)

    def test_epsilon_validation(self):
        """eps must be positive and finite."""
        for bad in (0.0, -1.0, float("inf"), float("nan")):
            with pytest.raises(ConfigError):
                check_epsilon(bad)

    def test_sigma_components(self):
        """Sigma(m) = (m1 m2 - m1^3/6, -m1^2/2)."""
        first, second = sigma_components(1.0, 0.5)
        assert first == pytest.approx(0.5 - 1.0 / 6.0)
        assert second == pytest.approx(-0.5)

    def test_sigma_on_parabola(self):
        """On m = (a, a^2/2) the entropy field is (a^3/3, -a^2/2)."""
        a = np.random.default_rng(3).uniform(-4.0, 4.0, size=50)
        first, second = sigma_components(a, 0.5 * a * a)
        assert np.allclose(first, a**3 / 3.0, rtol=1e-12, atol=1e-12)
        assert np.allclose(second, -0.5 * a * a, rtol=0.0, atol=1e-14)

    def test_young_slack(self):
        """Compression + bending - product is the BPS square, pointwise and never negative."""
        u = ScalarField.from_function(Grid2D.rectangle(41, 41), smooth)
        for eps in (0.05, 0.2, 1.0):
            densities = energy_densities(u, eps)
            slack = densities.compression + densities.bending - densities.product
            assert np.allclose(slack, densities.bps_square, rtol=1e-12, atol=1e-14)
            assert np.all(densities.compression + densities.bending - np.abs(densities.product) >= -1e-14)

    def test_energy_bounds_flux(self):
        """E_eps >= int div Sigma on generic smooth fields."""
        rng = np.random.default_rng(5)
        grid = Grid2D.rectangle(41, 41)
        for _ in range(5):
            c1, c2, c3 = rng.uniform(-1.0, 1.0, size=3)
            u = ScalarField.from_function(grid, lambda x, z: c1 * np.sin(3.0 * x + z) + c2 * x * x * z + c3 * z)
            for eps in (0.05, 0.3):
                breakdown = energy_eps(u, eps)
                assert breakdown.total >= breakdown.bps_flux
                assert breakdown.total >= abs(integrate(energy_densities(u, eps).product, grid))

    def test_decomposition_holds_up_to_discretization(self):
        """total - (square + flux) is only the discretization error of div Sigma."""
        u = ScalarField.from_function(Grid2D.rectangle(81, 81), smooth)
        breakdown = energy_eps(u, 0.1)
        assert abs(breakdown.residual) < 1e-2 * breakdown.total
        assert breakdown.total == pytest.approx(breakdown.compression + breakdown.bending)

    def test_divergence_identity_order(self):
        """div Sigma(grad u) matches dxx u (dz u - (dx u)^2/2) at second order."""
        errors = []
        for grid in (Grid2D.rectangle(41, 41), Grid2D.rectangle(81, 81)):
            u = ScalarField.from_function(grid, smooth)
            s, t = grid.st_mesh()
            core = (np.abs(s) <= 0.3 + 1e-12) & (np.abs(t) <= 0.3 + 1e-12)
            errors.append(np.max(np.abs(divergence_residual(u).values[core])))
        assert 3.5 <= errors[0] / errors[1] <= 4.5


class TestAnsatzEnergy:
    """Energy of the one-dimensional competitor on the cell."""

    def setup_method(self):
        """Set up test fixtures."""
        self.jump = JumpSpec.from_slopes(-1.0, 1.0)
        self.eps = 0.05
        self.grid = Grid2D.cell(501, 4, nu=self.jump.nu)
        self.u, _ = build_ansatz(self.jump, self.eps, self.grid)

    def test_boundary_flux_is_jump_cost(self):
        """The outward flux of Sigma through the nu faces is the jump cost."""
        assert abs(bps_boundary_flux(self.u)) == pytest.approx(2.0 / 3.0, abs=1e-10)

    def test_volume_flux_matches(self):
        """The integrated discrete divergence agrees with the face flux."""
        breakdown = energy_eps(self.u, self.eps)
        assert breakdown.bps_flux == pytest.approx(2.0 / 3.0, abs=1e-6)

    def test_discrete_energy_near_oned_energy(self):
        """The grid energy of the ansatz approximates r_eps^1D."""
        breakdown = energy_eps(self.u, self.eps)
        assert breakdown.total == pytest.approx(oned_energy(self.jump, self.eps), rel=1e-2)
        assert breakdown.total > 2.0 / 3.0 * 0.99

    def test_bps_residual_small_in_core(self):
        """The ansatz solves the BPS equation inside the middle band up to discretization."""
        residual = bps_residual(self.u, self.eps).values
        s, _ = self.grid.st_mesh()
        strain = energy_densities(self.u, self.eps).strain
        band = np.abs(s) < 0.25 - 0.5 * self.grid.h_s
        assert np.max(np.abs(residual[band])) < 1e-2 * np.max(np.abs(strain))

    def test_bps_residual_at_band_edges(self):
        """On |s| = threshold dxx averages the profile and band slopes of G, nothing more."""
        residual = bps_residual(self.u, self.eps).values
        s, _ = self.grid.st_mesh()
        edges = np.isclose(np.abs(s), 0.25, atol=1e-12)
        assert edges.any(axis=1).sum() == 2
        edge = 0.25 / self.eps
        g_prime = np.exp(-edge) / (1.0 + np.exp(-edge)) ** 2
        gap = 1.0 / (1.0 + np.exp(edge))
        predicted = g_prime - self.eps * gap / 0.25
        assert np.abs(residual[edges]) == pytest.approx(np.full(edges.sum(), predicted), abs=1e-4)

    def test_equipartition_in_core(self):
        """Compression and bending agree within 1% on |s| <= 1/4 at eps = 0.02."""
        eps = 0.02
        grid = Grid2D.cell(1251, 4, nu=self.jump.nu)
        u, _ = build_ansatz(self.jump, eps, grid)
        s, _ = grid.st_mesh()
        core = energy_eps(u, eps, mask=np.abs(s) <= 0.25)
        assert core.compression == pytest.approx(core.bending, rel=1e-2)
        assert core.bps_square < 1e-2 * core.total
