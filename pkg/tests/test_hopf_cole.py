"""Tests for BPS solutions built through the Hopf-Cole map."""

import numpy as np
import pytest

from src.smectic_bps.core.grid import Grid2D
from src.smectic_bps.energy.functional import bps_residual, energy_eps
from src.smectic_bps.errors import ConfigError, GridError, InvalidHeatDataError
from src.smectic_bps.jump.states import JumpSpec
from src.smectic_bps.profile.ansatz import oned_energy
from src.smectic_bps.profile.hopf_cole import (
    HeatBoundaryData,
    exact_hopf_cole_field,
    hopf_cole_field,
    hopf_cole_reduces_to_heat,
    solve_heat,
)


def core_max(values, grid, half_width=0.3):
    s, t = grid.st_mesh()
    core = (np.abs(s) <= half_width + 1e-12) & (np.abs(t) <= half_width + 1e-12)
    return float(np.max(np.abs(values[core])))


class TestHopfCole:
    """Test cases for the heat solve and the logarithmic map."""

    def setup_method(self):
        """Set up test fixtures."""
        self.eps = 0.1
        self.data = HeatBoundaryData.for_jump(-1.0, 1.0, self.eps)

    def test_substitution_is_heat_equation(self):
        """The BPS residual of 2 eps ln(phi) is 2 eps (phi_z - eps phi_xx)/phi."""
        assert hopf_cole_reduces_to_heat()

    def test_exponentials_solve_heat_equation(self):
        """Each term A exp(k x + eps k^2 z) satisfies phi_z = eps phi_xx."""
        x, z, h = 0.1, 0.2, 1e-4
        phi = self.data.initial
        phi_z = (phi(x, z + h) - phi(x, z - h)) / (2.0 * h)
        phi_xx = (phi(x + h, z) - 2.0 * phi(x, z) + phi(x - h, z)) / (h * h)
        assert phi_z == pytest.approx(self.eps * phi_xx, rel=1e-5)

    def test_closed_form_residual_is_second_order(self):
        """The discrete BPS residual of the exact solution is pure truncation error."""
        errors = []
        for grid in (Grid2D.rectangle(41, 41), Grid2D.rectangle(81, 81)):
            u = exact_hopf_cole_field(self.data.initial, self.eps, grid)
            errors.append(core_max(bps_residual(u, self.eps).values, grid))
        assert 3.5 <= errors[0] / errors[1] <= 4.5

    def test_solver_tracks_exact_solution(self):
        """Crank-Nicolson reproduces the closed form on a moderate grid."""
        grid = Grid2D.rectangle(81, 81)
        numeric = hopf_cole_field(self.data, self.eps, grid)
        exact = exact_hopf_cole_field(self.data.initial, self.eps, grid)
        assert np.max(np.abs(numeric.values - exact.values)) < 1e-3

    def test_solver_residual_is_second_order(self):
        """The BPS residual of the Crank-Nicolson field drops by about four when h is halved."""
        errors = []
        for grid in (Grid2D.rectangle(41, 41), Grid2D.rectangle(81, 81)):
            u = hopf_cole_field(self.data, self.eps, grid)
            errors.append(core_max(bps_residual(u, self.eps).values, grid))
        assert 3.5 <= errors[0] / errors[1] <= 4.5

    def test_substeps_do_not_change_grid_values_much(self):
        """Finer z substeps only move the solution by the small time error."""
        grid = Grid2D.rectangle(41, 41)
        default = solve_heat(self.data, self.eps, grid)
        finer = solve_heat(self.data, self.eps, grid, max_mesh_ratio=0.05)
        assert np.max(np.abs(default - finer) / finer) < 1e-4
        with pytest.raises(ConfigError):
            solve_heat(self.data, self.eps, grid, max_mesh_ratio=0.0)

    def test_solver_matches_edges(self):
        """Dirichlet columns are copied from the boundary data."""
        grid = Grid2D.rectangle(21, 21)
        phi = solve_heat(self.data, self.eps, grid)
        x, z = grid.xz_mesh()
        assert np.allclose(phi[0], self.data.left(x[0], z[0]))
        assert np.allclose(phi[:, 0], self.data.initial(x[:, 0], z[:, 0]))

    def test_non_positive_data(self):
        """phi <= 0 has no logarithm."""
        grid = Grid2D.rectangle(21, 21)
        with pytest.raises(InvalidHeatDataError):
            solve_heat(HeatBoundaryData.from_function(lambda x, z: x), self.eps, grid)
        with pytest.raises(InvalidHeatDataError):
            exact_hopf_cole_field(lambda x, z: x - 1.0, self.eps, grid)

    def test_grid_requirements(self):
        """The heat solve runs on axis-aligned, non-periodic grids."""
        with pytest.raises(GridError):
            solve_heat(self.data, self.eps, Grid2D.cell(21, 8))
        with pytest.raises(GridError):
            solve_heat(self.data, self.eps, Grid2D.rectangle(21, 21, nu=(0.6, 0.8)))

    def test_empty_exponential_sum(self):
        """At least one term is needed."""
        with pytest.raises(ConfigError):
            HeatBoundaryData.from_exponentials([], self.eps)

    def test_layer_energy_is_jump_cost(self):
        """The straight layer 2 eps ln(phi) carries energy 2/3 per unit length, below r_eps^1D."""
        jump = JumpSpec.from_slopes(-1.0, 1.0)
        for eps in (0.1, 0.05, 0.025):
            grid = Grid2D.rectangle(int(round(20.0 / eps)) + 1, 5)
            data = HeatBoundaryData.for_jump(-1.0, 1.0, eps)
            total = energy_eps(exact_hopf_cole_field(data.initial, eps, grid), eps).total
            assert total == pytest.approx(2.0 / 3.0, rel=1e-2)
            assert total <= oned_energy(jump, eps) * (1.0 + 1e-2)
