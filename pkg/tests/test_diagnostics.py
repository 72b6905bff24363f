"""Tests for defect bounds, entropy production, norms and ansatz sweeps."""

import math

import numpy as np
import pandas as pd
import pytest

from src.smectic_bps.core.grid import Grid2D, ScalarField
from src.smectic_bps.core.stencils import deriv_xx
from src.smectic_bps.diagnostics.defect import compression_defect, defect_bound
from src.smectic_bps.diagnostics.entropy import (
    div_check,
    entropy_identity_residual,
    entropy_production,
    jump_production,
    rewrite_residual,
    rotated_field,
)
from src.smectic_bps.diagnostics.norms import (
    concentration_radius,
    lp_norm,
    mass_fraction_within,
    negative_sobolev_norm,
    rate_fit,
)
from src.smectic_bps.diagnostics.report import measure_ansatz, sweep_ansatz
from src.smectic_bps.errors import ConfigError, GridError
from src.smectic_bps.jump.states import JumpSpec
from src.smectic_bps.profile.ansatz import build_ansatz


class TestDefectAndEntropy:
    """Test cases on the unit-jump ansatz at eps = 0.02."""

    @classmethod
    def setup_class(cls):
        """Build the ansatz once; the grid is fine enough to resolve the layer."""
        cls.eps = 0.02
        cls.jump = JumpSpec.from_slopes(-1.0, 1.0)
        cls.grid = Grid2D.cell(int(math.ceil(25 / cls.eps)) + 1, 4, nu=cls.jump.nu)
        cls.u, _ = build_ansatz(cls.jump, cls.eps, cls.grid)

    def test_defect_bound_holds(self):
        """||C||^2 <= 2 eps E_eps."""
        bound = defect_bound(self.u, self.eps)
        assert bound.holds
        assert bound.defect_squared == pytest.approx(compression_defect(self.u) ** 2)

    def test_defect_vanishes_on_parabola_states(self):
        """Affine fields with gradient on the parabola have no defect."""
        grid = Grid2D.rectangle(11, 11)
        u = ScalarField.from_function(grid, lambda x, z: 0.4 * x + 0.08 * z)
        assert compression_defect(u) == pytest.approx(0.0, abs=1e-14)

    def test_production_mass_matches_jump(self):
        """The L1 mass of the production tends to the flux jump, 2/3 for a = -1 to 1."""
        production, mass = entropy_production(self.u)
        assert mass == pytest.approx(jump_production(self.jump), rel=2e-2)
        assert mass_fraction_within(production, 10 * self.eps) >= 0.95

    def test_jump_production(self):
        """[F] nu1 + [f] nu2 is 2/3 for the unit jump and 0 for no jump."""
        assert jump_production(self.jump) == pytest.approx(2.0 / 3.0, abs=1e-15)
        assert jump_production(JumpSpec.from_slopes(0.5, 0.5)) == 0.0

    def test_rewrite_is_exact(self):
        """The conservation-law rewrite holds to rounding on the grid."""
        scale = max(1.0, float(np.max(np.abs(deriv_xx(self.u).values))))
        assert np.max(np.abs(rewrite_residual(self.u).values)) / scale < 1e-10
        assert div_check(rotated_field(self.u)) / scale < 1e-10

    def test_entropy_identity_residual_is_small(self):
        """Conservative and product forms of the production agree in the bulk."""
        production, _ = entropy_production(self.u)
        residual = entropy_identity_residual(self.u).values
        assert np.max(np.abs(residual)) < 0.05 * np.max(np.abs(production.values))


class TestNorms:
    """Test cases for norms and fits."""

    def setup_method(self):
        """Set up test fixtures."""
        self.grid = Grid2D.rectangle(11, 11)

    def test_lp_norm_of_constant(self):
        """The unit square has area one."""
        field = ScalarField(self.grid, np.full(self.grid.shape, 2.0))
        assert lp_norm(field, 2) == pytest.approx(2.0)
        assert lp_norm(field, 6) == pytest.approx(2.0)
        assert lp_norm(field, math.inf) == 2.0

    def test_lp_norm_validation(self):
        """p < 1 is not a norm and arrays need a grid."""
        with pytest.raises(ConfigError):
            lp_norm(np.ones(self.grid.shape), 0.5, self.grid)
        with pytest.raises(GridError):
            lp_norm(np.ones(self.grid.shape), 2)

    def test_rate_fit(self):
        """A straight line gives its slope and correlation one."""
        slope, correlation = rate_fit([1.0, 2.0, 3.0], [2.0, 4.0, 6.0])
        assert slope == pytest.approx(2.0)
        assert correlation == pytest.approx(1.0)
        with pytest.raises(ConfigError):
            rate_fit([1.0, 2.0], [1.0, 2.0])

    def test_negative_sobolev_norm(self):
        """cos(2 pi t) has H^-1 norm sqrt(1/2)/(2 pi)."""
        grid = Grid2D.cell(5, 16)
        _, t = grid.st_mesh()
        field = ScalarField(grid, np.cos(2.0 * np.pi * t))
        assert negative_sobolev_norm(field) == pytest.approx(math.sqrt(0.5) / (2.0 * math.pi), rel=1e-12)
        with pytest.raises(GridError):
            negative_sobolev_norm(ScalarField(self.grid, np.zeros(self.grid.shape)))

    def test_concentration(self):
        """Mass placed on |s| <= 0.1 is found there."""
        grid = Grid2D.cell(11, 4)
        s, _ = grid.st_mesh()
        density = np.where(np.abs(s) <= 0.1 + 1e-12, 1.0, 0.0)
        assert mass_fraction_within(density, 0.1 + 1e-12, grid) == pytest.approx(1.0)
        assert mass_fraction_within(density, 0.05, grid) == pytest.approx(1.0 / 3.0)
        assert concentration_radius(density, grid) == pytest.approx(0.1)
        with pytest.raises(ConfigError):
            concentration_radius(density, grid, fraction=1.5)


class TestSweep:
    """Test cases for ansatz sequences."""

    def setup_method(self):
        """Set up test fixtures."""
        self.jump = JumpSpec.from_slopes(-1.0, 1.0)

    def test_measure_record(self):
        """A single member carries the energy pieces and the requested norms."""
        record = measure_ansatz(self.jump, 0.1, p_list=(2.0, 6.0))
        assert record.n_s == int(math.ceil(25 / 0.1)) + 1
        assert set(record.lp_norms) == {"2", "6"}
        row = record.to_row()
        assert "dx_u_L2" in row and "lp_norms" not in row
        assert record.total > 2.0 / 3.0 * 0.98

    def test_order_and_thread_independence(self):
        """Records run from large to small eps whatever the thread count."""
        serial = sweep_ansatz(self.jump, [0.05, 0.1, 0.025], threads=1)
        parallel = sweep_ansatz(self.jump, [0.05, 0.1, 0.025], threads=3)
        assert [record.eps for record in serial.records] == [0.1, 0.05, 0.025]
        pd.testing.assert_frame_equal(serial.to_frame(), parallel.to_frame())
        assert serial.rates == parallel.rates
        assert serial.rates["excess_vs_inverse_eps"]["slope"] < 0.0

    def test_invalid_sweeps(self):
        """Empty lists and zero threads are rejected."""
        with pytest.raises(ConfigError):
            sweep_ansatz(self.jump, [])
        with pytest.raises(ConfigError):
            sweep_ansatz(self.jump, [0.1], threads=0)
