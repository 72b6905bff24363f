"""Tests for the interpolated one-dimensional competitor."""

import math

import numpy as np
import pytest

from src.smectic_bps.core.grid import Grid2D
from src.smectic_bps.core.stencils import deriv_x, deriv_z
from src.smectic_bps.errors import ConfigError, GridError
from src.smectic_bps.jump.states import JumpSpec
from src.smectic_bps.profile.ansatz import (
    build_ansatz,
    oned_energy,
    oned_energy_breakdown,
    profile_metadata,
    profile_table,
    sharp_limit_field,
)
from src.smectic_bps.profile.ode import solve_profile


class TestBuildAnsatz:
    """Test cases for build_ansatz and sharp_limit_field."""

    def setup_method(self):
        """Set up test fixtures."""
        self.jump = JumpSpec.from_slopes(-1.0, 1.0)
        self.grid = Grid2D.cell(201, 4, nu=self.jump.nu)

    def test_face_gradients(self):
        """The gradient is m- on s = -1/2 and m+ on s = 1/2."""
        _, grad = build_ansatz(self.jump, 0.05, self.grid)
        assert grad.first[0, 0] == pytest.approx(-1.0)
        assert grad.second[0, 0] == pytest.approx(0.5)
        assert grad.first[-1, 0] == pytest.approx(1.0)
        assert grad.second[-1, 0] == pytest.approx(0.5)

    def test_tau_slope_is_tangential_component(self):
        """u carries m-.tau linearly along the defect line."""
        u, _ = build_ansatz(self.jump, 0.05, self.grid)
        assert u.tau_slope == pytest.approx(0.5)
        assert np.allclose(u.values[:, 0], u.values[:, -1])

    def test_potential_matches_gradient(self):
        """Differencing u reproduces the analytic gradient up to O(h^2)."""
        eps = 0.1
        u, grad = build_ansatz(self.jump, eps, self.grid)
        assert np.max(np.abs(deriv_x(u).values - grad.first)[2:-2]) < 1e-2
        assert np.max(np.abs(deriv_z(u).values - grad.second)[2:-2]) < 1e-2

    def test_rotated_jump(self):
        """A (0, 2) jump needs the diagonal frame."""
        j = JumpSpec.from_slopes(0.0, 2.0)
        grid = Grid2D.cell(201, 4, nu=j.nu)
        _, grad = build_ansatz(j, 0.05, grid)
        assert grad.first[0, 0] == pytest.approx(0.0, abs=1e-12)
        assert grad.first[-1, 0] == pytest.approx(2.0)
        assert grad.second[-1, 0] == pytest.approx(2.0)

    def test_frame_mismatch(self):
        """The grid frame has to follow the jump normal."""
        j = JumpSpec.from_slopes(0.0, 2.0)
        with pytest.raises(GridError):
            build_ansatz(j, 0.05, self.grid)

    def test_threshold_range(self):
        """The band threshold lies strictly inside (0, 1/2)."""
        for bad in (0.0, 0.5, -0.1):
            with pytest.raises(ConfigError):
                build_ansatz(self.jump, 0.05, self.grid, threshold=bad)

    def test_sharp_limit_field(self):
        """The eps -> 0 field uses the chord midpoint on the line itself."""
        _, grad = sharp_limit_field(self.jump, self.grid)
        middle = self.grid.n_s // 2
        assert grad.first[middle, 0] == pytest.approx(0.0)
        assert grad.first[0, 0] == -1.0
        assert grad.first[-1, 0] == 1.0


class TestOneDEnergy:
    """Test cases for r_eps^1D."""

    def setup_method(self):
        """Set up test fixtures."""
        self.jump = JumpSpec.from_slopes(-1.0, 1.0)

    def test_excess_positive_and_decreasing(self):
        """r_eps^1D stays above the cost and approaches it as eps shrinks."""
        excess = [oned_energy_breakdown(self.jump, eps).excess for eps in (0.1, 0.05, 0.025)]
        assert all(value > 0.0 for value in excess)
        assert excess[0] > excess[1] > excess[2]

    def test_exponential_rate(self):
        """log(excess) falls roughly linearly in 1/eps."""
        excess = [oned_energy_breakdown(self.jump, eps).excess for eps in (0.1, 0.05)]
        slope = (math.log(excess[1]) - math.log(excess[0])) / (1.0 / 0.05 - 1.0 / 0.1)
        assert slope < 0.0

    def test_breakdown_consistency(self):
        """total = middle + outer and middle = cost - missing up to quadrature error."""
        breakdown = oned_energy_breakdown(self.jump, 0.05)
        assert breakdown.total == pytest.approx(breakdown.middle + breakdown.outer)
        assert breakdown.cost == pytest.approx(2.0 / 3.0)
        assert abs(breakdown.middle_defect) < 1e-8
        assert breakdown.total - breakdown.cost == pytest.approx(breakdown.excess, abs=1e-8)
        assert oned_energy(self.jump, 0.05) == breakdown.total

    def test_shifted_jump_energy(self):
        """The (0, 2) layer converges to sqrt(2)/3."""
        total = oned_energy(JumpSpec.from_slopes(0.0, 2.0), 0.02)
        assert total == pytest.approx(math.sqrt(2.0) / 3.0, rel=1e-6)

    def test_quadrature_points_validation(self):
        """Too few panels are rejected."""
        with pytest.raises(ConfigError):
            oned_energy_breakdown(self.jump, 0.05, quad_points=8)

    def test_profile_table(self):
        """The table lists t, g and W."""
        profile = solve_profile(self.jump, T=10.0, step=1e-2)
        table = profile_table(profile)
        assert list(table.columns) == ["t", "g", "W"]
        assert len(table) == profile.t_grid.size
        metadata = profile_metadata(profile)
        assert metadata["logistic_rate"] == pytest.approx(1.0)
        assert metadata["samples"] == len(table)
