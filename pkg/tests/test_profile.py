"""Tests for the transition-layer ODE."""

import math

import numpy as np
import pytest

from src.smectic_bps.errors import ConfigError, DegenerateJumpError, ProfileStepError
from src.smectic_bps.jump.states import JumpSpec
from src.smectic_bps.profile.ode import (
    cached_profile,
    line_energy,
    profile_for,
    rk4_step,
    solve_profile,
    verify_well_identity,
    well_potential,
)


def logistic(t, rate):
    return 1.0 / (1.0 + np.exp(-rate * t))


class TestSolveProfile:
    """Test cases for solve_profile and the tail constants."""

    def setup_method(self):
        """Set up test fixtures."""
        self.unit = JumpSpec.from_slopes(-1.0, 1.0)
        self.shifted = JumpSpec.from_slopes(0.0, 2.0)
        self.profile = solve_profile(self.unit, T=10.0, step=1e-3)

    def test_matches_logistic_curve(self):
        """The profile is 1/(1 + exp(-|p| t/2))."""
        assert np.max(np.abs(self.profile.g - logistic(self.profile.t_grid, 1.0))) < 1e-8
        shifted = solve_profile(self.shifted, T=10.0, step=1e-3)
        assert np.max(np.abs(shifted.g - logistic(shifted.t_grid, math.sqrt(2.0)))) < 1e-8

    def test_profile_shape(self):
        """g(0) = 1/2, monotone and confined to [0, 1]."""
        middle = self.profile.t_grid.size // 2
        assert self.profile.t_grid[middle] == 0.0
        assert self.profile.g[middle] == 0.5
        assert np.all(np.diff(self.profile.g) >= 0.0)
        assert self.profile.g.min() >= 0.0
        assert self.profile.g.max() <= 1.0
        assert self.profile.horizon == pytest.approx(10.0)

    def test_tail_constants(self):
        """1 - g decays like exp(-t) for the unit jump."""
        c1, c2 = self.profile.tail
        assert c2 == pytest.approx(1.0, rel=5e-3)
        assert c1 == pytest.approx(1.0, rel=5e-2)

    def test_coarse_step_leaves_unit_interval(self):
        """A step far above the layer width overshoots and must be refined."""
        with pytest.raises(ProfileStepError):
            solve_profile(JumpSpec.from_slopes(-3.0, 3.0), T=10.0, step=5.0)

    def test_invalid_arguments(self):
        """Degenerate jumps and non-positive T or step are rejected."""
        with pytest.raises(DegenerateJumpError):
            solve_profile(JumpSpec.from_slopes(1.0, 1.0))
        with pytest.raises(ConfigError):
            solve_profile(self.unit, T=0.0)
        with pytest.raises(ConfigError):
            solve_profile(self.unit, step=-1e-3)

    def test_evaluate_beyond_horizon(self):
        """Outside [-T, T] the profile is continued by its limits."""
        assert self.profile.evaluate(50.0) == 1.0
        assert self.profile.evaluate(-50.0) == 0.0
        assert float(self.profile.evaluate(1.3)) == pytest.approx(logistic(1.3, 1.0), abs=1e-10)

    def test_lower_tail_keeps_precision(self):
        """1 - g(t) is read from g(-t)."""
        assert float(self.profile.lower_tail(8.0)) == pytest.approx(logistic(-8.0, 1.0), rel=1e-6)

    def test_line_energy_is_jump_cost(self):
        """The unscaled layer carries exactly the sharp cost."""
        assert line_energy(self.profile) == pytest.approx(2.0 / 3.0, rel=1e-6)
        shifted = solve_profile(self.shifted, T=10.0, step=1e-3)
        assert line_energy(shifted) == pytest.approx(math.sqrt(2.0) / 3.0, rel=1e-6)


class TestWellPotential:
    """Test cases for W and the integrator."""

    def test_value_at_midpoint(self):
        """W(1/2) = |p|/8 for the unit jump."""
        assert well_potential(0.5, JumpSpec.from_slopes(-1.0, 1.0)) == pytest.approx(0.25)

    def test_reduces_to_logistic_rhs(self):
        """W(g) = |p| g (1 - g)/2 numerically as well."""
        j = JumpSpec.from_slopes(0.3, -1.4)
        g = np.linspace(0.0, 1.0, 11)
        assert np.allclose(well_potential(g, j), 0.5 * j.p_norm * g * (1.0 - g), atol=1e-14)

    def test_identity_on_random_pairs(self):
        """W(g) = |p| g (1 - g)/2 to 1e-12 for random parabola states and g in [0, 1]."""
        rng = np.random.default_rng(7)
        g = np.linspace(0.0, 1.0, 101)
        for _ in range(25):
            a_minus, a_plus = rng.uniform(-3.0, 3.0, size=2)
            if abs(a_plus - a_minus) < 0.5:
                continue
            j = JumpSpec.from_slopes(a_minus, a_plus)
            assert np.max(np.abs(well_potential(g, j) - 0.5 * j.p_norm * g * (1.0 - g))) < 1e-12

    def test_symbolic_identity(self):
        """The reduction holds for every pair of parabola states."""
        assert verify_well_identity()

    def test_rk4_step(self):
        """One step of y' = y is exp(h) to fifth order."""
        h = 0.1
        assert rk4_step(lambda y: y, 1.0, h) == pytest.approx(math.exp(h), abs=1e-6)

    def test_profiles_are_cached(self):
        """Repeated requests share the same solve."""
        assert cached_profile(-1.0, 1.0, 10.0, 1e-3) is cached_profile(-1.0, 1.0, 10.0, 1e-3)

    def test_profile_for_covers_horizon(self):
        """Long horizons extend T beyond the default 10."""
        profile = profile_for(JumpSpec.from_slopes(-1.0, 1.0), 15.0)
        assert profile.horizon >= 15.0
