"""The one-dimensional competitor on the square R and its energy.

The gradient is G(s) p + m- with s = (x, z).nu; G follows the rescaled profile g(s/eps) for
|s| <= threshold and is linearly interpolated to 0 at s = -1/2 and to 1 at s = +1/2.
Because p is parallel to nu, G p + m- is curl free and the potential is

    u = (p.nu) A(s) + (m-.nu) s + (m-.tau) t,    A(s) = int_0^s G.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd

from ..core.grid import Grid2D, ScalarField, VectorField2
from ..errors import ConfigError, GridError
from ..energy.functional import check_epsilon
from ..jump.cost import jump_cost
from ..jump.states import JumpSpec
from .ode import Profile1D, profile_for, well_potential

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.25
FRAME_MATCH_TOL = 1e-12
GAUSS_ORDER = 8
QUADRATURE_TOL = 1e-12


def _check_threshold(threshold: float) -> float:
    threshold = float(threshold)
    if not 0.0 < threshold < 0.5:
        raise ConfigError(f"Interpolation threshold must lie in (0, 1/2), got {threshold}")
    return threshold


def _check_frame(j: JumpSpec, grid: Grid2D) -> None:
    nu = j.nu
    if abs(grid.nu[0] - nu[0]) > FRAME_MATCH_TOL or abs(grid.nu[1] - nu[1]) > FRAME_MATCH_TOL:
        raise GridError(f"Grid frame nu={grid.nu} does not match the jump normal {nu}")


@dataclass
class _BandEnds:
    """g at the band edges: lower = g(-threshold/eps), upper_gap = 1 - g(threshold/eps)."""

    lower: float
    upper_gap: float
    threshold: float

    @property
    def width(self) -> float:
        return 0.5 - self.threshold


def _band_ends(profile: Profile1D, eps: float, threshold: float) -> _BandEnds:
    edge = threshold / eps
    lower = float(profile.evaluate(-edge))
    upper_gap = float(profile.lower_tail(edge))
    return _BandEnds(lower, upper_gap, threshold)


def _interpolant(s: np.ndarray, profile: Profile1D, eps: float, ends: _BandEnds) -> np.ndarray:
    """G(s) on [-1/2, 1/2], extended by 0 and 1 outside."""
    theta, width = ends.threshold, ends.width
    middle = np.abs(s) <= theta
    upper = s > theta
    lower = s < -theta
    G = np.empty_like(s)
    G[middle] = profile.evaluate(s[middle] / eps)
    G[upper] = 1.0 - ends.upper_gap * np.clip(0.5 - s[upper], 0.0, None) / width
    G[lower] = ends.lower * np.clip(s[lower] + 0.5, 0.0, None) / width
    return G


def _primitive(s: np.ndarray, profile: Profile1D, eps: float, ends: _BandEnds) -> np.ndarray:
    """A(s) = int_0^s G, closed form on the linear bands and the profile spline in between."""
    theta, width = ends.threshold, ends.width
    clipped = np.clip(s, -0.5, 0.5)
    A = np.empty_like(s)

    middle = np.abs(clipped) <= theta
    A[middle] = eps * profile.antiderivative(clipped[middle] / eps)

    a_top = eps * float(profile.antiderivative(theta / eps))
    a_bottom = eps * float(profile.antiderivative(-theta / eps))

    upper = clipped > theta
    gap = 0.5 - clipped[upper]
    A[upper] = a_top + (clipped[upper] - theta) - ends.upper_gap * (width**2 - gap**2) / (2.0 * width)

    lower = clipped < -theta
    rise = clipped[lower] + 0.5
    A[lower] = a_bottom - ends.lower * (width**2 - rise**2) / (2.0 * width)

    return A + np.clip(s - 0.5, 0.0, None)


def build_ansatz(
    j: JumpSpec,
    eps: float,
    grid: Grid2D,
    profile: Optional[Profile1D] = None,
    threshold: float = DEFAULT_THRESHOLD,
) -> Tuple[ScalarField, VectorField2]:
    """Potential and exact gradient of the interpolated one-dimensional competitor."""
    eps = check_epsilon(eps)
    threshold = _check_threshold(threshold)
    j.require_jump()
    _check_frame(j, grid)
    if profile is None:
        profile = profile_for(j, threshold / eps)
    elif profile.horizon < threshold / eps:
        logger.warning(
            "Profile horizon %g is shorter than threshold/eps = %g; the middle band is clipped",
            profile.horizon,
            threshold / eps,
        )

    ends = _band_ends(profile, eps, threshold)
    s = grid.s()
    G = _interpolant(s, profile, eps, ends)

    (p1, p2), (m1, m2) = j.p, j.minus.m
    nu, tau = grid.nu, grid.tau
    p_nu = p1 * nu[0] + p2 * nu[1]
    m_nu = m1 * nu[0] + m2 * nu[1]
    m_tau = m1 * tau[0] + m2 * tau[1]

    potential = p_nu * _primitive(s, profile, eps, ends) + m_nu * s
    values = np.broadcast_to(potential[:, None], grid.shape).copy()
    u = ScalarField(grid, values, tau_slope=m_tau)

    first = np.broadcast_to((G * p1 + m1)[:, None], grid.shape)
    second = np.broadcast_to((G * p2 + m2)[:, None], grid.shape)
    grad = VectorField2(grid, first, second, label="ansatz gradient")
    logger.debug("Built ansatz eps=%g on %dx%d grid (band ends %.3e, %.3e)", eps, grid.n_s, grid.n_t, ends.lower, ends.upper_gap)
    return u, grad


def sharp_limit_field(j: JumpSpec, grid: Grid2D) -> Tuple[ScalarField, VectorField2]:
    """The eps -> 0 limit: gradient m- for s < 0, m+ for s > 0 and the chord midpoint on s = 0."""
    _check_frame(j, grid)
    s = grid.s()
    G = np.where(s > 0.0, 1.0, np.where(s < 0.0, 0.0, 0.5))
    (p1, p2), (m1, m2) = j.p, j.minus.m
    nu, tau = grid.nu, grid.tau
    p_nu = p1 * nu[0] + p2 * nu[1]
    m_nu = m1 * nu[0] + m2 * nu[1]
    m_tau = m1 * tau[0] + m2 * tau[1]
    potential = p_nu * np.clip(s, 0.0, None) + m_nu * s
    u = ScalarField(grid, np.broadcast_to(potential[:, None], grid.shape).copy(), tau_slope=m_tau)
    grad = VectorField2(
        grid,
        np.broadcast_to((G * p1 + m1)[:, None], grid.shape),
        np.broadcast_to((G * p2 + m2)[:, None], grid.shape),
        label="sharp limit gradient",
    )
    return u, grad


@dataclass
class OneDEnergy:
    """Pieces of the one-dimensional cell energy on R.

    middle is the quadrature over |s| <= threshold and outer the two interpolated bands.
    On the exact profile the middle band equals cost - missing, where missing is the part of
    the cost integral carried by g outside [g(-threshold/eps), g(threshold/eps)]; so
    excess = outer - missing = total - cost holds to full relative precision even where
    total - cost is below the rounding unit of total.
    """

    epsilon: float
    total: float
    middle: float
    outer: float
    cost: float
    missing: float
    excess: float
    middle_defect: float
    quad_points: int

    def to_dict(self) -> Dict:
        return asdict(self)


def _cost_tail(p1: float, p_norm: float, gap: float) -> float:
    """int_0^gap p1 n1 C(sigma) d sigma with C = p1^2 sigma (1 - sigma)/2."""
    return p1**4 / (2.0 * p_norm) * (gap**2 / 2.0 - gap**3 / 3.0)


def _outer_band(p1: float, n1: float, eps: float, gap: float, width: float) -> float:
    """Energy of one interpolated band where 1 - G (or G) runs linearly from 0 to gap."""
    nodes, weights = np.polynomial.legendre.leggauss(GAUSS_ORDER)
    h = 0.5 * gap * (nodes + 1.0)
    strain = 0.5 * p1 * p1 * h * (1.0 - h)
    # d sigma = (width/gap) dh maps [0, gap] onto the band; the Gauss factor gap/2 cancels
    compression = 0.25 * width * np.sum(weights * strain**2) / eps
    bending = 0.5 * eps * (gap / width) ** 2 * p1**2 * n1**2 * width
    return float(compression + bending)


def _middle_band(profile: Profile1D, edge: float, quad_points: int) -> float:
    """int_{-edge}^{edge} C(g(t))^2 dt on composite Gauss-Legendre panels."""
    j = profile.jump
    p1, p2 = j.p
    m1, m2 = j.minus.m
    panels = max(1, quad_points // GAUSS_ORDER)
    nodes, weights = np.polynomial.legendre.leggauss(GAUSS_ORDER)
    breaks = np.linspace(-edge, edge, panels + 1)
    half = 0.5 * np.diff(breaks)
    centers = 0.5 * (breaks[1:] + breaks[:-1])
    t = (centers[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    g = profile.evaluate(t)
    strain = g * p2 + m2 - (g * p1 + m1) ** 2 / 2.0
    return float(np.sum(w * strain**2))


def oned_energy_breakdown(
    j: JumpSpec,
    eps: float,
    quad_points: int = 2048,
    threshold: float = DEFAULT_THRESHOLD,
    profile: Optional[Profile1D] = None,
    tol: float = QUADRATURE_TOL,
) -> OneDEnergy:
    """r_eps^1D split into its bands; t-independent, so a 1D integral over s in [-1/2, 1/2]."""
    eps = check_epsilon(eps)
    threshold = _check_threshold(threshold)
    j.require_jump()
    if quad_points < 2 * GAUSS_ORDER:
        raise ConfigError(f"quad_points must be at least {2 * GAUSS_ORDER}, got {quad_points}")
    edge = threshold / eps
    if profile is None:
        profile = profile_for(j, edge)
    ends = _band_ends(profile, eps, threshold)

    # In the middle band W p1 n1 = |C|, so the density is C^2/eps and t = s/eps leaves C^2 dt.
    middle = _middle_band(profile, edge, quad_points)
    coarse = _middle_band(profile, edge, quad_points // 2)
    if abs(middle - coarse) > tol * max(1.0, abs(middle)):
        raise ConfigError(
            f"quad_points={quad_points} too small: middle band changes by {abs(middle - coarse):.3e} when halved"
        )

    p1 = j.p[0]
    n1 = j.n[0]
    outer = _outer_band(p1, n1, eps, ends.lower, ends.width) + _outer_band(p1, n1, eps, ends.upper_gap, ends.width)
    cost = jump_cost(j)
    missing = _cost_tail(p1, j.p_norm, ends.lower) + _cost_tail(p1, j.p_norm, ends.upper_gap)
    total = middle + outer
    return OneDEnergy(
        epsilon=eps,
        total=total,
        middle=middle,
        outer=outer,
        cost=cost,
        missing=missing,
        excess=outer - missing,
        middle_defect=middle - (cost - missing),
        quad_points=quad_points,
    )


def oned_energy(j: JumpSpec, eps: float, quad_points: int = 2048, threshold: float = DEFAULT_THRESHOLD) -> float:
    """r_eps^1D, the energy of the one-dimensional competitor on R."""
    return oned_energy_breakdown(j, eps, quad_points, threshold).total


def profile_table(profile: Profile1D) -> pd.DataFrame:
    """Profile samples with the well potential W(g) = g'(t)."""
    return pd.DataFrame(
        {"t": profile.t_grid, "g": profile.g, "W": well_potential(profile.g, profile.jump)}
    )


def profile_metadata(profile: Profile1D) -> Dict:
    """JSON sidecar for a profile table."""
    c1, c2 = profile.tail
    return {
        "jump": profile.jump.to_dict(),
        "ode_step": profile.ode_step,
        "horizon": profile.horizon,
        "tail": {"c1": c1, "c2": c2},
        "logistic_rate": 0.5 * profile.jump.p_norm,
        "samples": int(profile.t_grid.size),
    }
