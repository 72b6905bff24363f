"""The transition-layer ODE g' = W(g), g(0) = 1/2, and its tail constants.

W(g) = |g p2 + m2- - (g p1 + m1-)^2/2| / (p1 n1) reduces on the parabola to |p| g(1-g)/2,
so the exact profile is the logistic curve 1/(1 + exp(-|p| t/2)).
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
import sympy
from scipy import stats
from scipy.integrate import simpson
from scipy.interpolate import CubicHermiteSpline

from ..errors import ConfigError, ProfileStepError
from ..jump.states import JumpSpec

logger = logging.getLogger(__name__)

EXIT_TOLERANCE = 1e-9
TAIL_WINDOW = (0.5, 0.9)
TAIL_FLOOR = 1e-14


def well_potential(g, j: JumpSpec):
    """W(g); accepts scalars or arrays and is defined for every real g."""
    j.require_jump()
    p1, p2 = j.p
    m1, m2 = j.minus.m
    n1, _ = j.n
    return np.abs(g * p2 + m2 - (g * p1 + m1) ** 2 / 2.0) / (p1 * n1)


def _scalar_well(j: JumpSpec) -> Callable[[float], float]:
    j.require_jump()
    p1, p2 = j.p
    m1, m2 = j.minus.m
    denominator = p1 * j.n[0]

    def rhs(g: float) -> float:
        return abs(g * p2 + m2 - (g * p1 + m1) ** 2 / 2.0) / denominator

    return rhs


def verify_well_identity() -> bool:
    """Symbolic check that W(g) = |p| g (1 - g)/2 whenever both states lie on the parabola."""
    g, a_minus, a_plus = sympy.symbols("g a_minus a_plus", real=True)
    p1 = a_plus - a_minus
    p2 = (a_plus**2 - a_minus**2) / 2
    inner = g * p2 + a_minus**2 / 2 - (g * p1 + a_minus) ** 2 / 2
    # |p| / (p1 n1) = |p|^2 / p1^2, so compare the signed inner term against p1^2 g(1-g)/2.
    return sympy.simplify(inner - p1**2 * g * (1 - g) / 2) == 0


def rk4_step(f: Callable[[float], float], y: float, h: float) -> float:
    """One classical fourth-order Runge-Kutta step for the autonomous ODE y' = f(y)."""
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


@dataclass
class Profile1D:
    """Samples of g on a uniform grid over [-T, T] with the fitted tail constants (c1, c2)."""

    t_grid: np.ndarray
    g: np.ndarray
    jump: JumpSpec
    ode_step: float
    tail: Tuple[float, float]
    _spline: Optional[CubicHermiteSpline] = field(default=None, repr=False, compare=False)

    @property
    def horizon(self) -> float:
        return float(self.t_grid[-1])

    @property
    def slope(self) -> np.ndarray:
        """g' on the samples, taken from the ODE rather than differenced."""
        return well_potential(self.g, self.jump)

    @property
    def spline(self) -> CubicHermiteSpline:
        # Hermite data uses the exact ODE slopes, so interpolation is fourth order.
        if self._spline is None:
            self._spline = CubicHermiteSpline(self.t_grid, self.g, self.slope)
        return self._spline

    def evaluate(self, t) -> np.ndarray:
        """g(t); clamped to 0 below -T and to 1 above T."""
        t = np.asarray(t, dtype=float)
        inside = np.clip(t, -self.horizon, self.horizon)
        values = self.spline(inside)
        return np.where(t > self.horizon, 1.0, np.where(t < -self.horizon, 0.0, values))

    def lower_tail(self, t) -> np.ndarray:
        """1 - g(t) for t >= 0 computed as g(-t), which keeps full relative precision."""
        return self.evaluate(-np.asarray(t, dtype=float))

    def antiderivative(self, t) -> np.ndarray:
        """Integral of g from 0 to t (for |t| within the horizon)."""
        t = np.asarray(t, dtype=float)
        integral = self.spline.antiderivative()
        return integral(t) - integral(0.0)


def _fit_tail(t: np.ndarray, tail: np.ndarray, horizon: float, side: str) -> Tuple[float, float]:
    """Log-linear fit tail ~ c1 exp(-c2 |t|) on the window [0.5T, 0.9T]."""
    lo, hi = TAIL_WINDOW
    distance = np.abs(t)
    window = (distance >= lo * horizon) & (distance <= hi * horizon) & (tail > TAIL_FLOOR)
    if np.count_nonzero(window) < 3:
        logger.warning("Too few %s tail samples above %.0e; widening the fit window", side, TAIL_FLOOR)
        window = (distance >= 0.1 * horizon) & (tail > TAIL_FLOOR)
    if np.count_nonzero(window) < 3:
        raise ConfigError(f"Cannot fit the {side} tail: horizon {horizon} too long for double precision")
    fit = stats.linregress(distance[window], np.log(tail[window]))
    return float(math.exp(fit.intercept)), float(-fit.slope)


def solve_profile(j: JumpSpec, T: float = 10.0, step: float = 1e-3) -> Profile1D:
    """Integrate g' = W(g) from g(0) = 1/2 forward to T and backward to -T with RK4."""
    j.require_jump()
    if not (T > 0 and step > 0):
        raise ConfigError(f"T and step must be positive, got T={T}, step={step}")
    n_steps = max(1, int(round(T / step)))
    h = T / n_steps
    if abs(h - step) > 1e-12 * step:
        logger.info("Adjusted ODE step from %g to %g so that it divides T=%g", step, h, T)

    rhs = _scalar_well(j)
    forward = np.empty(n_steps + 1)
    backward = np.empty(n_steps + 1)
    forward[0] = backward[0] = 0.5
    for k in range(n_steps):
        forward[k + 1] = rk4_step(rhs, forward[k], h)
        backward[k + 1] = rk4_step(rhs, backward[k], -h)

    g = np.concatenate([backward[:0:-1], forward])
    t_grid = h * np.arange(-n_steps, n_steps + 1)
    if g.min() < -EXIT_TOLERANCE or g.max() > 1.0 + EXIT_TOLERANCE:
        raise ProfileStepError(
            f"Profile left [0, 1] (min {g.min():.3e}, max {g.max():.3e}); refine step {h}"
        )
    if np.any(np.diff(g) < 0.0):
        raise ProfileStepError(f"Profile is not monotone at step {h}; refine the step")

    positive = t_grid > 0
    c1_plus, c2_plus = _fit_tail(t_grid[positive], 1.0 - g[positive], T, "upper")
    c1_minus, c2_minus = _fit_tail(t_grid[~positive], g[~positive], T, "lower")
    tail = (max(c1_plus, c1_minus), min(c2_plus, c2_minus))
    logger.debug("Profile a-=%g a+=%g: tail constants c1=%.4g c2=%.4g", j.minus.a, j.plus.a, *tail)
    return Profile1D(t_grid, g, j, h, tail)


@lru_cache(maxsize=32)
def cached_profile(a_minus: float, a_plus: float, T: float, step: float) -> Profile1D:
    """Shared profiles for repeated ansatz builds; callers must not mutate the arrays."""
    return solve_profile(JumpSpec.from_slopes(a_minus, a_plus), T, step)


def profile_for(j: JumpSpec, horizon: float, step: float = 1e-3) -> Profile1D:
    """Cached profile covering at least [-horizon, horizon] (never shorter than T = 10)."""
    T = max(10.0, math.ceil(1.2 * horizon))
    return cached_profile(j.minus.a, j.plus.a, T, step)


def line_energy(profile: Profile1D) -> float:
    """Energy of the unscaled layer on the whole line (eps = 1), tails truncated at +-T.

    1/2 int C(g)^2 + (g' p1 n1)^2 dt with C(g) = g p2 + m2- - (g p1 + m1-)^2/2; equals the
    jump cost up to terms of order exp(-c2 T).
    """
    j = profile.jump
    p1, p2 = j.p
    m1, m2 = j.minus.m
    strain = profile.g * p2 + m2 - (profile.g * p1 + m1) ** 2 / 2.0
    bending = profile.slope * p1 * j.n[0]
    return float(0.5 * simpson(strain**2 + bending**2, x=profile.t_grid))
