"""The cell problem on R: minimize E_eps with gradient m- / m+ on the nu faces, period 1 along tau."""

import logging
import math
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..core.grid import Grid2D, ScalarField
from ..energy.functional import EnergyBreakdown, check_epsilon
from ..errors import ConfigError, GridError
from ..jump.states import JumpSpec
from ..profile.ansatz import DEFAULT_THRESHOLD, build_ansatz

logger = logging.getLogger(__name__)

PINNED_ROWS = 2
SAMPLES_PER_EPS = 8
CELL_TOL = 1e-12


@dataclass
class OptimizerSettings:
    """Knobs of the L-BFGS / Armijo loop.

    gradient_tolerance bounds max |dE/du_ij| / w_ij over free nodes, i.e. the gradient
    measured per unit cell area; relative_tolerance scales the same norm at the start and
    the larger of the two stops the loop. precondition_every = 0 keeps the first factors.
    """

    max_iterations: int = 20000
    gradient_tolerance: float = 1e-8
    relative_tolerance: float = 1e-6
    history: int = 8
    armijo_factor: float = 0.5
    armijo_c: float = 1e-4
    max_backtracks: int = 60
    quasi_newton: bool = True
    log_every: int = 500
    gradient_check_every: int = 0
    precondition: bool = True
    precondition_every: int = 20

    def validate(self) -> "OptimizerSettings":
        if self.max_iterations < 0:
            raise ConfigError(f"max_iterations must be >= 0, got {self.max_iterations}")
        if not self.gradient_tolerance > 0:
            raise ConfigError(f"gradient_tolerance must be positive, got {self.gradient_tolerance}")
        if not 0.0 <= self.relative_tolerance < 1.0:
            raise ConfigError(f"relative_tolerance must lie in [0, 1), got {self.relative_tolerance}")
        if self.history < 1:
            raise ConfigError(f"history must be >= 1, got {self.history}")
        if not 0.0 < self.armijo_factor < 1.0:
            raise ConfigError(f"armijo_factor must lie in (0, 1), got {self.armijo_factor}")
        if not 0.0 < self.armijo_c < 1.0:
            raise ConfigError(f"armijo_c must lie in (0, 1), got {self.armijo_c}")
        if self.max_backtracks < 1:
            raise ConfigError(f"max_backtracks must be >= 1, got {self.max_backtracks}")
        if self.log_every < 1 or self.gradient_check_every < 0 or self.precondition_every < 0:
            raise ConfigError("log_every must be >= 1, gradient_check_every and precondition_every >= 0")
        return self

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass
class CellProblem:
    """Jump data, eps and a nu-aligned cell grid covering |s| <= 1/2, periodic in t."""

    jump: JumpSpec
    eps: float
    grid: Grid2D
    settings: OptimizerSettings = field(default_factory=OptimizerSettings)
    initializer: str = "ansatz"
    seed: Optional[int] = None
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        self.eps = check_epsilon(self.eps)
        self.jump.require_jump()
        self.settings.validate()
        grid = self.grid
        if not grid.periodic_t:
            raise GridError("The cell grid must be periodic along tau")
        nu = self.jump.nu
        if abs(grid.nu[0] - nu[0]) > CELL_TOL or abs(grid.nu[1] - nu[1]) > CELL_TOL:
            raise GridError(f"Cell frame nu={grid.nu} does not match the jump normal {nu}")
        if abs(grid.s0 + 0.5) > CELL_TOL or abs(grid.length_s - 1.0) > CELL_TOL:
            raise GridError(f"Cell must span s in [-1/2, 1/2], got s0={grid.s0}, length {grid.length_s}")
        if abs(grid.length_t - 1.0) > CELL_TOL:
            raise GridError(f"Cell period along tau must be 1, got {grid.length_t}")
        if grid.n_s < 2 * PINNED_ROWS + 1 or grid.n_t < 3:
            raise GridError(f"Cell grid {grid.n_s}x{grid.n_t} leaves no free rows")
        if self.initializer == "random" and self.seed is None:
            raise ConfigError("The random initializer needs an explicit seed")
        if grid.h_s > self.eps / SAMPLES_PER_EPS:
            logger.warning(
                "Under-resolved layer: h_s = %.3g exceeds eps/%d = %.3g (n_s >= %d recommended)",
                grid.h_s,
                SAMPLES_PER_EPS,
                self.eps / SAMPLES_PER_EPS,
                math.ceil(SAMPLES_PER_EPS / self.eps) + 1,
            )

    @classmethod
    def on_cell(
        cls,
        jump: JumpSpec,
        eps: float,
        n_s: int,
        n_t: int,
        settings: Optional[OptimizerSettings] = None,
        initializer: str = "ansatz",
        seed: Optional[int] = None,
        threshold: float = DEFAULT_THRESHOLD,
    ) -> "CellProblem":
        grid = Grid2D.cell(n_s, n_t, nu=jump.require_jump().nu)
        return cls(jump, eps, grid, settings or OptimizerSettings(), initializer, seed, threshold)

    @cached_property
    def pinned(self) -> np.ndarray:
        """Boolean (n_s, n_t) mask of the two rows on each nu face."""
        mask = np.zeros(self.grid.shape, dtype=bool)
        mask[:PINNED_ROWS] = True
        mask[-PINNED_ROWS:] = True
        return mask

    @cached_property
    def ansatz(self) -> ScalarField:
        u, _ = build_ansatz(self.jump, self.eps, self.grid, threshold=self.threshold)
        return u

    @property
    def tau_slope(self) -> float:
        """m.tau, shared by both states."""
        return self.jump.tangential_component()

    def boundary_potentials(self) -> Tuple[np.ndarray, np.ndarray]:
        """Affine potentials of m- and m+ over every s row, anchored at the ansatz face values."""
        j, nu = self.jump, self.grid.nu
        s = self.grid.s()
        minus_slope = j.minus.m[0] * nu[0] + j.minus.m[1] * nu[1]
        plus_slope = j.plus.m[0] * nu[0] + j.plus.m[1] * nu[1]
        minus = float(self.ansatz.values[0, 0]) + minus_slope * (s - s[0])
        plus = float(self.ansatz.values[-1, 0]) + plus_slope * (s - s[-1])
        return minus, plus

    @cached_property
    def boundary_rows(self) -> np.ndarray:
        """The boundary potentials on the pinned rows, zero elsewhere."""
        minus, plus = self.boundary_potentials()
        rows = np.zeros(self.grid.shape)
        rows[:PINNED_ROWS] = minus[:PINNED_ROWS, None]
        rows[-PINNED_ROWS:] = plus[-PINNED_ROWS:, None]
        return rows

    def face_values(self) -> List[float]:
        return [float(self.boundary_rows[0, 0]), float(self.boundary_rows[-1, 0])]

    def apply_boundary(self, values: np.ndarray) -> np.ndarray:
        """Copy of values with the pinned rows reset."""
        values = np.array(values, dtype=float, copy=True)
        values[self.pinned] = self.boundary_rows[self.pinned]
        return values

    def field(self, values: np.ndarray) -> ScalarField:
        return ScalarField(self.grid, values, tau_slope=self.tau_slope)

    def describe(self) -> Dict:
        return {
            "jump": self.jump.to_dict(),
            "eps": self.eps,
            "grid": {"n_s": self.grid.n_s, "n_t": self.grid.n_t, "h_s": self.grid.h_s, "h_t": self.grid.h_t},
            "settings": self.settings.to_dict(),
            "initializer": self.initializer,
            "seed": self.seed,
            "threshold": self.threshold,
        }


@dataclass
class MinimizeResult:
    u_star: ScalarField
    breakdown: EnergyBreakdown
    iterations: int
    final_gradient_norm: float
    converged: bool
    initial_energy: float
    stop_reason: str = ""
    energy_history: List[float] = field(default_factory=list)
    tolerance: float = 0.0

    def to_dict(self) -> Dict:
        return {
            "breakdown": self.breakdown.to_dict(),
            "iterations": self.iterations,
            "final_gradient_norm": self.final_gradient_norm,
            "converged": self.converged,
            "initial_energy": self.initial_energy,
            "stop_reason": self.stop_reason,
            "tolerance": self.tolerance,
        }
