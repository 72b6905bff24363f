"""Start from the linear blend of the two boundary potentials across the cell."""

import numpy as np

from ..cell_problem import CellProblem
from .base_initializer import BaseInitializer


class LinearInitializer(BaseInitializer):
    """(1 - lam) phi- + lam phi+ with lam running from 0 to 1 across s.

    For a+- = +-1 this is a parabola in s whose slope crosses the chord midpoint once, at s = 0.
    """

    def get_name(self) -> str:
        return "linear"

    def get_description(self) -> str:
        return "Linear interpolation between the boundary potentials"

    def raw_values(self, cp: CellProblem) -> np.ndarray:
        minus, plus = cp.boundary_potentials()
        s = cp.grid.s()
        lam = (s - s[0]) / (s[-1] - s[0])
        blend = (1.0 - lam) * minus + lam * plus
        return np.broadcast_to(blend[:, None], cp.grid.shape).copy()
