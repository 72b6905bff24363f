"""Linear start plus seeded noise on the free rows."""

import numpy as np

from ..cell_problem import CellProblem
from .linear_initializer import LinearInitializer

DEFAULT_AMPLITUDE = 1e-2


class RandomInitializer(LinearInitializer):
    def __init__(self, seed: int, amplitude: float = DEFAULT_AMPLITUDE):
        self.seed = seed
        self.amplitude = amplitude
        super().__init__()

    def get_name(self) -> str:
        return "random"

    def get_description(self) -> str:
        return "Linear interpolation plus uniform noise (seeded)"

    def raw_values(self, cp: CellProblem) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        noise = self.amplitude * rng.uniform(-1.0, 1.0, size=cp.grid.shape)
        return super().raw_values(cp) + noise
