"""Start from the interpolated one-dimensional competitor."""

import numpy as np

from ..cell_problem import CellProblem
from .base_initializer import BaseInitializer


class AnsatzInitializer(BaseInitializer):
    def get_name(self) -> str:
        return "ansatz"

    def get_description(self) -> str:
        return "Interpolated 1D transition layer g(s/eps) p + m-"

    def raw_values(self, cp: CellProblem) -> np.ndarray:
        return cp.ansatz.values.copy()
