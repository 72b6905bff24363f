"""Base interface for cell-problem starting fields."""

from abc import ABC, abstractmethod
from typing import Dict

import numpy as np

from ..cell_problem import CellProblem


class BaseInitializer(ABC):
    """Abstract base class for initializers of the optimizer."""

    def __init__(self):
        self.name = self.get_name()

    @abstractmethod
    def get_name(self) -> str:
        """Tag used on the command line and in manifests."""

    @abstractmethod
    def get_description(self) -> str:
        """One-line description for listings."""

    @abstractmethod
    def raw_values(self, cp: CellProblem) -> np.ndarray:
        """Periodic part of u on the whole grid, before the pinned rows are imposed."""

    def initial_values(self, cp: CellProblem) -> np.ndarray:
        """raw_values with the pinned rows set to their boundary potentials."""
        return cp.apply_boundary(self.raw_values(cp))

    def describe(self) -> Dict:
        return {"name": self.get_name(), "description": self.get_description()}
