"""The compression defect ||dz u - (dx u)^2/2||_L2 and its energy bound."""

from dataclasses import asdict, dataclass
from typing import Dict, Optional

import numpy as np

from ..core.grid import ScalarField
from ..core.quadrature import integrate
from ..energy.functional import energy_densities, energy_eps

# Both sides use the same quadrature; only the divide/multiply by eps separates them.
ROUNDING_SLACK = 8.0 * np.finfo(float).eps


@dataclass
class DefectBound:
    defect_squared: float
    bound: float
    holds: bool

    def to_dict(self) -> Dict:
        return asdict(self)


def compression_defect(u: ScalarField, mask: Optional[np.ndarray] = None) -> float:
    densities = energy_densities(u, 1.0)
    return float(np.sqrt(integrate(densities.strain**2, u.grid, mask)))


def defect_bound(u: ScalarField, eps: float) -> DefectBound:
    """defect^2 <= 2 eps E_eps(u); the slack is eps^2 ||dxx u||^2."""
    defect_squared = compression_defect(u) ** 2
    bound = 2.0 * eps * energy_eps(u, eps).total
    return DefectBound(defect_squared, bound, defect_squared <= bound * (1.0 + ROUNDING_SLACK))
