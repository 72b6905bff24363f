"""Per-eps measurements of ansatz sequences and the rates fitted across them."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Sequence

import pandas as pd

from ..core.grid import Grid2D, ScalarField
from ..energy.functional import check_epsilon, energy_eps
from ..errors import ConfigError
from ..jump.cost import jump_cost
from ..jump.states import JumpSpec
from ..profile.ansatz import DEFAULT_THRESHOLD, build_ansatz, oned_energy_breakdown, sharp_limit_field
from .defect import compression_defect
from .entropy import entropy_production, jump_production
from .norms import concentration_radius, gradient_distance, lp_norm, rate_fit

logger = logging.getLogger(__name__)

DEFAULT_P_LIST = (2.0, 6.0, 8.0)
CONCENTRATION_FRACTION = 0.95


@dataclass
class SequenceRecord:
    eps: float
    n_s: int
    compression: float
    bending: float
    total: float
    bps_square: float
    bps_flux: float
    residual: float
    defect_norm: float
    production_mass: float
    concentration_radius: float
    recovery_distance: float
    oned_energy: float
    oned_excess: float
    lp_norms: Dict[str, float] = field(default_factory=dict)

    def to_row(self) -> Dict[str, float]:
        row = asdict(self)
        norms = row.pop("lp_norms")
        row.update({f"dx_u_L{key}": value for key, value in norms.items()})
        return row


@dataclass
class SequenceReport:
    """Records sorted by decreasing eps plus fitted rates."""

    jump: JumpSpec
    records: List[SequenceRecord]
    rates: Dict[str, Dict[str, float]] = field(default_factory=dict)

    def __post_init__(self):
        self.records = sorted(self.records, key=lambda record: -record.eps)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([record.to_row() for record in self.records])

    def summary(self) -> Dict:
        return {
            "jump": self.jump.to_dict(),
            "jump_cost": jump_cost(self.jump),
            "jump_production": jump_production(self.jump),
            "eps": [record.eps for record in self.records],
            "rates": self.rates,
        }

    def fit_rates(self) -> Dict[str, Dict[str, float]]:
        """log(r1D - cost) against 1/eps and log(defect) against log(eps)."""
        rates: Dict[str, Dict[str, float]] = {}
        usable = [r for r in self.records if r.oned_excess > 0.0]
        if len(usable) >= 3:
            slope, correlation = rate_fit([1.0 / r.eps for r in usable], [math.log(r.oned_excess) for r in usable])
            rates["excess_vs_inverse_eps"] = {"slope": slope, "correlation": correlation}
        usable = [r for r in self.records if r.defect_norm > 0.0]
        if len(usable) >= 3:
            slope, correlation = rate_fit([math.log(r.eps) for r in usable], [math.log(r.defect_norm) for r in usable])
            rates["defect_vs_log_eps"] = {"slope": slope, "correlation": correlation}
        self.rates = rates
        return rates


def measure_ansatz(
    j: JumpSpec,
    eps: float,
    resolution: float = 25.0,
    n_t: int = 4,
    p_list: Sequence[float] = DEFAULT_P_LIST,
    threshold: float = DEFAULT_THRESHOLD,
    quad_points: int = 2048,
) -> SequenceRecord:
    """One sweep member: the ansatz on the cell with about `resolution` samples per eps."""
    eps = check_epsilon(eps)
    n_s = int(math.ceil(resolution / eps)) + 1
    grid = Grid2D.cell(n_s, n_t, nu=j.nu)
    u, grad = build_ansatz(j, eps, grid, threshold=threshold)
    breakdown = energy_eps(u, eps)
    production, mass = entropy_production(u)
    _, limit_grad = sharp_limit_field(j, grid)
    oned = oned_energy_breakdown(j, eps, quad_points, threshold)
    slope_field = ScalarField(grid, grad.first)
    record = SequenceRecord(
        eps=eps,
        n_s=n_s,
        compression=breakdown.compression,
        bending=breakdown.bending,
        total=breakdown.total,
        bps_square=breakdown.bps_square,
        bps_flux=breakdown.bps_flux,
        residual=breakdown.residual,
        defect_norm=compression_defect(u),
        production_mass=mass,
        concentration_radius=concentration_radius(production, fraction=CONCENTRATION_FRACTION),
        recovery_distance=gradient_distance(grad, limit_grad, 1.0),
        oned_energy=oned.total,
        oned_excess=oned.excess,
        lp_norms={f"{p:g}": lp_norm(slope_field, p) for p in p_list},
    )
    logger.info("eps=%g: total=%.10g, defect=%.3e, production mass=%.6g", eps, record.total, record.defect_norm, mass)
    return record


def sweep_ansatz(
    j: JumpSpec,
    eps_list: Sequence[float],
    resolution: float = 25.0,
    n_t: int = 4,
    p_list: Sequence[float] = DEFAULT_P_LIST,
    threads: int = 1,
    threshold: float = DEFAULT_THRESHOLD,
    quad_points: int = 2048,
) -> SequenceReport:
    """Measure every eps (concurrently when threads > 1) and fit the rates.

    Results come back in submission order, so the report does not depend on threads.
    """
    j.require_jump()
    if not eps_list:
        raise ConfigError("eps_list is empty")
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")
    eps_values = sorted({check_epsilon(eps) for eps in eps_list}, reverse=True)

    def member(eps: float) -> SequenceRecord:
        return measure_ansatz(j, eps, resolution, n_t, p_list, threshold, quad_points)

    if threads == 1:
        records = [member(eps) for eps in eps_values]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(member, eps_values))
    report = SequenceReport(j, records)
    report.fit_rates()
    return report
