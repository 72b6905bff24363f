"""Run processor that coordinates solves, measurements and the files a run leaves behind."""

import json
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Union

import pandas as pd

from ..config import RunConfig, validate_run_config
from ..core.field_io import save_field
from ..core.grid import ScalarField
from ..diagnostics.defect import defect_bound
from ..diagnostics.norms import negative_sobolev_norm
from ..diagnostics.report import sweep_ansatz
from ..energy.functional import energy_densities
from ..errors import ConfigError
from ..formatters.manifest import MANIFEST_NAME, RunManifest
from ..formatters.plot_script import PlotScriptFormatter
from ..formatters.tables import ResultWriter
from ..jump.cost import check_jump_condition, evaluate_jump_cost, sigma_jump_cost, small_jump_coefficient
from ..jump.states import JumpSpec
from ..minimize.cell_problem import CellProblem
from ..minimize.gradient import discrete_energy
from ..minimize.initializers.initializer_factory import InitializerFactory
from ..minimize.optimizer import minimize_energy
from ..profile.ansatz import oned_energy_breakdown, profile_metadata, profile_table
from ..profile.ode import line_energy, solve_profile
from .check_suite import CheckSuite

logger = logging.getLogger(__name__)

LOWER_SANDWICH_SLACK = 0.02
UPPER_SANDWICH_SLACK = 1e-12
PLOT_SCRIPT_NAME = "plot_results.py"


class RunProcessor:
    """Main processor behind every subcommand; each process_* call ends with a manifest."""

    def __init__(self, seed: int = 0):
        self.initializer_factory = InitializerFactory()
        self.check_suite = CheckSuite(seed)
        self.plot_formatter = PlotScriptFormatter()

    def _start(self, config: RunConfig) -> ResultWriter:
        """Writer for the output directory, with any manifest of an earlier run removed."""
        writer = ResultWriter(config.out)
        stale = writer.directory / MANIFEST_NAME
        if stale.exists():
            stale.unlink()
        return writer

    def _finish(self, command: str, config: RunConfig, writer: ResultWriter, results: Dict, acceptance: Dict[str, bool]) -> RunManifest:
        manifest = RunManifest(
            command,
            config.to_dict(),
            results=results,
            artifacts=list(writer.written),
            acceptance={name: bool(verdict) for name, verdict in acceptance.items()},
        )
        path = manifest.write(writer.directory)
        logger.info("%s finished (%s); manifest %s", command, "pass" if manifest.passed else "FAIL", path)
        return manifest

    def _jump(self, config: RunConfig) -> JumpSpec:
        return JumpSpec.from_slopes(config.a_minus, config.a_plus)

    def jumpcost_summary(self, a_minus: float, a_plus: float) -> Dict:
        """Both closed forms of the cost plus the cross-checks that come with them."""
        j = JumpSpec.from_slopes(a_minus, a_plus)
        summary = evaluate_jump_cost(j).to_dict()
        summary["jump"] = j.to_dict()
        summary["sigma_cost"] = sigma_jump_cost(j)
        summary["jump_condition"] = check_jump_condition(j)
        summary["small_jump_coefficient"] = small_jump_coefficient(0.5 * (a_minus + a_plus))
        return summary

    def process_jumpcost(self, config: RunConfig, write: bool = False) -> Dict:
        summary = self.jumpcost_summary(config.a_minus, config.a_plus)
        if write:
            writer = self._start(config)
            writer.write_json(summary, "jumpcost.json")
            self._finish("jumpcost", config, writer, {"cost": summary["cost"]}, {})
        return summary

    def process_profile(self, config: RunConfig) -> RunManifest:
        """Solve the layer ODE once and evaluate r_eps^1D for every requested eps."""
        j = self._jump(config).require_jump()
        eps_values = sorted(set(config.eps_list or [config.eps]), reverse=True)
        horizon = max(config.horizon, math.ceil(1.2 * config.threshold / eps_values[-1]))
        logger.info("Solving the layer profile for a-=%g, a+=%g on [-%g, %g]", j.minus.a, j.plus.a, horizon, horizon)
        profile = solve_profile(j, horizon, config.ode_step)

        writer = self._start(config)
        writer.write_csv(profile_table(profile), "profile.csv")
        metadata = profile_metadata(profile)
        metadata["line_energy"] = line_energy(profile)
        writer.write_json(metadata, "profile.json")

        rows = []
        for eps in eps_values:
            oned = oned_energy_breakdown(j, eps, config.quad_points, config.threshold, profile=profile)
            row = oned.to_dict()
            row["error"] = oned.excess
            rows.append(row)
        writer.write_csv(pd.DataFrame(rows), "oned_energy.csv")

        errors = [row["error"] for row in rows]
        acceptance = {"excess_positive": all(error > 0.0 for error in errors)}
        if len(errors) > 1:
            acceptance["excess_decreasing"] = all(later < earlier for earlier, later in zip(errors, errors[1:]))
        results = {
            "cost": rows[0]["cost"],
            "line_energy": metadata["line_energy"],
            "oned_energy": {f"{row['epsilon']:g}": row["total"] for row in rows},
        }
        return self._finish("profile", config, writer, results, acceptance)

    def process_minimize(self, config: RunConfig) -> RunManifest:
        """Minimize on the cell and place the result between the sharp cost and the ansatz energy."""
        j = self._jump(config).require_jump()
        cp = CellProblem.on_cell(
            j,
            config.eps,
            config.resolved_n_s(),
            config.n_t,
            config.optimizer_settings(),
            config.initializer,
            config.seed,
            config.threshold,
        )
        result = minimize_energy(cp)
        oned = oned_energy_breakdown(j, cp.eps, config.quad_points, config.threshold)
        competitor = cp.field(cp.apply_boundary(cp.ansatz.values))
        ansatz_energy = discrete_energy(competitor, cp.eps, cp)
        total = result.breakdown.total
        sandwich = {
            "cost": oned.cost,
            "lower": oned.cost * (1.0 - LOWER_SANDWICH_SLACK),
            "total": total,
            "upper_discrete_ansatz": ansatz_energy + UPPER_SANDWICH_SLACK,
            "upper_oned": oned.total + UPPER_SANDWICH_SLACK,
        }
        bound = defect_bound(result.u_star, cp.eps)
        # indicative only: how far u* has left the t-invariant class
        strain = energy_densities(result.u_star, cp.eps).strain
        strain_oscillation = negative_sobolev_norm(ScalarField(cp.grid, strain))

        writer = self._start(config)
        summary = result.to_dict()
        summary.update(cp.describe())
        summary["sandwich"] = sandwich
        summary["defect_bound"] = bound.to_dict()
        summary["strain_h_minus_1_along_t"] = strain_oscillation
        writer.write_json(summary, "minimize.json")
        row = result.breakdown.to_dict()
        row.update({"iterations": result.iterations, "final_gradient_norm": result.final_gradient_norm})
        writer.write_csv(pd.DataFrame([row]), "minimize_energy.csv")
        history = pd.DataFrame({"iteration": range(len(result.energy_history)), "total": result.energy_history})
        writer.write_csv(history, "history.csv")
        writer.adopt(save_field(result.u_star, writer.directory / "u_star.txt"))

        acceptance = {
            "converged": result.converged,
            "sandwich_lower": total >= sandwich["lower"],
            "sandwich_upper": total <= sandwich["upper_oned"],
            "sandwich_upper_discrete": total <= sandwich["upper_discrete_ansatz"],
            "defect_bound": bound.holds,
        }
        return self._finish("minimize", config, writer, {"total": total, "sandwich": sandwich}, acceptance)

    def process_sweep(self, config: RunConfig) -> RunManifest:
        """Ansatz sequence over eps_list with fitted rates."""
        if not config.eps_list:
            raise ConfigError("sweep needs eps_list (e.g. --eps-list 0.1,0.05,0.025)")
        j = self._jump(config).require_jump()
        report = sweep_ansatz(
            j,
            config.eps_list,
            config.resolution,
            config.n_t,
            config.p_list,
            config.threads,
            config.threshold,
            config.quad_points,
        )
        writer = self._start(config)
        writer.write_csv(report.to_frame(), "sweep.csv")
        writer.write_json(report.summary(), "sweep.json")

        excess = [record.oned_excess for record in report.records]
        acceptance = {
            "excess_positive_decreasing": all(value > 0.0 for value in excess)
            and all(later < earlier for earlier, later in zip(excess, excess[1:])),
            "defect_bound": all(
                record.defect_norm**2 <= 2.0 * record.eps * record.total * (1.0 + 1e-12) for record in report.records
            ),
        }
        fit = report.rates.get("excess_vs_inverse_eps")
        if fit is not None:
            acceptance["exponential_rate"] = fit["slope"] < 0.0 and fit["correlation"] <= -0.99
        return self._finish("sweep", config, writer, report.summary(), acceptance)

    def process_check(self, config: RunConfig, suite: str = "all") -> RunManifest:
        results = self.check_suite.run(suite)
        writer = self._start(config)
        writer.write_json({"suite": suite, "checks": [result.to_dict() for result in results]}, "checks.json")
        acceptance = {f"{result.suite}/{result.name}": result.passed for result in results}
        return self._finish("check", config, writer, CheckSuite.summary(results), acceptance)

    def write_plot_script(self, directory: Union[str, Path], name: str = PLOT_SCRIPT_NAME) -> Path:
        """Generate the matplotlib script for the CSV tables already in a results directory."""
        directory = Path(directory)
        if not directory.is_dir():
            raise ConfigError(f"Results directory {directory} does not exist")
        path = directory / name
        path.write_text(self.plot_formatter.script_for_directory(directory), encoding="utf-8")
        logger.info("Wrote %s", path)
        return path

    def validate_config(self, config: RunConfig) -> Dict:
        """Validate a run configuration and return validation results."""
        return validate_run_config(config)

    def get_available_initializers(self) -> Dict:
        """Get information about all available initializers."""
        return self.initializer_factory.get_available_initializers()

    def get_available_suites(self) -> List[str]:
        return self.check_suite.get_available_suites()

    def load_summary(self, directory: Union[str, Path]) -> Optional[Dict]:
        """The manifest of a finished run, or None when the run never completed."""
        path = Path(directory) / MANIFEST_NAME
        if not path.is_file():
            return None
        return json.loads(path.read_text(encoding="utf-8"))
