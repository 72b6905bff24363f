"""Tests for RunProcessor and the files each run leaves behind."""

import json
import shutil
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from src.smectic_bps.config import RunConfig
from src.smectic_bps.errors import ConfigError, DegenerateJumpError
from src.smectic_bps.formatters.manifest import MANIFEST_NAME
from src.smectic_bps.formatters.tables import format_json
from src.smectic_bps.processors.run_processor import RunProcessor


class TestRunProcessor:
    """Test cases for RunProcessor."""

    def setup_method(self):
        """Set up test fixtures."""
        self.processor = RunProcessor()
        self.temp_dir = Path(tempfile.mkdtemp())

    def teardown_method(self):
        """Clean up test fixtures."""
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def config(self, name, **values):
        values.setdefault("out", str(self.temp_dir / name))
        return RunConfig.from_sources(overrides=values, environ={})

    def test_jumpcost_summary(self):
        """The summary carries both closed forms and the cross-checks."""
        summary = self.processor.process_jumpcost(self.config("jumpcost"))
        assert summary["cost"] == pytest.approx(2.0 / 3.0)
        assert summary["sigma_cost"] == pytest.approx(2.0 / 3.0)
        assert summary["jump_condition"] is True
        assert not (self.temp_dir / "jumpcost").exists()

    def test_jumpcost_written(self):
        """With write=True the summary lands next to a manifest."""
        config = self.config("jumpcost", a_minus=0.0, a_plus=2.0)
        self.processor.process_jumpcost(config, write=True)
        manifest = self.processor.load_summary(config.out)
        assert manifest["artifacts"] == ["jumpcost.json"]
        assert manifest["results"]["cost"] == pytest.approx(0.471405, abs=1e-6)
        assert manifest["passed"] is True

    def test_profile_run(self):
        """Profile, metadata and r_eps^1D tables are written with their verdicts."""
        config = self.config("profile", eps_list=[0.1, 0.05, 0.025], ode_step=1e-2)
        manifest = self.processor.process_profile(config)
        out = Path(config.out)
        assert set(manifest.artifacts) == {"profile.csv", "profile.json", "oned_energy.csv"}
        assert manifest.acceptance == {"excess_positive": True, "excess_decreasing": True}
        table = pd.read_csv(out / "oned_energy.csv")
        assert list(table["epsilon"]) == [0.1, 0.05, 0.025]
        assert (table["error"] > 0).all()
        metadata = json.loads((out / "profile.json").read_text())
        assert metadata["line_energy"] == pytest.approx(2.0 / 3.0, rel=1e-4)
        assert (out / MANIFEST_NAME).is_file()

    def test_degenerate_jump(self):
        """Equal slopes stop the run before anything is written."""
        config = self.config("degenerate", a_minus=1.0, a_plus=1.0)
        with pytest.raises(DegenerateJumpError):
            self.processor.process_profile(config)
        assert not Path(config.out).exists()

    def test_minimize_run(self):
        """A short minimization writes its tables, snapshot and sandwich."""
        config = self.config("minimize", eps=0.1, n_s=81, n_t=8, max_iterations=200)
        manifest = self.processor.process_minimize(config)
        out = Path(config.out)
        for name in ("minimize.json", "minimize_energy.csv", "history.csv", "u_star.txt"):
            assert name in manifest.artifacts
            assert (out / name).is_file()
        sandwich = manifest.results["sandwich"]
        assert sandwich["lower"] <= sandwich["total"] <= sandwich["upper_discrete_ansatz"]
        assert sandwich["total"] <= sandwich["upper_oned"] * (1.0 + 1e-2)
        assert manifest.acceptance["sandwich_upper_discrete"]
        assert manifest.acceptance["defect_bound"]

    def test_minimize_manifest_reads_back(self):
        """The acceptance verdicts of a minimize run survive the JSON round trip as booleans."""
        config = self.config("minimize", eps=0.1, n_s=81, n_t=8, max_iterations=200)
        written = self.processor.process_minimize(config)
        manifest = self.processor.load_summary(config.out)
        assert manifest is not None
        assert manifest.acceptance == written.acceptance
        assert set(manifest.acceptance) >= {"converged", "sandwich_lower", "sandwich_upper", "sandwich_upper_discrete"}
        raw = json.loads((Path(config.out) / MANIFEST_NAME).read_text(encoding="utf-8"))
        assert all(type(verdict) is bool for verdict in raw["acceptance"].values())
        summary = json.loads((Path(config.out) / "minimize.json").read_text(encoding="utf-8"))
        assert summary["strain_h_minus_1_along_t"] >= 0.0

    def test_sweep_is_deterministic(self):
        """The sweep table is byte-identical across runs and thread counts."""
        first = self.config("sweep1", eps_list=[0.1, 0.05, 0.025], threads=1)
        second = self.config("sweep2", eps_list=[0.1, 0.05, 0.025], threads=3)
        manifest = self.processor.process_sweep(first)
        self.processor.process_sweep(second)
        assert (Path(first.out) / "sweep.csv").read_bytes() == (Path(second.out) / "sweep.csv").read_bytes()
        assert (Path(first.out) / "sweep.json").read_bytes() == (Path(second.out) / "sweep.json").read_bytes()
        assert manifest.acceptance["excess_positive_decreasing"]
        assert manifest.acceptance["defect_bound"]

    def test_sweep_needs_eps_list(self):
        """A sweep without eps values is a configuration error."""
        with pytest.raises(ConfigError):
            self.processor.process_sweep(self.config("sweep"))

    def test_check_run(self):
        """Check results are keyed by suite and name."""
        manifest = self.processor.process_check(self.config("check"), "formulas")
        assert manifest.acceptance
        assert all(key.startswith("formulas/") for key in manifest.acceptance)
        assert manifest.passed
        with pytest.raises(ConfigError):
            self.processor.process_check(self.config("check"), "nonsense")

    def test_plot_script(self):
        """The plot script lists every CSV of the directory."""
        config = self.config("profile", ode_step=1e-2)
        self.processor.process_profile(config)
        path = self.processor.write_plot_script(config.out)
        text = path.read_text()
        assert "profile.csv" in text and "oned_energy.csv" in text
        with pytest.raises(ConfigError):
            self.processor.write_plot_script(self.temp_dir / "missing")

    def test_stale_manifest_removed(self):
        """A new run replaces the manifest of the previous one."""
        config = self.config("profile", ode_step=1e-2)
        self.processor.process_profile(config)
        first = self.processor.load_summary(config.out)
        self.processor.process_jumpcost(config, write=True)
        second = self.processor.load_summary(config.out)
        assert first["command"] == "profile"
        assert second["command"] == "jumpcost"
        assert self.processor.load_summary(self.temp_dir / "nowhere") is None

    def test_listings(self):
        """Initializers and suites can be listed."""
        assert set(self.processor.get_available_initializers()) == {"ansatz", "linear", "random"}
        assert "all" in self.processor.get_available_suites()
        assert self.processor.validate_config(RunConfig())["valid"]


class TestFormatJson:
    """Test cases for the JSON formatter."""

    def test_numpy_values_become_builtins(self):
        """numpy scalars and arrays are written as plain JSON values."""
        data = {"flag": np.bool_(True), "total": np.float64(0.5), "rows": np.arange(3), "count": np.int64(4)}
        assert json.loads(format_json(data)) == {"count": 4, "flag": True, "rows": [0, 1, 2], "total": 0.5}

    def test_unknown_objects_still_fail(self):
        """Objects outside numpy keep json's TypeError."""
        with pytest.raises(TypeError):
            format_json({"path": object()})
