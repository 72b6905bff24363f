"""Run configuration: defaults, then a flat key = value file, then command-line flags."""

import math
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

from .errors import ConfigError
from .minimize.cell_problem import OptimizerSettings

THREADS_ENV = "SMECTIC_BPS_THREADS"
INITIALIZERS = ("ansatz", "linear", "random")


def _parse_bool(raw: str) -> bool:
    value = raw.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_float_list(raw: str) -> List[float]:
    return [float(item) for item in raw.replace(";", ",").split(",") if item.strip()]


def _parse_optional_int(raw: str) -> Optional[int]:
    return None if raw.strip().lower() in ("", "none") else int(raw)


@dataclass
class RunConfig:
    """Every knob a subcommand may read; unknown keys are rejected."""

    a_minus: float = -1.0
    a_plus: float = 1.0
    eps: float = 0.05
    eps_list: List[float] = field(default_factory=list, metadata={"parse": _parse_float_list})
    resolution: float = 25.0
    n_s: int = 0
    n_t: int = 16
    horizon: float = 10.0
    ode_step: float = 1e-3
    quad_points: int = 2048
    threshold: float = 0.25
    initializer: str = "ansatz"
    seed: Optional[int] = field(default=None, metadata={"parse": _parse_optional_int})
    max_iterations: int = 20000
    gradient_tolerance: float = 1e-8
    relative_tolerance: float = 1e-6
    history: int = 8
    quasi_newton: bool = field(default=True, metadata={"parse": _parse_bool})
    log_every: int = 500
    gradient_check_every: int = 0
    precondition: bool = field(default=True, metadata={"parse": _parse_bool})
    precondition_every: int = 20
    p_list: List[float] = field(default_factory=lambda: [2.0, 6.0, 8.0], metadata={"parse": _parse_float_list})
    out: str = "results"
    threads: int = 1
    strict: bool = field(default=False, metadata={"parse": _parse_bool})

    @classmethod
    def from_sources(
        cls,
        file_values: Optional[Mapping[str, str]] = None,
        overrides: Optional[Mapping[str, Any]] = None,
        environ: Optional[Mapping[str, str]] = None,
    ) -> "RunConfig":
        """Defaults < config file < environment thread override < explicit flags."""
        config = cls()
        for key, raw in (file_values or {}).items():
            config.set_from_text(key, raw)
        env_threads = threads_from_env(environ)
        if env_threads is not None:
            config.threads = env_threads
        for key, value in (overrides or {}).items():
            if value is None:
                continue
            if key not in _field_names():
                raise ConfigError(f"Unknown configuration key '{key}'")
            setattr(config, key, value)
        return config.validate()

    def set_from_text(self, key: str, raw: str) -> None:
        entry = _field_map().get(key)
        if entry is None:
            raise ConfigError(f"Unknown configuration key '{key}'")
        parse = entry.metadata.get("parse", entry.type)
        try:
            setattr(self, key, parse(raw))
        except ValueError as exc:
            raise ConfigError(f"Bad value for '{key}': {raw!r} ({exc})") from exc

    def validate(self) -> "RunConfig":
        result = validate_run_config(self)
        if not result["valid"]:
            raise ConfigError(result["error"])
        return self

    def resolved_n_s(self, eps: Optional[float] = None) -> int:
        """Explicit n_s, or about `resolution` samples per eps across the cell."""
        if self.n_s:
            return self.n_s
        return int(math.ceil(self.resolution / (eps or self.eps))) + 1

    def optimizer_settings(self) -> OptimizerSettings:
        return OptimizerSettings(
            max_iterations=self.max_iterations,
            gradient_tolerance=self.gradient_tolerance,
            relative_tolerance=self.relative_tolerance,
            history=self.history,
            quasi_newton=self.quasi_newton,
            log_every=self.log_every,
            gradient_check_every=self.gradient_check_every,
            precondition=self.precondition,
            precondition_every=self.precondition_every,
        ).validate()

    def to_dict(self) -> Dict[str, Any]:
        return {name: getattr(self, name) for name in _field_names()}


def _field_map():
    return {entry.name: entry for entry in fields(RunConfig)}


def _field_names() -> List[str]:
    return [entry.name for entry in fields(RunConfig)]


def validate_run_config(config: RunConfig) -> Dict:
    """Validate numeric ranges and return validation results instead of raising."""
    positive = ("eps", "resolution", "horizon", "ode_step", "gradient_tolerance")
    for name in positive:
        value = getattr(config, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            return {"valid": False, "error": f"{name} must be a positive finite number, got {value!r}"}
    for name in ("a_minus", "a_plus"):
        if not math.isfinite(getattr(config, name)):
            return {"valid": False, "error": f"{name} must be finite"}
    if any(not (math.isfinite(eps) and eps > 0) for eps in config.eps_list):
        return {"valid": False, "error": f"eps_list entries must be positive, got {config.eps_list}"}
    if any(p < 1 for p in config.p_list):
        return {"valid": False, "error": f"p_list entries must be >= 1, got {config.p_list}"}
    if config.n_s < 0 or (config.n_s and config.n_s < 5) or config.n_t < 3:
        return {"valid": False, "error": f"Grid too small: n_s={config.n_s}, n_t={config.n_t}"}
    if not 0.0 < config.threshold < 0.5:
        return {"valid": False, "error": f"threshold must lie in (0, 1/2), got {config.threshold}"}
    if config.quad_points < 16:
        return {"valid": False, "error": f"quad_points must be >= 16, got {config.quad_points}"}
    if config.initializer not in INITIALIZERS:
        return {"valid": False, "error": f"Unknown initializer '{config.initializer}'; choose from {list(INITIALIZERS)}"}
    if config.initializer == "random" and config.seed is None:
        return {"valid": False, "error": "The random initializer needs --seed"}
    if config.threads < 1:
        return {"valid": False, "error": f"threads must be >= 1, got {config.threads}"}
    if config.max_iterations < 0 or config.history < 1 or config.log_every < 1 or config.gradient_check_every < 0:
        return {"valid": False, "error": "Optimizer counts out of range"}
    if config.precondition_every < 0:
        return {"valid": False, "error": f"precondition_every must be >= 0, got {config.precondition_every}"}
    if not 0.0 <= config.relative_tolerance < 1.0:
        return {"valid": False, "error": f"relative_tolerance must lie in [0, 1), got {config.relative_tolerance}"}
    return {"valid": True, "message": "Configuration is valid"}


def parse_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """Flat `key = value` lines; '#' starts a comment, blank lines are skipped."""
    values: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(f"{path}:{number}: expected 'key = value', got {line.strip()!r}")
            key, raw = (part.strip() for part in text.split("=", 1))
            values[key.replace("-", "_")] = raw
    return values


def threads_from_env(environ: Optional[Mapping[str, str]] = None) -> Optional[int]:
    environ = os.environ if environ is None else environ
    raw = environ.get(THREADS_ENV)
    if raw is None or not raw.strip():
        return None
    try:
        threads = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    if threads < 1:
        raise ConfigError(f"{THREADS_ENV} must be >= 1, got {threads}")
    return threads
