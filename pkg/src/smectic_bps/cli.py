"""Command-line surface: smectic-bps {jumpcost,profile,minimize,sweep,check,plot-script}.

Exit codes: 0 success, 2 bad arguments or degenerate jump, 3 numerical failure,
4 failed checks (always for `check`, with --strict for the other commands).
"""

import argparse
import logging
import sys
from typing import Dict, List, Optional

from . import __version__
from .config import RunConfig, parse_config_file
from .errors import ConfigError, SmecticError
from .formatters.tables import format_json
from .processors.run_processor import RunProcessor

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_FAILED = 4

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _eps_list(raw: str) -> List[float]:
    try:
        return [float(item) for item in raw.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {raw!r}") from exc


def _add_jump_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--aminus", dest="a_minus", type=float, default=None, help="slope a- of the left state (default -1)")
    parser.add_argument("--aplus", dest="a_plus", type=float, default=None, help="slope a+ of the right state (default 1)")


def _add_grid_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--resolution", type=float, default=None, help="samples per eps across the cell")
    parser.add_argument("--n-s", dest="n_s", type=int, default=None, help="samples along nu (overrides --resolution)")
    parser.add_argument("--n-t", dest="n_t", type=int, default=None, help="samples along tau")
    parser.add_argument("--threshold", type=float, default=None, help="band threshold of the interpolated ansatz")
    parser.add_argument("--quad-points", dest="quad_points", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="smectic-bps", description="Defect energies of the 2D smectic functional")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    parser.add_argument("--config", default=None, help="flat key = value configuration file")
    parser.add_argument("--out", default=None, help="output directory (default ./results)")
    parser.add_argument("--threads", type=int, default=None, help="worker threads for sweeps")
    parser.add_argument("--strict", action="store_true", default=None, help="exit 4 when an acceptance flag fails")
    commands = parser.add_subparsers(dest="command", required=True)

    jumpcost = commands.add_parser("jumpcost", help="sharp cost per unit length of a defect line")
    _add_jump_arguments(jumpcost)

    profile = commands.add_parser("profile", help="layer ODE, profile table and r_eps^1D")
    _add_jump_arguments(profile)
    profile.add_argument("--eps", type=float, default=None)
    profile.add_argument("--eps-list", dest="eps_list", type=_eps_list, default=None)
    profile.add_argument("--ode-step", dest="ode_step", type=float, default=None)
    profile.add_argument("--horizon", type=float, default=None)
    profile.add_argument("--threshold", type=float, default=None)
    profile.add_argument("--quad-points", dest="quad_points", type=int, default=None)

    minimize = commands.add_parser("minimize", help="minimize E_eps on the cell")
    _add_jump_arguments(minimize)
    minimize.add_argument("--eps", type=float, default=None)
    _add_grid_arguments(minimize)
    minimize.add_argument("--init", dest="initializer", default=None, help="ansatz, linear or random")
    minimize.add_argument("--seed", type=int, default=None)
    minimize.add_argument("--max-iterations", dest="max_iterations", type=int, default=None)
    minimize.add_argument("--gradient-tolerance", dest="gradient_tolerance", type=float, default=None)
    minimize.add_argument("--relative-tolerance", dest="relative_tolerance", type=float, default=None)
    minimize.add_argument("--history", type=int, default=None, help="L-BFGS memory")
    minimize.add_argument("--steepest", dest="quasi_newton", action="store_false", default=None, help="plain steepest descent")
    minimize.add_argument("--gradient-check-every", dest="gradient_check_every", type=int, default=None)
    minimize.add_argument("--no-precondition", dest="precondition", action="store_false", default=None, help="seed L-BFGS with the quadrature weights only")
    minimize.add_argument("--precondition-every", dest="precondition_every", type=int, default=None)

    sweep = commands.add_parser("sweep", help="ansatz sequence over several eps with fitted rates")
    _add_jump_arguments(sweep)
    sweep.add_argument("--eps-list", dest="eps_list", type=_eps_list, default=None)
    _add_grid_arguments(sweep)
    sweep.add_argument("--p-list", dest="p_list", type=_eps_list, default=None, help="exponents of the L^p norms")

    check = commands.add_parser("check", help="run a property suite")
    check.add_argument("--suite", default="all", help="formulas, profile, energy, stencils, hopf-cole, diagnostics, minimize or all")
    check.add_argument("--seed", type=int, default=None)

    plot = commands.add_parser("plot-script", help="emit a matplotlib script for a results directory")
    plot.add_argument("directory", nargs="?", default=None, help="results directory (default --out)")
    return parser


OVERRIDE_KEYS = (
    "a_minus", "a_plus", "eps", "eps_list", "resolution", "n_s", "n_t", "horizon", "ode_step", "quad_points",
    "threshold", "initializer", "seed", "max_iterations", "gradient_tolerance", "relative_tolerance", "history",
    "quasi_newton", "gradient_check_every", "precondition", "precondition_every", "p_list", "out", "threads", "strict",
)


def load_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then --config, then the environment, then flags."""
    file_values = parse_config_file(args.config) if args.config else {}
    overrides: Dict = {key: getattr(args, key, None) for key in OVERRIDE_KEYS}
    return RunConfig.from_sources(file_values, overrides)


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT)


def _verdict(manifest, strict: bool) -> int:
    print(format_json({"passed": manifest.passed, "acceptance": manifest.acceptance, "results": manifest.results}))
    if strict and not manifest.passed:
        return EXIT_FAILED
    return EXIT_OK


def run(args: argparse.Namespace) -> int:
    config = load_config(args)
    processor = RunProcessor(seed=config.seed if config.seed is not None else 0)
    if args.command == "jumpcost":
        summary = processor.process_jumpcost(config, write=args.out is not None)
        print(format_json(summary))
        return EXIT_OK
    if args.command == "profile":
        return _verdict(processor.process_profile(config), config.strict)
    if args.command == "minimize":
        return _verdict(processor.process_minimize(config), config.strict)
    if args.command == "sweep":
        return _verdict(processor.process_sweep(config), config.strict)
    if args.command == "check":
        manifest = processor.process_check(config, args.suite)
        print(format_json(manifest.results))
        return EXIT_OK if manifest.passed else EXIT_FAILED
    if args.command == "plot-script":
        print(processor.write_plot_script(args.directory or config.out))
        return EXIT_OK
    raise ConfigError(f"Unknown command {args.command!r}")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    try:
        return run(args)
    except ConfigError as exc:
        logger.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SmecticError as exc:
        logger.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
