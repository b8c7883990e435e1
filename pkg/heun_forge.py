#!/usr/bin/env python3
"""
heun-forge - Main entry point

Computes perturbative solutions of the non-stationary Heun equation in the
elliptic nome q and emits eigenvalue series, polynomial coefficients,
point evaluations and verification reports.
"""

import sys
import time
import argparse
import logging
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Optional

from src.config import Config, RunConfig, parse_couplings, parse_pair
from src.config_loader import ConfigLoader
from src.engines import WINDOW_EIGEN, EigenSeries, ResonanceReport, alg1
from src.exceptions import (
    EXIT_INTERNAL,
    EXIT_OK,
    EXIT_USAGE,
    ConfigError,
    HeunForgeError,
    exit_code_for,
)
from src.output_formatter import OutputFormatter
from src.solution import assemble, eval_solution, relative_residual, solve_coefficients
from src.verification import SuiteSettings, run_suite


logger = logging.getLogger("heun_forge")


@contextmanager
def _stopwatch(enabled: bool, sink: Dict[str, Any]) -> Iterator[None]:
    start = time.perf_counter()
    try:
        yield
    finally:
        sink["timing"] = round(time.perf_counter() - start, 6) if enabled else None


def _header(command: str) -> Dict[str, Any]:
    return {"schema": Config.SCHEMA, "command": command}


def _pair(value: complex) -> List[float]:
    value = complex(value)
    return [value.real, value.imag]


def compute_eigen(config: RunConfig) -> EigenSeries:
    """Eigenvalue series for the configured engine.

    The first algorithm runs on its eigenvalue window so that denominators
    needed only for polynomial assembly cannot abort the run.
    """
    params = config.params()
    order = config.effective_order
    if config.mode == "alg1":
        _, eigen = alg1(config.n, params, order, window=WINDOW_EIGEN, eps_res=config.eps_res)
        return eigen
    _, eigen = solve_coefficients(config.n, params, order, config.mode, config.eps_res)
    return eigen


def cmd_eigen(config: RunConfig) -> Dict[str, Any]:
    """Eigenvalue corrections E_n^(l) for l <= N."""
    params = config.params()
    report = _header("eigen")
    with _stopwatch(config.timing, report):
        eigen = compute_eigen(config)
    field = params.field
    report.update(
        {
            "params": params.to_dict(),
            "n": config.n,
            "N": config.effective_order,
            "mode": config.mode,
            "E0": field.serialize(eigen.e0),
            "E_coeffs": [field.serialize(c) for c in eigen.coefficients],
            "resonance_report": ResonanceReport().to_list(),
        }
    )
    return report


def cmd_poly(config: RunConfig) -> Dict[str, Any]:
    """Polynomials P_n^(l)(z), their normalization and the eigenvalue series."""
    params = config.params()
    report = _header("poly")
    with _stopwatch(config.timing, report):
        sol = assemble(config.n, params, config.effective_order, config.mode, eps_res=config.eps_res)
    report.update(sol.to_dict())
    report["E0"] = params.field.serialize(sol.eigen.e0)
    report["resonance_report"] = ResonanceReport().to_list()
    return report


def cmd_eval(config: RunConfig) -> Dict[str, Any]:
    """psi_n(x), E_n and the relative residual of the equation at one point."""
    params = config.params()
    tau = config.tau_value()
    x = config.x_value()
    omega1 = config.omega1_value()
    report = _header("eval")
    with _stopwatch(config.timing, report):
        sol = assemble(config.n, params, config.effective_order, config.mode, eps_res=config.eps_res)
        psi, energy = eval_solution(sol, x, tau, omega1)
        rel = relative_residual(sol, x, tau, config.fd_step, omega1)
    report.update(
        {
            "params": params.to_dict(),
            "n": config.n,
            "N": config.effective_order,
            "mode": config.mode,
            "x": _pair(x),
            "tau": _pair(tau),
            "omega1": None if omega1 is None else _pair(omega1),
            "psi": _pair(psi),
            "E": _pair(energy),
            "relative_residual": rel,
        }
    )
    return report


def suite_settings(config: RunConfig) -> SuiteSettings:
    """Suite knobs from the run configuration.

    Raises:
        ConfigError: If --q is not a real nome in (0, 1)
    """
    q = None
    if config.q is not None:
        value = parse_pair(config.q)
        if value.imag != 0 or not 0 < value.real < 1:
            raise ConfigError(f"verify needs a real nome 0 < q < 1, got {config.q}")
        q = value.real
    return SuiteSettings(
        order=config.order,
        q=q,
        fd_step=config.fd_step,
        eps_eq=config.eps_eq,
        points=config.points,
    )


def cmd_verify(config: RunConfig) -> Dict[str, Any]:
    """Run one named verification suite."""
    settings = suite_settings(config)
    report = _header("verify")
    with _stopwatch(config.timing, report):
        report.update(run_suite(config.suite, settings))
    return report


COMMANDS = {
    "eigen": cmd_eigen,
    "poly": cmd_poly,
    "eval": cmd_eval,
    "verify": cmd_verify,
}


def build_parser(yaml_config: Dict[str, Any]) -> argparse.ArgumentParser:
    """Argument parser whose defaults come from the YAML file, then from Config."""
    default_order = ConfigLoader.get_default(yaml_config, "order", None)
    default_mode = ConfigLoader.get_choice(
        yaml_config, "mode", Config.VALID_MODES, Config.DEFAULT_MODE
    )
    default_scalar = ConfigLoader.get_choice(
        yaml_config, "scalar", Config.VALID_SCALARS, Config.DEFAULT_SCALAR
    )
    default_format = ConfigLoader.get_choice(
        yaml_config, "format", Config.VALID_FORMATS, Config.DEFAULT_FORMAT
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--n",
        type=int,
        default=ConfigLoader.get_default(yaml_config, "n", Config.DEFAULT_N),
        help="Mode index n (default: %(default)s)",
    )
    common.add_argument(
        "--g",
        default=ConfigLoader.get_couplings(yaml_config, Config.DEFAULT_G),
        help="Couplings g0,g1,g2,g3 as rationals (1/3, 0.5) or complex (0.4+0.1j) (default: %(default)s)",
    )
    common.add_argument(
        "--kappa",
        default=str(ConfigLoader.get_default(yaml_config, "kappa", Config.DEFAULT_KAPPA)),
        help="Coefficient of the tau derivative (default: %(default)s)",
    )
    common.add_argument(
        "--order",
        type=int,
        default=default_order,
        help=f"Truncation order N (default: {Config.DEFAULT_ORDER}; suites use their own)",
    )
    common.add_argument(
        "--mode",
        choices=Config.VALID_MODES,
        default=default_mode,
        help=f"Engine (default: {default_mode})",
    )
    common.add_argument(
        "--scalar",
        choices=Config.VALID_SCALARS,
        default=default_scalar,
        help=f"Scalar arithmetic (default: {default_scalar})",
    )
    common.add_argument(
        "--format",
        choices=Config.VALID_FORMATS,
        default=default_format,
        help=f"Output format (default: {default_format})",
    )
    point = common.add_mutually_exclusive_group()
    point.add_argument("--q", default=ConfigLoader.get_default(yaml_config, "q", None),
                       help="Nome q as VAL or RE,IM")
    point.add_argument("--tau", default=ConfigLoader.get_default(yaml_config, "tau", None),
                       help="Period ratio tau as RE,IM")
    common.add_argument("--x", default=ConfigLoader.get_default(yaml_config, "x", None),
                        help=f"Evaluation point x as RE,IM (default: {Config.DEFAULT_X})")
    common.add_argument("--omega1", default=ConfigLoader.get_default(yaml_config, "omega1", None),
                        help="Real half period for the rescaled equation")
    common.add_argument(
        "--suite",
        choices=Config.VALID_SUITES,
        default=ConfigLoader.get_default(yaml_config, "suite", None),
        help="Verification suite (verify only)",
    )
    common.add_argument("--out", default=None, help="Write the report to PATH instead of stdout")
    common.add_argument(
        "--eps-eq",
        type=float,
        default=ConfigLoader.get_tolerance(yaml_config, "eps_eq", Config.EPS_EQ),
        help="Relative equality tolerance in complex mode (default: %(default)s)",
    )
    common.add_argument(
        "--eps-res",
        type=float,
        default=ConfigLoader.get_tolerance(yaml_config, "eps_res", Config.EPS_RES),
        help="Resonance threshold in complex mode (default: %(default)s)",
    )
    common.add_argument(
        "--fd-step",
        type=float,
        default=ConfigLoader.get_tolerance(yaml_config, "fd_step", Config.FD_STEP),
        help="Finite-difference step (default: %(default)s)",
    )
    common.add_argument(
        "--points",
        type=int,
        default=ConfigLoader.get_default(yaml_config, "points", Config.QUADRATURE_POINTS),
        help="Contour quadrature points (default: %(default)s)",
    )
    common.add_argument("--config", default="config.yaml",
                        help="Path to configuration file (default: config.yaml)")
    common.add_argument("--timing", action="store_true", help="Report wall-clock seconds")
    common.add_argument("--verbose", action="store_true", help="Log debug output to stderr")

    parser = argparse.ArgumentParser(
        prog="heun-forge",
        description="Perturbative solutions of the non-stationary Heun equation",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("eigen", parents=[common], help="Eigenvalue series E_n^(l)")
    subparsers.add_parser("poly", parents=[common], help="Polynomials P_n^(l)(z)")
    subparsers.add_parser("verify", parents=[common], help="Run a verification suite")
    subparsers.add_parser("eval", parents=[common], help="Evaluate psi_n and E_n at one point")
    return parser


def _config_path(argv: List[str]) -> Optional[str]:
    """--config is needed before the parser exists, so it is looked up by hand."""
    for index, arg in enumerate(argv):
        if arg == "--config" and index + 1 < len(argv):
            return argv[index + 1]
        if arg.startswith("--config="):
            return arg.split("=", 1)[1]
    return None


def run_config(args: argparse.Namespace) -> RunConfig:
    """RunConfig from parsed arguments.

    Raises:
        ConfigError: If the options are inconsistent
    """
    config = RunConfig(
        subcommand=args.command,
        n=args.n,
        g=parse_couplings(args.g),
        kappa=str(args.kappa),
        order=args.order,
        mode=args.mode,
        scalar=args.scalar,
        output_format=args.format,
        eps_eq=args.eps_eq,
        eps_res=args.eps_res,
        fd_step=args.fd_step,
        points=args.points,
        q=None if args.q is None else str(args.q),
        tau=None if args.tau is None else str(args.tau),
        x=None if args.x is None else str(args.x),
        omega1=None if args.omega1 is None else str(args.omega1),
        suite=args.suite,
        out=args.out,
        timing=args.timing,
    )
    config.validate()
    return config


def emit(text: str, out: Optional[str]) -> None:
    if out is None:
        print(text, end="")
        return
    try:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
    except OSError as e:
        raise ConfigError(f"Could not write {out}: {e}") from e
    logger.info(f"Wrote report to {out}")


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point for the application.
    Returns exit code (0 for success, non-zero for failure).
    """
    # Configure logging
    logging.basicConfig(
        level=logging.WARNING,
        format='[%(levelname)s] %(message)s',
        stream=sys.stderr
    )

    argv = sys.argv[1:] if argv is None else list(argv)

    # Load configuration from YAML file
    yaml_config = ConfigLoader.load_config(_config_path(argv))
    parser = build_parser(yaml_config)

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse calls sys.exit() on error or --help
        return EXIT_USAGE if e.code else EXIT_OK

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        config = run_config(args)
        logger.debug(f"Running {config.subcommand} with {config}")
        report = COMMANDS[config.subcommand](config)
        emit(OutputFormatter.format_report(report, config.output_format), config.out)
        if config.subcommand == "verify" and not report["pass"]:
            logger.error(f"Suite {config.suite} failed: {', '.join(report['failures'])}")
            return EXIT_INTERNAL
        return EXIT_OK

    except HeunForgeError as e:
        # Handle all application-specific errors
        logger.error(str(e))
        return exit_code_for(e)
    except Exception as e:
        # Handle unexpected errors
        logger.exception(f"Unexpected error: {e}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
