#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Command-line interface for the shallow water solver.

Provides an argparse CLI for single runs, convergence studies, listing
benchmarks and validating configuration files.
"""

import argparse
import sys
from typing import Any, Dict, List, Optional

from . import __version__
from .core import (
    REGISTRY,
    SCHEMES,
    STRATEGIES,
    ShallowWaterError,
    load_config,
)
from .core.low_order import WAVE_SPEED_MODES
from .core.mcl_limiter import RAW_FLUX_MODES
from .core.validator import validate_config_file
from .utils import convergence_study, run, setup_logging


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"需要逗号分隔的整数: {text}"
        ) from None


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"需要逗号分隔的数值: {text}"
        ) from None


def create_parser() -> argparse.ArgumentParser:
    """Create argument parser with all CLI options."""
    parser = argparse.ArgumentParser(
        prog="shallow-water-afc",
        description=(
            "Shallow water solver with continuous finite elements, "
            "monolithic convex limiting and entropy fixes"
        ),
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Wet dam break with the MCL scheme
  shallow-water-afc --benchmark wet-dam-break --scheme MCL --elements 128

  # Lake at rest with the low-order scheme
  shallow-water-afc --benchmark lake-at-rest --scheme LOW --t-end 100

  # Oscillating lake with the friction-based wet/dry fix
  shallow-water-afc --benchmark thacker --nu 0.05 --wetdry friction

  # Convergence table for three schemes
  shallow-water-afc --benchmark wet-dam-break --convergence \\
      --schemes LOW,MCL,MCL-SDE --resolutions 32,64,128,256,512

  # Use configuration file
  shallow-water-afc -c run.yaml
        """,
    )

    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )

    # Main actions
    action_group = parser.add_mutually_exclusive_group()
    action_group.add_argument(
        "--list-benchmarks",
        action="store_true",
        help="List available benchmarks and exit",
    )
    action_group.add_argument(
        "--validate", metavar="FILE", help="Validate config file and exit"
    )
    action_group.add_argument(
        "--convergence",
        action="store_true",
        help="Run a convergence study over --resolutions",
    )

    # Problem
    problem_group = parser.add_argument_group("Problem Options")
    problem_group.add_argument(
        "-b",
        "--benchmark",
        help="Benchmark name or 'custom' (default: wet-dam-break)",
    )
    problem_group.add_argument(
        "-c",
        "--config",
        dest="config_file",
        help="Configuration file (YAML or JSON)",
    )
    problem_group.add_argument(
        "--elements", type=int, help="Number of elements"
    )
    problem_group.add_argument(
        "--resolutions",
        type=_int_list,
        help="Doubling chain of element counts, e.g. 32,64,128",
    )

    # Scheme
    scheme_group = parser.add_argument_group("Scheme Options")
    scheme_group.add_argument(
        "--scheme",
        type=str.upper,
        choices=list(SCHEMES),
        help="Spatial scheme (default: MCL-SDE)",
    )
    scheme_group.add_argument(
        "--schemes",
        type=lambda s: [v.strip().upper() for v in s.split(",")],
        help="Schemes compared by --convergence",
    )
    scheme_group.add_argument(
        "--raw-flux-mode",
        choices=list(RAW_FLUX_MODES),
        help="Raw antidiffusive fluxes (default: full, steady in steady mode)",
    )
    scheme_group.add_argument(
        "--wave-speed",
        choices=list(WAVE_SPEED_MODES),
        help="Maximum wave speed estimate (default: nodal)",
    )
    scheme_group.add_argument(
        "--no-entropy-fix",
        action="store_true",
        help="Disable the Tadmor fix of the artificial viscosities",
    )
    scheme_group.add_argument(
        "--alpha-entropy-fix",
        action="store_true",
        help="Enforce the Tadmor condition by reducing alpha instead",
    )
    scheme_group.add_argument(
        "--wetdry",
        help=f"Wet/dry treatment: {', '.join(STRATEGIES)} or an alias",
    )

    # Time
    time_group = parser.add_argument_group("Time Stepping Options")
    time_group.add_argument(
        "--rk", type=int, choices=[1, 2, 3], help="SSP RK order (default: 2)"
    )
    time_group.add_argument(
        "--nu", type=float, help="CFL parameter in (0, 1] (default: 0.5)"
    )
    stop_group = time_group.add_mutually_exclusive_group()
    stop_group.add_argument("--t-end", type=float, help="Final time")
    stop_group.add_argument(
        "--steady",
        action="store_true",
        help="Run until the steady residual drops below --steady-tol",
    )
    time_group.add_argument(
        "--steady-tol", type=float, help="Steady residual tolerance"
    )
    time_group.add_argument(
        "--max-steps", type=int, help="Maximum number of time steps"
    )

    # Output
    output_group = parser.add_argument_group("Output Options")
    output_group.add_argument(
        "-o", "--out-dir", help="Output directory (default: results)"
    )
    output_group.add_argument(
        "--output-times",
        type=_float_list,
        help="Comma-separated snapshot times",
    )
    output_group.add_argument(
        "--diagnostics",
        action="store_true",
        default=None,
        help="Write the diagnostics CSV (default: on)",
    )
    output_group.add_argument(
        "--no-diagnostics",
        dest="diagnostics",
        action="store_false",
        help="Skip the diagnostics CSV",
    )
    output_group.add_argument(
        "--entropy-diagnostics",
        action="store_true",
        help="Record the semi-discrete entropy residual of every step",
    )

    # Logging
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Enable verbose output"
    )
    parser.add_argument(
        "-q",
        "--quiet",
        action="store_true",
        help="Suppress output except errors",
    )

    return parser


def args_to_config_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """
    Convert CLI arguments to configuration overrides.

    Only options given on the command line become overrides, so values
    from a configuration file survive.

    Args:
        args: Parsed command-line arguments

    Returns:
        Dictionary of ``section__param`` overrides
    """
    mapping = {
        "benchmark": "problem__benchmark",
        "elements": "mesh__n_elements",
        "resolutions": "mesh__resolutions",
        "scheme": "scheme__scheme",
        "raw_flux_mode": "scheme__raw_flux_mode",
        "wave_speed": "scheme__wave_speed",
        "wetdry": "wetdry__strategy",
        "rk": "time__rk_order",
        "nu": "time__nu",
        "t_end": "time__t_end",
        "steady_tol": "time__steady_tol",
        "max_steps": "time__max_steps",
        "out_dir": "output__out_dir",
        "output_times": "output__output_times",
        "diagnostics": "output__diagnostics",
    }
    overrides = {
        key: getattr(args, name)
        for name, key in mapping.items()
        if getattr(args, name) is not None
    }
    if args.steady:
        overrides["time__steady"] = True
    if args.no_entropy_fix:
        overrides["scheme__entropy_fix_viscosity"] = False
    if args.alpha_entropy_fix:
        overrides["scheme__alpha_entropy_fix"] = True
    if args.entropy_diagnostics:
        overrides["output__entropy_diagnostics"] = True
    return overrides


def list_benchmarks() -> None:
    """Print the benchmark registry."""
    for name, case in REGISTRY.items():
        end = "steady" if case.steady else f"T={case.t_end:g}"
        exact = "exact" if case.has_exact else "reference"
        print(f"  {name:22s} {end:10s} {exact:10s} {case.description}")


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run the CLI entry point.

    Args:
        argv: Command-line arguments (defaults to sys.argv)

    Returns:
        Exit code (0 for success, category code for solver errors)
    """
    parser = create_parser()
    args = parser.parse_args(argv)

    # Setup logging
    if args.quiet:
        log_level = "ERROR"
    elif args.verbose:
        log_level = "DEBUG"
    else:
        log_level = "INFO"
    setup_logging(log_level)

    try:
        # Handle special actions
        if args.list_benchmarks:
            list_benchmarks()
            return 0

        if args.validate:
            valid, error = validate_config_file(args.validate)
            if valid:
                print(f"[OK] 配置验证通过: {args.validate}")
                return 0
            print(f"[ERROR] 配置验证失败: {args.validate}")
            print(f"  错误: {error}")
            return 2

        config = load_config(args.config_file)
        overrides = args_to_config_overrides(args)

        if args.convergence:
            table = convergence_study(config, args.schemes, **overrides)
            if not args.quiet:
                print(table.to_string(index=False))
            return 0

        artifacts = run(config, **overrides)
        if not args.quiet:
            for kind, path in artifacts.items():
                print(f"[OK] {kind}: {path}")
        return 0

    except ShallowWaterError as e:
        print(f"[ERROR] {type(e).__name__}: {e}", file=sys.stderr)
        if args.verbose:
            import traceback

            traceback.print_exc()
        return e.exit_code
    except Exception as e:
        print(f"[ERROR] 错误: {e}", file=sys.stderr)
        if args.verbose:
            import traceback

            traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
