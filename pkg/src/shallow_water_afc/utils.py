#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Utility functions for the shallow water solver.

Provides the high-level entry points: resolving a configuration against
its benchmark, running the solver, writing CSV artifacts and running
convergence studies.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .core import (
    BenchmarkCase,
    BoundaryConditions,
    BoundarySpec,
    ConfigValidator,
    DataError,
    ErrorReport,
    Mesh1D,
    NodalState,
    RunResult,
    SolverConfig,
    SpatialOperator,
    StepRecord,
    TimeIntegrator,
    WetDryTreatment,
    apply_overrides,
    build_uniform_mesh,
    compile_expression,
    eoc,
    get_benchmark,
    interpolate_bathymetry,
    l1_error,
)
from .core.benchmarks import SOLUTION_COLUMNS
from .core.errors import BenchmarkError, ConfigurationError
from .core.fem_core import Bathymetry

logger = logging.getLogger(__name__)

DEFAULT_RESOLUTIONS = [32, 64, 128, 256, 512]
CUSTOM_GRAVITY = 9.81


def setup_logging(level: str = "INFO") -> None:
    """
    Set up logging configuration.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
    """
    numeric_level = getattr(logging, level.upper(), logging.INFO)
    logging.basicConfig(
        level=numeric_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )


def resolve_config(config: SolverConfig) -> SolverConfig:
    """
    Fill unset fields from the selected benchmark.

    Explicitly set values always win. The returned copy is what every
    artifact header stores, so a run started from it is reproducible.

    Args:
        config: User configuration

    Returns:
        Resolved copy of ``config``
    """
    resolved = SolverConfig.from_dict(config.to_dict())
    ConfigValidator.validate_config(resolved)
    time = resolved.time

    if resolved.problem.benchmark != "custom":
        case = get_benchmark(resolved.problem.benchmark)
        if resolved.mesh.n_elements is None:
            resolved.mesh.n_elements = case.n_elements
        if resolved.problem.gravity is None:
            resolved.problem.gravity = case.gravity
        if time.nu is None:
            time.nu = case.nu
        if resolved.wetdry.strategy is None:
            resolved.wetdry.strategy = case.wet_dry
        if resolved.scheme.raw_flux_mode is None:
            resolved.scheme.raw_flux_mode = case.raw_flux_mode
        if not resolved.output.output_times:
            resolved.output.output_times = list(case.output_times)
        if time.t_end is None and not time.steady:
            if case.steady and time.steady is None:
                time.steady = True
            else:
                time.t_end = case.t_end
    else:
        if resolved.mesh.x_left is None:
            raise ConfigurationError("自定义问题需要 mesh.x_left/x_right")
        if resolved.mesh.n_elements is None:
            resolved.mesh.n_elements = 128
        if resolved.problem.gravity is None:
            resolved.problem.gravity = CUSTOM_GRAVITY
        if time.nu is None:
            time.nu = 0.5
        if resolved.wetdry.strategy is None:
            resolved.wetdry.strategy = "none"

    if time.steady is None:
        time.steady = False
    if time.t_end is None and not time.steady:
        raise ConfigurationError("必须指定 time.t_end 或稳态模式")
    if resolved.scheme.raw_flux_mode is None:
        resolved.scheme.raw_flux_mode = "steady" if time.steady else "full"
    return resolved


@dataclass
class Problem:
    """Mesh, topography, boundaries and initial state of one run."""

    name: str
    mesh: Mesh1D
    bathymetry: Bathymetry
    boundary: BoundaryConditions
    initial: NodalState
    case: Optional[BenchmarkCase] = None


def _boundary(
    config: SolverConfig, default: BoundaryConditions
) -> BoundaryConditions:
    cfg = config.boundary
    sides = {}
    for side, fallback in (("left", default.left), ("right", default.right)):
        kind = getattr(cfg, side)
        if kind:
            sides[side] = BoundarySpec.parse(
                kind,
                side,
                getattr(cfg, f"{side}_h_in"),
                getattr(cfg, f"{side}_hv_in"),
            )
        else:
            sides[side] = fallback
    return BoundaryConditions(sides["left"], sides["right"])


def _checked_state(h: np.ndarray, hv: np.ndarray) -> NodalState:
    h = np.asarray(h, dtype=float)
    hv = np.asarray(hv, dtype=float)
    for name, values in (("h", h), ("hv", hv)):
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            raise DataError(
                f"初始 {name} 不是有限值", {"node": int(bad[0])}
            )
    if np.any(h < 0.0):
        raise DataError(
            "初始水深为负", {"node": int(np.argmin(h)), "h": float(h.min())}
        )
    return NodalState(h, hv)


def build_problem(config: SolverConfig) -> Problem:
    """
    Build mesh, topography, boundaries and initial data.

    Args:
        config: Resolved configuration

    Returns:
        Problem instance

    Raises:
        ConfigurationError: For invalid expressions or mesh parameters
        DataError: For non-finite or negative initial data
    """
    problem = config.problem
    g = float(problem.gravity)  # type: ignore[arg-type]
    n = int(config.mesh.n_elements)  # type: ignore[arg-type]

    if problem.benchmark == "custom":
        mesh = build_uniform_mesh(
            config.mesh.x_left, config.mesh.x_right, n  # type: ignore
        )
        b = compile_expression(problem.bathymetry, "problem.bathymetry")
        h0 = compile_expression(problem.initial_h, "problem.initial_h")
        hv0 = compile_expression(problem.initial_hv, "problem.initial_hv")
        bathymetry = interpolate_bathymetry(b, mesh, g)
        initial = _checked_state(h0(mesh.nodes), hv0(mesh.nodes))
        boundary = _boundary(config, BoundaryConditions.walls())
        return Problem("custom", mesh, bathymetry, boundary, initial)

    case = get_benchmark(problem.benchmark)
    mesh = build_uniform_mesh(case.x_left, case.x_right, n)
    bathymetry = interpolate_bathymetry(case.bathymetry, mesh, g)
    h, hv = case.initial(mesh.nodes)
    initial = _checked_state(h, hv)
    boundary = _boundary(config, case.boundary())
    return Problem(case.name, mesh, bathymetry, boundary, initial, case)


@dataclass
class RunOutcome:
    """Resolved configuration, problem and time integration result."""

    config: SolverConfig
    problem: Problem
    result: RunResult
    boundary_kinds: List[Dict[str, str]] = field(default_factory=list)

    def solution_frame(self, state: NodalState) -> pd.DataFrame:
        """Nodal solution with columns x, h, hv, v, b, H."""
        x = self.problem.mesh.nodes
        b = self.problem.bathymetry.nodal_b
        wet = state.h > 0.0
        v = np.where(wet, state.hv / np.where(wet, state.h, 1.0), 0.0)
        return pd.DataFrame(
            {
                "x": x,
                "h": state.h,
                "hv": state.hv,
                "v": v,
                "b": b,
                "H": state.h + b,
            },
            columns=SOLUTION_COLUMNS,
        )

    def diagnostics_frame(self) -> pd.DataFrame:
        """One row per completed time step."""
        frame = pd.DataFrame([r.to_dict() for r in self.result.records])
        if self.boundary_kinds and len(frame):
            frame["left_kind"] = [
                k.get("left", "") for k in self.boundary_kinds
            ]
            frame["right_kind"] = [
                k.get("right", "") for k in self.boundary_kinds
            ]
        return frame

    def errors(self, t: Optional[float] = None) -> Dict[str, float]:
        """
        L1 errors against the exact solution at time ``t``.

        Raises:
            BenchmarkError: If the problem has no exact solution
        """
        case = self.problem.case
        if case is None or not case.has_exact:
            raise BenchmarkError(f"算例 {self.problem.name} 没有精确解")
        t = self.result.t if t is None else t
        state = self.result.snapshots.get(t, self.result.state)
        mesh = self.problem.mesh
        exact = case.exact_state(mesh.nodes, t)
        return l1_error(state, exact, mesh, self.problem.bathymetry.nodal_b)


def solve(
    config: Optional[SolverConfig] = None, **overrides: Any
) -> RunOutcome:
    """
    Resolve the configuration, build the problem and integrate in time.

    Args:
        config: Base configuration (defaults when None)
        **overrides: ``section__param`` overrides

    Returns:
        RunOutcome

    Example:
        >>> outcome = solve(problem__benchmark="wet-dam-break",
        ...                 scheme__scheme="MCL", mesh__n_elements=64)
    """
    base = SolverConfig.from_dict(config.to_dict()) if config else None
    base = apply_overrides(base or SolverConfig(), overrides)
    resolved = resolve_config(base)
    problem = build_problem(resolved)

    h0_max = float(problem.initial.h.max())
    wet_dry = WetDryTreatment.from_config(
        resolved.wetdry,
        problem.mesh,
        problem.bathymetry,
        h0_max if h0_max > 0.0 else 1.0,
    )
    operator = SpatialOperator.from_config(
        resolved.scheme,
        problem.mesh,
        problem.bathymetry,
        problem.boundary,
        wet_dry,
    )
    integrator = TimeIntegrator.from_config(
        operator,
        resolved.time,
        entropy_diagnostics=resolved.output.entropy_diagnostics,
        log_every=resolved.output.log_every,
    )

    kinds: List[Dict[str, str]] = []

    def track(record: StepRecord, state: NodalState) -> None:
        kinds.append(problem.boundary.current_kinds)

    logger.info(
        f"运行 {problem.name}: {resolved.scheme.scheme}, "
        f"{problem.mesh.n_elements} 个单元, "
        f"干湿处理 {wet_dry.strategy}"
    )
    result = integrator.run(
        problem.initial, resolved.output.output_times, track
    )
    return RunOutcome(resolved, problem, result, kinds)


def write_frame(
    path: Union[str, Path], frame: pd.DataFrame, config: SolverConfig
) -> Path:
    """Write ``frame`` as CSV preceded by the configuration header."""
    output_path = Path(path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with open(output_path, "w", encoding="utf-8", newline="") as f:
        f.write(config.to_header())
        frame.to_csv(f, index=False)
    logger.info(f"已写入: {output_path}")
    return output_path


def read_frame(path: Union[str, Path]) -> pd.DataFrame:
    """Read a CSV artifact, skipping its configuration header."""
    return pd.read_csv(path, comment="#")


def _time_tag(t: float) -> str:
    return f"{t:g}".replace(".", "p")


def run(
    config: Optional[SolverConfig] = None, **overrides: Any
) -> Dict[str, Path]:
    """
    Run the solver and write all artifacts.

    Writes one solution CSV per output time, the diagnostics CSV, the
    exact profiles when an exact solution exists and an error table.

    Args:
        config: Base configuration
        **overrides: ``section__param`` overrides

    Returns:
        Artifact paths keyed by kind
    """
    outcome = solve(config, **overrides)
    cfg = outcome.config
    out_dir = Path(cfg.output.out_dir)
    stem = f"{outcome.problem.name}_{cfg.scheme.scheme}"
    case = outcome.problem.case
    artifacts: Dict[str, Path] = {}

    times = sorted(outcome.result.snapshots)
    if cfg.time.steady or not times:
        snapshots = {outcome.result.t: outcome.result.state}
    else:
        snapshots = {t: outcome.result.snapshots[t] for t in times}

    error_rows = []
    for t, state in snapshots.items():
        tag = "steady" if cfg.time.steady else f"t{_time_tag(t)}"
        artifacts[f"solution_{tag}"] = write_frame(
            out_dir / f"{stem}_{tag}.csv",
            outcome.solution_frame(state),
            cfg,
        )
        if case is not None and case.has_exact:
            if cfg.output.write_exact:
                artifacts[f"exact_{tag}"] = write_frame(
                    out_dir / f"{outcome.problem.name}_exact_{tag}.csv",
                    case.exact_profile(outcome.problem.mesh.nodes, t),
                    cfg,
                )
            errors = outcome.errors(t)
            error_rows.append({"t": t, **errors})
            logger.info(
                f"t={t:g}: L1(h)={errors['h']:.3e}, "
                f"L1(hv)={errors['hv']:.3e}"
            )

    if error_rows:
        artifacts["errors"] = write_frame(
            out_dir / f"{stem}_errors.csv", pd.DataFrame(error_rows), cfg
        )
    if cfg.output.diagnostics:
        artifacts["diagnostics"] = write_frame(
            out_dir / f"{stem}_diagnostics.csv",
            outcome.diagnostics_frame(),
            cfg,
        )
    return artifacts


def convergence_study(
    config: Optional[SolverConfig] = None,
    schemes: Optional[Sequence[str]] = None,
    variable: str = "h",
    write: bool = True,
    **overrides: Any,
) -> pd.DataFrame:
    """
    L1 errors and experimental orders of convergence on a doubling chain.

    Args:
        config: Base configuration; ``mesh.resolutions`` gives the chain
        schemes: Schemes to compare (the configured scheme when None)
        variable: 'h', 'hv' or 'H'
        write: Write the EOC table to the output directory
        **overrides: ``section__param`` overrides

    Returns:
        DataFrame with scheme, n_elements, inv_h, error and eoc columns

    Raises:
        BenchmarkError: Without an exact solution or a doubling chain
    """
    base = SolverConfig.from_dict(config.to_dict()) if config else None
    base = apply_overrides(base or SolverConfig(), overrides)
    resolutions = list(base.mesh.resolutions) or DEFAULT_RESOLUTIONS
    eoc([1.0] * len(resolutions), resolutions)
    case = get_benchmark(base.problem.benchmark)
    if not case.has_exact:
        raise BenchmarkError(f"算例 {case.name} 没有精确解, 无法计算 EOC")

    reports = []
    for scheme in schemes or [base.scheme.scheme]:
        errors = []
        for n in resolutions:
            outcome = solve(base, scheme__scheme=scheme, mesh__n_elements=n)
            errors.append(outcome.errors()[variable])
        report = ErrorReport(
            scheme, resolutions, errors, eoc(errors, resolutions), variable
        )
        for n, err, rate in zip(resolutions, errors, report.eocs):
            shown = "-" if math.isnan(rate) else f"{rate:.2f}"
            logger.info(f"{scheme} 1/h={n}: L1={err:.2e}, EOC={shown}")
        reports.append(report.to_frame())

    table = pd.concat(reports, ignore_index=True)
    if write:
        resolved = resolve_config(base)
        write_frame(
            Path(resolved.output.out_dir) / f"{case.name}_eoc.csv",
            table,
            resolved,
        )
    return table
