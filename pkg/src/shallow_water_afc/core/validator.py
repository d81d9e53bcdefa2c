#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Configuration validation for the shallow water solver.

Checks a ``SolverConfig`` section by section before any mesh is built and
reports the offending field path, e.g. ``time.nu``.
"""

import logging
import math
from pathlib import Path
from typing import Any, Optional, Tuple, Union

from .benchmarks import REGISTRY
from .boundary import BoundarySpec
from .config import (
    BoundaryConfig,
    MeshConfig,
    OutputConfig,
    ProblemConfig,
    SchemeConfig,
    SolverConfig,
    TimeConfig,
    WetDryConfig,
    load_config,
)
from .errors import ConfigurationError
from .low_order import WAVE_SPEED_MODES
from .mcl_limiter import RAW_FLUX_MODES
from .scheme import resolve_scheme
from .wet_dry import resolve_strategy

logger = logging.getLogger(__name__)


class ValidationError(ConfigurationError):
    """Invalid configuration value at a field path."""

    def __init__(self, field_path: str, message: str):
        super().__init__(f"{field_path}: {message}", {"field": field_path})
        self.field_path = field_path


def _positive(value: Any) -> bool:
    return (
        isinstance(value, (int, float))
        and not isinstance(value, bool)
        and math.isfinite(value)
        and value > 0
    )


class ConfigValidator:
    """
    Validator for solver run configurations.

    Only checks what can be decided without building the mesh; parameter
    combinations that depend on the benchmark are checked when the run is
    set up.
    """

    RK_ORDERS = (1, 2, 3)

    @classmethod
    def validate_mesh(cls, mesh: MeshConfig) -> None:
        """
        Validate element counts and the convergence resolution chain.

        Raises:
            ValidationError: For non-integer or too small counts
        """
        n = mesh.n_elements
        if n is not None and (not isinstance(n, int) or n < 2):
            raise ValidationError("mesh.n_elements", f"必须是 ≥2 的整数: {n}")
        for k, res in enumerate(mesh.resolutions):
            if not isinstance(res, int) or res < 2:
                raise ValidationError(
                    f"mesh.resolutions[{k}]", f"必须是 ≥2 的整数: {res}"
                )
        if (mesh.x_left is None) != (mesh.x_right is None):
            raise ValidationError(
                "mesh.x_left", "x_left 与 x_right 必须同时指定"
            )
        if mesh.x_left is not None and not mesh.x_left < mesh.x_right:
            raise ValidationError(
                "mesh.x_right", f"必须大于 x_left={mesh.x_left}"
            )
        logger.debug("网格配置验证通过")

    @classmethod
    def validate_problem(cls, problem: ProblemConfig) -> None:
        """
        Validate the benchmark name or custom problem block.

        Raises:
            ValidationError: For unknown benchmarks, a missing custom
                initial height or non-positive gravity
        """
        if problem.gravity is not None and not _positive(problem.gravity):
            raise ValidationError(
                "problem.gravity", f"必须为正: {problem.gravity}"
            )
        if problem.benchmark == "custom":
            if not problem.initial_h.strip():
                raise ValidationError(
                    "problem.initial_h", "自定义问题需要初始水深表达式"
                )
            return
        if problem.benchmark not in REGISTRY:
            valid = ", ".join(sorted(REGISTRY))
            raise ValidationError(
                "problem.benchmark",
                f"未知的算例 {problem.benchmark}。可选: custom, {valid}",
            )
        logger.debug("问题配置验证通过")

    @classmethod
    def validate_scheme(cls, scheme: SchemeConfig) -> None:
        """
        Validate scheme, raw flux mode and wave speed names.

        Raises:
            ValidationError: For unknown names
        """
        try:
            resolve_scheme(scheme.scheme)
        except ConfigurationError as e:
            raise ValidationError("scheme.scheme", str(e)) from None
        mode = scheme.raw_flux_mode
        if mode is not None and mode not in RAW_FLUX_MODES:
            raise ValidationError(
                "scheme.raw_flux_mode",
                f"未知的模式 {mode}。可选: {', '.join(RAW_FLUX_MODES)}",
            )
        if scheme.wave_speed not in WAVE_SPEED_MODES:
            raise ValidationError(
                "scheme.wave_speed",
                f"未知的模式 {scheme.wave_speed}。"
                f"可选: {', '.join(WAVE_SPEED_MODES)}",
            )

    @classmethod
    def validate_time(cls, time: TimeConfig) -> None:
        """
        Validate the SSP order, CFL parameter and stopping criteria.

        Raises:
            ValidationError: For invalid values or both t_end and steady
                mode set
        """
        if time.rk_order not in cls.RK_ORDERS:
            raise ValidationError(
                "time.rk_order", f"必须是 1, 2 或 3: {time.rk_order}"
            )
        if time.nu is not None and not (_positive(time.nu) and time.nu <= 1):
            raise ValidationError("time.nu", f"必须在 (0, 1] 内: {time.nu}")
        if time.t_end is not None and not _positive(time.t_end):
            raise ValidationError("time.t_end", f"必须为正: {time.t_end}")
        if time.t_end is not None and time.steady:
            raise ValidationError(
                "time.steady", "t_end 与稳态模式不能同时指定"
            )
        if not _positive(time.steady_tol):
            raise ValidationError(
                "time.steady_tol", f"必须为正: {time.steady_tol}"
            )
        for name in ("max_steps", "max_halvings"):
            value = getattr(time, name)
            if not isinstance(value, int) or value < 1:
                raise ValidationError(
                    f"time.{name}", f"必须是正整数: {value}"
                )

    @classmethod
    def validate_wetdry(cls, wetdry: WetDryConfig) -> None:
        """
        Validate the wet/dry strategy and its parameters.

        Raises:
            ValidationError: For unknown strategies or invalid tolerances
        """
        try:
            resolve_strategy(wetdry.strategy)
        except ConfigurationError as e:
            raise ValidationError("wetdry.strategy", str(e)) from None
        if wetdry.epsilon is not None and wetdry.epsilon < 0:
            raise ValidationError(
                "wetdry.epsilon", f"不能为负: {wetdry.epsilon}"
            )
        for name in ("sigma", "delta"):
            if not _positive(getattr(wetdry, name)):
                raise ValidationError(
                    f"wetdry.{name}", f"必须为正: {getattr(wetdry, name)}"
                )

    @classmethod
    def validate_boundary(cls, boundary: BoundaryConfig) -> None:
        """
        Validate boundary kinds and their prescribed data.

        Raises:
            ValidationError: For unknown kinds or missing data
        """
        for side in ("left", "right"):
            kind = getattr(boundary, side)
            if not kind:
                continue
            try:
                BoundarySpec.parse(
                    kind,
                    side,
                    getattr(boundary, f"{side}_h_in"),
                    getattr(boundary, f"{side}_hv_in"),
                )
            except ConfigurationError as e:
                raise ValidationError(f"boundary.{side}", str(e)) from None

    @classmethod
    def validate_output(cls, output: OutputConfig) -> None:
        """
        Validate output times and the logging interval.

        Raises:
            ValidationError: For negative output times
        """
        for k, t in enumerate(output.output_times):
            if not isinstance(t, (int, float)) or t < 0:
                raise ValidationError(
                    f"output.output_times[{k}]", f"必须是非负数: {t}"
                )
        if output.log_every < 1:
            raise ValidationError(
                "output.log_every", f"必须是正整数: {output.log_every}"
            )

    @classmethod
    def validate_config(cls, config: SolverConfig) -> None:
        """
        Perform all section checks on a configuration.

        Raises:
            ValidationError: On the first invalid field
        """
        cls.validate_mesh(config.mesh)
        cls.validate_problem(config.problem)
        cls.validate_scheme(config.scheme)
        cls.validate_time(config.time)
        cls.validate_wetdry(config.wetdry)
        cls.validate_boundary(config.boundary)
        cls.validate_output(config.output)
        logger.debug("配置验证通过")


def validate_config_file(
    file_path: Union[str, Path],
) -> Tuple[bool, Optional[str]]:
    """
    Validate a configuration file and return status.

    Args:
        file_path: Path to a YAML or JSON run configuration

    Returns:
        Tuple of (is_valid, error_message)

    Example:
        >>> is_valid, error = validate_config_file("run.yaml")
        >>> if not is_valid:
        ...     print(f"Validation failed: {error}")
    """
    try:
        ConfigValidator.validate_config(load_config(file_path))
        return True, None
    except Exception as e:
        return False, str(e)
