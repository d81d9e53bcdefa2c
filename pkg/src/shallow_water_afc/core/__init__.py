#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Shallow water AFC - Core module.

Continuous P1 finite elements with low-order invariant domain preserving
fluxes, monolithic convex limiting and semi-discrete entropy fixes.
"""

from .benchmarks import (
    REGISTRY,
    BenchmarkCase,
    ErrorReport,
    eoc,
    exact_dry_dam_break,
    exact_riemann_star,
    exact_riemann_wave_speeds,
    exact_thacker,
    exact_wet_dam_break,
    get_benchmark,
    l1_error,
    reference_solution,
    steady_reference,
)
from .boundary import BoundaryConditions, BoundaryKind, BoundarySpec
from .config import (
    BoundaryConfig,
    MeshConfig,
    OutputConfig,
    ProblemConfig,
    SchemeConfig,
    SolverConfig,
    TimeConfig,
    WetDryConfig,
    apply_overrides,
    load_config,
)
from .errors import (
    BenchmarkError,
    BoundaryError,
    ConfigurationError,
    DataError,
    DegenerateEdgeError,
    NumericalError,
    ShallowWaterError,
    StepFailure,
)
from .expression import compile_expression
from .fem_core import (
    Bathymetry,
    Mesh1D,
    NodalState,
    build_mesh,
    build_uniform_mesh,
    interpolate_bathymetry,
)
from .scheme import SCHEMES, Assembly, SpatialOperator
from .time_integration import (
    RunResult,
    SSPIntegrator,
    StepRecord,
    TimeIntegrator,
)
from .validator import ConfigValidator, ValidationError, validate_config_file
from .wet_dry import STRATEGIES, WetDryTreatment

__all__ = [
    # Config classes
    "MeshConfig",
    "ProblemConfig",
    "SchemeConfig",
    "TimeConfig",
    "WetDryConfig",
    "BoundaryConfig",
    "OutputConfig",
    "SolverConfig",
    "load_config",
    "apply_overrides",
    # Errors and validation
    "ShallowWaterError",
    "ConfigurationError",
    "DataError",
    "NumericalError",
    "DegenerateEdgeError",
    "BoundaryError",
    "StepFailure",
    "BenchmarkError",
    "ConfigValidator",
    "ValidationError",
    "validate_config_file",
    "compile_expression",
    # Discretization
    "Mesh1D",
    "Bathymetry",
    "NodalState",
    "build_mesh",
    "build_uniform_mesh",
    "interpolate_bathymetry",
    "BoundaryKind",
    "BoundarySpec",
    "BoundaryConditions",
    "STRATEGIES",
    "WetDryTreatment",
    "SCHEMES",
    "Assembly",
    "SpatialOperator",
    "SSPIntegrator",
    "TimeIntegrator",
    "StepRecord",
    "RunResult",
    # Benchmarks
    "REGISTRY",
    "BenchmarkCase",
    "ErrorReport",
    "get_benchmark",
    "exact_wet_dam_break",
    "exact_dry_dam_break",
    "exact_thacker",
    "exact_riemann_star",
    "exact_riemann_wave_speeds",
    "steady_reference",
    "l1_error",
    "eoc",
    "reference_solution",
]
