#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Shallow Water AFC.

A one-dimensional shallow water solver using continuous P1 finite
elements with algebraic flux correction: a low-order invariant domain
preserving scheme (LOW), monolithic convex limiting (MCL) and MCL with a
semi-discrete entropy fix (MCL-SDE), for flows over variable topography
with wetting and drying.

Features:
    - Well-balanced for the lake at rest, including wet/dry shorelines
    - Positivity preserving under the CFL condition
    - Five wetting and drying treatments
    - Adaptive SSP Runge-Kutta time stepping with stage repetition
    - Benchmark registry with exact solutions and EOC tables

Example:
    Basic usage from command line::

        $ shallow-water-afc --benchmark wet-dam-break --scheme MCL

    Programmatic usage::

        from shallow_water_afc import solve

        outcome = solve(problem__benchmark="wet-dam-break",
                        scheme__scheme="MCL-SDE", mesh__n_elements=128)
        print(outcome.errors())
"""

__version__ = "0.1.0"
__author__ = "Shallow Water AFC Contributors"
__license__ = "MIT"

from .core import (
    REGISTRY,
    BenchmarkError,
    ConfigurationError,
    ConfigValidator,
    ShallowWaterError,
    SolverConfig,
    SpatialOperator,
    TimeIntegrator,
    ValidationError,
    get_benchmark,
    load_config,
    validate_config_file,
)
from .utils import convergence_study, resolve_config, run, solve

__all__ = [
    "__version__",
    # High-level functions
    "solve",
    "run",
    "convergence_study",
    "resolve_config",
    # Config
    "SolverConfig",
    "load_config",
    "ConfigValidator",
    "ValidationError",
    "validate_config_file",
    # Core classes
    "SpatialOperator",
    "TimeIntegrator",
    "REGISTRY",
    "get_benchmark",
    # Errors
    "ShallowWaterError",
    "ConfigurationError",
    "BenchmarkError",
]
