#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Exception hierarchy for the shallow water solver.

Every failure the solver reports derives from ``ShallowWaterError`` and
carries the process exit code the CLI returns for its category.
"""

from typing import Any, Dict, Optional


class ShallowWaterError(Exception):
    """Base class for all solver errors."""

    exit_code = 1

    def __init__(
        self, message: str, context: Optional[Dict[str, Any]] = None
    ):
        super().__init__(message)
        self.context: Dict[str, Any] = dict(context or {})

    def __str__(self) -> str:
        base = super().__str__()
        if not self.context:
            return base
        details = ", ".join(f"{k}={v}" for k, v in self.context.items())
        return f"{base} ({details})"


class ConfigurationError(ShallowWaterError):
    """Invalid mesh, scheme or run configuration."""

    exit_code = 2


class DataError(ShallowWaterError):
    """Non-finite or otherwise unusable input data."""

    exit_code = 3


class NumericalError(ShallowWaterError):
    """Non-finite values or broken invariants during assembly."""

    exit_code = 4


class DegenerateEdgeError(NumericalError):
    """Edge with zero viscosity but a nonzero flux difference."""


class BoundaryError(ShallowWaterError):
    """Boundary data cannot be applied to the internal state."""

    exit_code = 5


class StepFailure(ShallowWaterError):
    """Time step could not be completed within the halving budget."""

    exit_code = 6


class BenchmarkError(ShallowWaterError):
    """Reference solution or error table cannot be computed."""

    exit_code = 7
