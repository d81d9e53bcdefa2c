#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Arithmetic expressions in ``x`` for custom bathymetry and initial data.

Expressions use numexpr syntax, e.g. ``"where(x < 0.5, 1.0, 0.1)"`` or
``"0.2 - 0.05 * (x - 10)**2"``. The only names available are ``x``,
``pi`` and the numexpr built-in functions.
"""

import logging
import math
from typing import Callable

import numexpr as ne
import numpy as np

from .errors import ConfigurationError

logger = logging.getLogger(__name__)

CONSTANTS = {"pi": math.pi}


def compile_expression(
    text: str, field_name: str = "expression"
) -> Callable[[np.ndarray], np.ndarray]:
    """
    Turn an expression string into a vectorized function of ``x``.

    The expression is evaluated once at x = 0 so that syntax errors and
    unknown names surface at configuration time.

    Args:
        text: Expression in x
        field_name: Configuration field path used in error messages

    Returns:
        Function mapping node coordinates to values of the same shape

    Raises:
        ConfigurationError: For empty or invalid expressions
    """
    source = (text or "").strip()
    if not source:
        raise ConfigurationError(f"{field_name}: 表达式为空")

    def evaluate(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        values = ne.evaluate(
            source, local_dict={"x": x, **CONSTANTS}, global_dict={}
        )
        return np.broadcast_to(np.asarray(values, dtype=float), x.shape)

    try:
        evaluate(np.zeros(1))
    except (SyntaxError, KeyError, ValueError, TypeError) as e:
        raise ConfigurationError(
            f"{field_name}: 无效的表达式 '{source}': {e}"
        ) from e
    logger.debug(f"表达式已编译: {field_name} = {source}")
    return evaluate
