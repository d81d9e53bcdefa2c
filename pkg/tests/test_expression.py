#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Tests for expressions in x."""

import numpy as np
import pytest

from shallow_water_afc.core.errors import ConfigurationError
from shallow_water_afc.core.expression import compile_expression


class TestCompileExpression:
    """Test compile_expression function."""

    def test_polynomial(self):
        """Test a parabolic bump."""
        f = compile_expression("0.2 - 0.05 * (x - 10)**2")
        x = np.array([8.0, 10.0, 12.0])
        assert np.allclose(f(x), [0.0, 0.2, 0.0])

    def test_where(self):
        """Test piecewise data with where()."""
        f = compile_expression("where(x < 0.5, 1.0, 0.1)")
        assert np.allclose(f(np.array([0.25, 0.75])), [1.0, 0.1])

    def test_pi_and_functions(self):
        """Test the pi constant and built-in functions."""
        f = compile_expression("sin(pi * x)")
        assert np.allclose(f(np.array([0.0, 0.5])), [0.0, 1.0])

    def test_constant_is_broadcast(self):
        """Test that constants take the shape of x."""
        values = compile_expression("0.5")(np.linspace(0.0, 1.0, 7))
        assert values.shape == (7,)
        assert np.all(values == 0.5)

    def test_empty_expression(self):
        """Test rejection of empty input."""
        with pytest.raises(ConfigurationError, match="problem.initial_h"):
            compile_expression("  ", "problem.initial_h")

    def test_unknown_name(self):
        """Test rejection of names other than x."""
        with pytest.raises(ConfigurationError, match="无效的表达式"):
            compile_expression("y + 1")
