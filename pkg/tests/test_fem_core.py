#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Tests for the P1 finite element core."""

import numpy as np
import pytest

from shallow_water_afc.core.errors import (
    ConfigurationError,
    DataError,
    NumericalError,
)
from shallow_water_afc.core.fem_core import (
    Bathymetry,
    NodalState,
    build_mesh,
    build_uniform_mesh,
    evaluate_nodal,
    interpolate_bathymetry,
)


class TestMesh:
    """Test mesh and matrix assembly."""

    @pytest.fixture
    def mesh(self):
        """Uniform mesh with four elements on (0, 1)."""
        return build_uniform_mesh(0.0, 1.0, 4)

    def test_sizes(self, mesh):
        """Test node, element and edge counts."""
        assert mesh.n_nodes == 5
        assert mesh.n_elements == 4
        assert mesh.n_edges == 4
        assert mesh.length == pytest.approx(1.0)
        assert mesh.dx == pytest.approx(0.25)

    def test_lumped_mass(self, mesh):
        """Test lumped masses of a uniform mesh."""
        expected = [0.125, 0.25, 0.25, 0.25, 0.125]
        assert np.allclose(mesh.lumped_mass, expected)
        assert mesh.lumped_mass.sum() == pytest.approx(1.0)

    def test_edge_coefficients(self, mesh):
        """Test off-diagonal mass and gradient entries."""
        assert np.allclose(mesh.m_ij, 0.25 / 6.0)
        assert np.allclose(mesh.c_ij, 0.5)
        assert np.allclose(mesh.c_ji, -0.5)

    def test_gradient_rows_sum_to_zero(self, mesh):
        """Test that every row of c_ij sums to zero."""
        rows = np.asarray(mesh.grad_coeff.sum(axis=1)).ravel()
        assert np.allclose(rows, 0.0)

    def test_nonuniform_mass(self):
        """Test lumped masses on a nonuniform mesh."""
        mesh = build_mesh(np.array([0.0, 0.1, 0.4, 1.0]))
        assert np.allclose(mesh.lumped_mass, [0.05, 0.2, 0.45, 0.3])

    def test_stencil(self, mesh):
        """Test node stencils."""
        assert mesh.stencil(0) == [0, 1]
        assert mesh.stencil(2) == [1, 2, 3]

    def test_too_few_elements(self):
        """Test rejection of a single element."""
        with pytest.raises(ConfigurationError, match="单元数"):
            build_uniform_mesh(0.0, 1.0, 1)

    def test_invalid_interval(self):
        """Test rejection of an empty interval."""
        with pytest.raises(ConfigurationError, match="无效的区间"):
            build_uniform_mesh(1.0, 1.0, 8)

    def test_unsorted_nodes(self):
        """Test rejection of non-increasing nodes."""
        with pytest.raises(ConfigurationError, match="严格递增"):
            build_mesh(np.array([0.0, 0.5, 0.4, 1.0]))


class TestBathymetry:
    """Test topography interpolation."""

    def test_vectorized_function(self):
        """Test interpolation of a vectorized function."""
        mesh = build_uniform_mesh(0.0, 1.0, 4)
        bathy = interpolate_bathymetry(lambda x: x * x, mesh, 9.81)
        assert np.allclose(bathy.nodal_b, mesh.nodes**2)
        assert bathy.gravity == 9.81
        assert not bathy.is_flat

    def test_scalar_function_fallback(self):
        """Test pointwise evaluation of a scalar-only function."""
        x = np.array([0.0, 0.25, 0.75])
        values = evaluate_nodal(lambda s: 1.0 if s < 0.5 else 0.0, x)
        assert np.array_equal(values, [1.0, 1.0, 0.0])

    def test_constant_function(self):
        """Test broadcasting of a constant."""
        mesh = build_uniform_mesh(0.0, 1.0, 4)
        bathy = interpolate_bathymetry(lambda x: 0.7, mesh, 1.0)
        assert np.all(bathy.nodal_b == 0.7)
        assert bathy.is_flat

    def test_nonfinite_topography(self):
        """Test rejection of non-finite topography."""
        mesh = build_uniform_mesh(0.0, 1.0, 4)
        with pytest.raises(DataError, match="有限值"):
            interpolate_bathymetry(lambda x: 1.0 / (x - 0.5), mesh, 1.0)

    def test_nonpositive_gravity(self):
        """Test rejection of g <= 0."""
        mesh = build_uniform_mesh(0.0, 1.0, 4)
        with pytest.raises(ConfigurationError, match="重力"):
            interpolate_bathymetry(lambda x: x, mesh, 0.0)


class TestNodalState:
    """Test the nodal state container."""

    def test_free_surface_and_mass(self):
        """Test H = h + b and the lumped mass integral."""
        mesh = build_uniform_mesh(0.0, 1.0, 4)
        state = NodalState(np.ones(5), np.zeros(5))
        bathy = Bathymetry(np.full(5, 0.5), 1.0)
        assert np.allclose(state.free_surface(bathy), 1.5)
        assert state.total_mass(mesh) == pytest.approx(1.0)

    def test_copy_is_independent(self):
        """Test that copies do not share memory."""
        state = NodalState(np.ones(3), np.zeros(3))
        clone = state.copy()
        clone.h[0] = 5.0
        assert state.h[0] == 1.0

    def test_rounding_noise_is_clipped(self):
        """Test that tiny negative heights are set to zero."""
        state = NodalState(np.array([1.0, -1e-16]), np.zeros(2))
        state.check()
        assert state.h[1] == 0.0

    def test_negative_height(self):
        """Test rejection of negative heights."""
        state = NodalState(np.array([1.0, -1e-3]), np.zeros(2))
        with pytest.raises(NumericalError, match="水深为负"):
            state.check()

    def test_nonfinite_discharge(self):
        """Test rejection of NaN discharges."""
        state = NodalState(np.ones(2), np.array([0.0, np.nan]))
        with pytest.raises(NumericalError, match="非有限值"):
            state.check()

    def test_shape_mismatch(self):
        """Test rejection of inconsistent arrays."""
        with pytest.raises(DataError):
            NodalState(np.ones(3), np.zeros(2))
