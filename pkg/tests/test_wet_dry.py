#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Tests for wetting and drying treatments."""

import numpy as np
import pytest

from shallow_water_afc.core.config import WetDryConfig
from shallow_water_afc.core.errors import ConfigurationError
from shallow_water_afc.core.fem_core import (
    Bathymetry,
    NodalState,
    build_uniform_mesh,
)
from shallow_water_afc.core.wet_dry import (
    WetDryTreatment,
    boundary_layer_velocity,
    fix_azerad,
    fix_entropy_based,
    fix_friction_boundary_layer,
    fix_kurganov_petrova,
    fix_zero_velocity,
    resolve_strategy,
)


class TestVelocityFixes:
    """Test the pointwise velocity formulas."""

    def test_zero_velocity(self):
        """Test v = 0 below the tolerance and hv/h above it."""
        v = fix_zero_velocity(
            np.array([1e-8, 0.5]), np.array([1e-9, 0.2]), 1e-4
        )
        assert v[0] == 0.0
        assert v[1] == pytest.approx(0.4)

    def test_azerad_exact_when_wet(self):
        """Test ṽ = hv/h for h ≥ ε."""
        h = np.array([0.1, 1.0, 2.0])
        hv = np.array([0.05, -0.3, 1.0])
        assert np.allclose(fix_azerad(h, hv, 0.1), hv / h)

    def test_azerad_continuous_at_threshold(self):
        """Test continuity across h = ε."""
        eps = 1e-3
        below = fix_azerad(eps * (1 - 1e-9), 1e-4, eps)
        above = fix_azerad(eps * (1 + 1e-9), 1e-4, eps)
        assert below == pytest.approx(above, rel=1e-6)

    def test_azerad_continuous_for_random_data(self, rng):
        """Test continuity across h = ε for random ε and hv."""
        eps = 10.0 ** rng.uniform(-16.0, -1.0, 10_000)
        hv = eps * rng.uniform(-5.0, 5.0, 10_000)
        below = fix_azerad(eps * (1.0 - 1e-9), hv, eps)
        above = fix_azerad(eps * (1.0 + 1e-9), hv, eps)
        scale = np.abs(hv) / eps
        assert np.all(np.abs(below - above) <= 1e-7 * scale)

    def test_zero_velocity_one_sided_limits(self, rng):
        """Test v → hv/tol from above and v = 0 just below the cut-off."""
        tol = 10.0 ** rng.uniform(-8.0, -2.0, 10_000)
        hv = tol * rng.uniform(-5.0, 5.0, 10_000)
        below = fix_zero_velocity(tol * (1.0 - 1e-9), hv, tol)
        at = fix_zero_velocity(tol, hv, tol)
        above = fix_zero_velocity(tol * (1.0 + 1e-9), hv, tol)
        assert np.all(below == 0.0)
        assert np.allclose(at, hv / tol, rtol=1e-15)
        assert np.allclose(above, at, rtol=1e-8)

    def test_kurganov_petrova_continuous_at_threshold(self, rng):
        """Test continuity of ṽ and h·ṽ across h = ε."""
        eps = 10.0 ** rng.uniform(-6.0, -1.0, 10_000)
        hv = eps * rng.uniform(-5.0, 5.0, 10_000)
        v_below, q_below = fix_kurganov_petrova(eps * (1.0 - 1e-9), hv, eps)
        v_above, q_above = fix_kurganov_petrova(eps * (1.0 + 1e-9), hv, eps)
        scale = np.abs(hv) / eps
        assert np.all(np.abs(v_below - v_above) <= 1e-7 * scale)
        assert np.all(np.abs(q_below - q_above) <= 1e-7 * np.abs(hv))

    def test_friction_continuous_at_delta(self, rng):
        """Test continuity of ṽ across h = δ for random surfaces."""
        n_elements = 9_999
        mesh = build_uniform_mesh(0.0, 1.0, n_elements)
        delta = 1e-3
        H = rng.uniform(0.0, 1.0, mesh.n_nodes)
        hv = delta * rng.uniform(-5.0, 5.0, mesh.n_nodes)
        args = (H, mesh, 9.81, 10.0, delta)
        v_below, _ = fix_friction_boundary_layer(
            np.full(mesh.n_nodes, delta * (1.0 - 1e-9)), hv, *args
        )
        v_above, _ = fix_friction_boundary_layer(
            np.full(mesh.n_nodes, delta * (1.0 + 1e-9)), hv, *args
        )
        v_bl = boundary_layer_velocity(
            np.full(mesh.n_nodes, delta), H, mesh, 9.81, 10.0
        )
        scale = np.abs(hv) / delta + np.abs(v_bl)
        assert np.all(np.abs(v_below - v_above) <= 1e-7 * scale)

    def test_kurganov_petrova_exact_when_wet(self):
        """Test ṽ = hv/h for h ≥ ε and the overwritten discharge."""
        h = np.array([0.5, 1.0])
        hv = np.array([0.1, -0.4])
        v, q = fix_kurganov_petrova(h, hv, 0.25)
        assert np.allclose(v, hv / h)
        assert np.allclose(q, hv)

    def test_kurganov_petrova_damps_thin_layers(self):
        """Test |ṽ| < |hv/h| for h < ε."""
        v, _ = fix_kurganov_petrova(np.array([1e-3]), np.array([1e-3]), 0.1)
        assert abs(v[0]) < 1.0
        v, _ = fix_kurganov_petrova(np.array([0.0]), np.array([0.0]), 0.1)
        assert v[0] == 0.0

    def test_entropy_based_clamp(self):
        """Test |ṽ| ≤ Q_i and no change for a generous bound."""
        g = 1.0
        h = np.array([0.5, 0.5])
        hv = np.array([1.0, -1.0])
        eta = 0.5 * (g * h * h + h * 4.0)
        v, q = fix_entropy_based(h, hv, 10.0 * eta, g)
        assert np.allclose(q, hv)
        tight = 0.5 * g * h * h + 0.5 * h * 0.25
        v, q = fix_entropy_based(h, hv, tight, g)
        assert np.allclose(np.abs(v), 0.5)
        assert np.allclose(np.sign(v), np.sign(hv))

    def test_friction_boundary_layer(self):
        """Test ṽ = hv/h above δ and ṽ = v^BL on dry nodes."""
        mesh = build_uniform_mesh(0.0, 1.0, 4)
        h = np.array([1.0, 0.5, 0.0, 0.0, 0.0])
        hv = np.array([0.2, 0.1, 0.0, 0.0, 0.0])
        H = h + np.zeros(5)
        v, q = fix_friction_boundary_layer(h, hv, H, mesh, 1.0, 10.0, 1e-3)
        assert v[0] == pytest.approx(0.2)
        assert v[1] == pytest.approx(0.2)
        v_bl = boundary_layer_velocity(h, H, mesh, 1.0, 10.0)
        assert np.allclose(v[2:], v_bl[2:])
        assert np.allclose(q, h * v)

    def test_boundary_layer_velocity_of_flat_lake(self):
        """Test v^BL = 0 for a flat free surface."""
        mesh = build_uniform_mesh(0.0, 1.0, 8)
        v_bl = boundary_layer_velocity(
            np.full(9, 0.1), np.full(9, 0.3), mesh, 9.81, 10.0
        )
        assert np.allclose(v_bl, 0.0)


class TestWetDryTreatment:
    """Test strategy resolution and in-place application."""

    @pytest.fixture
    def mesh(self):
        """Mesh with ten elements on (0, 2)."""
        return build_uniform_mesh(0.0, 2.0, 10)

    def test_aliases(self):
        """Test alias resolution."""
        assert resolve_strategy("kp") == "kurganov-petrova"
        assert resolve_strategy("friction") == "friction-boundary-layer"
        assert resolve_strategy(None) == "none"

    def test_unknown_strategy(self):
        """Test rejection of unknown strategies."""
        with pytest.raises(ConfigurationError, match="干湿处理策略"):
            resolve_strategy("sponge")

    def test_default_epsilon(self, mesh):
        """Test strategy-specific default tolerances."""
        bathy = Bathymetry(np.zeros(11), 1.0)
        zero = WetDryTreatment.from_config(
            WetDryConfig(strategy="zero-velocity"), mesh, bathy, 1.0
        )
        assert zero.epsilon == pytest.approx(0.01)
        kp = WetDryTreatment.from_config(
            WetDryConfig(strategy="kp"), mesh, bathy, 1.0
        )
        assert kp.epsilon == pytest.approx(0.1)

    def test_entropy_based_requires_flat_bottom(self, mesh):
        """Test rejection of the entropy-based fix on a slope."""
        bathy = Bathymetry(mesh.nodes.copy(), 1.0)
        with pytest.raises(ConfigurationError, match="平底"):
            WetDryTreatment.from_config(
                WetDryConfig(strategy="entropy"), mesh, bathy, 1.0
            )

    def test_invalid_sigma(self, mesh):
        """Test rejection of σ ≤ 0."""
        bathy = Bathymetry(np.zeros(11), 1.0)
        with pytest.raises(ConfigurationError, match="sigma"):
            WetDryTreatment.from_config(
                WetDryConfig(strategy="friction", sigma=0.0), mesh, bathy, 1.0
            )

    def test_apply_changes_only_discharge(self, mesh):
        """Test that heights are untouched and changed nodes reported."""
        bathy = Bathymetry(np.zeros(11), 1.0)
        treatment = WetDryTreatment.from_config(
            WetDryConfig(strategy="zero-velocity"), mesh, bathy, 1.0
        )
        h = np.full(11, 1.0)
        h[3] = 1e-5
        hv = np.full(11, 0.1)
        state = NodalState(h.copy(), hv.copy())
        changed = treatment.apply(state)
        assert list(changed) == [3]
        assert np.array_equal(state.h, h)
        assert state.hv[3] == 0.0

    def test_none_changes_nothing(self, mesh):
        """Test that 'none' leaves the state alone."""
        bathy = Bathymetry(np.zeros(11), 1.0)
        treatment = WetDryTreatment.from_config(
            WetDryConfig(strategy="none"), mesh, bathy, 1.0
        )
        state = NodalState(np.zeros(11), np.zeros(11))
        assert treatment.apply(state).size == 0
        assert np.all(treatment.velocity(state) == 0.0)

    def test_without_overwrite_velocity_uses_fix(self, mesh):
        """Test that the fixed velocity is used when hv is kept."""
        bathy = Bathymetry(np.zeros(11), 1.0)
        treatment = WetDryTreatment.from_config(
            WetDryConfig(strategy="zero-velocity", overwrite_discharge=False),
            mesh,
            bathy,
            1.0,
        )
        h = np.full(11, 1.0)
        h[0] = 1e-6
        state = NodalState(h, np.full(11, 1e-6))
        changed = treatment.apply(state)
        assert list(changed) == [0]
        assert state.hv[0] == 1e-6
        assert treatment.velocity(state)[0] == 0.0
