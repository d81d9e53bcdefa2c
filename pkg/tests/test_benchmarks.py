#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Tests for exact solutions, the benchmark registry and error norms."""

import math

import numpy as np
import pytest

from shallow_water_afc.core.benchmarks import (
    REGISTRY,
    STEADY_FLOWS,
    ErrorReport,
    SteadyFlow,
    ThackerParameters,
    bernoulli_height,
    eoc,
    exact_dry_dam_break,
    exact_riemann_star,
    exact_riemann_wave_speeds,
    exact_thacker,
    exact_wet_dam_break,
    get_benchmark,
    l1_error,
    shock_position,
    steady_bump,
    steady_reference,
    stoker_middle_height,
)
from shallow_water_afc.core.errors import BenchmarkError
from shallow_water_afc.core.fem_core import NodalState, build_uniform_mesh


def _integral(x, y):
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


class TestDamBreaks:
    """Test the Stoker and Ritter solutions."""

    def test_middle_height_matches_riemann_solver(self):
        """Test h_m against the general Riemann solver."""
        h_m = stoker_middle_height(1.0, 0.1, 1.0)
        h_star, v_star = exact_riemann_star((1.0, 0.0), (0.1, 0.0), 1.0)
        assert h_m == pytest.approx(h_star, rel=1e-10)
        assert 0.1 < h_m < 1.0
        assert v_star == pytest.approx(2.0 * (1.0 - math.sqrt(h_m)))

    def test_invalid_heights(self):
        """Test rejection of h_L ≤ h_R."""
        with pytest.raises(BenchmarkError, match="h_L > h_R"):
            stoker_middle_height(0.1, 1.0, 1.0)

    def test_wet_initial_condition(self):
        """Test the step at t = 0."""
        h, hv = exact_wet_dam_break(np.array([0.25, 0.75]), 0.0)
        assert list(h) == [1.0, 0.1]
        assert list(hv) == [0.0, 0.0]

    def test_wet_mass_conservation(self):
        """Test ∫h = 0.55 at t = 0.3."""
        x = np.linspace(0.0, 1.0, 200_001)
        h, _ = exact_wet_dam_break(x, 0.3)
        assert _integral(x, h) == pytest.approx(0.55, abs=1e-4)

    def test_wet_far_field(self):
        """Test undisturbed states outside the wave fan."""
        h, hv = exact_wet_dam_break(np.array([0.0, 1.0]), 0.3)
        assert list(h) == [1.0, 0.1]
        assert list(hv) == [0.0, 0.0]

    def test_dry_front(self):
        """Test the Ritter front position x0 + 2t√(g h_L)."""
        t = 0.15
        x = np.array([0.5 + 2.0 * t - 1e-6, 0.5 + 2.0 * t + 1e-6])
        h, _ = exact_dry_dam_break(x, t)
        assert 0.0 < h[0] < 1e-9
        assert h[1] == 0.0

    def test_dry_mass_conservation(self):
        """Test ∫h = 0.5 at t = 0.15."""
        x = np.linspace(0.0, 1.0, 200_001)
        h, _ = exact_dry_dam_break(x, 0.15)
        assert _integral(x, h) == pytest.approx(0.5, abs=1e-6)

    def test_dry_needs_water(self):
        """Test rejection of h_L ≤ 0."""
        with pytest.raises(BenchmarkError):
            exact_dry_dam_break(np.zeros(1), 0.1, h_l=0.0)


class TestRiemann:
    """Test the exact Riemann solver."""

    def test_vacuum(self):
        """Test h* = 0 when the states separate fast."""
        assert exact_riemann_star((1.0, -5.0), (1.0, 5.0), 1.0) == (0.0, 0.0)

    def test_symmetric_collision(self):
        """Test v* = 0 for colliding symmetric states."""
        h_star, v_star = exact_riemann_star((1.0, 1.0), (1.0, -1.0), 9.81)
        assert h_star > 1.0
        assert v_star == pytest.approx(0.0, abs=1e-12)

    def test_wave_speeds_of_dry_side(self):
        """Test front speeds next to a dry state."""
        low, high = exact_riemann_wave_speeds((1.0, 0.0), (0.0, 0.0), 1.0)
        assert low == pytest.approx(-1.0)
        assert high == pytest.approx(2.0)
        assert exact_riemann_wave_speeds((0.0, 0.0), (0.0, 0.0), 1.0) == (
            0.0,
            0.0,
        )

    def test_wave_speeds_ordered(self, rng, trials):
        """Test leftmost ≤ rightmost."""
        for _ in range(trials):
            h = rng.uniform(0.1, 2.0, 2)
            v = rng.uniform(-1.0, 1.0, 2)
            low, high = exact_riemann_wave_speeds(
                (h[0], h[0] * v[0]), (h[1], h[1] * v[1]), 9.81
            )
            assert low <= high


class TestThacker:
    """Test the oscillating lake."""

    @pytest.fixture
    def params(self):
        """Default basin parameters."""
        return ThackerParameters()

    def test_dry_at_shorelines(self, params):
        """Test h = 0 at x_±(t)."""
        for t in (0.0, 700.0, 1500.0):
            x = np.array(params.shorelines(t))
            H, _ = exact_thacker(x, t, params)
            assert np.allclose(H, params.bathymetry(x), atol=1e-9)

    def test_initially_at_rest(self, params):
        """Test v = 0 at t = 0."""
        _, v = exact_thacker(np.linspace(-2000, 2000, 11), 0.0, params)
        assert np.all(v == 0.0)

    def test_periodic(self, params):
        """Test H(t + T) = H(t)."""
        x = np.linspace(-4000.0, 4000.0, 101)
        H0, _ = exact_thacker(x, 300.0, params)
        H1, _ = exact_thacker(x, 300.0 + params.period, params)
        assert np.allclose(H0, H1, atol=1e-9)

    def test_mass_conservation(self, params):
        """Test that the lake volume does not change."""
        x = np.linspace(-5000.0, 5000.0, 400_001)
        volumes = []
        for t in (0.0, 1000.0, 2000.0):
            H, _ = exact_thacker(x, t, params)
            h = np.maximum(H - params.bathymetry(x), 0.0)
            volumes.append(_integral(x, h))
        assert volumes[1] == pytest.approx(volumes[0], rel=1e-6)
        assert volumes[2] == pytest.approx(volumes[0], rel=1e-6)


class TestSteadyFlows:
    """Test the moving water equilibria."""

    def test_subcritical(self):
        """Test a subcritical profile with h = 2 at the outlet."""
        x = np.linspace(0.0, 25.0, 101)
        h, q = steady_reference("subcritical", x)
        flow = STEADY_FLOWS["subcritical"]
        assert h[-1] == pytest.approx(2.0)
        assert np.all(h > flow.critical_height)
        assert np.all(q == 4.42)
        assert h[40] < h[0]

    def test_bernoulli_constant(self):
        """Test a constant Bernoulli head along the subcritical flow."""
        x = np.linspace(0.0, 25.0, 51)
        h, _ = steady_reference("subcritical", x)
        flow = STEADY_FLOWS["subcritical"]
        heads = [flow.head(hk, bk) for hk, bk in zip(h, steady_bump(x))]
        assert np.allclose(heads, heads[0], rtol=1e-12)

    def test_transcritical_smooth(self):
        """Test h = h_c at the crest and a supercritical tail."""
        x = np.array([5.0, 10.0, 15.0])
        h, _ = steady_reference("transcritical-smooth", x)
        h_c = STEADY_FLOWS["transcritical-smooth"].critical_height
        assert h[0] > h_c
        assert h[1] == pytest.approx(h_c, rel=1e-6)
        assert h[2] < h_c

    def test_shock_position(self):
        """Test the hydraulic jump location."""
        x_s = shock_position(STEADY_FLOWS["transcritical-shock"])
        assert x_s == pytest.approx(11.665, abs=0.05)

    def test_shock_profile(self):
        """Test supercritical flow before and subcritical after the jump."""
        x = np.array([11.0, 12.5, 25.0])
        h, _ = steady_reference("transcritical-shock", x)
        h_c = STEADY_FLOWS["transcritical-shock"].critical_height
        assert h[0] < h_c
        assert h[1] > h_c
        assert h[2] == pytest.approx(0.33)

    def test_supercritical(self):
        """Test a supercritical profile with h = 1 at the inlet."""
        x = np.linspace(0.0, 25.0, 51)
        h, _ = steady_reference("supercritical", x)
        assert h[0] == pytest.approx(1.0)
        assert np.all(h < STEADY_FLOWS["supercritical"].critical_height)

    def test_no_solution(self):
        """Test rejection of a head below the critical head."""
        flow = SteadyFlow(q=1.0, g=9.81, h_init=1.0)
        with pytest.raises(BenchmarkError, match="无解"):
            bernoulli_height(flow, 0.1, 0.0, "subcritical")

    def test_unknown_case(self):
        """Test rejection of unknown steady cases."""
        with pytest.raises(BenchmarkError, match="稳态算例"):
            steady_reference("hydraulic-drop", np.zeros(1))


class TestRegistry:
    """Test the benchmark registry."""

    def test_names(self):
        """Test the registered benchmarks."""
        expected = {
            "wet-dam-break",
            "dry-dam-break",
            "dam-break-bump",
            "lake-at-rest",
            "lake-at-rest-exact",
            "subcritical",
            "transcritical-smooth",
            "transcritical-shock",
            "supercritical",
            "thacker",
        }
        assert set(REGISTRY) == expected

    def test_unknown(self):
        """Test lookup of an unknown benchmark."""
        with pytest.raises(BenchmarkError, match="未知的算例"):
            get_benchmark("tsunami")

    def test_reference_only_case(self):
        """Test that the bump dam break has no closed form."""
        case = get_benchmark("dam-break-bump")
        assert not case.has_exact
        assert case.has_reference
        with pytest.raises(BenchmarkError, match="没有精确解"):
            case.exact_state(np.zeros(3), 1.0)

    def test_aligned_shoreline(self):
        """Test shorelines on mesh nodes for the tent topography."""
        case = get_benchmark("lake-at-rest-exact")
        mesh = build_uniform_mesh(0.0, 1.0, 16)
        state = case.initial_state(mesh)
        node = 6  # x = 0.375
        assert state.h[node] == pytest.approx(0.0, abs=1e-15)
        assert state.h[node - 1] > 0.0
        assert np.all(state.hv == 0.0)

    def test_exact_profile_columns(self):
        """Test the exact solution table."""
        case = get_benchmark("wet-dam-break")
        frame = case.exact_profile(np.linspace(0.0, 1.0, 5), 0.3)
        assert list(frame.columns) == ["x", "h", "hv", "v", "b", "H"]
        assert np.allclose(frame["H"], frame["h"] + frame["b"])

    def test_thacker_defaults(self):
        """Test the oscillating lake run parameters."""
        case = get_benchmark("thacker")
        assert case.nu == 0.05
        assert case.output_times == [1000.0, 2000.0, 3000.0]
        assert case.wet_dry == "friction-boundary-layer"


class TestErrors:
    """Test L1 norms and convergence rates."""

    def test_exact_interpolant(self):
        """Test a zero error for the exact nodal values."""
        mesh = build_uniform_mesh(0.0, 1.0, 8)
        h = 1.0 + mesh.nodes
        errors = l1_error(NodalState(h, 0.0 * h), (h, 0.0 * h), mesh)
        assert errors == {"h": 0.0, "hv": 0.0, "H": 0.0}

    def test_constant_offset(self):
        """Test ‖c‖_L1 = c L."""
        mesh = build_uniform_mesh(0.0, 2.0, 8)
        h = np.ones(9)
        errors = l1_error(NodalState(h + 0.1, 0.0 * h), (h, 0.0 * h), mesh)
        assert errors["h"] == pytest.approx(0.2)

    def test_sign_change_within_element(self):
        """Test exact integration of a P1 error crossing zero."""
        mesh = build_uniform_mesh(0.0, 1.0, 2)
        numeric = NodalState(np.array([1.0, 0.0, 1.0]), np.zeros(3))
        exact = (np.array([0.0, 1.0, 1.0]), np.zeros(3))
        # error (1, -1, 0): two triangles on the first element, then one
        expected = 0.5 * (0.5 * 0.5 + 0.5 * 0.5) + 0.5 * 0.5 * 1.0
        assert l1_error(numeric, exact, mesh)["h"] == pytest.approx(expected)

    def test_eoc_first_order(self):
        """Test EOC = 1 for halving errors."""
        rates = eoc([1.0, 0.5, 0.25], [32, 64, 128])
        assert math.isnan(rates[0])
        assert rates[1:] == pytest.approx([1.0, 1.0])

    def test_eoc_requires_doubling(self):
        """Test rejection of non-doubling resolutions."""
        with pytest.raises(BenchmarkError, match="加倍"):
            eoc([1.0, 0.5], [32, 48])

    def test_eoc_zero_error(self):
        """Test NaN for a zero error."""
        rates = eoc([1.0, 0.0], [32, 64])
        assert math.isnan(rates[1])

    def test_report_frame(self):
        """Test the convergence table layout."""
        report = ErrorReport(
            "MCL", [32, 64], [0.1, 0.05], [math.nan, 1.0], "h"
        )
        frame = report.to_frame()
        assert list(frame.columns) == [
            "scheme",
            "n_elements",
            "inv_h",
            "error",
            "eoc",
        ]
        assert frame["scheme"].tolist() == ["MCL", "MCL"]
