#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Tests for entropy pairs, the Tadmor fix and the entropy limiter."""

import numpy as np
import pytest

from shallow_water_afc.core.config import WetDryConfig
from shallow_water_afc.core.entropy_stability import (
    compute_PQ,
    edge_entropy_data,
    enforce_entropy_by_alpha,
    enforce_low_order_entropy,
    entropy,
    entropy_flux,
    entropy_limiter,
    entropy_variables,
)
from shallow_water_afc.core.low_order import refresh_bar_states
from shallow_water_afc.core.mcl_limiter import (
    LimitedFluxes,
    limit_fluxes,
    raw_fluxes,
)
from shallow_water_afc.core.scheme import SpatialOperator
from shallow_water_afc.core.wet_dry import WetDryTreatment


class TestEntropyPair:
    """Test η, q and the entropy variables."""

    def test_entropy_value(self):
        """Test η = ½(g h² + h v²) + g h b."""
        assert entropy(1.0, 0.0, 0.0, 1.0) == pytest.approx(0.5)
        g = 9.81
        expected = 0.5 * (g * 4.0 + 2.0) + g * 2.0 * 0.5
        assert entropy(2.0, 2.0, 0.5, g) == pytest.approx(expected)

    def test_entropy_flux_value(self):
        """Test q = (g(h + b) + v²/2) hv."""
        g = 9.81
        expected = (g * 2.5 + 0.5) * 2.0
        assert entropy_flux(2.0, 2.0, 0.5, g) == pytest.approx(expected)

    def test_entropy_variables_are_gradient(self):
        """Test v(u) = ∂η/∂u by central differences."""
        g, b, h, hv = 9.81, 0.3, 1.2, 0.7
        step = 1e-6
        d_h = (
            entropy(h + step, hv, b, g) - entropy(h - step, hv, b, g)
        ) / (2.0 * step)
        d_hv = (
            entropy(h, hv + step, b, g) - entropy(h, hv - step, b, g)
        ) / (2.0 * step)
        w_h, w_hv = entropy_variables(h, hv, b, g)
        assert w_h == pytest.approx(d_h, rel=1e-7)
        assert w_hv == pytest.approx(d_hv, rel=1e-7)


class TestTadmorCondition:
    """Test P, Q and the viscosity fix."""

    def test_equal_states(self):
        """Test P = Q = 0 for identical states on flat bottom."""
        P, Q_ij, Q_ji = compute_PQ(
            (1.0, 0.4), (1.0, 0.4), 0.0, 0.0, 1.0, 0.5, 9.81
        )
        assert P == pytest.approx(0.0, abs=1e-15)
        assert Q_ij == pytest.approx(0.0, abs=1e-14)
        assert Q_ji == pytest.approx(0.0, abs=1e-14)

    def test_P_nonpositive_on_flat_bottom(self, rng):
        """Test P ≤ 0 by convexity of η."""
        h = rng.uniform(0.01, 2.0, (2, 20_000))
        v = rng.uniform(-2.0, 2.0, (2, 20_000))
        P, _, _ = compute_PQ(
            (h[0], h[0] * v[0]), (h[1], h[1] * v[1]), 0.0, 0.0, 1.0, 0.5, 9.81
        )
        assert P.max() <= 1e-12

    def test_fix_restores_condition(self, random_problem, trials):
        """Test (d/2) P ≤ min Q after the fix on wet flat states."""
        for _ in range(trials):
            p = random_problem(
                n_elements=8, dry_fraction=0.0, bathymetry_amplitude=0.0
            )
            edges = p.edges()
            data = edge_entropy_data(edges, p.state, p.bathymetry)
            fix = enforce_low_order_entropy(edges, data)
            assert np.all(fix.d >= edges.d)
            fixed = refresh_bar_states(edges, fix.d)
            again = edge_entropy_data(fixed, p.state, p.bathymetry)
            gap = 0.5 * fixed.d * again.P - again.min_Q
            tol = 1e-10 * (1.0 + again.scale + np.abs(again.min_Q))
            assert np.all(gap <= tol)

    def test_alpha_fix_never_increases_alpha(self, random_problem, trials):
        """Test that the α-based fix keeps α ∈ [0, α_old]."""
        for _ in range(trials):
            p = random_problem(n_elements=8, dry_fraction=0.0)
            edges = p.edges()
            data = edge_entropy_data(edges, p.state, p.bathymetry)
            fixed, count = enforce_entropy_by_alpha(edges, data)
            assert count >= 0
            assert np.all(fixed.alpha <= edges.alpha)
            assert fixed.alpha.min() >= 0.0
            assert fixed.hbar_b_ij.min() >= -1e-14
            assert fixed.hbar_b_ji.min() >= -1e-14


class TestEntropyLimiter:
    """Test the semi-discrete entropy limiter."""

    def test_beta_range(self, random_problem, trials):
        """Test β ∈ [0, 1]."""
        for _ in range(trials):
            p = random_problem(n_elements=8)
            edges = p.edges()
            raw = raw_fluxes(p.state, p.mesh, edges, None, "steady")
            limited = limit_fluxes(edges, raw)
            data = edge_entropy_data(edges, p.state, p.bathymetry)
            beta = entropy_limiter(edges, limited, data)
            assert beta.min() >= 0.0
            assert beta.max() <= 1.0

    def test_no_antidiffusion_keeps_beta_one(self, random_problem):
        """Test β = 1 when f* = 0 and the Tadmor condition holds."""
        p = random_problem(dry_fraction=0.0, bathymetry_amplitude=0.0)
        edges = p.edges()
        data = edge_entropy_data(edges, p.state, p.bathymetry)
        edges = refresh_bar_states(
            edges, enforce_low_order_entropy(edges, data).d
        )
        data = edge_entropy_data(edges, p.state, p.bathymetry)
        budget = 2.0 * data.min_Q - edges.d * data.P
        beta = entropy_limiter(edges, LimitedFluxes.zero(edges), data)
        assert np.all(beta[budget >= 0.0] == 1.0)


class TestEntropyInequality:
    """Test the semi-discrete entropy inequality of the assembled schemes."""

    def _operator(self, problem, scheme):
        wet_dry = WetDryTreatment.from_config(
            WetDryConfig(strategy="none"),
            problem.mesh,
            problem.bathymetry,
            float(problem.state.h.max()),
        )
        return SpatialOperator(
            problem.mesh,
            problem.bathymetry,
            problem.boundary,
            wet_dry,
            scheme=scheme,
        )

    @pytest.mark.parametrize("scheme", ["LOW", "MCL-SDE"])
    def test_residual_nonpositive(self, random_problem, trials, scheme):
        """Test residual_i ≤ 0 on random wet states over flat bottom."""
        for _ in range(trials):
            p = random_problem(
                n_elements=8, dry_fraction=0.0, bathymetry_amplitude=0.0
            )
            p.state.h += 0.05
            assembly = self._operator(p, scheme).assemble(p.state)
            diag = assembly.entropy_diagnostics(p.bathymetry)
            assert diag.max_residual <= 1e-10 * diag.scale
