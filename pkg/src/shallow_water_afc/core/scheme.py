#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Semi-discrete spatial operator for the LOW, MCL and MCL-SDE schemes.

One call to ``SpatialOperator.assemble`` evaluates the edge data, applies
the entropy fixes to the artificial viscosities, limits the antidiffusive
fluxes and returns the right-hand side together with everything the time
integrator and the diagnostics need.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from .boundary import BoundaryConditions
from .config import SchemeConfig
from .entropy_stability import (
    EntropyDiagnostics,
    edge_entropy_data,
    enforce_entropy_by_alpha,
    enforce_low_order_entropy,
    entropy,
    entropy_inequality_residual,
    entropy_limiter,
)
from .errors import ConfigurationError
from .fem_core import Bathymetry, Mesh1D, NodalState
from .low_order import (
    WAVE_SPEED_MODES,
    EdgeCoefficients,
    Rhs,
    build_edges,
    low_order_rhs,
    refresh_bar_states,
)
from .mcl_limiter import (
    DRY_EDGE_TOL,
    RAW_FLUX_MODES,
    LimitedFluxes,
    RawFluxes,
    limit_fluxes,
    mcl_rhs,
    raw_fluxes,
    scale_fluxes,
)
from .wet_dry import WetDryTreatment

logger = logging.getLogger(__name__)

SCHEMES = ("LOW", "MCL", "MCL-SDE")


def resolve_scheme(name: str) -> str:
    """Canonical scheme name (case-insensitive)."""
    key = (name or "").strip().upper()
    if key == "MCL_SDE":
        key = "MCL-SDE"
    if key not in SCHEMES:
        raise ConfigurationError(
            f"未知的格式: {name}。可选: {', '.join(SCHEMES)}"
        )
    return key


@dataclass
class Assembly:
    """Right-hand side of one state with its edge data and counters."""

    state: NodalState
    rhs: Rhs
    edges: EdgeCoefficients
    limited: LimitedFluxes
    raw: Optional[RawFluxes] = None
    beta: Optional[np.ndarray] = None
    d_adjusted: int = 0
    unresolved: int = 0
    alpha_reduced: int = 0
    scheme: str = "LOW"
    gravity: float = 1.0
    _sum_2d: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def sum_2d(self) -> np.ndarray:
        """Σ_j 2 d_ij per node over the edges of the CFL condition."""
        if self._sum_2d is None:
            self._sum_2d = self.edges.cfl_viscosity_sum()
        return self._sum_2d

    def eta_max_fe(self, dt: float, mesh: Mesh1D) -> np.ndarray:
        """
        Entropy bound of the forward Euler update with step ``dt``.

        η_i^max = (1 − Δt/m_i Σ 2d_ij) η(u_i) + Δt/m_i Σ 2d_ij η(ū_ij^*),
        where the sums run over the edges of the CFL condition and ū_ij^*
        are the bar states with the applied fluxes.
        Entropies are evaluated for flat topography.
        """
        e = self.edges
        g = self.gravity
        idle = e.d <= 0.0
        inv = np.where(idle, 0.0, 0.5 / np.where(idle, 1.0, e.d))
        fh = self.limited.f_h_star
        fhv = self.limited.f_hv_star
        eta_ij = entropy(
            np.maximum(e.hbar_b_ij + fh * inv, 0.0),
            e.hvbar_b_ij + fhv * inv,
            0.0,
            g,
        )
        eta_ji = entropy(
            np.maximum(e.hbar_b_ji - fh * inv, 0.0),
            e.hvbar_b_ji - fhv * inv,
            0.0,
            g,
        )
        two_d = e.cfl_weights()
        total = e.scatter(two_d, two_d)
        weighted = e.scatter(two_d * eta_ij, two_d * eta_ji)
        ratio = dt / mesh.lumped_mass
        eta_i = entropy(self.state.h, self.state.hv, 0.0, g)
        return (1.0 - ratio * total) * eta_i + ratio * weighted

    def entropy_diagnostics(
        self, bathymetry: Bathymetry
    ) -> EntropyDiagnostics:
        """Semi-discrete entropy residual of this assembly."""
        limited = None if self.scheme == "LOW" else self.limited
        return entropy_inequality_residual(
            self.state, bathymetry, self.rhs, self.edges, limited, None
        )


@dataclass
class SpatialOperator:
    """
    Configured spatial discretization.

    Attributes:
        mesh: Mesh
        bathymetry: Interpolated topography
        boundary: Boundary conditions
        wet_dry: Wetting and drying treatment providing nodal velocities
        scheme: 'LOW', 'MCL' or 'MCL-SDE'
        raw_flux_mode: 'full', 'steady' or 'simple'
        wave_speed: 'nodal' or 'gms'
        entropy_fix_viscosity: Enforce the Tadmor condition on d_ij
        alpha_entropy_fix: Enforce it by reducing α_ij^b instead
        dry_tol: Absolute dry-edge threshold on h̄_ij + h̄_ji
    """

    mesh: Mesh1D
    bathymetry: Bathymetry
    boundary: BoundaryConditions
    wet_dry: WetDryTreatment
    scheme: str = "MCL-SDE"
    raw_flux_mode: str = "full"
    wave_speed: str = "nodal"
    entropy_fix_viscosity: bool = True
    alpha_entropy_fix: bool = False
    dry_tol: float = 0.0

    def __post_init__(self) -> None:
        self.scheme = resolve_scheme(self.scheme)
        if self.raw_flux_mode not in RAW_FLUX_MODES:
            raise ConfigurationError(
                f"未知的原始通量模式: {self.raw_flux_mode}"
            )
        if self.wave_speed not in WAVE_SPEED_MODES:
            raise ConfigurationError(f"未知的波速模式: {self.wave_speed}")

    @classmethod
    def from_config(
        cls,
        config: SchemeConfig,
        mesh: Mesh1D,
        bathymetry: Bathymetry,
        boundary: BoundaryConditions,
        wet_dry: WetDryTreatment,
    ) -> "SpatialOperator":
        return cls(
            mesh=mesh,
            bathymetry=bathymetry,
            boundary=boundary,
            wet_dry=wet_dry,
            scheme=config.scheme,
            raw_flux_mode=config.raw_flux_mode or "full",
            wave_speed=config.wave_speed,
            entropy_fix_viscosity=config.entropy_fix_viscosity,
            alpha_entropy_fix=config.alpha_entropy_fix,
            dry_tol=DRY_EDGE_TOL * wet_dry.h0_max,
        )

    def edges(self, state: NodalState) -> EdgeCoefficients:
        """Edge data of ``state`` before any entropy fix."""
        velocity = self.wet_dry.velocity(state)
        return build_edges(
            state,
            velocity,
            self.mesh,
            self.bathymetry,
            self.boundary,
            self.wave_speed,
        )

    def assemble(self, state: NodalState) -> Assembly:
        """
        Evaluate the right-hand side m_i du_i/dt for ``state``.

        Args:
            state: Admissible nodal state

        Returns:
            Assembly
        """
        edges = self.edges(state)
        adjusted = unresolved = reduced = 0

        if self.entropy_fix_viscosity:
            data = edge_entropy_data(edges, state, self.bathymetry)
            fix = enforce_low_order_entropy(edges, data)
            adjusted, unresolved = fix.adjusted, fix.unresolved
            if adjusted:
                edges = refresh_bar_states(edges, fix.d)
        if self.alpha_entropy_fix:
            data = edge_entropy_data(edges, state, self.bathymetry)
            edges, reduced = enforce_entropy_by_alpha(edges, data)

        low = low_order_rhs(state, self.mesh, self.bathymetry, edges)
        common: Dict[str, Any] = {
            "state": state,
            "edges": edges,
            "d_adjusted": adjusted,
            "unresolved": unresolved,
            "alpha_reduced": reduced,
            "scheme": self.scheme,
            "gravity": self.bathymetry.gravity,
        }
        if self.scheme == "LOW":
            return Assembly(
                rhs=low, limited=LimitedFluxes.zero(edges), **common
            )

        raw = raw_fluxes(state, self.mesh, edges, low, self.raw_flux_mode)
        limited = limit_fluxes(edges, raw, self.dry_tol)
        beta = None
        if self.scheme == "MCL-SDE":
            data = edge_entropy_data(edges, state, self.bathymetry)
            beta = entropy_limiter(edges, limited, data)
            limited = scale_fluxes(limited, beta)
        rhs = mcl_rhs(edges, limited)
        return Assembly(
            rhs=rhs, limited=limited, raw=raw, beta=beta, **common
        )
