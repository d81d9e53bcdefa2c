#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Low-order algebraic Lax-Friedrichs discretization with bathymetry limiter.

All edge quantities are evaluated vectorized over an extended edge list:
the interior edges (i, i+1) of the mesh followed by one pseudo-edge per
boundary node connecting it to its external Riemann state. Pseudo-edges
contribute to their boundary node only.
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np

from .boundary import BoundaryConditions, boundary_flux_contribution
from .errors import DegenerateEdgeError, NumericalError
from .fem_core import Bathymetry, Mesh1D, NodalState

logger = logging.getLogger(__name__)

WAVE_SPEED_MODES = ("nodal", "gms")

# Relative size below which a boundary bar state counts as equal to u_i.
BOUNDARY_IDLE_TOL = 1e-12

Pair = Tuple[np.ndarray, np.ndarray]


def swe_flux(
    h: np.ndarray, hv: np.ndarray, v: np.ndarray, g: float
) -> Pair:
    """Shallow water flux f(u) = (hv, hv·v + g h²/2)."""
    return hv, hv * v + 0.5 * g * h * h


def recover_velocity(
    h: np.ndarray, hv: np.ndarray, cutoff: float = 0.0
) -> np.ndarray:
    """v = hv/h above ``cutoff`` and zero at or below it."""
    h = np.asarray(h, dtype=float)
    hv = np.asarray(hv, dtype=float)
    wet = h > cutoff
    return np.where(wet, hv / np.where(wet, h, 1.0), 0.0)


def _unpack(
    u: Sequence[np.ndarray], v: Optional[np.ndarray]
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    h = np.asarray(u[0], dtype=float)
    hv = np.asarray(u[1], dtype=float)
    if np.any(h < 0.0):
        raise NumericalError("波速计算要求水深非负", {"h_min": float(h.min())})
    vel = recover_velocity(h, hv) if v is None else np.asarray(v, float)
    return h, hv, vel


def max_wave_speed(
    u_i: Sequence[np.ndarray],
    u_j: Sequence[np.ndarray],
    g: float,
    v_i: Optional[np.ndarray] = None,
    v_j: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Nodal estimate λ = max{|v_i| + √(g h_i), |v_j| + √(g h_j)}.

    Args:
        u_i: State (h, hv) at node i (scalars or arrays)
        u_j: State (h, hv) at node j
        g: Gravitational constant
        v_i: Velocity at node i from the active wet/dry rule
        v_j: Velocity at node j

    Returns:
        Maximum wave speed per pair
    """
    h_i, _, vi = _unpack(u_i, v_i)
    h_j, _, vj = _unpack(u_j, v_j)
    return np.maximum(
        np.abs(vi) + np.sqrt(g * h_i), np.abs(vj) + np.sqrt(g * h_j)
    )


def _shock_factor(h_star: np.ndarray, h_k: np.ndarray) -> np.ndarray:
    safe = np.where(h_k > 0.0, h_k, 1.0)
    ratio = h_star / safe
    return np.where(
        (h_star > h_k) & (h_k > 0.0),
        np.sqrt(0.5 * (1.0 + ratio) * ratio),
        1.0,
    )


def guaranteed_max_speed(
    u_i: Sequence[np.ndarray],
    u_j: Sequence[np.ndarray],
    g: float,
    v_i: Optional[np.ndarray] = None,
    v_j: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Upper bound on the wave speeds of the Riemann problem (u_i, u_j).

    The middle height is bounded by its two-rarefaction estimate
    √(g h*) = (√(g h_L) + √(g h_R))/2 + (v_L − v_R)/4 and the outer wave
    speeds are evaluated there (shock speed when h* exceeds the side
    height, rarefaction head otherwise). A dry side moves with the front
    speed v ∓ 2√(g h) of the wet one.
    """
    h_l, _, v_l = _unpack(u_i, v_i)
    h_r, _, v_r = _unpack(u_j, v_j)
    c_l = np.sqrt(g * h_l)
    c_r = np.sqrt(g * h_r)
    root = np.maximum(0.0, 0.5 * (c_l + c_r) + 0.25 * (v_l - v_r))
    h_star = root * root / g

    lam_1 = v_l - c_l * _shock_factor(h_star, h_l)
    lam_3 = v_r + c_r * _shock_factor(h_star, h_r)
    lam_1 = np.where(h_l > 0.0, lam_1, v_r - 2.0 * c_r)
    lam_3 = np.where(h_r > 0.0, lam_3, v_l + 2.0 * c_l)
    both_dry = (h_l <= 0.0) & (h_r <= 0.0)
    speed = np.maximum(np.abs(lam_1), np.abs(lam_3))
    return np.where(both_dry, 0.0, speed)


def bar_states(
    u_i: Sequence[np.ndarray],
    u_j: Sequence[np.ndarray],
    d_ij: np.ndarray,
    c_ij: np.ndarray,
    g: float,
    v_i: Optional[np.ndarray] = None,
    v_j: Optional[np.ndarray] = None,
) -> Pair:
    """
    Bar states ū_ij = (u_i + u_j)/2 − (f_j − f_i)·c_ij/(2 d_ij).

    Raises:
        DegenerateEdgeError: If d_ij = 0 while the fluxes differ
    """
    h_i, hv_i, vi = _unpack(u_i, v_i)
    h_j, hv_j, vj = _unpack(u_j, v_j)
    d = np.asarray(d_ij, dtype=float)
    fh_i, fhv_i = swe_flux(h_i, hv_i, vi, g)
    fh_j, fhv_j = swe_flux(h_j, hv_j, vj, g)
    jump_h = (fh_j - fh_i) * c_ij
    jump_hv = (fhv_j - fhv_i) * c_ij

    idle = d <= 0.0
    if np.any(idle & ((jump_h != 0.0) | (jump_hv != 0.0))):
        raise DegenerateEdgeError("人工粘性为零但通量不同")
    scale = np.where(idle, 0.0, 0.5 / np.where(idle, 1.0, d))
    hbar = 0.5 * (h_i + h_j) - jump_h * scale
    hvbar = 0.5 * (hv_i + hv_j) - jump_hv * scale
    return hbar, hvbar


def bathymetry_limiter(
    hbar_ij: np.ndarray,
    hbar_ji: np.ndarray,
    b_i: np.ndarray,
    b_j: np.ndarray,
) -> np.ndarray:
    """
    Bathymetry limiter α_ij^b keeping both corrected bar states nonnegative.

    α = min{1, 2h̄_ji/(b_j − b_i)} if b_i < b_j, 1 if b_i = b_j and
    min{1, 2h̄_ij/(b_i − b_j)} if b_i > b_j.
    """
    jump = np.asarray(b_j, dtype=float) - np.asarray(b_i, dtype=float)
    up = np.maximum(np.asarray(hbar_ji, dtype=float), 0.0)
    down = np.maximum(np.asarray(hbar_ij, dtype=float), 0.0)
    safe = np.where(jump != 0.0, np.abs(jump), 1.0)
    alpha = np.where(
        jump > 0.0,
        np.minimum(1.0, 2.0 * up / safe),
        np.where(jump < 0.0, np.minimum(1.0, 2.0 * down / safe), 1.0),
    )
    return np.asarray(alpha, dtype=float)


def source_quadrature(
    h_i: np.ndarray,
    h_j: np.ndarray,
    b_i: np.ndarray,
    b_j: np.ndarray,
    c_ij: np.ndarray,
    g: float,
) -> np.ndarray:
    """Single-edge momentum source term g (h_i + h_j)/2 (b_j − b_i) c_ij."""
    return g * 0.5 * (h_i + h_j) * (b_j - b_i) * c_ij


@dataclass
class EdgeCoefficients:
    """
    Per-edge data for one right-hand side assembly.

    Arrays run over the interior edges followed by the boundary
    pseudo-edges. For pseudo-edges ``node_j`` is -1, the j-side holds the
    external state, b_j = b_i and m_ij = 0.
    """

    n_nodes: int
    g: float
    node_i: np.ndarray
    node_j: np.ndarray
    is_boundary: np.ndarray
    c_ij: np.ndarray
    c_ji: np.ndarray
    m_ij: np.ndarray
    h_i: np.ndarray
    hv_i: np.ndarray
    v_i: np.ndarray
    b_i: np.ndarray
    h_j: np.ndarray
    hv_j: np.ndarray
    v_j: np.ndarray
    b_j: np.ndarray
    lam: np.ndarray
    d: np.ndarray
    alpha: np.ndarray
    hbar_ij: np.ndarray
    hbar_ji: np.ndarray
    hvbar_ij: np.ndarray
    hvbar_ji: np.ndarray
    hbar_b_ij: np.ndarray
    hbar_b_ji: np.ndarray
    hvbar_b_ij: np.ndarray
    hvbar_b_ji: np.ndarray

    @property
    def interior(self) -> np.ndarray:
        return ~self.is_boundary

    @property
    def size(self) -> int:
        return int(self.node_i.size)

    @property
    def bath_jump(self) -> np.ndarray:
        """Limited topography difference α_ij^b (b_j − b_i)."""
        return self.alpha * (self.b_j - self.b_i)

    def scatter(self, on_i: np.ndarray, on_j: np.ndarray) -> np.ndarray:
        """Accumulate edge values into node rows in ascending edge order."""
        inner = self.interior
        total = np.bincount(self.node_i, weights=on_i, minlength=self.n_nodes)
        total += np.bincount(
            self.node_j[inner], weights=on_j[inner], minlength=self.n_nodes
        )
        return total

    def gather_min(self, on_i: np.ndarray, on_j: np.ndarray) -> np.ndarray:
        """Nodewise minimum of edge values; +inf for nodes without edges."""
        out = np.full(self.n_nodes, np.inf)
        np.minimum.at(out, self.node_i, on_i)
        inner = self.interior
        np.minimum.at(out, self.node_j[inner], on_j[inner])
        return out

    def gather_max(self, on_i: np.ndarray, on_j: np.ndarray) -> np.ndarray:
        """Nodewise maximum of edge values; -inf for nodes without edges."""
        out = np.full(self.n_nodes, -np.inf)
        np.maximum.at(out, self.node_i, on_i)
        inner = self.interior
        np.maximum.at(out, self.node_j[inner], on_j[inner])
        return out

    @property
    def active_boundary(self) -> np.ndarray:
        """
        Pseudo-edges whose bar state moves the boundary node.

        A pseudo-edge with ū_ij = u_i up to rounding (wall at rest, outlet,
        dry boundary) adds nothing to 2 d_ij (ū_ij − u_i).
        """
        scale = np.maximum(self.h_i, self.h_j)
        moves_h = np.abs(self.hbar_ij - self.h_i) > BOUNDARY_IDLE_TOL * scale
        moves_hv = np.abs(self.hvbar_ij - self.hv_i) > (
            BOUNDARY_IDLE_TOL * scale * self.lam
        )
        return self.is_boundary & (moves_h | moves_hv)

    def viscosity_sum(self, include_boundary: bool = False) -> np.ndarray:
        """Σ_j 2 d_ij per node."""
        two_d = 2.0 * self.d
        if not include_boundary:
            two_d = np.where(self.is_boundary, 0.0, two_d)
        return self.scatter(two_d, two_d)

    def cfl_weights(self) -> np.ndarray:
        """2 d_ij of the interior and the active boundary pseudo-edges."""
        idle = self.is_boundary & ~self.active_boundary
        return np.where(idle, 0.0, 2.0 * self.d)

    def cfl_viscosity_sum(self) -> np.ndarray:
        """Σ_j 2 d_ij per node over the edges entering the CFL condition."""
        two_d = self.cfl_weights()
        return self.scatter(two_d, two_d)


def _edge_speed(
    mode: str,
    h_i: np.ndarray,
    hv_i: np.ndarray,
    v_i: np.ndarray,
    h_j: np.ndarray,
    hv_j: np.ndarray,
    v_j: np.ndarray,
    g: float,
) -> np.ndarray:
    if mode == "nodal":
        return max_wave_speed((h_i, hv_i), (h_j, hv_j), g, v_i, v_j)
    if mode == "gms":
        return guaranteed_max_speed((h_i, hv_i), (h_j, hv_j), g, v_i, v_j)
    raise ValueError(f"未知的波速模式: {mode}")


def build_edges(
    state: NodalState,
    velocity: np.ndarray,
    mesh: Mesh1D,
    bathymetry: Bathymetry,
    boundary: Optional[BoundaryConditions] = None,
    mode: str = "nodal",
) -> EdgeCoefficients:
    """
    Evaluate wave speeds, viscosities, bar states and α for every edge.

    Args:
        state: Current nodal state
        velocity: Nodal velocities from the active wet/dry rule
        mesh: Mesh
        bathymetry: Interpolated topography
        boundary: Boundary conditions (no pseudo-edges when None)
        mode: 'nodal' or 'gms' wave speed estimate

    Returns:
        Populated EdgeCoefficients
    """
    g = bathymetry.gravity
    h, hv, b = state.h, state.hv, bathymetry.nodal_b
    ei, ej = mesh.edge_i, mesh.edge_j

    node_i = [ei]
    node_j = [ej]
    c_ij, c_ji, m_ij = [mesh.c_ij], [mesh.c_ji], [mesh.m_ij]
    h_j, hv_j, v_j = [h[ej]], [hv[ej]], [velocity[ej]]
    if boundary is not None:
        ext = boundary.pseudo_edges(h, hv, g)
        node_i.append(ext.node)
        node_j.append(np.full(ext.size, -1))
        c_ij.append(0.5 * ext.normal)
        c_ji.append(-0.5 * ext.normal)
        m_ij.append(np.zeros(ext.size))
        h_j.append(ext.h_ext)
        hv_j.append(ext.hv_ext)
        v_j.append(recover_velocity(ext.h_ext, ext.hv_ext))

    ni = np.concatenate(node_i)
    nj = np.concatenate(node_j)
    is_boundary = nj < 0
    hj = np.concatenate(h_j)
    hvj = np.concatenate(hv_j)
    vj = np.concatenate(v_j)
    b_i = b[ni]
    b_j = np.where(is_boundary, b_i, b[np.where(is_boundary, 0, nj)])
    cij = np.concatenate(c_ij)
    cji = np.concatenate(c_ji)

    lam = _edge_speed(mode, h[ni], hv[ni], velocity[ni], hj, hvj, vj, g)
    d = lam * np.maximum(np.abs(cij), np.abs(cji))

    edges = EdgeCoefficients(
        n_nodes=mesh.n_nodes,
        g=g,
        node_i=ni,
        node_j=nj,
        is_boundary=is_boundary,
        c_ij=cij,
        c_ji=cji,
        m_ij=np.concatenate(m_ij),
        h_i=h[ni],
        hv_i=hv[ni],
        v_i=velocity[ni],
        b_i=b_i,
        h_j=hj,
        hv_j=hvj,
        v_j=vj,
        b_j=b_j,
        lam=lam,
        d=d,
        alpha=np.ones_like(d),
        hbar_ij=np.zeros_like(d),
        hbar_ji=np.zeros_like(d),
        hvbar_ij=np.zeros_like(d),
        hvbar_ji=np.zeros_like(d),
        hbar_b_ij=np.zeros_like(d),
        hbar_b_ji=np.zeros_like(d),
        hvbar_b_ij=np.zeros_like(d),
        hvbar_b_ji=np.zeros_like(d),
    )
    return refresh_bar_states(edges)


def refresh_bar_states(
    edges: EdgeCoefficients,
    d: Optional[np.ndarray] = None,
    alpha: Optional[np.ndarray] = None,
) -> EdgeCoefficients:
    """
    Recompute bar states (and α unless given) for the viscosities ``d``.

    Args:
        edges: Edge data providing the nodal states
        d: New viscosities (current ones when None)
        alpha: Fixed bathymetry limiter (recomputed when None)

    Returns:
        New EdgeCoefficients with consistent bar states
    """
    e = edges if d is None else replace(edges, d=np.asarray(d, float))
    g = e.g
    u_i = (e.h_i, e.hv_i)
    u_j = (e.h_j, e.hv_j)
    hbar_ij, hvbar_ij = bar_states(u_i, u_j, e.d, e.c_ij, g, e.v_i, e.v_j)
    hbar_ji, hvbar_ji = bar_states(u_j, u_i, e.d, e.c_ji, g, e.v_j, e.v_i)
    if alpha is None:
        alpha = bathymetry_limiter(hbar_ij, hbar_ji, e.b_i, e.b_j)

    jump = alpha * (e.b_j - e.b_i)
    idle = e.d <= 0.0
    inv_2d = np.where(idle, 0.0, 0.5 / np.where(idle, 1.0, e.d))
    mean_v = 0.5 * (e.v_i + e.v_j)
    mean_h = 0.5 * (e.h_i + e.h_j)
    return replace(
        e,
        alpha=np.asarray(alpha, float),
        hbar_ij=hbar_ij,
        hbar_ji=hbar_ji,
        hvbar_ij=hvbar_ij,
        hvbar_ji=hvbar_ji,
        hbar_b_ij=hbar_ij + 0.5 * jump,
        hbar_b_ji=hbar_ji - 0.5 * jump,
        hvbar_b_ij=hvbar_ij
        + 0.5 * mean_v * jump
        - g * mean_h * jump * e.c_ij * inv_2d,
        hvbar_b_ji=hvbar_ji
        - 0.5 * mean_v * jump
        + g * mean_h * jump * e.c_ji * inv_2d,
    )


def viscosity_coefficients(
    state: NodalState,
    mesh: Mesh1D,
    g: float,
    mode: str = "nodal",
    velocity: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Artificial viscosities d_ij = max{λ_ij |c_ij|, λ_ji |c_ji|}.

    Args:
        state: Nodal state
        mesh: Mesh
        g: Gravitational constant
        mode: 'nodal' or 'gms'
        velocity: Velocities from the wet/dry rule (plain hv/h when None)

    Returns:
        d_ij per interior edge, in edge order
    """
    if mode not in WAVE_SPEED_MODES:
        raise ValueError(f"未知的波速模式: {mode}")
    v = recover_velocity(state.h, state.hv) if velocity is None else velocity
    i, j = mesh.edge_i, mesh.edge_j
    lam = _edge_speed(
        mode, state.h[i], state.hv[i], v[i], state.h[j], state.hv[j], v[j], g
    )
    return lam * np.maximum(np.abs(mesh.c_ij), np.abs(mesh.c_ji))


@dataclass
class Rhs:
    """Right-hand side m_i du_i/dt (not divided by the lumped mass)."""

    dh_dt: np.ndarray
    dhv_dt: np.ndarray

    def rates(self, mesh: Mesh1D) -> Pair:
        """Time derivatives du_i/dt."""
        return self.dh_dt / mesh.lumped_mass, self.dhv_dt / mesh.lumped_mass

    def check(self) -> None:
        """Raise NumericalError on non-finite entries."""
        for name, arr in (("dh/dt", self.dh_dt), ("dhv/dt", self.dhv_dt)):
            bad = np.flatnonzero(~np.isfinite(arr))
            if bad.size:
                raise NumericalError(
                    f"右端项 {name} 出现非有限值", {"node": int(bad[0])}
                )


def low_order_bar_terms(edges: EdgeCoefficients) -> Tuple[Pair, Pair]:
    """Edge terms 2d(ū^b_ij − u_i) and 2d(ū^b_ji − u_j)."""
    two_d = 2.0 * edges.d
    on_i = (
        two_d * (edges.hbar_b_ij - edges.h_i),
        two_d * (edges.hvbar_b_ij - edges.hv_i),
    )
    on_j = (
        two_d * (edges.hbar_b_ji - edges.h_j),
        two_d * (edges.hvbar_b_ji - edges.hv_j),
    )
    return on_i, on_j


def _flux_form(
    edges: EdgeCoefficients, mesh: Mesh1D, boundary_rows: Pair
) -> Rhs:
    e = edges
    inner = e.interior
    g = e.g
    fh_i, fhv_i = swe_flux(e.h_i, e.hv_i, e.v_i, g)
    fh_j, fhv_j = swe_flux(e.h_j, e.hv_j, e.v_j, g)
    jump = e.bath_jump
    mean_v = 0.5 * (e.v_i + e.v_j)

    dh_i = e.d * (e.h_j - e.h_i + jump) - (fh_j - fh_i) * e.c_ij
    dh_j = e.d * (e.h_i - e.h_j - jump) - (fh_i - fh_j) * e.c_ji
    dhv_i = (
        e.d * (e.hv_j - e.hv_i + mean_v * jump)
        - (fhv_j - fhv_i) * e.c_ij
        - source_quadrature(e.h_i, e.h_j, 0.0, jump, e.c_ij, g)
    )
    dhv_j = (
        e.d * (e.hv_i - e.hv_j - mean_v * jump)
        - (fhv_i - fhv_j) * e.c_ji
        - source_quadrature(e.h_i, e.h_j, jump, 0.0, e.c_ji, g)
    )
    zero = np.zeros_like(dh_i)
    dh = e.scatter(np.where(inner, dh_i, zero), dh_j)
    dhv = e.scatter(np.where(inner, dhv_i, zero), dhv_j)
    return Rhs(dh + boundary_rows[0], dhv + boundary_rows[1])


def low_order_rhs(
    state: NodalState,
    mesh: Mesh1D,
    bathymetry: Bathymetry,
    edges: EdgeCoefficients,
    boundary: Optional[BoundaryConditions] = None,
    form: str = "bar",
) -> Rhs:
    """
    Low-order right-hand side m_i du_i/dt.

    Args:
        state: Nodal state the edges were built from
        mesh: Mesh
        bathymetry: Topography
        edges: Populated edge coefficients (with pseudo-edges when the
            problem has boundaries)
        boundary: Boundary conditions, used by the flux form
        form: 'bar' for Σ 2d_ij(ū^b_ij − u_i), 'flux' for the conservative
            flux form with explicit weak boundary fluxes

    Returns:
        Rhs

    Raises:
        NumericalError: If the result is not finite
    """
    if form == "bar":
        on_i, on_j = low_order_bar_terms(edges)
        rhs = Rhs(
            edges.scatter(on_i[0], on_j[0]), edges.scatter(on_i[1], on_j[1])
        )
    elif form == "flux":
        rows_h = np.zeros(mesh.n_nodes)
        rows_hv = np.zeros(mesh.n_nodes)
        if boundary is not None:
            for k in np.flatnonzero(edges.is_boundary):
                node = int(edges.node_i[k])
                dh, dhv = boundary_flux_contribution(
                    (state.h[node], state.hv[node]),
                    (edges.h_j[k], edges.hv_j[k]),
                    2.0 * edges.c_ij[k],
                    bathymetry.gravity,
                    float(edges.d[k]),
                )
                rows_h[node] += dh
                rows_hv[node] += dhv
        rhs = _flux_form(edges, mesh, (rows_h, rows_hv))
    else:
        raise ValueError(f"未知的右端项形式: {form}")

    rhs.check()
    return rhs
