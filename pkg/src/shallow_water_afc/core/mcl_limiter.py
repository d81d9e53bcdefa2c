#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Monolithic convex limiting of the antidiffusive fluxes.

The water height fluxes are limited first. The momentum fluxes are then
limited so that the corrected momentum bar states stay inside a velocity
box built from the low-order bar states.
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from .errors import NumericalError
from .fem_core import Mesh1D, NodalState
from .low_order import EdgeCoefficients, Rhs, low_order_bar_terms

logger = logging.getLogger(__name__)

RAW_FLUX_MODES = ("full", "steady", "simple")

# Relative threshold on h̄_ij + h̄_ji below which an edge counts as dry.
DRY_EDGE_TOL = 1e-14


@dataclass
class RawFluxes:
    """Raw antidiffusive fluxes f_ij (edge orientation i -> j)."""

    f_h: np.ndarray
    f_hv: np.ndarray
    hdot_low: np.ndarray
    hvdot_low: np.ndarray


@dataclass
class LimitedFluxes:
    """Limited fluxes, local bounds and corrected bar states per edge."""

    f_h_star: np.ndarray
    f_hv_star: np.ndarray
    g_hv: np.ndarray
    g_hv_star: np.ndarray
    h_min: np.ndarray
    h_max: np.ndarray
    v_min: np.ndarray
    v_max: np.ndarray
    vbar: np.ndarray
    dry: np.ndarray
    hbar_star_ij: np.ndarray
    hbar_star_ji: np.ndarray
    hbar_b_star_ij: np.ndarray
    hbar_b_star_ji: np.ndarray
    hvbar_b_star_ij: np.ndarray
    hvbar_b_star_ji: np.ndarray

    @classmethod
    def zero(cls, edges: EdgeCoefficients) -> "LimitedFluxes":
        """Limited fluxes of a scheme without antidiffusion."""
        z = np.zeros(edges.size)
        nodes = np.zeros(edges.n_nodes)
        return cls(
            f_h_star=z,
            f_hv_star=z.copy(),
            g_hv=z.copy(),
            g_hv_star=z.copy(),
            h_min=nodes,
            h_max=nodes.copy(),
            v_min=nodes.copy(),
            v_max=nodes.copy(),
            vbar=z.copy(),
            dry=np.zeros(edges.size, dtype=bool),
            hbar_star_ij=edges.hbar_ij.copy(),
            hbar_star_ji=edges.hbar_ji.copy(),
            hbar_b_star_ij=edges.hbar_b_ij.copy(),
            hbar_b_star_ji=edges.hbar_b_ji.copy(),
            hvbar_b_star_ij=edges.hvbar_b_ij.copy(),
            hvbar_b_star_ji=edges.hvbar_b_ji.copy(),
        )


def _half_inverse(d: np.ndarray) -> np.ndarray:
    idle = d <= 0.0
    return np.where(idle, 0.0, 0.5 / np.where(idle, 1.0, d))


def raw_fluxes(
    state: NodalState,
    mesh: Mesh1D,
    edges: EdgeCoefficients,
    low_rhs: Optional[Rhs],
    mode: str = "full",
) -> RawFluxes:
    """
    Raw antidiffusive fluxes of the consistent-mass Galerkin target.

    Args:
        state: Nodal state the edges were built from
        mesh: Mesh
        edges: Edge coefficients with bar states and α
        low_rhs: Low-order right-hand side (needed in 'full' mode)
        mode: 'full' with the m_ij(u̇_i − u̇_j) terms, 'steady' without
            them, 'simple' for f_ij = d_ij(u_i − u_j)

    Returns:
        RawFluxes; pseudo-edges carry zero flux
    """
    if mode not in RAW_FLUX_MODES:
        raise ValueError(f"未知的原始通量模式: {mode}")

    n = mesh.n_nodes
    hdot = np.zeros(n)
    hvdot = np.zeros(n)
    if mode == "full":
        if low_rhs is None:
            raise ValueError("full 模式需要低阶右端项")
        hdot, hvdot = low_rhs.rates(mesh)

    e = edges
    inner = e.interior
    if mode == "simple":
        f_h = e.d * (e.h_i - e.h_j)
        f_hv = e.d * (e.hv_i - e.hv_j)
    else:
        jump = e.alpha * (e.b_i - e.b_j)
        mean_v = 0.5 * (e.v_i + e.v_j)
        f_h = e.d * (e.h_i - e.h_j + jump)
        f_hv = e.d * (e.hv_i - e.hv_j + mean_v * jump)
        if mode == "full":
            j = np.where(inner, e.node_j, 0)
            f_h = f_h + e.m_ij * (hdot[e.node_i] - hdot[j])
            f_hv = f_hv + e.m_ij * (hvdot[e.node_i] - hvdot[j])

    return RawFluxes(
        f_h=np.where(inner, f_h, 0.0),
        f_hv=np.where(inner, f_hv, 0.0),
        hdot_low=hdot,
        hvdot_low=hvdot,
    )


def height_bounds(edges: EdgeCoefficients) -> Tuple[np.ndarray, np.ndarray]:
    """
    Local bounds h_i^min, h_i^max over the bar states h̄_ij^b of node i.

    Raises:
        NumericalError: If some node has no edges
    """
    h_min = edges.gather_min(edges.hbar_b_ij, edges.hbar_b_ji)
    h_max = edges.gather_max(edges.hbar_b_ij, edges.hbar_b_ji)
    lonely = np.flatnonzero(~np.isfinite(h_min))
    if lonely.size:
        raise NumericalError("节点没有相邻边", {"node": int(lonely[0])})
    return np.maximum(h_min, 0.0), np.maximum(h_max, 0.0)


def limit_height_flux(
    f_h: np.ndarray,
    d: np.ndarray,
    hbar_b_ij: np.ndarray,
    hbar_b_ji: np.ndarray,
    bounds_i: Tuple[np.ndarray, np.ndarray],
    bounds_j: Tuple[np.ndarray, np.ndarray],
) -> np.ndarray:
    """
    Clamp f_ij^h so both corrected height bar states respect the bounds.

    Args:
        f_h: Raw height fluxes
        d: Artificial viscosities
        hbar_b_ij: Bar states h̄_ij^b
        hbar_b_ji: Bar states h̄_ji^b
        bounds_i: (h_min, h_max) gathered at node i of each edge
        bounds_j: (h_min, h_max) gathered at node j of each edge

    Returns:
        Limited fluxes f_ij^{h,*}
    """
    min_i, max_i = bounds_i
    min_j, max_j = bounds_j
    two_d = 2.0 * d
    upper = two_d * np.minimum(max_i - hbar_b_ij, hbar_b_ji - min_j)
    lower = two_d * np.maximum(min_i - hbar_b_ij, hbar_b_ji - max_j)
    return np.where(
        f_h >= 0.0,
        np.minimum(f_h, np.maximum(upper, 0.0)),
        np.maximum(f_h, np.minimum(lower, 0.0)),
    )


def velocity_bar_states(
    edges: EdgeCoefficients, dry_tol: float = 0.0
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Velocity bar states v̄_ij = v̄_ji.

    Evaluated as
    [2d((hv)‾_ij + (hv)‾_ji) − g(h_i+h_j)/2 α(b_j−b_i)(c_ij−c_ji)]
    / [2d(h̄_ij + h̄_ji)], which avoids subtracting the large opposite
    bathymetry terms of (hv)‾_ij^b and (hv)‾_ji^b.

    Args:
        edges: Edge coefficients
        dry_tol: Threshold on h̄_ij + h̄_ji marking an edge dry

    Returns:
        (vbar, dry) with vbar = 0 on dry edges
    """
    e = edges
    height = e.hbar_ij + e.hbar_ji
    dry = (height <= dry_tol) | (e.d <= 0.0) | ~(height > 0.0)
    two_d = 2.0 * e.d
    numer = two_d * (e.hvbar_ij + e.hvbar_ji) - e.g * 0.5 * (
        e.h_i + e.h_j
    ) * e.bath_jump * (e.c_ij - e.c_ji)
    denom = np.where(dry, 1.0, two_d * height)
    return np.where(dry, 0.0, numer / denom), dry


def velocity_bounds(
    edges: EdgeCoefficients,
    vbar: np.ndarray,
    dry: np.ndarray,
    dry_tol: float = 0.0,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Velocity bounds over v̄_ij and (hv)‾_ij^b / h̄_ij for each node.

    Dry contributions are skipped; nodes without any wet contribution get
    the bounds (0, 0).
    """
    e = edges

    def ratio(hv: np.ndarray, h: np.ndarray) -> np.ndarray:
        wet = h > max(dry_tol, 0.0)
        return np.where(wet, hv / np.where(wet, h, 1.0), np.nan)

    r_ij = ratio(e.hvbar_b_ij, e.hbar_ij)
    r_ji = ratio(e.hvbar_b_ji, e.hbar_ji)
    vb = np.where(dry, np.nan, vbar)

    def pick(values: np.ndarray, fill: float) -> np.ndarray:
        return np.where(np.isnan(values), fill, values)

    v_min = np.minimum(
        e.gather_min(pick(vb, np.inf), pick(vb, np.inf)),
        e.gather_min(pick(r_ij, np.inf), pick(r_ji, np.inf)),
    )
    v_max = np.maximum(
        e.gather_max(pick(vb, -np.inf), pick(vb, -np.inf)),
        e.gather_max(pick(r_ij, -np.inf), pick(r_ji, -np.inf)),
    )
    empty = ~np.isfinite(v_min) | ~np.isfinite(v_max)
    return np.where(empty, 0.0, v_min), np.where(empty, 0.0, v_max)


def limit_momentum_flux(
    edges: EdgeCoefficients,
    raw: RawFluxes,
    f_h_star: np.ndarray,
    vbar: np.ndarray,
    dry: np.ndarray,
    v_bounds: Tuple[np.ndarray, np.ndarray],
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Limit the momentum fluxes after the height fluxes have been fixed.

    Args:
        edges: Edge coefficients
        raw: Raw fluxes
        f_h_star: Limited height fluxes
        vbar: Velocity bar states
        dry: Dry edge mask
        v_bounds: (v_min, v_max) per node

    Returns:
        (g_hv, g_hv_star, f_hv_star)
    """
    e = edges
    inv = _half_inverse(e.d)
    two_d = 2.0 * e.d
    hstar_ij = e.hbar_ij + f_h_star * inv
    hstar_ji = e.hbar_ji - f_h_star * inv

    v_min, v_max = v_bounds
    j = np.where(e.interior, e.node_j, e.node_i)
    vmin_i, vmax_i = v_min[e.node_i], v_max[e.node_i]
    vmin_j, vmax_j = v_min[j], v_max[j]

    shift = two_d * (e.hvbar_b_ij - hstar_ij * vbar)
    g = raw.f_hv + shift

    upper = two_d * np.minimum(
        hstar_ij * (vmax_i - vbar), hstar_ji * (vbar - vmin_j)
    )
    lower = two_d * np.maximum(
        hstar_ij * (vmin_i - vbar), hstar_ji * (vbar - vmax_j)
    )
    g_star = np.where(
        g >= 0.0,
        np.minimum(g, np.maximum(upper, 0.0)),
        np.maximum(g, np.minimum(lower, 0.0)),
    )
    f_star = g_star - shift

    blocked = dry | e.is_boundary
    return (
        np.where(blocked, 0.0, g),
        np.where(blocked, 0.0, g_star),
        np.where(blocked, 0.0, f_star),
    )


def limit_fluxes(
    edges: EdgeCoefficients, raw: RawFluxes, dry_tol: float = 0.0
) -> LimitedFluxes:
    """
    Sequential limiter: height fluxes first, then momentum fluxes.

    Args:
        edges: Edge coefficients (interior edges and pseudo-edges)
        raw: Raw antidiffusive fluxes
        dry_tol: Absolute dry-edge threshold on h̄_ij + h̄_ji

    Returns:
        LimitedFluxes
    """
    e = edges
    h_min, h_max = height_bounds(e)
    j = np.where(e.interior, e.node_j, e.node_i)
    f_h_star = limit_height_flux(
        raw.f_h,
        e.d,
        e.hbar_b_ij,
        e.hbar_b_ji,
        (h_min[e.node_i], h_max[e.node_i]),
        (h_min[j], h_max[j]),
    )
    f_h_star = np.where(e.is_boundary, 0.0, f_h_star)

    vbar, dry = velocity_bar_states(e, dry_tol)
    v_min, v_max = velocity_bounds(e, vbar, dry, dry_tol)
    g, g_star, f_hv_star = limit_momentum_flux(
        e, raw, f_h_star, vbar, dry, (v_min, v_max)
    )

    inv = _half_inverse(e.d)
    limited = LimitedFluxes(
        f_h_star=f_h_star,
        f_hv_star=f_hv_star,
        g_hv=g,
        g_hv_star=g_star,
        h_min=h_min,
        h_max=h_max,
        v_min=v_min,
        v_max=v_max,
        vbar=vbar,
        dry=dry,
        hbar_star_ij=e.hbar_ij + f_h_star * inv,
        hbar_star_ji=e.hbar_ji - f_h_star * inv,
        hbar_b_star_ij=e.hbar_b_ij + f_h_star * inv,
        hbar_b_star_ji=e.hbar_b_ji - f_h_star * inv,
        hvbar_b_star_ij=e.hvbar_b_ij + f_hv_star * inv,
        hvbar_b_star_ji=e.hvbar_b_ji - f_hv_star * inv,
    )
    active = int(np.count_nonzero(f_h_star != raw.f_h))
    logger.debug(f"高度通量限制器激活 {active} / {e.size} 条边")
    return limited


def scale_fluxes(limited: LimitedFluxes, beta: np.ndarray) -> LimitedFluxes:
    """Return limited fluxes multiplied by the edge factors β_ij."""
    return replace(
        limited,
        f_h_star=beta * limited.f_h_star,
        f_hv_star=beta * limited.f_hv_star,
    )


def mcl_rhs(edges: EdgeCoefficients, limited: LimitedFluxes) -> Rhs:
    """
    Right-hand side Σ_j [2d_ij(ū_ij^b − u_i) + f_ij^*].

    Node j of each interior edge receives 2d_ij(ū_ji^b − u_j) − f_ij^*.
    With zero limited fluxes this equals the low-order bar form.
    """
    on_i, on_j = low_order_bar_terms(edges)
    fh, fhv = limited.f_h_star, limited.f_hv_star
    rhs = Rhs(
        edges.scatter(on_i[0] + fh, on_j[0] - fh),
        edges.scatter(on_i[1] + fhv, on_j[1] - fhv),
    )
    rhs.check()
    return rhs
