#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Entropy stability for the shallow water equations with topography.

Provides the entropy pair η, q, the entropy variables and potential, the
generalized Tadmor condition (d_ij/2) P_ij ≤ min{Q_ij, Q_ji} used to
adjust the artificial viscosities, the semi-discrete entropy limiter β_ij
and per-node entropy inequality diagnostics.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .fem_core import Bathymetry, NodalState
from .low_order import (
    EdgeCoefficients,
    Rhs,
    recover_velocity,
    refresh_bar_states,
    swe_flux,
)
from .mcl_limiter import LimitedFluxes

logger = logging.getLogger(__name__)

# Relative size of |P_ij| below which the viscosity reset is not applied.
P_TOL = 1e-14

ALPHA_BISECTION_STEPS = 60


def _velocity(
    h: np.ndarray, hv: np.ndarray, v: Optional[np.ndarray]
) -> np.ndarray:
    return recover_velocity(h, hv) if v is None else np.asarray(v, float)


def entropy(
    h: np.ndarray,
    hv: np.ndarray,
    b: np.ndarray,
    g: float,
    v: Optional[np.ndarray] = None,
) -> np.ndarray:
    """η = ½(g h² + h v²) + g h b."""
    h = np.asarray(h, dtype=float)
    vel = _velocity(h, hv, v)
    return 0.5 * (g * h * h + h * vel * vel) + g * h * np.asarray(b, float)


def entropy_flux(
    h: np.ndarray,
    hv: np.ndarray,
    b: np.ndarray,
    g: float,
    v: Optional[np.ndarray] = None,
) -> np.ndarray:
    """q = (g(h + b) + ½ v²) hv."""
    h = np.asarray(h, dtype=float)
    vel = _velocity(h, hv, v)
    return (g * (h + np.asarray(b, float)) + 0.5 * vel * vel) * np.asarray(
        hv, float
    )


def entropy_variables(
    h: np.ndarray,
    hv: np.ndarray,
    b: np.ndarray,
    g: float,
    v: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Entropy variables v(u, b) = (g(h + b) − ½ v², v)."""
    h = np.asarray(h, dtype=float)
    vel = _velocity(h, hv, v)
    return g * (h + np.asarray(b, float)) - 0.5 * vel * vel, vel


def entropy_potential(
    h: np.ndarray, hv: np.ndarray, g: float, v: Optional[np.ndarray] = None
) -> np.ndarray:
    """ψ = (g/2) h² v."""
    h = np.asarray(h, dtype=float)
    return 0.5 * g * h * h * _velocity(h, hv, v)


@dataclass
class EntropyEdgeData:
    """Tadmor condition ingredients per edge and entropy pair per node."""

    P: np.ndarray
    Q_ij: np.ndarray
    Q_ji: np.ndarray
    R: np.ndarray
    beta: np.ndarray
    w_h: np.ndarray
    w_hv: np.ndarray
    scale: np.ndarray
    eta: np.ndarray
    qflux: np.ndarray

    @property
    def min_Q(self) -> np.ndarray:
        return np.minimum(self.Q_ij, self.Q_ji)

    def slack(self, d: np.ndarray) -> np.ndarray:
        """min{Q_ij, Q_ji} − (d/2) P − (β/2) R (nonnegative when stable)."""
        return self.min_Q - 0.5 * d * self.P - 0.5 * self.beta * self.R


def _side_Q(
    h_a: np.ndarray,
    hv_a: np.ndarray,
    v_a: np.ndarray,
    h_b: np.ndarray,
    hv_b: np.ndarray,
    v_b: np.ndarray,
    jump_ab: np.ndarray,
    c_ab: np.ndarray,
    g: float,
) -> np.ndarray:
    psi_a = entropy_potential(h_a, hv_a, g, v_a)
    psi_b = entropy_potential(h_b, hv_b, g, v_b)
    va_h, va_v = entropy_variables(h_a, hv_a, 0.0, g, v_a)
    vb_h, vb_v = entropy_variables(h_b, hv_b, 0.0, g, v_b)
    fa_h, fa_hv = swe_flux(h_a, hv_a, v_a, g)
    fb_h, fb_hv = swe_flux(h_b, hv_b, v_b, g)
    bracket = g * (
        0.5 * (h_a + h_b) * 0.5 * (v_a + v_b) - 0.5 * (hv_a + hv_b)
    )
    return (
        (psi_b - psi_a) * c_ab
        + 0.5 * (va_h - vb_h) * (fa_h + fb_h) * c_ab
        + 0.5 * (va_v - vb_v) * (fa_hv + fb_hv) * c_ab
        + bracket * c_ab * jump_ab
    )


def compute_PQ(
    u_i: Tuple[np.ndarray, np.ndarray],
    u_j: Tuple[np.ndarray, np.ndarray],
    b_i: np.ndarray,
    b_j: np.ndarray,
    alpha: np.ndarray,
    c_ij: np.ndarray,
    g: float,
    v_i: Optional[np.ndarray] = None,
    v_j: Optional[np.ndarray] = None,
    c_ji: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Ingredients of the generalized Tadmor condition.

    P_ij is the inner product of the entropy-variable jump
    [g(h_i − h_j + α(b_i − b_j)) − (v_i² − v_j²)/2, v_i − v_j] with the
    limited state jump [h_j − h_i + α(b_j − b_i),
    hv_j − hv_i + (v_i + v_j)/2 α(b_j − b_i)].

    Args:
        u_i: State (h, hv) at node i
        u_j: State (h, hv) at node j
        b_i: Topography at node i
        b_j: Topography at node j
        alpha: Bathymetry limiter α_ij^b
        c_ij: Gradient coefficient c_ij
        g: Gravitational constant
        v_i: Velocity at node i (hv/h when None)
        v_j: Velocity at node j
        c_ji: Gradient coefficient c_ji (−c_ij when None)

    Returns:
        (P_ij, Q_ij, Q_ji)
    """
    h_i, hv_i = (np.asarray(a, float) for a in u_i)
    h_j, hv_j = (np.asarray(a, float) for a in u_j)
    vi = _velocity(h_i, hv_i, v_i)
    vj = _velocity(h_j, hv_j, v_j)
    cji = -np.asarray(c_ij, float) if c_ji is None else c_ji
    jump = np.asarray(alpha, float) * (np.asarray(b_j) - np.asarray(b_i))

    w_h, w_hv = _entropy_jump(h_i, h_j, vi, vj, jump, g)
    delta_h = h_j - h_i + jump
    delta_hv = hv_j - hv_i + 0.5 * (vi + vj) * jump
    P = w_h * delta_h + w_hv * delta_hv
    Q_ij = _side_Q(h_i, hv_i, vi, h_j, hv_j, vj, jump, c_ij, g)
    Q_ji = _side_Q(h_j, hv_j, vj, h_i, hv_i, vi, -jump, cji, g)
    return P, Q_ij, Q_ji


def _entropy_jump(
    h_i: np.ndarray,
    h_j: np.ndarray,
    v_i: np.ndarray,
    v_j: np.ndarray,
    jump: np.ndarray,
    g: float,
) -> Tuple[np.ndarray, np.ndarray]:
    w_h = g * (h_i - h_j - jump) - 0.5 * (v_i * v_i - v_j * v_j)
    return w_h, v_i - v_j


def edge_entropy_data(
    edges: EdgeCoefficients,
    state: NodalState,
    bathymetry: Bathymetry,
    limited: Optional[LimitedFluxes] = None,
) -> EntropyEdgeData:
    """
    Evaluate P, Q, R per edge and β = 1 for the current edge data.

    Args:
        edges: Edge coefficients
        state: Nodal state
        bathymetry: Topography
        limited: Limited fluxes for R_ij (R = 0 when None)

    Returns:
        EntropyEdgeData
    """
    e = edges
    g = e.g
    P, Q_ij, Q_ji = compute_PQ(
        (e.h_i, e.hv_i),
        (e.h_j, e.hv_j),
        e.b_i,
        e.b_j,
        e.alpha,
        e.c_ij,
        g,
        e.v_i,
        e.v_j,
        e.c_ji,
    )
    w_h, w_hv = _entropy_jump(e.h_i, e.h_j, e.v_i, e.v_j, e.bath_jump, g)
    delta_h = e.h_j - e.h_i + e.bath_jump
    delta_hv = e.hv_j - e.hv_i + 0.5 * (e.v_i + e.v_j) * e.bath_jump
    scale = np.abs(w_h * delta_h) + np.abs(w_hv * delta_hv)

    if limited is None:
        R = np.zeros_like(P)
    else:
        R = w_h * limited.f_h_star + w_hv * limited.f_hv_star

    b = bathymetry.nodal_b
    return EntropyEdgeData(
        P=P,
        Q_ij=Q_ij,
        Q_ji=Q_ji,
        R=R,
        beta=np.ones_like(P),
        w_h=w_h,
        w_hv=w_hv,
        scale=scale,
        eta=entropy(state.h, state.hv, b, g),
        qflux=entropy_flux(state.h, state.hv, b, g),
    )


@dataclass
class ViscosityAdjustment:
    """Outcome of the Tadmor enforcement on d_ij."""

    d: np.ndarray
    adjusted: int
    unresolved: int


def enforce_low_order_entropy(
    edges: EdgeCoefficients, data: EntropyEdgeData
) -> ViscosityAdjustment:
    """
    Increase d_ij where (d_ij/2) P_ij > min{Q_ij, Q_ji}.

    The reset d_ij = 2 min{0, Q_ij, Q_ji}/P_ij is applied only where
    P_ij is negative beyond rounding. Remaining violations are counted
    and reported. Viscosities never decrease.

    Args:
        edges: Edge coefficients
        data: P and Q for the current edges

    Returns:
        ViscosityAdjustment with the new d (bar states not yet refreshed)
    """
    d = edges.d
    min_q = data.min_Q
    violated = 0.5 * d * data.P > min_q
    resolvable = violated & (data.P < -P_TOL * data.scale)

    safe_p = np.where(resolvable, data.P, -1.0)
    reset = 2.0 * np.minimum(0.0, min_q) / safe_p
    new_d = np.where(resolvable, np.maximum(d, reset), d)

    adjusted = int(np.count_nonzero(new_d != d))
    tol = 1e-12 * np.maximum(data.scale, np.abs(min_q))
    excess = 0.5 * d * data.P - min_q > tol
    unresolved = int(np.count_nonzero(violated & ~resolvable & excess))
    if adjusted:
        logger.debug(f"熵条件调整了 {adjusted} 条边的人工粘性")
    if unresolved:
        logger.debug(f"{unresolved} 条边的熵条件无法通过粘性修正")
    return ViscosityAdjustment(new_d, adjusted, unresolved)


def _tadmor_gap(
    edges: EdgeCoefficients, alpha: np.ndarray, index: np.ndarray
) -> np.ndarray:
    e = edges
    P, Q_ij, Q_ji = compute_PQ(
        (e.h_i[index], e.hv_i[index]),
        (e.h_j[index], e.hv_j[index]),
        e.b_i[index],
        e.b_j[index],
        alpha,
        e.c_ij[index],
        e.g,
        e.v_i[index],
        e.v_j[index],
        e.c_ji[index],
    )
    return 0.5 * e.d[index] * P - np.minimum(Q_ij, Q_ji)


def enforce_entropy_by_alpha(
    edges: EdgeCoefficients, data: EntropyEdgeData
) -> Tuple[EdgeCoefficients, int]:
    """
    Reduce α_ij^b by bisection on the edges violating the Tadmor condition.

    Reducing α keeps the corrected height bar states nonnegative. At
    α = 0 the condition takes its flat-bottom form.

    Args:
        edges: Edge coefficients
        data: P and Q for the current edges

    Returns:
        (refreshed edges, number of edges whose α was reduced)
    """
    violated = np.flatnonzero(0.5 * edges.d * data.P > data.min_Q)
    if violated.size == 0:
        return edges, 0

    lo = np.zeros(violated.size)
    hi = edges.alpha[violated].copy()
    lo_ok = _tadmor_gap(edges, lo, violated) <= 0.0
    for _ in range(ALPHA_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        ok = _tadmor_gap(edges, mid, violated) <= 0.0
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    # lo satisfies the condition whenever α = 0 does
    alpha = edges.alpha.copy()
    alpha[violated] = lo
    failed = int(np.count_nonzero(~lo_ok))
    if failed:
        logger.warning(f"{failed} 条边在 α=0 时仍不满足熵条件")
    logger.debug(f"熵修正减小了 {violated.size} 条边的 α")
    return refresh_bar_states(edges, alpha=alpha), int(violated.size)


def entropy_limiter(
    edges: EdgeCoefficients, limited: LimitedFluxes, data: EntropyEdgeData
) -> np.ndarray:
    """
    Semi-discrete entropy limiter β_ij ∈ [0, 1].

    β = (2 min{Q_ij, Q_ji} − d_ij P_ij)/R_ij if R_ij exceeds the numerator,
    and β = 1 otherwise.

    Args:
        edges: Edge coefficients
        limited: Limited fluxes f_ij^*
        data: Entropy data with P, Q

    Returns:
        β per edge
    """
    R = data.w_h * limited.f_h_star + data.w_hv * limited.f_hv_star
    budget = 2.0 * data.min_Q - edges.d * data.P
    active = R > budget
    safe_r = np.where(active & (R != 0.0), R, 1.0)
    beta = np.where(active, budget / safe_r, 1.0)
    beta = np.where(active & (R <= 0.0), 0.0, beta)
    data.R = R
    data.beta = np.clip(beta, 0.0, 1.0)
    return data.beta


@dataclass
class EntropyDiagnostics:
    """Entropy production terms per edge side and residual per node."""

    G: np.ndarray
    W: np.ndarray
    G_star: np.ndarray
    W_star: np.ndarray
    residual: np.ndarray
    scale: float

    @property
    def max_residual(self) -> float:
        return float(self.residual.max())


def _side_terms(
    e: EdgeCoefficients,
    side_i: bool,
    f_h: np.ndarray,
    f_hv: np.ndarray,
    beta: np.ndarray,
) -> Tuple[np.ndarray, ...]:
    """G, W, G*, W* and (q_b − q_a)c for one side of every edge."""
    g = e.g
    if side_i:
        h_a, hv_a, v_a, b_a = e.h_i, e.hv_i, e.v_i, e.b_i
        h_b, hv_b, v_b, b_b = e.h_j, e.hv_j, e.v_j, e.b_j
        c, sign = e.c_ij, 1.0
    else:
        h_a, hv_a, v_a, b_a = e.h_j, e.hv_j, e.v_j, e.b_j
        h_b, hv_b, v_b, b_b = e.h_i, e.hv_i, e.v_i, e.b_i
        c, sign = e.c_ji, -1.0

    jump = e.alpha * (b_b - b_a)
    va_h, va_v = entropy_variables(h_a, hv_a, b_a, g, v_a)
    vb_h, vb_v = entropy_variables(h_b, hv_b, b_b, g, v_b)
    fa_h, fa_hv = swe_flux(h_a, hv_a, v_a, g)
    fb_h, fb_hv = swe_flux(h_b, hv_b, v_b, g)

    g_h = e.d * (h_b - h_a + jump)
    g_hv = e.d * (hv_b - hv_a + 0.5 * (v_a + v_b) * jump)
    s_hv = -g * 0.5 * (h_a + h_b) * jump * c

    G = (
        0.5 * (va_h + vb_h) * g_h
        + 0.5 * (va_v + vb_v) * g_hv
        + 0.5 * (va_h - vb_h) * (fa_h - fb_h) * c
        + 0.5 * (va_v - vb_v) * ((fa_hv - fb_hv) * c + s_hv)
    )
    tilt = 0.5 * g * (1.0 - e.alpha) * (b_a - b_b)
    W = tilt * (e.d * (h_b - h_a + jump) - (hv_a + hv_b) * c)

    fs_h, fs_hv = sign * beta * f_h, sign * beta * f_hv
    G_star = G + 0.5 * ((va_h + vb_h) * fs_h + (va_v + vb_v) * fs_hv)
    W_star = W + tilt * fs_h

    q_a = entropy_flux(h_a, hv_a, b_a, g, v_a)
    q_b = entropy_flux(h_b, hv_b, b_b, g, v_b)
    return G, W, G_star, W_star, (q_b - q_a) * c


def entropy_inequality_residual(
    state: NodalState,
    bathymetry: Bathymetry,
    rhs: Rhs,
    edges: EdgeCoefficients,
    limited: Optional[LimitedFluxes] = None,
    beta: Optional[np.ndarray] = None,
) -> EntropyDiagnostics:
    """
    Residual of the semi-discrete entropy inequality at every node.

    residual_i = v(u_i, b_i)·(m_i du_i/dt)
                 − Σ_j [G_ij + W_ij − (q_j − q_i)c_ij]
    with the starred terms when limited fluxes are given. Boundary
    pseudo-edges are included. A stable scheme yields residual_i ≤ 0.

    Args:
        state: Nodal state the right-hand side was assembled for
        bathymetry: Topography
        rhs: Assembled right-hand side
        edges: Edge coefficients used for the assembly
        limited: Limited fluxes (low-order diagnostics when None)
        beta: Entropy limiter factors (1 when None)

    Returns:
        EntropyDiagnostics
    """
    e = edges
    g = e.g
    if limited is None:
        f_h = np.zeros(e.size)
        f_hv = np.zeros(e.size)
    else:
        f_h, f_hv = limited.f_h_star, limited.f_hv_star
    if beta is None:
        beta = np.ones(e.size)

    G_i, W_i, Gs_i, Ws_i, dq_i = _side_terms(e, True, f_h, f_hv, beta)
    G_j, W_j, Gs_j, Ws_j, dq_j = _side_terms(e, False, f_h, f_hv, beta)
    use_i = (Gs_i, Ws_i) if limited is not None else (G_i, W_i)
    use_j = (Gs_j, Ws_j) if limited is not None else (G_j, W_j)

    bound = e.scatter(
        use_i[0] + use_i[1] - dq_i, use_j[0] + use_j[1] - dq_j
    )
    velocity = np.zeros(e.n_nodes)
    velocity[e.node_i] = e.v_i
    inner = e.interior
    velocity[e.node_j[inner]] = e.v_j[inner]
    v_h, v_v = entropy_variables(
        state.h, state.hv, bathymetry.nodal_b, g, velocity
    )
    production = v_h * rhs.dh_dt + v_v * rhs.dhv_dt
    residual = production - bound

    magnitude = e.scatter(
        np.abs(use_i[0]) + np.abs(use_i[1]) + np.abs(dq_i),
        np.abs(use_j[0]) + np.abs(use_j[1]) + np.abs(dq_j),
    )
    scale = float(max(np.abs(production).max(), magnitude.max(), 1.0))
    return EntropyDiagnostics(
        G=G_i,
        W=W_i,
        G_star=Gs_i,
        W_star=Ws_i,
        residual=residual,
        scale=scale,
    )
