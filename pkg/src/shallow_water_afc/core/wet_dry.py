#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Wetting and drying treatments.

Each strategy recovers a nodal velocity from (h, hv) near dry states and
may overwrite the discharge with h·ṽ. Water heights are never modified.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .config import WetDryConfig
from .errors import ConfigurationError
from .fem_core import Bathymetry, Mesh1D, NodalState
from .low_order import recover_velocity

logger = logging.getLogger(__name__)

STRATEGIES = (
    "none",
    "zero-velocity",
    "azerad",
    "kurganov-petrova",
    "entropy-based",
    "friction-boundary-layer",
)

ALIASES = {
    "zero": "zero-velocity",
    "ricchiuto": "zero-velocity",
    "kp": "kurganov-petrova",
    "entropy": "entropy-based",
    "friction": "friction-boundary-layer",
}

# Heights at or below this fraction of max h0 count as dry without a fix.
DRY_FRACTION = 1e-12

AZERAD_FACTOR = 1e-16


def resolve_strategy(name: Optional[str]) -> str:
    """Map a strategy name or alias to its canonical name."""
    key = (name or "none").strip().lower()
    key = ALIASES.get(key, key)
    if key not in STRATEGIES:
        raise ConfigurationError(
            f"未知的干湿处理策略: {name}。可选: {', '.join(STRATEGIES)}"
        )
    return key


def fix_zero_velocity(
    h: np.ndarray, hv: np.ndarray, tol: float
) -> np.ndarray:
    """v = hv/h if h ≥ tol, else 0."""
    h = np.asarray(h, dtype=float)
    hv = np.asarray(hv, dtype=float)
    wet = (h >= tol) & (h > 0.0)
    return np.where(wet, hv / np.where(wet, h, 1.0), 0.0)


def fix_azerad(h: np.ndarray, hv: np.ndarray, eps: float) -> np.ndarray:
    """ṽ = 2h(hv) / (h² + max{h, ε}²)."""
    h = np.asarray(h, dtype=float)
    hv = np.asarray(hv, dtype=float)
    cap = np.maximum(h, eps)
    denom = h * h + cap * cap
    safe = np.where(denom > 0.0, denom, 1.0)
    return np.where(denom > 0.0, 2.0 * h * hv / safe, 0.0)


def fix_kurganov_petrova(
    h: np.ndarray, hv: np.ndarray, eps: float
) -> Tuple[np.ndarray, np.ndarray]:
    """
    ṽ = √2 h (hv) / √(h⁴ + max{h, ε}⁴) and the overwritten discharge h·ṽ.

    Args:
        h: Water heights
        hv: Discharges
        eps: Threshold, typically the normalized mesh size

    Returns:
        (ṽ, h·ṽ)
    """
    h = np.asarray(h, dtype=float)
    hv = np.asarray(hv, dtype=float)
    cap = np.maximum(h, eps)
    denom = np.sqrt(h**4 + cap**4)
    safe = np.where(denom > 0.0, denom, 1.0)
    v = np.where(denom > 0.0, np.sqrt(2.0) * h * hv / safe, 0.0)
    return v, h * v


def fix_entropy_based(
    h: np.ndarray, hv: np.ndarray, eta_max: np.ndarray, g: float
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Clamp |v| to Q_i = √(2η_i^max/h_i − g h_i) (flat topography).

    Args:
        h: Water heights of the updated state
        hv: Discharges of the updated state
        eta_max: Entropy bounds η_i^max of the convex update
        g: Gravitational constant

    Returns:
        (ṽ, h·ṽ)
    """
    h = np.asarray(h, dtype=float)
    hv = np.asarray(hv, dtype=float)
    wet = h > 0.0
    safe_h = np.where(wet, h, 1.0)
    q_max = np.sqrt(np.maximum(0.0, 2.0 * eta_max / safe_h - g * h))
    v = np.where(wet, hv / safe_h, 0.0)
    clamp = wet & (np.abs(hv) > h * q_max)
    v = np.where(clamp, np.sign(hv) * q_max, v)
    return v, h * v


def boundary_layer_velocity(
    h: np.ndarray,
    free_surface: np.ndarray,
    mesh: Mesh1D,
    g: float,
    sigma: float,
) -> np.ndarray:
    """m_i v_i^BL = −(g/σ) h_i Σ_j c_ij H_j (lumped projection)."""
    slope = mesh.grad_coeff @ np.asarray(free_surface, dtype=float)
    return -(g / sigma) * np.asarray(h, float) * slope / mesh.lumped_mass


def fix_friction_boundary_layer(
    h: np.ndarray,
    hv: np.ndarray,
    free_surface: np.ndarray,
    mesh: Mesh1D,
    g: float,
    sigma: float,
    delta: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    ṽ = hv/max{h, δ} + max{0, (δ − h)/δ} v^BL.

    Args:
        h: Water heights
        hv: Discharges
        free_surface: Total heights H = h + b
        mesh: Mesh providing c_ij and the lumped masses
        g: Gravitational constant
        sigma: Bottom friction coefficient
        delta: Boundary layer thickness

    Returns:
        (ṽ, h·ṽ)
    """
    h = np.asarray(h, dtype=float)
    hv = np.asarray(hv, dtype=float)
    v_bl = boundary_layer_velocity(h, free_surface, mesh, g, sigma)
    weight = np.maximum(0.0, (delta - h) / delta)
    v = hv / np.maximum(h, delta) + weight * v_bl
    return v, h * v


@dataclass
class WetDryTreatment:
    """
    Configured wetting and drying strategy for one run.

    ``apply`` is called on the initial state and after every stage
    update; ``velocity`` gives the nodal velocities used in the
    assembly.
    """

    strategy: str
    mesh: Mesh1D
    bathymetry: Bathymetry
    h0_max: float
    epsilon: float = 0.0
    sigma: float = 10.0
    delta: float = 1e-3
    overwrite_discharge: bool = True

    @classmethod
    def from_config(
        cls,
        config: WetDryConfig,
        mesh: Mesh1D,
        bathymetry: Bathymetry,
        h0_max: float,
    ) -> "WetDryTreatment":
        """
        Build the treatment, filling strategy-specific default tolerances.

        Raises:
            ConfigurationError: For invalid parameters or the entropy-based
                fix on nonflat topography
        """
        strategy = resolve_strategy(config.strategy)
        if not config.sigma > 0.0:
            raise ConfigurationError(
                f"摩擦系数 sigma 必须为正: {config.sigma}"
            )
        if not config.delta > 0.0:
            raise ConfigurationError(
                f"边界层厚度 delta 必须为正: {config.delta}"
            )
        if config.epsilon is not None and config.epsilon < 0.0:
            raise ConfigurationError(f"epsilon 不能为负: {config.epsilon}")
        if strategy == "entropy-based" and not bathymetry.is_flat:
            raise ConfigurationError("基于熵的干湿处理只适用于平底地形")

        ratio = mesh.dx / mesh.length
        defaults = {
            "zero-velocity": ratio**2,
            "azerad": AZERAD_FACTOR * h0_max,
            "kurganov-petrova": ratio,
        }
        eps = config.epsilon
        if eps is None:
            eps = defaults.get(strategy, 0.0)

        treatment = cls(
            strategy=strategy,
            mesh=mesh,
            bathymetry=bathymetry,
            h0_max=float(h0_max),
            epsilon=float(eps),
            sigma=float(config.sigma),
            delta=float(config.delta),
            overwrite_discharge=bool(config.overwrite_discharge)
            or strategy == "entropy-based",
        )
        logger.debug(f"干湿处理: {strategy}, epsilon={eps}")
        return treatment

    @property
    def dry_height(self) -> float:
        return DRY_FRACTION * self.h0_max

    @property
    def needs_entropy_bound(self) -> bool:
        return self.strategy == "entropy-based"

    def _fixed(
        self, state: NodalState, eta_max: Optional[np.ndarray]
    ) -> Tuple[np.ndarray, np.ndarray]:
        h, hv = state.h, state.hv
        g = self.bathymetry.gravity
        if self.strategy == "zero-velocity":
            v = fix_zero_velocity(h, hv, self.epsilon)
            return v, h * v
        if self.strategy == "azerad":
            v = fix_azerad(h, hv, self.epsilon)
            return v, h * v
        if self.strategy == "kurganov-petrova":
            return fix_kurganov_petrova(h, hv, self.epsilon)
        if self.strategy == "friction-boundary-layer":
            return fix_friction_boundary_layer(
                h,
                hv,
                state.free_surface(self.bathymetry),
                self.mesh,
                g,
                self.sigma,
                self.delta,
            )
        if self.strategy == "entropy-based":
            if eta_max is None:
                v = recover_velocity(h, hv)
                return v, hv.copy()
            return fix_entropy_based(h, hv, eta_max, g)
        v = recover_velocity(h, hv, self.dry_height)
        return v, h * v

    def velocity(self, state: NodalState) -> np.ndarray:
        """
        Nodal velocities for the assembly.

        After a discharge overwrite, hv/h is the fixed velocity itself.
        """
        if self.overwrite_discharge and self.strategy != "none":
            return recover_velocity(state.h, state.hv)
        v, _ = self._fixed(state, None)
        return v

    def apply(
        self, state: NodalState, eta_max: Optional[np.ndarray] = None
    ) -> np.ndarray:
        """
        Apply the fix to ``state`` in place.

        Args:
            state: State after an update
            eta_max: Entropy bounds for the entropy-based strategy

        Returns:
            Indices of the nodes whose discharge changed
        """
        if self.strategy == "none":
            return np.zeros(0, dtype=int)
        _, hv_new = self._fixed(state, eta_max)
        changed = np.flatnonzero(hv_new != state.hv)
        if self.overwrite_discharge and changed.size:
            state.hv = hv_new
            logger.debug(f"干湿处理修改了 {changed.size} 个节点的流量")
        return changed
