#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Boundary conditions for the shallow water solver.

Boundary data enter weakly: each boundary node receives a Rusanov flux
between its internal state and an external Riemann state chosen from the
boundary kind. Algebraically this is a pseudo-edge to the external state
with c = n/2 and d = λ_b/2, which is how the assembly treats it.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import BoundaryError, ConfigurationError

logger = logging.getLogger(__name__)


class BoundaryKind(str, Enum):
    """Supported boundary types."""

    WALL = "reflecting-wall"
    SUBCRITICAL_INLET = "subcritical-inlet"
    SUBCRITICAL_OUTLET = "subcritical-outlet"
    SUPERCRITICAL_INLET = "supercritical-inlet"
    SUPERCRITICAL_OUTLET = "supercritical-outlet"
    AUTO = "auto-transcritical"


ALIASES = {
    "wall": BoundaryKind.WALL,
    "reflecting": BoundaryKind.WALL,
    "auto": BoundaryKind.AUTO,
    "transcritical": BoundaryKind.AUTO,
}


@dataclass(frozen=True)
class BoundarySpec:
    """Boundary kind, side and prescribed data."""

    kind: BoundaryKind
    side: str
    h_in: Optional[float] = None
    hv_in: Optional[float] = None

    def __post_init__(self) -> None:
        if self.side not in ("left", "right"):
            raise ConfigurationError(f"无效的边界位置: {self.side}")
        needs_h = self.kind in (
            BoundaryKind.SUBCRITICAL_OUTLET,
            BoundaryKind.SUPERCRITICAL_INLET,
            BoundaryKind.AUTO,
        )
        needs_hv = self.kind in (
            BoundaryKind.SUBCRITICAL_INLET,
            BoundaryKind.SUPERCRITICAL_INLET,
            BoundaryKind.AUTO,
        )
        for name, needed, value in (
            ("h_in", needs_h, self.h_in),
            ("hv_in", needs_hv, self.hv_in),
        ):
            if not needed:
                continue
            if value is None or not math.isfinite(value):
                raise ConfigurationError(
                    f"边界 {self.side} ({self.kind.value}) 需要有限的 {name}"
                )
        if needs_h and self.h_in is not None and self.h_in < 0.0:
            raise ConfigurationError(f"边界水深不能为负: {self.h_in}")

    @classmethod
    def parse(
        cls,
        kind: str,
        side: str,
        h_in: Optional[float] = None,
        hv_in: Optional[float] = None,
    ) -> "BoundarySpec":
        """Create from a kind name as used in configuration files."""
        key = kind.strip().lower()
        try:
            resolved = ALIASES.get(key) or BoundaryKind(key)
        except ValueError:
            valid = ", ".join(k.value for k in BoundaryKind)
            raise ConfigurationError(
                f"未知的边界类型: {kind}。可选: {valid}"
            ) from None
        return cls(resolved, side, h_in, hv_in)

    @property
    def normal(self) -> float:
        """Outward unit normal."""
        return -1.0 if self.side == "left" else 1.0


def _velocity(h: float, hv: float) -> float:
    return hv / h if h > 0.0 else 0.0


def classify(spec: BoundarySpec, h: float, hv: float, g: float) -> str:
    """
    Resolve an auto-transcritical boundary from the internal eigenvalues.

    Args:
        spec: Boundary specification
        h: Internal water height
        hv: Internal discharge
        g: Gravitational constant

    Returns:
        Effective boundary kind value

    Raises:
        BoundaryError: If the internal state is dry
    """
    if spec.kind is not BoundaryKind.AUTO:
        return spec.kind.value
    if not h > 0.0:
        raise BoundaryError(
            "自动跨临界边界需要湿的内部状态",
            {"side": spec.side, "h": h},
        )
    v = hv / h
    c = math.sqrt(g * h)
    # Outgoing characteristics point along the outward normal.
    outgoing = sum(1 for lam in (v - c, v + c) if lam * spec.normal > 0.0)
    if outgoing == 2:
        return BoundaryKind.SUPERCRITICAL_OUTLET.value
    if outgoing == 0:
        return BoundaryKind.SUPERCRITICAL_INLET.value
    inflow = v * spec.normal < 0.0
    if inflow:
        return BoundaryKind.SUBCRITICAL_INLET.value
    return BoundaryKind.SUBCRITICAL_OUTLET.value


def external_state(
    spec: BoundarySpec, internal: Tuple[float, float], g: float
) -> Tuple[float, float]:
    """
    External Riemann state for one boundary node.

    Args:
        spec: Boundary specification
        internal: Internal state (h, hv)
        g: Gravitational constant

    Returns:
        External state (h_ext, hv_ext)

    Raises:
        BoundaryError: For a dry internal state at an inflow boundary
    """
    h, hv = float(internal[0]), float(internal[1])
    kind = classify(spec, h, hv, g)

    if kind == BoundaryKind.WALL.value:
        return h, -hv
    if kind == BoundaryKind.SUPERCRITICAL_OUTLET.value:
        return h, hv
    if kind == BoundaryKind.SUBCRITICAL_OUTLET.value:
        return float(spec.h_in), hv  # type: ignore[arg-type]
    if kind == BoundaryKind.SUPERCRITICAL_INLET.value:
        return float(spec.h_in), float(spec.hv_in)  # type: ignore[arg-type]

    # subcritical inlet keeps the internal height
    if not h > 0.0:
        raise BoundaryError(
            "入流边界的内部状态为干",
            {"side": spec.side, "h": h, "hv_in": spec.hv_in},
        )
    return h, float(spec.hv_in)  # type: ignore[arg-type]


def boundary_flux_contribution(
    internal: Tuple[float, float],
    external: Tuple[float, float],
    normal: float,
    g: float,
    d_boundary: float,
) -> Tuple[float, float]:
    """
    Weak Rusanov boundary increment for the boundary node row.

    The increment is −(F̂·n − f(u_int)·n) with the Rusanov flux
    F̂·n = ½(f_int + f_ext)·n − d_b(u_ext − u_int) and d_b = λ_b/2.

    Args:
        internal: Internal state (h, hv)
        external: External state (h, hv)
        normal: Outward normal (±1)
        g: Gravitational constant
        d_boundary: Boundary viscosity d_b

    Returns:
        Increment (dh, dhv) of m_i du_i/dt
    """
    h_i, hv_i = internal
    h_e, hv_e = external
    f_i = (hv_i, hv_i * _velocity(h_i, hv_i) + 0.5 * g * h_i * h_i)
    f_e = (hv_e, hv_e * _velocity(h_e, hv_e) + 0.5 * g * h_e * h_e)
    c = 0.5 * normal
    dh = d_boundary * (h_e - h_i) - (f_e[0] - f_i[0]) * c
    dhv = d_boundary * (hv_e - hv_i) - (f_e[1] - f_i[1]) * c
    return dh, dhv


@dataclass
class PseudoEdges:
    """External states attached to the boundary nodes."""

    node: np.ndarray
    normal: np.ndarray
    h_ext: np.ndarray
    hv_ext: np.ndarray
    kinds: List[str]

    @property
    def size(self) -> int:
        return int(self.node.size)


@dataclass
class BoundaryConditions:
    """Left and right boundary specifications for a mesh."""

    left: BoundarySpec
    right: BoundarySpec
    _last_kinds: Dict[str, str] = field(default_factory=dict, repr=False)

    @classmethod
    def walls(cls) -> "BoundaryConditions":
        return cls(
            BoundarySpec(BoundaryKind.WALL, "left"),
            BoundarySpec(BoundaryKind.WALL, "right"),
        )

    def pseudo_edges(
        self, h: np.ndarray, hv: np.ndarray, g: float
    ) -> PseudoEdges:
        """
        Build the external states for both boundary nodes.

        Args:
            h: Nodal heights
            hv: Nodal discharges
            g: Gravitational constant

        Returns:
            PseudoEdges for the left and right boundary node
        """
        nodes = [0, h.size - 1]
        ext_h, ext_hv, kinds = [], [], []
        for spec, node in zip((self.left, self.right), nodes):
            internal = (float(h[node]), float(hv[node]))
            kind = classify(spec, internal[0], internal[1], g)
            he, hve = external_state(spec, internal, g)
            ext_h.append(he)
            ext_hv.append(hve)
            kinds.append(kind)
            previous = self._last_kinds.get(spec.side)
            if spec.kind is BoundaryKind.AUTO and previous != kind:
                logger.info(f"边界 {spec.side} 类型切换: {previous} -> {kind}")
            self._last_kinds[spec.side] = kind
        return PseudoEdges(
            node=np.array(nodes),
            normal=np.array([self.left.normal, self.right.normal]),
            h_ext=np.array(ext_h),
            hv_ext=np.array(ext_hv),
            kinds=kinds,
        )

    @property
    def current_kinds(self) -> Dict[str, str]:
        """Most recent effective kind per side."""
        return dict(self._last_kinds)
