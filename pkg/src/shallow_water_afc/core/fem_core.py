#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Continuous P1 finite element discretization in one space dimension.

Builds the mesh with its consistent and lumped mass matrices and the
discrete gradient coefficients c_ij = ∫ φ_i ∂φ_j/∂x dx, interpolates the
bottom topography and defines the nodal state container.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError, DataError, NumericalError

logger = logging.getLogger(__name__)

# Height values below this (absolute) are rounding noise around zero.
NEGATIVE_HEIGHT_TOL = 1e-14


@dataclass(frozen=True)
class Mesh1D:
    """
    One-dimensional P1 mesh.

    Edges are the unordered node pairs (i, j), i < j, sharing an element,
    stored in ascending order. Per-edge arrays ``m_ij``, ``c_ij`` and
    ``c_ji`` hold the off-diagonal matrix entries for these pairs.
    """

    nodes: np.ndarray
    element_lengths: np.ndarray
    lumped_mass: np.ndarray
    consistent_mass: sp.csr_matrix
    grad_coeff: sp.csr_matrix
    edge_i: np.ndarray
    edge_j: np.ndarray
    m_ij: np.ndarray
    c_ij: np.ndarray
    c_ji: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.nodes.size)

    @property
    def n_elements(self) -> int:
        return int(self.element_lengths.size)

    @property
    def n_edges(self) -> int:
        return int(self.edge_i.size)

    @property
    def length(self) -> float:
        """Measure |Ω| of the domain."""
        return float(self.nodes[-1] - self.nodes[0])

    @property
    def dx(self) -> float:
        """Largest element width."""
        return float(self.element_lengths.max())

    def stencil(self, i: int) -> List[int]:
        """Nodes sharing an element with node ``i``, including ``i``."""
        row = self.consistent_mass.getrow(i)
        return sorted(int(j) for j in row.indices)


def build_mesh(nodes: np.ndarray) -> Mesh1D:
    """
    Assemble the P1 matrices for arbitrary increasing node coordinates.

    Args:
        nodes: Strictly increasing node coordinates

    Returns:
        Mesh1D instance

    Raises:
        ConfigurationError: If fewer than two elements or unsorted nodes
    """
    x = np.asarray(nodes, dtype=float)
    if x.ndim != 1 or x.size < 3:
        raise ConfigurationError("网格至少需要 2 个单元")
    lengths = np.diff(x)
    if not np.all(lengths > 0.0):
        raise ConfigurationError("网格节点必须严格递增")

    n = x.size
    left = np.arange(n - 1)
    right = left + 1

    # Element matrices, local ordering (left, right).
    mass_local = np.stack(
        [
            lengths / 3.0,
            lengths / 6.0,
            lengths / 6.0,
            lengths / 3.0,
        ],
        axis=1,
    )
    half = np.full(n - 1, 0.5)
    grad_local = np.stack([-half, half, -half, half], axis=1)

    rows = np.stack([left, left, right, right], axis=1).ravel()
    cols = np.stack([left, right, left, right], axis=1).ravel()
    consistent = sp.coo_matrix(
        (mass_local.ravel(), (rows, cols)), shape=(n, n)
    ).tocsr()
    grad = sp.coo_matrix(
        (grad_local.ravel(), (rows, cols)), shape=(n, n)
    ).tocsr()

    lumped = np.asarray(consistent.sum(axis=1)).ravel()

    mesh = Mesh1D(
        nodes=x,
        element_lengths=lengths,
        lumped_mass=lumped,
        consistent_mass=consistent,
        grad_coeff=grad,
        edge_i=left,
        edge_j=right,
        m_ij=np.asarray(consistent[left, right]).ravel(),
        c_ij=np.asarray(grad[left, right]).ravel(),
        c_ji=np.asarray(grad[right, left]).ravel(),
    )
    logger.debug(f"网格构建完成: {n} 个节点, {n - 1} 个单元")
    return mesh


def build_uniform_mesh(
    x_left: float, x_right: float, n_elements: int
) -> Mesh1D:
    """
    Build a uniform mesh of ``n_elements`` P1 elements on [x_left, x_right].

    Args:
        x_left: Left end of the interval
        x_right: Right end of the interval
        n_elements: Number of elements, at least 2

    Returns:
        Mesh1D instance

    Raises:
        ConfigurationError: If the interval or element count is invalid
    """
    if not (np.isfinite(x_left) and np.isfinite(x_right)):
        raise ConfigurationError("区间端点必须是有限值")
    if not x_left < x_right:
        raise ConfigurationError(
            f"无效的区间: x_left={x_left} 必须小于 x_right={x_right}"
        )
    if int(n_elements) != n_elements or n_elements < 2:
        raise ConfigurationError(f"单元数必须是 ≥2 的整数: {n_elements}")
    return build_mesh(np.linspace(x_left, x_right, int(n_elements) + 1))


@dataclass(frozen=True)
class Bathymetry:
    """Nodal values of the interpolated bottom topography."""

    nodal_b: np.ndarray
    gravity: float

    @property
    def is_flat(self) -> bool:
        return bool(np.all(self.nodal_b == self.nodal_b[0]))


def interpolate_bathymetry(
    b: Callable[[np.ndarray], np.ndarray], mesh: Mesh1D, g: float
) -> Bathymetry:
    """
    Interpolate the bottom topography at the mesh nodes.

    Args:
        b: Topography as a function of x (vectorized or scalar)
        mesh: Target mesh
        g: Gravitational constant

    Returns:
        Bathymetry instance

    Raises:
        DataError: If ``b`` is not finite at some node
        ConfigurationError: If ``g`` is not positive
    """
    if not g > 0.0:
        raise ConfigurationError(f"重力加速度必须为正: {g}")
    values = evaluate_nodal(b, mesh.nodes)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise DataError(
            "地形函数在节点处不是有限值",
            {"node": int(bad[0]), "x": float(mesh.nodes[bad[0]])},
        )
    return Bathymetry(nodal_b=values, gravity=float(g))


def evaluate_nodal(
    func: Callable[[np.ndarray], np.ndarray], x: np.ndarray
) -> np.ndarray:
    """Evaluate ``func`` at ``x``, falling back to pointwise calls."""
    try:
        values = np.asarray(func(x), dtype=float)
    except (TypeError, ValueError):
        values = np.array([float(func(xi)) for xi in x])
    if values.shape != x.shape:
        values = np.broadcast_to(values, x.shape).astype(float)
    return values


@dataclass
class NodalState:
    """Water height h and discharge hv at the mesh nodes."""

    h: np.ndarray
    hv: np.ndarray

    def __post_init__(self) -> None:
        self.h = np.asarray(self.h, dtype=float)
        self.hv = np.asarray(self.hv, dtype=float)
        if self.h.shape != self.hv.shape:
            raise DataError("h 与 hv 的长度不一致")

    def copy(self) -> "NodalState":
        return NodalState(self.h.copy(), self.hv.copy())

    def free_surface(self, bathymetry: Bathymetry) -> np.ndarray:
        """Total height H = h + b."""
        return self.h + bathymetry.nodal_b

    def total_mass(self, mesh: Mesh1D) -> float:
        """∫ h dx of the P1 interpolant."""
        return float(np.dot(mesh.lumped_mass, self.h))

    def check(self) -> None:
        """
        Assert finiteness and nonnegative heights.

        Heights in [-NEGATIVE_HEIGHT_TOL, 0) are rounded to zero.

        Raises:
            NumericalError: On non-finite entries or negative heights
        """
        for name, arr in (("h", self.h), ("hv", self.hv)):
            bad = np.flatnonzero(~np.isfinite(arr))
            if bad.size:
                raise NumericalError(
                    f"{name} 出现非有限值", {"node": int(bad[0])}
                )
        negative = self.h < 0.0
        if np.any(negative):
            worst = int(np.argmin(self.h))
            if self.h[worst] < -NEGATIVE_HEIGHT_TOL:
                raise NumericalError(
                    "水深为负",
                    {"node": worst, "h": float(self.h[worst])},
                )
            self.h[negative] = 0.0
