#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Shared fixtures: meshes and randomized nodal states."""

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
import pytest

from shallow_water_afc.core.boundary import (
    BoundaryConditions,
    BoundaryKind,
    BoundarySpec,
)
from shallow_water_afc.core.fem_core import (
    Bathymetry,
    Mesh1D,
    NodalState,
    build_uniform_mesh,
)
from shallow_water_afc.core.low_order import (
    EdgeCoefficients,
    build_edges,
    recover_velocity,
)


KINDS = list(BoundaryKind)


@dataclass
class RandomProblem:
    """Mesh, topography and state drawn from a random generator."""

    mesh: Mesh1D
    bathymetry: Bathymetry
    state: NodalState
    boundary: BoundaryConditions

    def edges(self, mode: str = "nodal") -> EdgeCoefficients:
        velocity = recover_velocity(self.state.h, self.state.hv)
        return build_edges(
            self.state,
            velocity,
            self.mesh,
            self.bathymetry,
            self.boundary,
            mode,
        )


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(20240917)


@pytest.fixture
def random_problem(rng) -> Callable[..., RandomProblem]:
    """Factory for random states with optional dry nodes and topography."""

    def make(
        n_elements: int = 32,
        g: float = 9.81,
        dry_fraction: float = 0.2,
        bathymetry_amplitude: float = 0.5,
        boundary: Union[str, BoundaryConditions] = "walls",
    ) -> RandomProblem:
        mesh = build_uniform_mesh(0.0, 1.0, n_elements)
        n = mesh.n_nodes
        h = rng.uniform(0.0, 2.0, n)
        h[rng.random(n) < dry_fraction] = 0.0
        hv = h * rng.uniform(-2.0, 2.0, n)
        b = rng.uniform(0.0, bathymetry_amplitude, n)
        if isinstance(boundary, BoundaryConditions):
            conditions = boundary
        elif boundary == "open":
            h[[0, -1]] = rng.uniform(0.1, 2.0, 2)
            hv[[0, -1]] = h[[0, -1]] * rng.uniform(-4.0, 4.0, 2)
            conditions = random_open_boundaries(rng)
        else:
            conditions = BoundaryConditions.walls()
        return RandomProblem(
            mesh=mesh,
            bathymetry=Bathymetry(nodal_b=b, gravity=g),
            state=NodalState(h, hv),
            boundary=conditions,
        )

    return make


@pytest.fixture(
    params=[
        pytest.param(200, id="quick"),
        pytest.param(10_000, id="full", marks=pytest.mark.slow),
    ]
)
def trials(request) -> int:
    """Number of random trials; the full count runs with ``-m slow``."""
    return request.param


def random_open_boundaries(rng: np.random.Generator) -> BoundaryConditions:
    """Walls, inlets and outlets with random data on both sides."""
    specs = []
    for side in ("left", "right"):
        kind = KINDS[int(rng.integers(len(KINDS)))]
        h_in = float(rng.uniform(0.1, 2.0))
        hv_in = float(rng.uniform(-3.0, 3.0))
        specs.append(BoundarySpec(kind, side, h_in, hv_in))
    return BoundaryConditions(specs[0], specs[1])
