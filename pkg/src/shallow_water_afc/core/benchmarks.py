#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Benchmark problems, exact and reference solutions and error metrics.

Every benchmark is a ``BenchmarkCase`` in ``REGISTRY``, addressable by
name from the configuration and the command line.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import bisect, brentq

from .boundary import BoundaryConditions, BoundaryKind, BoundarySpec
from .errors import BenchmarkError
from .fem_core import Mesh1D, NodalState

logger = logging.getLogger(__name__)

Profile = Tuple[np.ndarray, np.ndarray]
SOLUTION_COLUMNS = ["x", "h", "hv", "v", "b", "H"]

ROOT_XTOL = 1e-14


# ---------------------------------------------------------------------------
# Dam breaks and Riemann problems
# ---------------------------------------------------------------------------


def stoker_middle_height(h_l: float, h_r: float, g: float) -> float:
    """
    Middle height of the wet dam break (rarefaction + shock).

    Raises:
        BenchmarkError: If the root cannot be bracketed
    """
    if not (h_l > h_r > 0.0 and g > 0.0):
        raise BenchmarkError(
            "湿溃坝需要 h_L > h_R > 0 且 g > 0",
            {"h_L": h_l, "h_R": h_r, "g": g},
        )

    def mismatch(h: float) -> float:
        rarefaction = 2.0 * (math.sqrt(g * h_l) - math.sqrt(g * h))
        shock = (h - h_r) * math.sqrt(0.5 * g * (h + h_r) / (h * h_r))
        return rarefaction - shock

    try:
        return float(bisect(mismatch, h_r, h_l, xtol=ROOT_XTOL, maxiter=200))
    except (ValueError, RuntimeError) as e:
        raise BenchmarkError(f"无法求解中间水深: {e}") from e


def exact_wet_dam_break(
    x: np.ndarray,
    t: float,
    h_l: float = 1.0,
    h_r: float = 0.1,
    x0: float = 0.5,
    g: float = 1.0,
) -> Profile:
    """
    Stoker solution: left state, rarefaction, middle state, shock, right.

    Args:
        x: Evaluation points
        t: Time
        h_l: Upstream height
        h_r: Downstream height
        x0: Dam position
        g: Gravitational constant

    Returns:
        (h, hv) at ``x``
    """
    x = np.asarray(x, dtype=float)
    h_m = stoker_middle_height(h_l, h_r, g)
    if t <= 0.0:
        h = np.where(x < x0, h_l, h_r)
        return h, np.zeros_like(h)

    c_l = math.sqrt(g * h_l)
    c_m = math.sqrt(g * h_m)
    v_m = 2.0 * (c_l - c_m)
    s = h_m * v_m / (h_m - h_r)
    xi = (x - x0) / t

    h_fan = (2.0 * c_l - xi) ** 2 / (9.0 * g)
    v_fan = 2.0 * (c_l + xi) / 3.0
    h = np.select(
        [xi < -c_l, xi < v_m - c_m, xi < s],
        [h_l, h_fan, h_m],
        default=h_r,
    )
    v = np.select(
        [xi < -c_l, xi < v_m - c_m, xi < s],
        [0.0, v_fan, v_m],
        default=0.0,
    )
    return h, h * v


def exact_dry_dam_break(
    x: np.ndarray,
    t: float,
    h_l: float = 1.0,
    x0: float = 0.5,
    g: float = 1.0,
) -> Profile:
    """Ritter solution: a single rarefaction with the front x0 + 2t√(g h_L)."""
    if not h_l > 0.0:
        raise BenchmarkError(f"干溃坝需要 h_L > 0: {h_l}")
    x = np.asarray(x, dtype=float)
    if t <= 0.0:
        h = np.where(x < x0, h_l, 0.0)
        return h, np.zeros_like(h)

    c_l = math.sqrt(g * h_l)
    xi = (x - x0) / t
    fan = (xi >= -c_l) & (xi <= 2.0 * c_l)
    h = np.where(
        xi < -c_l, h_l, np.where(fan, (2.0 * c_l - xi) ** 2 / (9.0 * g), 0.0)
    )
    v = np.where(fan, 2.0 * (c_l + xi) / 3.0, 0.0)
    return h, h * v


def _wave_curve(h: float, h_k: float, g: float) -> float:
    if h <= h_k:
        return 2.0 * (math.sqrt(g * h) - math.sqrt(g * h_k))
    return (h - h_k) * math.sqrt(0.5 * g * (h + h_k) / (h * h_k))


def exact_riemann_star(
    u_l: Tuple[float, float], u_r: Tuple[float, float], g: float
) -> Tuple[float, float]:
    """
    Star state (h*, v*) of the Riemann problem (u_L, u_R).

    Dry sides and vacuum formation give h* = 0.

    Args:
        u_l: Left state (h, hv)
        u_r: Right state (h, hv)
        g: Gravitational constant

    Returns:
        (h*, v*)
    """
    h_l, hv_l = float(u_l[0]), float(u_l[1])
    h_r, hv_r = float(u_r[0]), float(u_r[1])
    v_l = hv_l / h_l if h_l > 0.0 else 0.0
    v_r = hv_r / h_r if h_r > 0.0 else 0.0
    c_l, c_r = math.sqrt(g * h_l), math.sqrt(g * h_r)

    if h_l <= 0.0 or h_r <= 0.0 or 2.0 * (c_l + c_r) <= v_r - v_l:
        return 0.0, 0.0

    def depth_function(h: float) -> float:
        return _wave_curve(h, h_l, g) + _wave_curve(h, h_r, g) + v_r - v_l

    upper = max(h_l, h_r)
    while depth_function(upper) < 0.0:
        upper *= 2.0
        if upper > 1e12:
            raise BenchmarkError("无法为 Riemann 问题找到有效区间")
    h_star = float(
        brentq(depth_function, 1e-300, upper, xtol=ROOT_XTOL, rtol=4e-16)
    )
    v_star = 0.5 * (v_l + v_r) + 0.5 * (
        _wave_curve(h_star, h_r, g) - _wave_curve(h_star, h_l, g)
    )
    return h_star, v_star


def exact_riemann_wave_speeds(
    u_l: Tuple[float, float], u_r: Tuple[float, float], g: float
) -> Tuple[float, float]:
    """
    Leftmost and rightmost wave speeds of the exact Riemann solution.

    All other wave speeds lie between the two returned values.
    """
    h_l, hv_l = float(u_l[0]), float(u_l[1])
    h_r, hv_r = float(u_r[0]), float(u_r[1])
    v_l = hv_l / h_l if h_l > 0.0 else 0.0
    v_r = hv_r / h_r if h_r > 0.0 else 0.0
    c_l, c_r = math.sqrt(g * h_l), math.sqrt(g * h_r)

    if h_l <= 0.0 and h_r <= 0.0:
        return 0.0, 0.0
    if h_l <= 0.0:
        return v_r - 2.0 * c_r, v_r + c_r
    if h_r <= 0.0:
        return v_l - c_l, v_l + 2.0 * c_l

    h_star, _ = exact_riemann_star(u_l, u_r, g)

    def factor(h_k: float) -> float:
        if h_star > h_k:
            return math.sqrt(0.5 * (1.0 + h_star / h_k) * h_star / h_k)
        return 1.0

    return v_l - c_l * factor(h_l), v_r + c_r * factor(h_r)


# ---------------------------------------------------------------------------
# Parabolic lake
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThackerParameters:
    """Oscillating lake in a parabolic basin b(x) = h0 (x/a)²."""

    B: float = 5.0
    a: float = 3000.0
    h0: float = 10.0
    g: float = 9.81

    @property
    def omega(self) -> float:
        return math.sqrt(2.0 * self.g * self.h0) / self.a

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    def bathymetry(self, x: np.ndarray) -> np.ndarray:
        return self.h0 * (np.asarray(x, dtype=float) / self.a) ** 2

    def shorelines(self, t: float) -> Tuple[float, float]:
        """Wet region [x_-(t), x_+(t)]."""
        shift = -self.B / self.omega * math.cos(self.omega * t)
        return shift - self.a, shift + self.a


def exact_thacker(
    x: np.ndarray, t: float, params: ThackerParameters = ThackerParameters()
) -> Profile:
    """
    Free surface H and velocity v of the oscillating lake.

    Returns:
        (H, v) at ``x``; H = b and v = 0 outside the wet region
    """
    p = params
    x = np.asarray(x, dtype=float)
    w = p.omega
    x_minus, x_plus = p.shorelines(t)
    wet = (x >= x_minus) & (x <= x_plus)
    surface = (
        p.h0
        - p.B**2 / (4.0 * p.g) * (1.0 + math.cos(2.0 * w * t))
        - p.B * x / p.a * math.sqrt(2.0 * p.h0 / p.g) * math.cos(w * t)
    )
    speed = p.B * p.a * w / math.sqrt(2.0 * p.h0 * p.g) * math.sin(w * t)
    H = np.where(wet, surface, p.bathymetry(x))
    v = np.where(wet, speed, 0.0)
    return H, v


def _thacker_state(
    x: np.ndarray, t: float, params: ThackerParameters
) -> Profile:
    H, v = exact_thacker(x, t, params)
    h = np.maximum(H - params.bathymetry(x), 0.0)
    return h, h * v


# ---------------------------------------------------------------------------
# Moving water equilibria
# ---------------------------------------------------------------------------


def steady_bump(x: np.ndarray) -> np.ndarray:
    """b(x) = max{0, 0.2 − 0.05 (x − 10)²}."""
    x = np.asarray(x, dtype=float)
    return np.maximum(0.0, 0.2 - 0.05 * (x - 10.0) ** 2)


@dataclass(frozen=True)
class SteadyFlow:
    """Discharge, gravity and boundary data of a moving water equilibrium."""

    q: float
    g: float
    h_init: float
    h_out: Optional[float] = None
    h_in: Optional[float] = None

    @property
    def critical_height(self) -> float:
        return float((self.q * self.q / self.g) ** (1.0 / 3.0))

    def head(self, h: float, b: float) -> float:
        """Bernoulli head q²/(2g h²) + h + b."""
        return self.q * self.q / (2.0 * self.g * h * h) + h + b


STEADY_FLOWS: Dict[str, SteadyFlow] = {
    "subcritical": SteadyFlow(q=4.42, g=9.81, h_init=2.0, h_out=2.0),
    "transcritical-smooth": SteadyFlow(
        q=1.53, g=9.81, h_init=0.66, h_out=0.66
    ),
    "transcritical-shock": SteadyFlow(
        q=0.18, g=9.81, h_init=0.33, h_out=0.33
    ),
    "supercritical": SteadyFlow(q=2.1, g=1.0, h_init=1.0, h_in=1.0),
}

CREST = 10.0


def bernoulli_height(
    flow: SteadyFlow, head: float, b: float, branch: str
) -> float:
    """
    Solve q²/(2g h²) + h + b = head on the requested branch.

    Args:
        flow: Flow parameters
        head: Bernoulli constant
        b: Local topography
        branch: 'subcritical' (h ≥ h_c) or 'supercritical' (h ≤ h_c)

    Returns:
        Water height

    Raises:
        BenchmarkError: If the head is below the critical head
    """
    h_c = flow.critical_height

    def residual(h: float) -> float:
        return flow.head(h, b) - head

    at_critical = residual(h_c)
    if at_critical > 0.0:
        if at_critical <= 1e-12 * max(abs(head), 1.0):
            return h_c
        raise BenchmarkError(
            "Bernoulli 方程在该点无解", {"b": b, "head": head}
        )
    if at_critical == 0.0:
        return h_c
    if branch == "subcritical":
        return float(brentq(residual, h_c, head - b + h_c, xtol=ROOT_XTOL))
    if branch == "supercritical":
        low = h_c
        while residual(low) <= 0.0:
            low *= 0.5
        return float(brentq(residual, low, h_c, xtol=ROOT_XTOL))
    raise BenchmarkError(f"未知的分支: {branch}")


def _conjugate_mismatch(flow: SteadyFlow, h1: float, h2: float) -> float:
    def momentum(h: float) -> float:
        return flow.q * flow.q / h + 0.5 * flow.g * h * h

    return momentum(h1) - momentum(h2)


def shock_position(flow: SteadyFlow) -> float:
    """
    Location of the steady hydraulic jump downstream of the crest.

    Raises:
        BenchmarkError: If no jump position is bracketed
    """
    assert flow.h_out is not None
    upstream = flow.head(flow.critical_height, 0.2)
    downstream = flow.head(flow.h_out, 0.0)

    def mismatch(x: float) -> float:
        b = float(steady_bump(np.array([x]))[0])
        h1 = bernoulli_height(flow, upstream, b, "supercritical")
        h2 = bernoulli_height(flow, downstream, b, "subcritical")
        return _conjugate_mismatch(flow, h1, h2)

    try:
        return float(brentq(mismatch, CREST + 1e-9, 25.0, xtol=1e-13))
    except ValueError as e:
        raise BenchmarkError(f"无法确定水跃位置: {e}") from e


def steady_reference(case: str, x: np.ndarray) -> Profile:
    """
    Exact moving water equilibrium of the named steady benchmark.

    Args:
        case: 'subcritical', 'transcritical-smooth', 'transcritical-shock'
            or 'supercritical'
        x: Evaluation points in (0, 25)

    Returns:
        (h, hv) with hv ≡ q
    """
    if case not in STEADY_FLOWS:
        raise BenchmarkError(f"未知的稳态算例: {case}")
    flow = STEADY_FLOWS[case]
    x = np.asarray(x, dtype=float)
    b = steady_bump(x)
    h = np.empty_like(x)

    if case == "subcritical":
        assert flow.h_out is not None
        head = flow.head(flow.h_out, 0.0)
        for k, bk in enumerate(b):
            h[k] = bernoulli_height(flow, head, bk, "subcritical")
    elif case == "supercritical":
        assert flow.h_in is not None
        head = flow.head(flow.h_in, 0.0)
        for k, bk in enumerate(b):
            h[k] = bernoulli_height(flow, head, bk, "supercritical")
    else:
        head = flow.head(flow.critical_height, 0.2)
        jump = shock_position(flow) if case == "transcritical-shock" else 25.0
        assert flow.h_out is not None
        tail = flow.head(flow.h_out, 0.0)
        for k, (xk, bk) in enumerate(zip(x, b)):
            if xk <= CREST:
                h[k] = bernoulli_height(flow, head, bk, "subcritical")
            elif xk < jump:
                h[k] = bernoulli_height(flow, head, bk, "supercritical")
            else:
                h[k] = bernoulli_height(flow, tail, bk, "subcritical")
    return h, np.full_like(x, flow.q)


# ---------------------------------------------------------------------------
# Lakes at rest and the dam break over a bump
# ---------------------------------------------------------------------------


def island_bathymetry(x: np.ndarray) -> np.ndarray:
    """b(x) = max{0, 0.25 − 5 (x − 0.5)²}."""
    x = np.asarray(x, dtype=float)
    return np.maximum(0.0, 0.25 - 5.0 * (x - 0.5) ** 2)


def tent_bathymetry(x: np.ndarray) -> np.ndarray:
    """b(x) = max{0, 0.25 − |x − 0.5|}; kinks at multiples of 1/4."""
    x = np.asarray(x, dtype=float)
    return np.maximum(0.0, 0.25 - np.abs(x - 0.5))


def _two_lakes(
    bathymetry: Callable[[np.ndarray], np.ndarray],
    left_level: float,
    right_level: float,
) -> Callable[[np.ndarray], Profile]:
    def initial(x: np.ndarray) -> Profile:
        b = bathymetry(x)
        level = np.where(x < 0.5, left_level, right_level)
        h = np.maximum(level, b) - b
        return h, np.zeros_like(h)

    return initial


def bump_bathymetry(x: np.ndarray) -> np.ndarray:
    """b(x) = sin(πx/4) for |x − 10| < 2, else 0."""
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x - 10.0) < 2.0, np.sin(0.25 * np.pi * x), 0.0)


def _bump_initial(x: np.ndarray) -> Profile:
    b = bump_bathymetry(x)
    h = np.where(x < 10.0, 1.6 - b, 1.05 - b)
    return h, np.zeros_like(h)


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


def _walls() -> BoundaryConditions:
    return BoundaryConditions.walls()


def _flat(x: np.ndarray) -> np.ndarray:
    return np.zeros_like(np.asarray(x, dtype=float))


@dataclass
class BenchmarkCase:
    """
    One benchmark problem with its default run parameters.

    ``initial`` maps node coordinates to (h, hv); ``exact`` maps
    (x, t) to (h, hv) and is None where no closed form exists.
    """

    name: str
    description: str
    x_left: float
    x_right: float
    gravity: float
    bathymetry: Callable[[np.ndarray], np.ndarray]
    initial: Callable[[np.ndarray], Profile]
    boundary: Callable[[], BoundaryConditions] = _walls
    t_end: Optional[float] = None
    steady: bool = False
    n_elements: int = 128
    nu: float = 0.5
    wet_dry: str = "none"
    raw_flux_mode: str = "full"
    exact: Optional[Callable[[np.ndarray, float], Profile]] = None
    has_reference: bool = False
    output_times: List[float] = field(default_factory=list)

    @property
    def has_exact(self) -> bool:
        return self.exact is not None

    def initial_state(self, mesh: Mesh1D) -> NodalState:
        h, hv = self.initial(mesh.nodes)
        return NodalState(h, hv)

    def exact_state(self, x: np.ndarray, t: float) -> Profile:
        """Exact (h, hv) at ``x`` and time ``t``."""
        if self.exact is None:
            raise BenchmarkError(f"算例 {self.name} 没有精确解")
        return self.exact(np.asarray(x, dtype=float), t)

    def exact_profile(self, x: np.ndarray, t: float) -> pd.DataFrame:
        """Exact solution with the columns of the solution CSV."""
        x = np.asarray(x, dtype=float)
        h, hv = self.exact_state(x, t)
        b = self.bathymetry(x)
        v = np.where(h > 0.0, hv / np.where(h > 0.0, h, 1.0), 0.0)
        return pd.DataFrame(
            {"x": x, "h": h, "hv": hv, "v": v, "b": b, "H": h + b},
            columns=SOLUTION_COLUMNS,
        )


def _steady_case(
    name: str, description: str, t_end: Optional[float]
) -> BenchmarkCase:
    flow = STEADY_FLOWS[name]

    def initial(x: np.ndarray) -> Profile:
        h = np.full_like(np.asarray(x, dtype=float), flow.h_init)
        if name == "supercritical":
            return h, np.full_like(h, flow.q)
        return h, np.zeros_like(h)

    def boundary() -> BoundaryConditions:
        if name == "supercritical":
            return BoundaryConditions(
                BoundarySpec(
                    BoundaryKind.SUPERCRITICAL_INLET, "left", flow.h_in, flow.q
                ),
                BoundarySpec(BoundaryKind.SUPERCRITICAL_OUTLET, "right"),
            )
        left = BoundarySpec(
            BoundaryKind.SUBCRITICAL_INLET, "left", hv_in=flow.q
        )
        if name == "transcritical-smooth":
            right = BoundarySpec(
                BoundaryKind.AUTO, "right", flow.h_out, flow.q
            )
        else:
            right = BoundarySpec(
                BoundaryKind.SUBCRITICAL_OUTLET, "right", h_in=flow.h_out
            )
        return BoundaryConditions(left, right)

    return BenchmarkCase(
        name=name,
        description=description,
        x_left=0.0,
        x_right=25.0,
        gravity=flow.g,
        bathymetry=steady_bump,
        initial=initial,
        boundary=boundary,
        t_end=t_end,
        steady=t_end is None,
        raw_flux_mode="simple",
        exact=lambda x, t: steady_reference(name, x),
    )


THACKER = ThackerParameters()

REGISTRY: Dict[str, BenchmarkCase] = {
    case.name: case
    for case in (
        BenchmarkCase(
            name="wet-dam-break",
            description="湿溃坝, 平底, h_L=1, h_R=0.1",
            x_left=0.0,
            x_right=1.0,
            gravity=1.0,
            bathymetry=_flat,
            initial=lambda x: exact_wet_dam_break(x, 0.0),
            t_end=0.3,
            exact=lambda x, t: exact_wet_dam_break(x, t),
        ),
        BenchmarkCase(
            name="dry-dam-break",
            description="干溃坝, 平底, h_L=1, h_R=0",
            x_left=0.0,
            x_right=1.0,
            gravity=1.0,
            bathymetry=_flat,
            initial=lambda x: exact_dry_dam_break(x, 0.0),
            t_end=0.15,
            wet_dry="friction-boundary-layer",
            exact=lambda x, t: exact_dry_dam_break(x, t),
        ),
        BenchmarkCase(
            name="dam-break-bump",
            description="凸起地形上的溃坝",
            x_left=0.0,
            x_right=20.0,
            gravity=1.0,
            bathymetry=bump_bathymetry,
            initial=_bump_initial,
            t_end=4.5,
            n_elements=400,
            wet_dry="friction-boundary-layer",
            has_reference=True,
        ),
        BenchmarkCase(
            name="lake-at-rest",
            description="静水湖, 岸线不与网格节点重合",
            x_left=0.0,
            x_right=1.0,
            gravity=1.0,
            bathymetry=island_bathymetry,
            initial=_two_lakes(island_bathymetry, 0.2, 0.1),
            t_end=100.0,
            wet_dry="friction-boundary-layer",
            raw_flux_mode="simple",
            exact=lambda x, t: _two_lakes(island_bathymetry, 0.2, 0.1)(x),
        ),
        BenchmarkCase(
            name="lake-at-rest-exact",
            description="静水湖, 岸线与网格节点重合",
            x_left=0.0,
            x_right=1.0,
            gravity=1.0,
            bathymetry=tent_bathymetry,
            initial=_two_lakes(tent_bathymetry, 0.125, 0.0625),
            t_end=100.0,
            wet_dry="friction-boundary-layer",
            raw_flux_mode="simple",
            exact=lambda x, t: _two_lakes(tent_bathymetry, 0.125, 0.0625)(x),
        ),
        _steady_case("subcritical", "亚临界稳态流", 400.0),
        _steady_case("transcritical-smooth", "无激波跨临界稳态流", 200.0),
        _steady_case("transcritical-shock", "带激波跨临界稳态流", 800.0),
        _steady_case("supercritical", "超临界稳态流 (g=1)", None),
        BenchmarkCase(
            name="thacker",
            description="抛物线湖盆中的振荡",
            x_left=-5000.0,
            x_right=5000.0,
            gravity=THACKER.g,
            bathymetry=THACKER.bathymetry,
            initial=lambda x: _thacker_state(x, 0.0, THACKER),
            t_end=3000.0,
            nu=0.05,
            wet_dry="friction-boundary-layer",
            exact=lambda x, t: _thacker_state(x, t, THACKER),
            output_times=[1000.0, 2000.0, 3000.0],
        ),
    )
}


def get_benchmark(name: str) -> BenchmarkCase:
    """
    Look up a benchmark by name.

    Raises:
        BenchmarkError: For unknown names
    """
    try:
        return REGISTRY[name]
    except KeyError:
        valid = ", ".join(sorted(REGISTRY))
        raise BenchmarkError(f"未知的算例: {name}。可选: {valid}") from None


# ---------------------------------------------------------------------------
# Errors and convergence
# ---------------------------------------------------------------------------


def _p1_abs_integral(error: np.ndarray, mesh: Mesh1D) -> float:
    """∫|e| dx of the P1 interpolant of nodal values ``error``."""
    a, b = error[:-1], error[1:]
    dx = mesh.element_lengths
    same = a * b >= 0.0
    total = np.abs(a) + np.abs(b)
    crossing = np.where(
        total > 0.0, (a * a + b * b) / (2.0 * np.where(total > 0, total, 1)), 0
    )
    return float(np.sum(dx * np.where(same, 0.5 * total, crossing)))


def l1_error(
    numeric: NodalState,
    exact: Profile,
    mesh: Mesh1D,
    bathymetry: Optional[np.ndarray] = None,
) -> Dict[str, float]:
    """
    L1 norms of the difference of the nodal interpolants.

    Args:
        numeric: Numerical nodal state
        exact: Exact (h, hv) at the mesh nodes
        mesh: Mesh
        bathymetry: Nodal topography for the total height error

    Returns:
        Errors keyed by 'h', 'hv' and 'H'
    """
    h_exact, hv_exact = (np.asarray(a, dtype=float) for a in exact)
    b = np.zeros_like(h_exact) if bathymetry is None else bathymetry
    return {
        "h": _p1_abs_integral(numeric.h - h_exact, mesh),
        "hv": _p1_abs_integral(numeric.hv - hv_exact, mesh),
        "H": _p1_abs_integral((numeric.h + b) - (h_exact + b), mesh),
    }


@dataclass
class ErrorReport:
    """Error and EOC rows of a convergence study for one scheme."""

    scheme: str
    resolutions: List[int]
    errors: List[float]
    eocs: List[float]
    variable: str = "h"

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "scheme": self.scheme,
                "n_elements": self.resolutions,
                "inv_h": self.resolutions,
                "error": self.errors,
                "eoc": self.eocs,
            }
        )


def eoc(errors: Sequence[float], resolutions: Sequence[int]) -> List[float]:
    """
    Experimental orders of convergence log2(e_{k−1}/e_k).

    The first entry is NaN, as are entries involving a zero error.

    Raises:
        BenchmarkError: If the resolutions do not double
    """
    if len(errors) != len(resolutions):
        raise BenchmarkError("误差与分辨率数量不一致")
    for coarse, fine in zip(resolutions[:-1], resolutions[1:]):
        if fine != 2 * coarse:
            raise BenchmarkError(
                "网格序列不是逐次加倍, 无法计算 EOC",
                {"coarse": coarse, "fine": fine},
            )
    rates = [math.nan]
    for prev, curr in zip(errors[:-1], errors[1:]):
        if prev > 0.0 and curr > 0.0:
            rates.append(math.log2(prev / curr))
        else:
            logger.warning("误差为零, EOC 未定义")
            rates.append(math.nan)
    return rates


def reference_solution(
    case: BenchmarkCase,
    n_elements: int = 10_000,
    scheme: str = "LOW",
    t: Optional[float] = None,
) -> pd.DataFrame:
    """
    Fine-mesh numerical reference computed with our own solver.

    Args:
        case: Benchmark without a closed-form solution
        n_elements: Reference resolution
        scheme: Scheme of the reference run
        t: Time (benchmark end time when None)

    Returns:
        DataFrame with the solution CSV columns
    """
    from ..utils import solve  # solver setup lives above core

    overrides = {
        "problem__benchmark": case.name,
        "mesh__n_elements": n_elements,
        "scheme__scheme": scheme,
        "time__t_end": case.t_end if t is None else t,
    }
    logger.info(f"计算参考解: {case.name}, {n_elements} 个单元, {scheme}")
    outcome = solve(**overrides)
    return outcome.solution_frame(outcome.result.state)
