#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Adaptive SSP Runge-Kutta time stepping.

Stages are written in Shu-Osher form
u^(k) = a_k u^n + (1 − a_k)(u^(k−1) + Δt L(u^(k−1))). The step size is
taken from the first stage; a later stage violating the CFL condition or
producing a negative height makes the whole step repeat with Δt halved.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .config import TimeConfig
from .entropy_stability import entropy
from .errors import ConfigurationError, StepFailure
from .fem_core import NEGATIVE_HEIGHT_TOL, Mesh1D, NodalState
from .low_order import EdgeCoefficients, Rhs
from .scheme import Assembly, SpatialOperator
from .wet_dry import WetDryTreatment

logger = logging.getLogger(__name__)

# Shu-Osher weights a_k of u^n in stage k.
SSP_TABLES: Dict[int, Sequence[float]] = {
    1: (0.0,),
    2: (0.0, 0.5),
    3: (0.0, 0.75, 1.0 / 3.0),
}

CFL_TOL = 1e-12


def adaptive_dt(edges: EdgeCoefficients, mesh: Mesh1D, nu: float) -> float:
    """
    Δt = min_i ν m_i / Σ_j 2 d_ij.

    The sum runs over the interior edges and the boundary pseudo-edges
    that move their node, so inert walls and outlets leave Δt unchanged.
    Returns ``math.inf`` when every d_ij vanishes.
    """
    if not nu > 0.0:
        raise ConfigurationError(f"CFL 参数必须为正: {nu}")
    total = edges.cfl_viscosity_sum()
    active = total > 0.0
    if not np.any(active):
        return math.inf
    return float(np.min(nu * mesh.lumped_mass[active] / total[active]))


def cfl_satisfied(
    edges: EdgeCoefficients, mesh: Mesh1D, dt: float
) -> bool:
    """Check 1 − (Δt/m_i) Σ_j 2 d_ij ≥ 0 at every node."""
    total = edges.cfl_viscosity_sum()
    return bool(np.all(1.0 - dt * total / mesh.lumped_mass >= -CFL_TOL))


def steady_state_residual(rhs: Rhs, mesh: Mesh1D) -> float:
    """max_i |RHS_i| / m_i over both components."""
    dh, dhv = rhs.rates(mesh)
    return float(max(np.abs(dh).max(), np.abs(dhv).max()))


@dataclass
class StepResult:
    """Outcome of one accepted time step."""

    state: NodalState
    dt: float
    repetitions: int
    d_adjusted: int
    unresolved: int
    alpha_reduced: int
    min_stage_h: float


class _Rejected(Exception):
    def __init__(self, reason: str, node: int) -> None:
        super().__init__(reason)
        self.reason = reason
        self.node = node


class SSPIntegrator:
    """
    SSP Runge-Kutta integrator of orders 1, 2 and 3.

    Args:
        operator: Spatial operator
        order: SSP order (1 = forward Euler, 2 = Heun, 3 = Shu-Osher)
        nu: CFL parameter ν
        max_halvings: Allowed Δt halvings per step
    """

    def __init__(
        self,
        operator: SpatialOperator,
        order: int = 2,
        nu: float = 0.5,
        max_halvings: int = 20,
    ) -> None:
        if order not in SSP_TABLES:
            raise ConfigurationError(f"不支持的 SSP 阶数: {order}")
        if not 0.0 < nu <= 1.0:
            raise ConfigurationError(f"CFL 参数必须在 (0, 1] 内: {nu}")
        self.operator = operator
        self.order = order
        self.nu = nu
        self.max_halvings = max_halvings
        self.weights = SSP_TABLES[order]

    @property
    def mesh(self) -> Mesh1D:
        return self.operator.mesh

    @property
    def wet_dry(self) -> WetDryTreatment:
        return self.operator.wet_dry

    def _stages(
        self, state: NodalState, first: Assembly, dt: float
    ) -> StepResult:
        mesh = self.mesh
        needs_eta = self.wet_dry.needs_entropy_bound
        eta_n = entropy(state.h, state.hv, 0.0, first.gravity)
        previous = state
        counters = [0, 0, 0]
        min_h = math.inf

        for k, a in enumerate(self.weights):
            if k == 0:
                asm = first
            else:
                asm = self.operator.assemble(previous)
                if not cfl_satisfied(asm.edges, mesh, dt):
                    ratio = dt * asm.sum_2d / mesh.lumped_mass
                    raise _Rejected("CFL", int(np.argmax(ratio)))
            counters[0] += asm.d_adjusted
            counters[1] += asm.unresolved
            counters[2] += asm.alpha_reduced

            dh, dhv = asm.rhs.rates(mesh)
            h = a * state.h + (1.0 - a) * (previous.h + dt * dh)
            hv = a * state.hv + (1.0 - a) * (previous.hv + dt * dhv)
            worst = int(np.argmin(h))
            min_h = min(min_h, float(h[worst]))
            if h[worst] < -NEGATIVE_HEIGHT_TOL:
                raise _Rejected("negative height", worst)
            stage = NodalState(np.maximum(h, 0.0), hv)
            stage.check()

            eta_max = None
            if needs_eta:
                eta_fe = asm.eta_max_fe(dt, mesh)
                eta_max = a * eta_n + (1.0 - a) * eta_fe
            self.wet_dry.apply(stage, eta_max)
            previous = stage

        return StepResult(
            state=previous,
            dt=dt,
            repetitions=0,
            d_adjusted=counters[0],
            unresolved=counters[1],
            alpha_reduced=counters[2],
            min_stage_h=min_h,
        )

    def step(
        self,
        state: NodalState,
        t: float = 0.0,
        dt_max: float = math.inf,
        first: Optional[Assembly] = None,
        step_index: int = 0,
    ) -> StepResult:
        """
        Advance ``state`` by one SSP step.

        Args:
            state: Current state
            t: Current time
            dt_max: Upper limit on Δt (distance to the next output time)
            first: Assembly of ``state`` if already available
            step_index: Step counter for diagnostics

        Returns:
            StepResult

        Raises:
            StepFailure: After more than ``max_halvings`` repetitions
        """
        first = first or self.operator.assemble(state)
        dt = min(adaptive_dt(first.edges, self.mesh, self.nu), dt_max)
        if not math.isfinite(dt):
            raise StepFailure(
                "无法确定时间步长: 所有人工粘性为零且没有终止时间",
                {"t": t, "step": step_index},
            )

        for repetition in range(self.max_halvings + 1):
            try:
                result = self._stages(state, first, dt)
            except _Rejected as rejected:
                if repetition == self.max_halvings:
                    raise StepFailure(
                        "阶段重复次数超过上限",
                        {
                            "t": t,
                            "dt": dt,
                            "step": step_index,
                            "node": rejected.node,
                            "reason": rejected.reason,
                        },
                    ) from None
                logger.warning(
                    f"第 {step_index} 步 ({rejected.reason}, "
                    f"节点 {rejected.node}) 重复, dt 减半为 {dt / 2:.3e}"
                )
                dt *= 0.5
                continue
            result.repetitions = repetition
            return result
        raise AssertionError("unreachable")


@dataclass
class StepRecord:
    """One row of the diagnostics table."""

    step: int
    t: float
    dt: float
    mass: float
    residual: float
    min_h: float
    repetitions: int
    d_adjusted: int
    unresolved: int
    alpha_reduced: int
    entropy_residual: float = math.nan
    max_abs_hv: float = math.nan
    max_surface_dev: float = math.nan

    def to_dict(self) -> Dict[str, float]:
        return dict(self.__dict__)


@dataclass
class RunResult:
    """Final state, snapshots and diagnostics of a time integration."""

    state: NodalState
    t: float
    steps: int
    converged: bool
    records: List[StepRecord] = field(default_factory=list)
    snapshots: Dict[float, NodalState] = field(default_factory=dict)

    @property
    def total_repetitions(self) -> int:
        return sum(r.repetitions for r in self.records)

    @property
    def total_d_adjusted(self) -> int:
        return sum(r.d_adjusted for r in self.records)

    @property
    def final_residual(self) -> float:
        return self.records[-1].residual if self.records else math.nan


class TimeIntegrator:
    """
    Run loop over SSP steps with output times and steady-state detection.

    Args:
        integrator: Configured SSP integrator
        config: Time configuration
        entropy_diagnostics: Record the entropy residual of every step
        log_every: Progress logging interval in steps
    """

    def __init__(
        self,
        integrator: SSPIntegrator,
        config: TimeConfig,
        entropy_diagnostics: bool = False,
        log_every: int = 100,
    ) -> None:
        self.integrator = integrator
        self.config = config
        self.entropy_diagnostics = entropy_diagnostics
        self.log_every = max(int(log_every), 1)

    @classmethod
    def from_config(
        cls,
        operator: SpatialOperator,
        config: TimeConfig,
        entropy_diagnostics: bool = False,
        log_every: int = 100,
    ) -> "TimeIntegrator":
        integrator = SSPIntegrator(
            operator,
            order=config.rk_order,
            nu=config.nu if config.nu is not None else 0.5,
            max_halvings=config.max_halvings,
        )
        return cls(integrator, config, entropy_diagnostics, log_every)

    def run(
        self,
        state: NodalState,
        output_times: Sequence[float] = (),
        callback: Optional[Callable[[StepRecord, NodalState], None]] = None,
    ) -> RunResult:
        """
        Integrate from t = 0 to ``t_end`` or until the steady residual
        drops below ``steady_tol``.

        Args:
            state: Initial state (the wet/dry fix is applied to it)
            output_times: Times at which snapshots are stored
            callback: Called with every record and the new state

        Returns:
            RunResult

        Raises:
            ConfigurationError: If neither or both of t_end and steady mode
                are set
            StepFailure: On step failure or exceeding max_steps in a
                transient run
        """
        cfg = self.config
        steady = bool(cfg.steady)
        if steady == (cfg.t_end is not None):
            raise ConfigurationError("必须且只能指定 t_end 或稳态模式之一")
        t_end = math.inf if cfg.t_end is None else float(cfg.t_end)

        operator = self.integrator.operator
        mesh = operator.mesh
        b = operator.bathymetry.nodal_b
        current = state.copy()
        current.check()
        operator.wet_dry.apply(current)

        pending = sorted(float(t) for t in output_times if 0.0 < t <= t_end)
        snapshots: Dict[float, NodalState] = {}
        if any(t == 0.0 for t in output_times):
            snapshots[0.0] = current.copy()
        surface0 = current.free_surface(operator.bathymetry)

        records: List[StepRecord] = []
        t = 0.0
        step = 0
        residual0: Optional[float] = None
        converged = False
        logger.info(
            f"开始时间积分: SSP{self.integrator.order}, "
            f"nu={self.integrator.nu}, "
            + ("稳态模式" if steady else f"t_end={t_end}")
        )

        while True:
            if not steady and t >= t_end:
                break
            if step >= cfg.max_steps:
                if steady:
                    logger.warning(f"达到最大步数 {cfg.max_steps}, 未收敛")
                    break
                raise StepFailure(
                    "达到最大步数", {"t": t, "step": step}
                )

            first = operator.assemble(current)
            raw_residual = steady_state_residual(first.rhs, mesh)
            if residual0 is None:
                residual0 = raw_residual if raw_residual > 0.0 else 1.0
            residual = raw_residual / residual0
            if steady and residual < cfg.steady_tol:
                converged = True
                logger.info(f"第 {step} 步达到稳态, 残差 {residual:.3e}")
                break

            entropy_res = math.nan
            if self.entropy_diagnostics:
                diag = first.entropy_diagnostics(operator.bathymetry)
                entropy_res = diag.max_residual / diag.scale

            target = pending[0] if pending else t_end
            result = self.integrator.step(
                current, t, target - t, first, step
            )
            current = result.state
            t = target if result.dt == target - t else t + result.dt
            step += 1

            record = StepRecord(
                step=step,
                t=t,
                dt=result.dt,
                mass=current.total_mass(mesh),
                residual=residual,
                min_h=result.min_stage_h,
                repetitions=result.repetitions,
                d_adjusted=result.d_adjusted,
                unresolved=result.unresolved,
                alpha_reduced=result.alpha_reduced,
                entropy_residual=entropy_res,
                max_abs_hv=float(np.abs(current.hv).max()),
                max_surface_dev=float(
                    np.abs(current.h + b - surface0).max()
                ),
            )
            records.append(record)
            if callback is not None:
                callback(record, current)
            if step % self.log_every == 0:
                logger.debug(
                    f"步 {step}: t={t:.6g}, dt={result.dt:.3e}, "
                    f"残差={residual:.3e}"
                )
            while pending and t >= pending[0]:
                snapshots[pending.pop(0)] = current.copy()

        if not steady:
            snapshots.setdefault(t, current.copy())
        total_adjusted = sum(r.d_adjusted for r in records)
        total_reps = sum(r.repetitions for r in records)
        if total_adjusted or total_reps:
            logger.warning(
                f"粘性调整 {total_adjusted} 次, 阶段重复 {total_reps} 次"
            )
        logger.info(f"时间积分结束: t={t:.6g}, 共 {step} 步")
        return RunResult(
            state=current,
            t=t,
            steps=step,
            converged=converged,
            records=records,
            snapshots=snapshots,
        )
