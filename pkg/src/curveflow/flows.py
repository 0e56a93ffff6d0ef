"""Semi-implicit constrained gradient flows for bending, geodesic and indentation energies.

Each step solves

    (d, v)_M + ([u + tau d]'', v'') [+ penalty terms] = rhs(v)

for ``d`` in the linearization F_h[u] of the nodal constraints at the previous
iterate and sets ``u <- u + tau d``.  Constraints are re-linearized every step
and never re-projected.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import kkt
from .assembly import (BoundaryCondition, bending_matrix, geodesic_rhs, linearized_constraints,
                       mass_matrix, penalty_operators)
from .energy import Diagnostics, constraint_violations, diagnose, quadrature_rule
from .errors import CurveflowError, InvalidInitialStateError
from .mesh_hermite import HermiteCurve
from .surface import LevelSetSurface

logger = logging.getLogger(__name__)

FLOW_KINDS = ("bending", "geodesic", "indentation")
ADMISSIBLE_TOL = 1e-8
MONOTONE_SLACK = 1e-12  # relative to 1 + |E_0|; absorbs roundoff jitter near stationarity


@dataclass
class FlowConfig:
    kind: str = "bending"
    tau: float = 0.1
    gamma: float = 0.0
    eps: float = 1.0
    delta: float = 0.0
    max_steps: int = 1000
    stop_tol: float | None = None  # None: 1e-8 * (1 + initial energy)
    quad_points: int = 4
    midpoint_normal: bool = True
    snapshot_stride: int = 0

    def __post_init__(self):
        if self.kind not in FLOW_KINDS:
            raise ValueError(f"unknown flow kind {self.kind!r}")
        if not self.tau > 0:
            raise ValueError("step size tau must be positive")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if self.kind == "indentation" and not self.eps > 0:
            raise ValueError("penalty parameter eps must be positive")
        if self.max_steps < 0:
            raise ValueError("max_steps must be nonnegative")
        # gamma = 1 - eps_stab^2; decay is only guaranteed for tau small against eps_stab
        if self.kind == "geodesic" and self.tau > math.sqrt(1.0 - self.gamma):
            logger.warning("geodesic flow with tau %.3g > sqrt(1 - gamma) = %.3g; energy decay "
                           "is not guaranteed", self.tau, math.sqrt(1.0 - self.gamma))


@dataclass
class StepResult:
    u: HermiteCurve
    rate: np.ndarray  # d_t u as a dof vector
    solution: kkt.SaddleSolution
    constraints: object


@dataclass
class FlowTrace:
    diagnostics: list = field(default_factory=list)
    energies: list = field(default_factory=list)
    dissipation: list = field(default_factory=list)  # cumulative tau * sum ||d_t u||_*^2
    energy_increases: list = field(default_factory=list)  # steps with E_k > E_{k-1} + slack
    termination: str = ""

    @property
    def steps(self) -> int:
        return max(len(self.energies) - 1, 0)


class Stepper:
    """Holds the step-independent matrices of one flow on one partition."""

    def __init__(self, config: FlowConfig, surface: LevelSetSurface, bc: BoundaryCondition,
                 partition, metric=None):
        self.config = config
        self.surface = surface
        self.bc = bc
        self.partition = partition
        self.rule = quadrature_rule(config.quad_points)
        self.M = mass_matrix(partition) if metric is None else metric
        self.A = bending_matrix(partition)
        self.K = self.M + config.tau * self.A
        self.penalty = None
        if config.kind == "indentation":
            self.penalty = penalty_operators(partition, config.delta)
            self.K = self.K + (config.tau / config.eps) * self.penalty.D

    def rhs(self, u: HermiteCurve) -> np.ndarray:
        cfg = self.config
        f = -(self.A @ u.vector)
        if cfg.kind == "geodesic" and cfg.gamma != 0.0:
            f = f + geodesic_rhs(u, self.surface, cfg.gamma, self.rule, cfg.midpoint_normal)
        elif cfg.kind == "indentation":
            f = f - self.penalty.negative_load(u) / cfg.eps
        return f

    def step(self, u: HermiteCurve) -> StepResult:
        cons = linearized_constraints(u, self.surface, self.bc)
        sol = kkt.solve(kkt.SaddleSystem(self.K, cons.matrix, self.rhs(u)))
        u_next = HermiteCurve.from_vector(u.partition, u.vector + self.config.tau * sol.d)
        return StepResult(u_next, sol.d, sol, cons)

    def energy(self, u: HermiteCurve) -> float:
        """The functional the flow decreases."""
        return self.energy_from(self.diagnose(u))

    def energy_from(self, diag: Diagnostics) -> float:
        kind = self.config.kind
        if kind == "geodesic":
            return diag.geodesic
        if kind == "indentation":
            return diag.bending + diag.penalty
        return diag.bending

    def diagnose(self, u: HermiteCurve, step_norm: float = 0.0) -> Diagnostics:
        cfg = self.config
        return diagnose(
            u, self.surface,
            gamma=cfg.gamma if cfg.kind == "geodesic" else None,
            delta=cfg.delta if cfg.kind == "indentation" else None,
            eps=cfg.eps if cfg.kind == "indentation" else None,
            quadrature=self.rule, midpoint_normal=cfg.midpoint_normal, step_norm=step_norm,
        )

    def metric_norm(self, d: np.ndarray) -> float:
        return math.sqrt(max(float(d @ (self.M @ d)), 0.0))


def _step(u_prev, S, bc, config, metric=None):
    stepper = Stepper(config, S, bc, u_prev.partition, metric)
    res = stepper.step(u_prev)
    return res.u, res.rate, stepper.diagnose(res.u, stepper.metric_norm(res.rate))


def step_bending(u_prev: HermiteCurve, S: LevelSetSurface, bc: BoundaryCondition, tau: float,
                 metric=None):
    """One step of the constrained bending flow; returns (u_next, d_t u, diagnostics)."""
    return _step(u_prev, S, bc, FlowConfig("bending", tau), metric)


def step_geodesic(u_prev: HermiteCurve, S: LevelSetSurface, bc: BoundaryCondition, tau: float,
                  gamma: float, quad_points: int = 4, midpoint_normal: bool = True, metric=None):
    cfg = FlowConfig("geodesic", tau, gamma=gamma, quad_points=quad_points,
                     midpoint_normal=midpoint_normal)
    return _step(u_prev, S, bc, cfg, metric)


def step_indentation(u_prev: HermiteCurve, S: LevelSetSurface, bc: BoundaryCondition, tau: float,
                     eps: float, delta: float, metric=None):
    return _step(u_prev, S, bc, FlowConfig("indentation", tau, eps=eps, delta=delta), metric)


def check_admissible(u: HermiteCurve, S: LevelSetSurface, bc: BoundaryCondition,
                     config: FlowConfig, tol: float = ADMISSIBLE_TOL):
    arc, surf = constraint_violations(u, S)
    problems = []
    if arc > tol:
        problems.append(f"arclength violation {arc:.2e}")
    if surf > tol:
        problems.append(f"surface violation {surf:.2e}")
    if bc.residual(u) > tol:
        problems.append(f"boundary residual {bc.residual(u):.2e}")
    if config.kind == "indentation" and np.min(u.values[:, 2]) < config.delta - tol:
        problems.append("nodal values below the obstacle")
    if problems:
        raise InvalidInitialStateError("initial curve is not admissible: " + ", ".join(problems))


def run(config: FlowConfig, u0: HermiteCurve, S: LevelSetSurface, bc: BoundaryCondition,
        metric=None, callback=None):
    """Iterate until ||d_t u||_* <= stop_tol or max_steps.

    Returns ``(u, trace, snapshots)`` where snapshots is a list of ``(k, curve)``.
    ``callback(k, u, step_result, diagnostics)`` is invoked after every step.
    A failing step (solver breakdown, singular surface point) ends the run with
    ``trace.termination = 'solver-failure'`` and re-raises after the partial
    trace and last curve are attached to the exception.
    """
    check_admissible(u0, S, bc, config)
    stepper = Stepper(config, S, bc, u0.partition, metric)
    diag0 = stepper.diagnose(u0)
    trace = FlowTrace()
    trace.diagnostics.append(diag0)
    trace.energies.append(stepper.energy_from(diag0))
    trace.dissipation.append(0.0)
    stop_tol = config.stop_tol
    if stop_tol is None:
        stop_tol = 1e-8 * (1.0 + abs(trace.energies[0]))
    slack = MONOTONE_SLACK * (1.0 + abs(trace.energies[0]))
    snapshots = [(0, u0)] if config.snapshot_stride else []
    u = u0
    trace.termination = "max-steps"
    warned = False
    for k in range(1, config.max_steps + 1):
        try:
            res = stepper.step(u)
        except CurveflowError as exc:
            trace.termination = "solver-failure"
            exc.trace = trace
            exc.curve = u
            raise
        if res.constraints.dropped and not warned:
            logger.info("dependent constraint rows dropped: %s", ", ".join(res.constraints.dropped))
            warned = True
        u = res.u
        norm = stepper.metric_norm(res.rate)
        diag = stepper.diagnose(u, norm)
        energy = stepper.energy_from(diag)
        trace.diagnostics.append(diag)
        trace.dissipation.append(trace.dissipation[-1] + config.tau * norm**2)
        if energy > trace.energies[-1] + slack:
            trace.energy_increases.append(k)
        trace.energies.append(energy)
        if callback is not None:
            callback(k, u, res, diag)
        if config.snapshot_stride and k % config.snapshot_stride == 0:
            snapshots.append((k, u))
        if not np.isfinite(energy):
            trace.termination = "diverged"
            break
        if norm <= stop_tol:
            trace.termination = "stationary"
            break
    if trace.energy_increases and config.kind == "geodesic":
        logger.warning("geodesic flow energy increased in %d steps", len(trace.energy_increases))
    if config.snapshot_stride and snapshots[-1][0] != trace.steps:
        snapshots.append((trace.steps, u))
    return u, trace, snapshots
