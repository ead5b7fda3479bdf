"""Convex trajectory planner for planar DLOs.

The program solved here is

    minimize    w1 * S(p) + w2 * M(p)
    subject to  p[0] = start, p[T-1] = target,
                ||p[t, i+1] - p[t, i]|| <= l0   for every segment and step,

where S sums squared per-step node displacements and M pulls interior nodes
at interior steps toward a guide trajectory. Boundary steps are substituted
as constants rather than constrained, so they come back bit-exact.

The solver is ADMM on the splitting ``z = D p`` (D stacks the segment
vectors of the interior steps): a linear solve with a matrix factorized
once per problem, a projection of every segment onto the radius-l0 disc,
and a scaled dual update.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .geometry import (
    Configuration,
    DimensionMismatchError,
    DloParams,
    Trajectory,
    build_guide,
    max_segment_excess,
)

BOUNDARY_SLACK = 1e-9


class InfeasibleBoundaryError(ValueError):
    """A start or target segment is longer than the rest length."""

    def __init__(self, which: str, segment: int, length: float, limit: float):
        self.which = which
        self.segment = segment
        self.length = length
        self.limit = limit
        super().__init__(
            f"{which} shape segment {segment} has length {length:.9g} m, "
            f"exceeding the rest length {limit:.9g} m"
        )


class SolveStatus(str, Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class SolverSettings:
    max_iterations: int = 50_000
    primal_tolerance: float = 1e-6
    dual_tolerance: float = 1e-6
    penalty_rho: float = 1.0
    over_relaxation: float = 1.6
    initialization: str = "guide"  # or "zero"
    record_history: bool = False

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not (self.primal_tolerance > 0 and self.dual_tolerance > 0):
            raise ValueError("tolerances must be positive")
        if not self.penalty_rho > 0:
            raise ValueError("penalty_rho must be positive")
        if not 1.0 <= self.over_relaxation <= 1.8:
            raise ValueError("over_relaxation must lie in [1, 1.8]")
        if self.initialization not in ("guide", "zero"):
            raise ValueError("initialization must be 'guide' or 'zero'")


@dataclass(frozen=True, eq=False)
class _Operators:
    # Free variables are flattened (step, node) indices over the full (T, N) grid.
    free: np.ndarray
    fixed_values: np.ndarray  # (T, N, 2) with free entries zeroed
    A_time: sp.csr_matrix
    b_time: np.ndarray
    A_mid: sp.csr_matrix
    b_mid: np.ndarray
    D: sp.csr_matrix
    e: np.ndarray


@dataclass(frozen=True, eq=False)
class ScopeProblem:
    params: DloParams
    start: Configuration
    target: Configuration
    guide: Trajectory
    w1: float
    w2: float
    T: int
    endpoint_waypoints: np.ndarray | None = None
    assembly_time: float = 0.0
    _ops: _Operators | None = field(default=None, repr=False)

    @property
    def n_nodes(self) -> int:
        return self.params.n_nodes

    @property
    def n_variables(self) -> int:
        """Scalar decision variables before boundary elimination."""
        return 2 * self.n_nodes * self.T

    @property
    def n_free_variables(self) -> int:
        return 2 * len(self._ops.free)

    @property
    def n_cone_constraints(self) -> int:
        """Segment-length cones ``||p[t,i+1] - p[t,i]|| <= l0``, one per segment and step."""
        return (self.n_nodes - 1) * self.T

    @property
    def n_cone_rows(self) -> int:
        """Scalar rows inside the cone norms (two per segment vector)."""
        return 2 * self.n_cone_constraints

    @property
    def n_equalities(self) -> int:
        n = 4 * self.n_nodes
        if self.endpoint_waypoints is not None:
            n += 4 * max(self.T - 2, 0)
        return n

    def full_steps(self, x: np.ndarray) -> np.ndarray:
        """Scatter free variables (n_free, 2) into a full (T, N, 2) array."""
        out = self._ops.fixed_values.copy()
        out.reshape(-1, 2)[self._ops.free] = x
        return out


@dataclass(frozen=True, eq=False)
class ScopeSolution:
    trajectory: Trajectory
    objective_value: float
    iterations: int
    max_constraint_violation: float
    status: SolveStatus
    solve_time: float
    primal_residual: float = 0.0
    dual_residual: float = 0.0
    residual_history: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {
            "method": "scope",
            "status": self.status.value,
            "objective": self.objective_value,
            "iterations": self.iterations,
            "solve_time_s": self.solve_time,
            "max_constraint_violation": self.max_constraint_violation,
            "trajectory": self.trajectory.to_list(),
        }


def smoothness_objective(traj: Trajectory) -> float:
    """Sum over steps and nodes of squared node displacement between consecutive steps."""
    return float(np.sum(np.diff(traj.steps, axis=0) ** 2))


def midpoint_objective(traj: Trajectory, guide: Trajectory) -> float:
    """Squared deviation from ``guide`` over interior nodes at interior steps only."""
    if traj.steps.shape != guide.steps.shape:
        raise DimensionMismatchError(
            f"trajectory shape {traj.steps.shape} != guide shape {guide.steps.shape}"
        )
    diff = traj.steps[1:-1, 1:-1] - guide.steps[1:-1, 1:-1]
    return float(np.sum(diff**2))


def objective_value(problem: ScopeProblem, traj: Trajectory) -> float:
    if traj.steps.shape != problem.guide.steps.shape:
        raise DimensionMismatchError(
            f"trajectory shape {traj.steps.shape} != problem shape {problem.guide.steps.shape}"
        )
    return problem.w1 * smoothness_objective(traj) + problem.w2 * midpoint_objective(
        traj, problem.guide
    )


def _check_boundary(c: Configuration, which: str, limit: float):
    lengths = c.segment_lengths()
    bad = np.nonzero(lengths > limit + BOUNDARY_SLACK)[0]
    if bad.size:
        i = int(bad[np.argmax(lengths[bad])])
        raise InfeasibleBoundaryError(which, i + 1, float(lengths[i]), limit)


def assemble(
    start: Configuration,
    target: Configuration,
    params: DloParams,
    T: int,
    w1: float = 1.0,
    w2: float = 0.1,
    guide: Trajectory | None = None,
    endpoint_waypoints=None,
) -> ScopeProblem:
    """Build the convex program for one start/target pair.

    ``endpoint_waypoints`` optionally pins the two end nodes at every step;
    it is a (T, 2, 2) array holding node 1 and node N positions per step.
    Without it the end nodes are free at interior steps.

    Raises ``InfeasibleBoundaryError`` if a start or target segment exceeds
    the rest length.
    """
    t0 = time.perf_counter()
    N = params.n_nodes
    if start.n_nodes != N or target.n_nodes != N:
        raise DimensionMismatchError(
            f"start/target have {start.n_nodes}/{target.n_nodes} nodes, expected {N}"
        )
    if T < 2:
        raise ValueError("T must be >= 2")
    if not (w1 >= 0 and w2 >= 0 and w1 + w2 > 0):
        raise ValueError("weights must be non-negative with a positive sum")
    l0 = params.segment_rest_length
    _check_boundary(start, "start", l0)
    _check_boundary(target, "target", l0)

    if guide is None:
        guide = build_guide(start, target, T)
    elif guide.T != T or guide.n_nodes != N:
        raise DimensionMismatchError(f"guide is {guide.T}x{guide.n_nodes}, expected {T}x{N}")

    waypoints = None
    if endpoint_waypoints is not None:
        waypoints = np.array(endpoint_waypoints, dtype=np.float64)
        if waypoints.shape != (T, 2, 2):
            raise DimensionMismatchError(f"endpoint waypoints must be ({T}, 2, 2)")
        ends = np.stack([[start.nodes[0], start.nodes[-1]], [target.nodes[0], target.nodes[-1]]])
        waypoints[0], waypoints[-1] = ends[0], ends[1]
        span = np.hypot(*(waypoints[:, 1] - waypoints[:, 0]).T)
        over = np.nonzero(span > params.total_rest_length + BOUNDARY_SLACK)[0]
        if over.size:
            t = int(over[0])
            raise InfeasibleBoundaryError(
                f"waypoint step {t + 1}", 0, float(span[t]), params.total_rest_length
            )
        waypoints.setflags(write=False)

    ops = _build_operators(start, target, guide, T, N, waypoints)
    return ScopeProblem(
        params=params,
        start=start,
        target=target,
        guide=guide,
        w1=float(w1),
        w2=float(w2),
        T=T,
        endpoint_waypoints=waypoints,
        assembly_time=time.perf_counter() - t0,
        _ops=ops,
    )


def _build_operators(start, target, guide, T, N, waypoints) -> _Operators:
    fixed = np.zeros((T, N), dtype=bool)
    fixed[0] = fixed[-1] = True
    values = np.zeros((T, N, 2))
    values[0], values[-1] = start.nodes, target.nodes
    if waypoints is not None and T > 2:
        fixed[1:-1, 0] = fixed[1:-1, -1] = True
        values[1:-1, 0] = waypoints[1:-1, 0]
        values[1:-1, -1] = waypoints[1:-1, 1]
    flat_fixed = fixed.ravel()
    free = np.flatnonzero(~flat_fixed)
    fixed_idx = np.flatnonzero(flat_fixed)
    c = values.reshape(-1, 2)[fixed_idx]

    n_full = T * N
    idx = np.arange(n_full).reshape(T, N)

    def split(rows, cols, vals, n_rows):
        m = sp.csr_matrix((vals, (rows, cols)), shape=(n_rows, n_full))
        return m[:, free].tocsr(), m[:, fixed_idx] @ c

    # time differences p[t+1, i] - p[t, i]
    nr = (T - 1) * N
    r = np.arange(nr)
    A_time, b_time = split(
        np.concatenate([r, r]),
        np.concatenate([idx[1:].ravel(), idx[:-1].ravel()]),
        np.concatenate([np.ones(nr), -np.ones(nr)]),
        nr,
    )

    # interior nodes at interior steps, minus the guide
    sel = idx[1:-1, 1:-1].ravel()
    A_mid, b_mid = split(np.arange(sel.size), sel, np.ones(sel.size), sel.size)
    b_mid = b_mid - guide.steps[1:-1, 1:-1].reshape(-1, 2)

    # segment vectors at interior steps
    ns = max(T - 2, 0) * (N - 1)
    r = np.arange(ns)
    D, e = split(
        np.concatenate([r, r]),
        np.concatenate([idx[1:-1, 1:].ravel(), idx[1:-1, :-1].ravel()]),
        np.concatenate([np.ones(ns), -np.ones(ns)]),
        ns,
    )
    values = values.copy()
    values.setflags(write=False)
    return _Operators(free, values, A_time, b_time, A_mid, b_mid, D, e)


def _project_segments(v: np.ndarray, radius: float) -> np.ndarray:
    norms = np.hypot(v[:, 0], v[:, 1])
    scale = np.minimum(1.0, radius / np.maximum(norms, 1e-300))
    return v * scale[:, None]


def solve(problem: ScopeProblem, settings: SolverSettings | None = None) -> ScopeSolution:
    """Solve ``problem`` by ADMM.

    Termination is declared when every segment's primal residual
    ``||D p + e - z||`` is below ``primal_tolerance`` and every entry of the
    dual residual ``rho * D^T (z - z_prev)`` is below ``dual_tolerance``.
    Running out of iterations is reported through ``status``; the last
    iterate is returned either way.
    """
    settings = settings or SolverSettings()
    t0 = time.perf_counter()
    ops = problem._ops
    l0 = problem.params.segment_rest_length
    w1, w2, rho, alpha = problem.w1, problem.w2, settings.penalty_rho, settings.over_relaxation
    n_free = len(ops.free)
    history: list[float] = []

    if n_free == 0:
        x = np.zeros((0, 2))
        it, r_norm, s_norm, status = 0, 0.0, 0.0, SolveStatus.CONVERGED
    else:
        D, e = ops.D, ops.e
        Dt = D.T.tocsr()
        K = (
            2.0 * w1 * (ops.A_time.T @ ops.A_time)
            + 2.0 * w2 * (ops.A_mid.T @ ops.A_mid)
            + rho * (Dt @ D)
        )
        if w1 == 0.0:
            # end nodes of a 2-node rope are otherwise unanchored (translation null space)
            K = K + 1e-12 * sp.identity(n_free)
        lu = splu(sp.csc_matrix(K))
        q = -2.0 * w1 * (ops.A_time.T @ ops.b_time) - 2.0 * w2 * (ops.A_mid.T @ ops.b_mid)

        if settings.initialization == "guide":
            x = problem.guide.steps.reshape(-1, 2)[ops.free].copy()
        else:
            x = np.zeros((n_free, 2))
        z = _project_segments(D @ x + e, l0)
        u = np.zeros_like(z)
        x_last = x

        status = SolveStatus.MAX_ITERATIONS
        r_norm = s_norm = np.inf
        it = 0
        for it in range(1, settings.max_iterations + 1):
            x = lu.solve(q + rho * (Dt @ (z - e - u)))
            Dx = D @ x + e
            Dx_hat = alpha * Dx + (1.0 - alpha) * z
            z_prev = z
            z = _project_segments(Dx_hat + u, l0)
            u = u + Dx_hat - z

            r = Dx - z
            r_norm = float(np.max(np.hypot(r[:, 0], r[:, 1]))) if len(r) else 0.0
            s = rho * (Dt @ (z - z_prev))
            s_norm = float(np.max(np.abs(s))) if len(s) else 0.0
            if settings.record_history:
                history.append(r_norm + s_norm)
            if not (np.isfinite(r_norm) and np.isfinite(s_norm)):
                status = SolveStatus.INFEASIBLE
                x = x_last
                break
            x_last = x
            if r_norm <= settings.primal_tolerance and s_norm <= settings.dual_tolerance:
                status = SolveStatus.CONVERGED
                break

    traj = Trajectory(problem.full_steps(x))
    violation = max_segment_excess(traj, l0)
    return ScopeSolution(
        trajectory=traj,
        objective_value=objective_value(problem, traj),
        iterations=it,
        max_constraint_violation=violation,
        status=status,
        solve_time=time.perf_counter() - t0,
        primal_residual=float(r_norm),
        dual_residual=float(s_norm),
        residual_history=tuple(history),
    )


def plan(
    start: Configuration,
    target: Configuration,
    params: DloParams,
    T: int,
    w1: float = 1.0,
    w2: float = 0.1,
    settings: SolverSettings | None = None,
    **kwargs,
) -> ScopeSolution:
    """Assemble and solve in one call."""
    return solve(assemble(start, target, params, T, w1, w2, **kwargs), settings)
