"""Mass-spring energy baseline.

Internal energy is the sum of per-segment stretching terms
``0.5 * k_s * (|e_i| - l_s)**2`` and per-interior-node bending terms
``0.5 * k_b * (gamma_i - gamma_i_rest)**2``, where gamma is the signed
turning angle and the rest angles are taken from the initial shape. Shapes
are matched by minimizing ``E_internal + lam * shape_error`` with L-BFGS and
an Armijo backtracking line search; trajectories come from quasi-static
stepping along the linear guide.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .geometry import (
    Configuration,
    DegenerateGeometryError,
    DimensionMismatchError,
    Trajectory,
    build_guide,
    turning_angles,
)

DEFAULT_K_S = 1.0e5
DEFAULT_K_B = 1.0e-2
DEFAULT_LAMBDA = 1.0e3


@dataclass(frozen=True, eq=False)
class EnergyModel:
    k_s: float
    k_b: float
    rest_segment_length: float
    rest_angles: np.ndarray

    def __post_init__(self):
        if not (self.k_s > 0 and self.k_b > 0 and self.rest_segment_length > 0):
            raise ValueError("k_s, k_b and rest_segment_length must be positive")
        ang = np.array(self.rest_angles, dtype=np.float64)
        if not np.all(np.isfinite(ang)) or np.any(ang <= -np.pi) or np.any(ang > np.pi):
            raise ValueError("rest angles must be finite and lie in (-pi, pi]")
        ang.setflags(write=False)
        object.__setattr__(self, "rest_angles", ang)

    @classmethod
    def from_configuration(
        cls,
        rest: Configuration,
        k_s: float = DEFAULT_K_S,
        k_b: float = DEFAULT_K_B,
        rest_segment_length: float | None = None,
    ) -> EnergyModel:
        """Model whose rest angles are the turning angles of ``rest``.

        The rest segment length defaults to the mean segment length of ``rest``.
        """
        if rest_segment_length is None:
            rest_segment_length = float(np.mean(rest.segment_lengths()))
        return cls(k_s, k_b, rest_segment_length, turning_angles(rest))


@dataclass(frozen=True)
class EnergyReport:
    stretch_total: float
    bend_total: float
    shape_term: float
    objective: float


class MinimizerStatus(str, Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    LINE_SEARCH_FAILED = "LineSearchFailed"


@dataclass(frozen=True)
class MinimizerOptions:
    grad_tol: float | None = None  # None: 1e-8 * (k_s + k_b)
    max_iterations: int = 10_000
    memory: int = 10
    armijo_c1: float = 1e-4
    backtrack: float = 0.5
    max_backtracks: int = 60
    pin_endpoints: bool = True
    record_history: bool = False


@dataclass
class MinimizerStats:
    status: MinimizerStatus
    iterations: int
    grad_norm: float
    solve_time: float
    objective_history: list[float] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status is MinimizerStatus.CONVERGED


def _check_model(c: Configuration, model: EnergyModel):
    if c.n_nodes < 3:
        raise ValueError("the energy model needs at least 3 nodes")
    if len(model.rest_angles) != c.n_nodes - 2:
        raise DimensionMismatchError(
            f"model has {len(model.rest_angles)} rest angles, configuration needs {c.n_nodes - 2}"
        )


def stretch_energy(c: Configuration, model: EnergyModel) -> float:
    lengths = c.segment_lengths()
    return float(0.5 * model.k_s * np.sum((lengths - model.rest_segment_length) ** 2))


def bend_energy(c: Configuration, model: EnergyModel) -> float:
    _check_model(c, model)
    dev = turning_angles(c) - model.rest_angles
    return float(0.5 * model.k_b * np.sum(dev**2))


def _energy_grad(x: np.ndarray, model: EnergyModel) -> tuple[float, float, np.ndarray]:
    e = np.diff(x, axis=0)
    sq = e[:, 0] ** 2 + e[:, 1] ** 2
    if np.any(sq == 0.0):
        raise DegenerateGeometryError(f"zero-length segment {int(np.argmin(sq)) + 1}")
    length = np.sqrt(sq)
    grad = np.zeros_like(x)

    stretch = length - model.rest_segment_length
    es = 0.5 * model.k_s * np.dot(stretch, stretch)
    fs = (model.k_s * stretch / length)[:, None] * e
    grad[1:] += fs
    grad[:-1] -= fs

    a, b = e[:-1], e[1:]
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    dot = a[:, 0] * b[:, 0] + a[:, 1] * b[:, 1]
    dev = np.arctan2(cross, dot) - model.rest_angles
    eb = 0.5 * model.k_b * np.dot(dev, dev)
    # d(angle of v)/dv = perp(v) / |v|^2 with perp(v) = (-v_y, v_x)
    perp = np.column_stack([-e[:, 1], e[:, 0]]) / sq[:, None]
    w = (model.k_b * dev)[:, None]
    dga = -perp[:-1]
    dgb = perp[1:]
    grad[:-2] -= w * dga
    grad[1:-1] += w * (dga - dgb)
    grad[2:] += w * dgb
    return es, eb, grad


def internal_energy_and_gradient(c: Configuration, model: EnergyModel) -> tuple[float, np.ndarray]:
    """Total internal energy and its exact gradient with respect to every node, (N, 2)."""
    _check_model(c, model)
    es, eb, grad = _energy_grad(c.nodes, model)
    return es + eb, grad


def energy_report(c: Configuration, target: Configuration, model: EnergyModel, lam: float) -> EnergyReport:
    _check_model(c, model)
    es, eb, _ = _energy_grad(c.nodes, model)
    shape = float(np.sum((c.nodes - target.nodes) ** 2))
    return EnergyReport(float(es), float(eb), shape, float(es + eb + lam * shape))


def _lbfgs(fun, x0: np.ndarray, free: np.ndarray, tol: float, opts: MinimizerOptions):
    """Minimize ``fun(x) -> (f, grad)`` over the entries selected by ``free``.

    L-BFGS two-loop direction with an Armijo backtracking step. Accepted
    iterates never increase the objective.
    """
    x = x0.copy()
    f, g = fun(x)
    g = g * free
    history = [f] if opts.record_history else []
    s_hist: deque = deque(maxlen=opts.memory)
    y_hist: deque = deque(maxlen=opts.memory)
    status = MinimizerStatus.MAX_ITERATIONS
    gnorm = float(np.max(np.abs(g)))
    it = 0
    while True:
        if gnorm <= tol:
            status = MinimizerStatus.CONVERGED
            break
        if it >= opts.max_iterations:
            break
        it += 1

        q = g.ravel().copy()
        alphas = []
        for s, y in zip(reversed(s_hist), reversed(y_hist)):
            a = np.dot(s, q) / np.dot(y, s)
            alphas.append(a)
            q -= a * y
        if s_hist:
            s, y = s_hist[-1], y_hist[-1]
            q *= np.dot(s, y) / np.dot(y, y)
        for (s, y), a in zip(zip(s_hist, y_hist), reversed(alphas)):
            q += (a - np.dot(y, q) / np.dot(y, s)) * s
        d = -q.reshape(x.shape) * free
        slope = float(np.sum(d * g))
        if not slope < 0:
            s_hist.clear()
            y_hist.clear()
            d = -g
            slope = float(np.sum(d * g))

        step = 1.0
        if not s_hist:
            step = min(1.0, 1.0 / max(gnorm, 1e-300))
        accepted = False
        for _ in range(opts.max_backtracks):
            x_new = x + step * d
            try:
                f_new, g_new = fun(x_new)
            except DegenerateGeometryError:
                step *= opts.backtrack
                continue
            if np.isfinite(f_new) and f_new <= f + opts.armijo_c1 * step * slope:
                accepted = True
                break
            step *= opts.backtrack
        if not accepted:
            status = MinimizerStatus.LINE_SEARCH_FAILED
            break
        g_new = g_new * free
        s_vec = (x_new - x).ravel()
        y_vec = (g_new - g).ravel()
        if np.dot(s_vec, y_vec) > 1e-12 * np.dot(y_vec, y_vec):
            s_hist.append(s_vec)
            y_hist.append(y_vec)
        x, f, g = x_new, f_new, g_new
        gnorm = float(np.max(np.abs(g)))
        if opts.record_history:
            history.append(f)
    return x, f, gnorm, it, status, history


def solve_equilibrium(
    start: Configuration,
    target: Configuration,
    model: EnergyModel,
    lam: float = DEFAULT_LAMBDA,
    opts: MinimizerOptions | None = None,
) -> tuple[Configuration, EnergyReport, MinimizerStats]:
    """Locally minimize ``E_internal + lam * shape_error(., target)`` starting from ``start``.

    With ``opts.pin_endpoints`` the two end nodes are moved onto the target's
    end nodes and held there (the grippers). Non-convergence is reported in
    the returned stats; the best iterate is returned regardless.
    """
    opts = opts or MinimizerOptions()
    if start.n_nodes != target.n_nodes:
        raise DimensionMismatchError(f"node count mismatch: {start.n_nodes} != {target.n_nodes}")
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    _check_model(start, model)
    t0 = time.perf_counter()
    tol = opts.grad_tol if opts.grad_tol is not None else 1e-8 * (model.k_s + model.k_b)
    goal = target.nodes

    x0 = start.nodes.copy()
    free = np.ones_like(x0)
    if opts.pin_endpoints:
        x0[0], x0[-1] = goal[0], goal[-1]
        free[0] = free[-1] = 0.0

    def fun(x):
        es, eb, g = _energy_grad(x, model)
        r = x - goal
        return es + eb + lam * float(np.sum(r * r)), g + 2.0 * lam * r

    x, _, gnorm, it, status, hist = _lbfgs(fun, x0, free, tol, opts)
    result = Configuration(x)
    stats = MinimizerStats(status, it, gnorm, time.perf_counter() - t0, hist)
    return result, energy_report(result, target, model, lam), stats


def solve_trajectory(
    start: Configuration,
    target: Configuration,
    model: EnergyModel,
    lam: float = DEFAULT_LAMBDA,
    T: int = 10,
    opts: MinimizerOptions | None = None,
) -> tuple[Trajectory, list[MinimizerStats]]:
    """Quasi-static trajectory: equilibria toward each guide shape, warm-started step to step.

    Step 1 is ``start`` itself; step t >= 2 is the equilibrium for the
    linearly interpolated target at t. One stats record per solved step.
    """
    guide = build_guide(start, target, T)
    steps = [start.nodes]
    stats = []
    current = start
    for t in range(1, T):
        current, _, st = solve_equilibrium(current, guide[t], model, lam, opts)
        steps.append(current.nodes)
        stats.append(st)
    return Trajectory(np.stack(steps)), stats
