"""Benchmark harness: the four standard shape transitions, timed for both planners."""

from __future__ import annotations

import csv
import io
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .energy import (
    EnergyModel,
    MinimizerOptions,
    MinimizerStatus,
    energy_report,
    solve_trajectory,
)
from .geometry import (
    Configuration,
    DloParams,
    Trajectory,
    max_length_error,
    max_node_distance,
    max_segment_excess,
    shape_error,
)
from .io import EnergyConfig, Scene
from .scope import SolverSettings, assemble, solve
from .shapes import ShapeSpec, generate_shape

SCOPE = "SCOPE"
ENERGY = "EnergyBased"

# Published numbers for side-by-side reporting: (scope s, scope cm, energy s, energy cm).
PUBLISHED_TABLE = {
    "QSW-HSW": (2.4, 0.7, 22.73, 0.7),
    "I-S": (1.52, 5.2, 59.13, 0.7),
    "U-QSW": (1.4, 1.6, 31.91, 0.8),
    "QSW-L": (3.01, 2.8, 187.52, 0.7),
}

TABLE_COLUMNS = [
    "task",
    "scope_time_s",
    "scope_max_err_m",
    "energy_time_s",
    "energy_max_err_m",
    "speedup",
    "scope_max_err_cm",
    "energy_max_err_cm",
]


@dataclass(frozen=True)
class BenchTask:
    name: str
    start_spec: ShapeSpec
    target_spec: ShapeSpec
    T: int = 10
    scope_settings: SolverSettings = field(default_factory=SolverSettings)
    energy_opts: MinimizerOptions = field(default_factory=MinimizerOptions)
    repeats: int = 5
    w1: float = 1.0
    w2: float = 0.1
    energy: EnergyConfig = field(default_factory=EnergyConfig)

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if (self.start_spec.n_nodes, self.start_spec.segment_length) != (
            self.target_spec.n_nodes,
            self.target_spec.segment_length,
        ):
            raise ValueError("start and target must share n_nodes and segment_length")

    @property
    def params(self) -> DloParams:
        return DloParams(self.start_spec.n_nodes, self.start_spec.segment_length)

    @classmethod
    def from_scene(cls, scene: Scene, name: str | None = None, **kwargs) -> BenchTask:
        if not (isinstance(scene.start, ShapeSpec) and isinstance(scene.target, ShapeSpec)):
            raise ValueError("benchmark scenes must use generated shapes, not explicit nodes")
        name = name or f"{scene.start.kind.value}-{scene.target.kind.value}"
        return cls(
            name, scene.start, scene.target, T=scene.T, w1=scene.w1, w2=scene.w2,
            energy=scene.energy, **kwargs,
        )


@dataclass
class BenchResult:
    task: str
    method: str
    solve_time: float
    max_length_error: float
    final_shape_error: float
    final_max_node_error: float
    iterations: int
    status: str
    objective: float = math.nan
    max_constraint_violation: float = 0.0
    assembly_time: float = 0.0
    trajectory: Trajectory | None = field(default=None, repr=False)

    def to_dict(self, with_trajectory: bool = True) -> dict:
        d = {
            "task": self.task,
            "method": self.method,
            "status": self.status,
            "solve_time_s": self.solve_time,
            "assembly_time_s": self.assembly_time,
            "max_length_error_m": self.max_length_error,
            "final_shape_error_m2": self.final_shape_error,
            "final_max_node_error_m": self.final_max_node_error,
            "iterations": self.iterations,
            "objective": self.objective,
            "max_constraint_violation": self.max_constraint_violation,
        }
        if with_trajectory and self.trajectory is not None:
            d["trajectory"] = self.trajectory.to_list()
        return d


def standard_suite(
    n_nodes: int = 15, segment_length: float = 0.05, T: int = 10, repeats: int = 5
) -> list[BenchTask]:
    """The four published transitions: QSW-HSW, I-S, U-QSW and QSW-L."""

    def spec(kind, origin=(0.0, 0.0), rotation_deg=0.0):
        return ShapeSpec(kind, n_nodes, segment_length, origin, math.radians(rotation_deg))

    shift = (0.05, 0.2)
    rows = [
        ("QSW-HSW", spec("QSW"), spec("HSW", shift, -25.0)),
        ("I-S", spec("I"), spec("S", shift)),
        ("U-QSW", spec("U"), spec("QSW", shift, 25.0)),
        ("QSW-L", spec("QSW"), spec("L", shift, -70.0)),
    ]
    return [BenchTask(name, a, b, T=T, repeats=repeats) for name, a, b in rows]


def _worst_status(statuses) -> str:
    order = [MinimizerStatus.CONVERGED, MinimizerStatus.MAX_ITERATIONS,
             MinimizerStatus.LINE_SEARCH_FAILED]
    return max(statuses, key=order.index).value


def _shape_metrics(traj: Trajectory, target: Configuration, params: DloParams):
    final = traj[-1]
    return (
        max_length_error(traj, params),
        shape_error(final, target),
        max_node_distance(final, target),
    )


def run_scope(task: BenchTask, start: Configuration, target: Configuration) -> BenchResult:
    params = task.params
    times, asm_times = [], []
    sol = None
    for _ in range(task.repeats):
        t0 = time.perf_counter()
        problem = assemble(start, target, params, task.T, task.w1, task.w2)
        sol = solve(problem, task.scope_settings)
        times.append(time.perf_counter() - t0)
        asm_times.append(problem.assembly_time)
    mle, se, mnd = _shape_metrics(sol.trajectory, target, params)
    return BenchResult(
        task.name, SCOPE, statistics.median(times), mle, se, mnd, sol.iterations,
        sol.status.value, sol.objective_value, sol.max_constraint_violation,
        statistics.median(asm_times), sol.trajectory,
    )


def run_energy(task: BenchTask, start: Configuration, target: Configuration) -> BenchResult:
    params = task.params
    cfg = task.energy
    times = []
    traj, stats = None, []
    for _ in range(task.repeats):
        t0 = time.perf_counter()
        model = EnergyModel.from_configuration(start, cfg.k_s, cfg.k_b, params.segment_rest_length)
        traj, stats = solve_trajectory(start, target, model, cfg.lam, task.T, task.energy_opts)
        times.append(time.perf_counter() - t0)
    mle, se, mnd = _shape_metrics(traj, target, params)
    stretch = max_segment_excess(traj, params.segment_rest_length)
    objective = energy_report(traj[-1], target, model, cfg.lam).objective
    return BenchResult(
        task.name, ENERGY, statistics.median(times), mle, se, mnd,
        sum(s.iterations for s in stats), _worst_status(s.status for s in stats),
        objective, stretch, 0.0, traj,
    )


def run(task: BenchTask) -> tuple[BenchResult, BenchResult]:
    """Run SCOPE then the energy baseline on the same scene.

    A method that raises is recorded with status ``Error`` instead of
    aborting the caller's suite.
    """
    start = generate_shape(task.start_spec)
    target = generate_shape(task.target_spec)
    out = []
    for method, fn in ((SCOPE, run_scope), (ENERGY, run_energy)):
        try:
            out.append(fn(task, start, target))
        except Exception as exc:  # noqa: BLE001
            out.append(
                BenchResult(task.name, method, math.nan, math.nan, math.nan, math.nan, 0,
                            f"Error: {exc}")
            )
    return out[0], out[1]


def bench_threads() -> int:
    try:
        return max(1, int(os.environ.get("SCOPE_DLO_THREADS", "1")))
    except ValueError:
        return 1


def run_suite(tasks: list[BenchTask], threads: int | None = None) -> list[tuple[BenchResult, BenchResult]]:
    threads = bench_threads() if threads is None else threads
    if threads <= 1 or len(tasks) <= 1:
        return [run(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(threads, len(tasks))) as pool:
        return list(pool.map(run, tasks))


def speedup(scope: BenchResult, energy: BenchResult) -> float:
    if not (scope.solve_time > 0) or math.isnan(energy.solve_time):
        return math.nan
    return energy.solve_time / scope.solve_time


def _fmt(v: float) -> str:
    return f"{v:.4g}"


def emit_table(results) -> str:
    """CSV text, one row per (scope, energy) pair, numbers at 4 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_COLUMNS)
    for scope, energy in results:
        w.writerow([
            scope.task,
            _fmt(scope.solve_time),
            _fmt(scope.max_length_error),
            _fmt(energy.solve_time),
            _fmt(energy.max_length_error),
            _fmt(speedup(scope, energy)),
            _fmt(100.0 * scope.max_length_error),
            _fmt(100.0 * energy.max_length_error),
        ])
    return buf.getvalue()


def parse_table(text: str) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return [{k: (v if k == "task" else float(v)) for k, v in row.items()} for row in rows]


def format_comparison(results) -> str:
    """Human-readable table with the published numbers next to ours."""
    head = (f"{'task':<8} {'scope s':>9} {'err cm':>7} {'energy s':>9} {'err cm':>7} "
            f"{'speedup':>8} | {'pub. scope s/cm':>16} {'pub. energy s/cm':>17}")
    lines = [head, "-" * len(head)]
    for scope, energy in results:
        pub = PUBLISHED_TABLE.get(scope.task)
        ref = (f"{pub[0]:>8.2f}/{pub[1]:<7.1f} {pub[2]:>9.2f}/{pub[3]:<7.1f}"
               if pub else f"{'-':>16} {'-':>17}")
        lines.append(
            f"{scope.task:<8} {scope.solve_time:>9.4f} {100 * scope.max_length_error:>7.3f} "
            f"{energy.solve_time:>9.4f} {100 * energy.max_length_error:>7.3f} "
            f"{speedup(scope, energy):>8.1f} | {ref}"
        )
    return "\n".join(lines)


def results_to_json(results) -> dict:
    return {
        "tasks": [
            {"task": s.task, "scope": s.to_dict(), "energy": e.to_dict()} for s, e in results
        ]
    }
