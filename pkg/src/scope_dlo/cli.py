"""Command-line interface: ``scope-dlo plan | bench | render``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import bench as bench_mod
from .energy import EnergyModel, MinimizerStatus, energy_report, solve_trajectory
from .geometry import DimensionMismatchError, max_length_error, max_segment_excess
from .io import SceneError, load_scene, load_trajectory, write_json
from .render import RenderStyle, render_svg
from .scope import InfeasibleBoundaryError, SolverSettings, SolveStatus, assemble, solve

EXIT_OK, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2


class CliError(Exception):
    pass


def _settings(args) -> SolverSettings:
    kw = {}
    if args.rho is not None:
        kw["penalty_rho"] = args.rho
    if args.tol is not None:
        kw["primal_tolerance"] = kw["dual_tolerance"] = args.tol
    if args.max_iters is not None:
        kw["max_iterations"] = args.max_iters
    if args.init is not None:
        kw["initialization"] = args.init
    try:
        return SolverSettings(**kw)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _suffixed(out: Path, method: str) -> Path:
    stem = out.name[:-5] if out.name.endswith(".json") else out.name
    return out.with_name(f"{stem}.{method}.json")


def _plan_scope(scene, start, target, settings):
    problem = assemble(start, target, scene.params, scene.T, scene.w1, scene.w2)
    sol = solve(problem, settings)
    payload = sol.to_dict()
    payload["assembly_time_s"] = problem.assembly_time
    payload["max_length_error_m"] = max_length_error(sol.trajectory, scene.params)
    summary = (
        f"scope: status={sol.status.value} objective={sol.objective_value:.6g} "
        f"max_length_error={payload['max_length_error_m']:.4g} m "
        f"iterations={sol.iterations} time={problem.assembly_time + sol.solve_time:.4g} s"
    )
    return payload, summary, sol.status is SolveStatus.CONVERGED


def _plan_energy(scene, start, target):
    cfg = scene.energy
    t0 = time.perf_counter()
    model = EnergyModel.from_configuration(start, cfg.k_s, cfg.k_b, scene.params.segment_rest_length)
    traj, stats = solve_trajectory(start, target, model, cfg.lam, scene.T)
    elapsed = time.perf_counter() - t0
    ok = all(s.status is MinimizerStatus.CONVERGED for s in stats)
    status = "Converged" if ok else next(s.status.value for s in stats if not s.converged)
    report = energy_report(traj[-1], target, model, cfg.lam)
    overstretch = max_segment_excess(traj, scene.params.segment_rest_length)
    payload = {
        "method": "energy",
        "status": status,
        "objective": report.objective,
        "iterations": sum(s.iterations for s in stats),
        "solve_time_s": elapsed,
        "max_constraint_violation": overstretch,
        "max_length_error_m": max_length_error(traj, scene.params),
        "step_times_s": [s.solve_time for s in stats],
        "trajectory": traj.to_list(),
    }
    summary = (
        f"energy: status={status} energy={report.stretch_total + report.bend_total:.6g} "
        f"objective={report.objective:.6g} "
        f"max_length_error={payload['max_length_error_m']:.4g} m time={elapsed:.4g} s"
    )
    return payload, summary, ok


def cmd_plan(args) -> int:
    scene = load_scene(args.scene)
    try:
        start, target = scene.configurations()
    except ValueError as exc:
        raise CliError(f"invalid scene: {exc}") from None
    settings = _settings(args)
    out = Path(args.out)
    methods = ["scope", "energy"] if args.method == "both" else [args.method]
    all_ok = True
    for method in methods:
        if method == "scope":
            payload, summary, ok = _plan_scope(scene, start, target, settings)
        else:
            payload, summary, ok = _plan_energy(scene, start, target)
        payload["scene"] = scene.to_dict()
        path = _suffixed(out, method) if len(methods) > 1 else out
        write_json(path, payload)
        print(f"{summary} -> {path}")
        all_ok &= ok
    return EXIT_OK if all_ok else EXIT_SOLVER


def cmd_bench(args) -> int:
    settings = _settings(args)
    if args.scene:
        scene = load_scene(args.scene)
        tasks = [bench_mod.BenchTask.from_scene(scene, repeats=args.repeats, scope_settings=settings)]
    else:
        tasks = [
            bench_mod.BenchTask(t.name, t.start_spec, t.target_spec, T=t.T,
                                repeats=args.repeats, scope_settings=settings)
            for t in bench_mod.standard_suite()
        ]
    results = bench_mod.run_suite(tasks)
    table = bench_mod.emit_table(results)
    if args.out:
        Path(args.out).write_text(table)
    else:
        sys.stdout.write(table)
    print(bench_mod.format_comparison(results))
    if args.json:
        write_json(args.json, bench_mod.results_to_json(results))
    if args.figure:
        from .plotting import suite_figure

        suite_figure(results, args.figure)
    errored = any(r.status.startswith("Error") for pair in results for r in pair)
    return EXIT_SOLVER if errored else EXIT_OK


def cmd_render(args) -> int:
    style = RenderStyle()
    if args.style:
        try:
            style = RenderStyle.from_dict(json.loads(Path(args.style).read_text()))
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise CliError(f"bad style file {args.style}: {exc}") from None
    trajs = [load_trajectory(p)[0] for p in args.trajectories]
    svg = render_svg(trajs, style)
    Path(args.out).write_text(svg)
    if args.png:
        from .plotting import plot_trajectory, plt

        fig, ax = plt.subplots(figsize=(5, 5))
        for k, tr in enumerate(trajs):
            plot_trajectory(ax, tr, style, dashed=k > 0, draw_ends=k == 0)
        ax.set_aspect("equal")
        fig.savefig(args.png, dpi=150)
        plt.close(fig)
    print(f"rendered {len(trajs)} trajectories -> {args.out}")
    return EXIT_OK


def _add_solver_flags(p):
    p.add_argument("--rho", type=float, help="ADMM penalty parameter (default 1.0)")
    p.add_argument("--tol", type=float, help="primal and dual tolerance (default 1e-6)")
    p.add_argument("--max-iters", type=int, help="ADMM iteration cap (default 50000)")
    p.add_argument("--init", choices=["guide", "zero"], help="ADMM starting point (default guide)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scope-dlo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan one scene")
    p.add_argument("scene", help="scene JSON file")
    p.add_argument("--method", choices=["scope", "energy", "both"], default="scope")
    p.add_argument("--out", default="trajectory.json",
                   help="output JSON; with --method both, .scope.json/.energy.json suffixes")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("bench", help="run the benchmark suite")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--suite", choices=["standard"], default="standard")
    g.add_argument("--scene", help="benchmark a single scene file instead of the suite")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--out", help="CSV output file (default: stdout)")
    p.add_argument("--json", help="also dump full results with trajectories")
    p.add_argument("--figure", help="also save a matplotlib panel figure (png/pdf/svg)")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("render", help="render trajectory files as SVG")
    p.add_argument("trajectories", nargs="+", help="first is drawn solid, the rest dashed")
    p.add_argument("--style", help="JSON file overriding RenderStyle fields")
    p.add_argument("--out", required=True, help="SVG output file")
    p.add_argument("--png", help="also save a matplotlib raster")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "repeats", 1) is not None and getattr(args, "repeats", 1) < 1:
        print("error: --repeats must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (CliError, SceneError, InfeasibleBoundaryError, DimensionMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
