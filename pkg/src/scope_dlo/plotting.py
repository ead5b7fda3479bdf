"""Matplotlib figures for benchmark reports.

One panel per task: start in red, target in blue, SCOPE intermediates as
solid green lines and energy-baseline intermediates dashed.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .render import RenderStyle  # noqa: E402


def plot_trajectory(ax, traj, style: RenderStyle | None = None, dashed: bool = False,
                    draw_ends: bool = True):
    style = style or RenderStyle()
    ls = "--" if dashed else "-"
    T = traj.T
    for t in range(1, T - 1):
        xy = traj.steps[t]
        ax.plot(xy[:, 0], xy[:, 1], ls, color=style.intermediate_color,
                alpha=0.25 + 0.65 * t / (T - 1), lw=1.2)
    if draw_ends:
        ax.plot(*traj.steps[0].T, "-", color=style.start_color, lw=2.2, label="start")
        ax.plot(*traj.steps[-1].T, "-", color=style.target_color, lw=2.2, label="target")


def suite_figure(results, path, style: RenderStyle | None = None, ncols: int = 2):
    """Save a grid of panels, one per (scope, energy) result pair, to ``path``."""
    results = list(results)
    nrows = max(1, math.ceil(len(results) / ncols))
    fig, axes = plt.subplots(nrows, ncols, figsize=(4.2 * ncols, 3.6 * nrows), squeeze=False)
    for ax in axes.flat[len(results):]:
        ax.axis("off")
    for ax, (scope, energy) in zip(axes.flat, results):
        if scope.trajectory is not None:
            plot_trajectory(ax, scope.trajectory, style)
        if energy.trajectory is not None:
            plot_trajectory(ax, energy.trajectory, style, dashed=True, draw_ends=False)
        ax.set_title(scope.task.replace("-", " → "))
        ax.set_aspect("equal")
        ax.set_xlabel("x [m]")
        ax.set_ylabel("y [m]")
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={"Software": None} if str(path).endswith(".png") else None)
    plt.close(fig)
    return path
