"""Deterministic SVG rendering of trajectories.

The first trajectory is drawn solid; any further ones (baselines) are
drawn dashed. Within a trajectory the first step uses the start colour,
the last step the target colour, and intermediate steps the intermediate
colour with opacity rising with t. Coordinates are printed at fixed
precision, so identical inputs give identical bytes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, fields

import numpy as np

from .geometry import DimensionMismatchError, Trajectory

_HEX = re.compile(r"^#(?:[0-9a-fA-F]{3}|[0-9a-fA-F]{6})$")


@dataclass(frozen=True)
class RenderStyle:
    start_color: str = "#d62728"
    target_color: str = "#1f77b4"
    intermediate_color: str = "#2ca02c"
    baseline_dash_pattern: str = "6,4"
    canvas_size: int = 600
    margin: int = 30
    stroke_width: float = 2.0

    def __post_init__(self):
        for name in ("start_color", "target_color", "intermediate_color"):
            if not _HEX.match(getattr(self, name)):
                raise ValueError(f"{name} must be a hex colour like #1f77b4")
        if self.canvas_size <= 0:
            raise ValueError("canvas_size must be positive")
        if self.margin < 0 or 2 * self.margin >= self.canvas_size:
            raise ValueError("margin must be non-negative and smaller than half the canvas")
        if self.stroke_width <= 0:
            raise ValueError("stroke_width must be positive")
        if not re.match(r"^[0-9.]+(?:[ ,][0-9.]+)*$", self.baseline_dash_pattern):
            raise ValueError("baseline_dash_pattern must be a list of numbers")

    @classmethod
    def from_dict(cls, d: dict) -> RenderStyle:
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown style fields: {', '.join(sorted(unknown))}")
        return cls(**d)


def _opacity(t: int, T: int) -> float:
    return 0.25 + 0.65 * t / (T - 1)


def render_svg(trajectories, style: RenderStyle | None = None) -> str:
    style = style or RenderStyle()
    trajectories = list(trajectories)
    if not trajectories:
        raise ValueError("nothing to render")
    n = trajectories[0].n_nodes
    for tr in trajectories[1:]:
        if tr.n_nodes != n:
            raise DimensionMismatchError(
                f"overlaid trajectories have {n} and {tr.n_nodes} nodes"
            )

    pts = np.concatenate([tr.steps.reshape(-1, 2) for tr in trajectories])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1]))
    inner = style.canvas_size - 2 * style.margin
    scale = inner / span if span > 0 else 1.0
    # centre the drawing on the canvas
    pad = style.margin + 0.5 * (inner - (hi - lo) * scale)
    size = style.canvas_size

    def project(xy: np.ndarray) -> str:
        x = pad[0] + (xy[:, 0] - lo[0]) * scale
        y = size - (pad[1] + (xy[:, 1] - lo[1]) * scale)
        return " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(x, y))

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="#ffffff"/>',
    ]
    for k, tr in enumerate(trajectories):
        role = "primary" if k == 0 else "baseline"
        dash = "" if k == 0 else f' stroke-dasharray="{style.baseline_dash_pattern}"'
        out.append(
            f'<g id="trajectory-{k}" class="{role}" fill="none" '
            f'stroke-width="{style.stroke_width:g}" stroke-linejoin="round"{dash}>'
        )
        T = tr.T
        for t in range(T):
            if t == 0:
                color, opacity = style.start_color, 1.0
            elif t == T - 1:
                color, opacity = style.target_color, 1.0
            else:
                color, opacity = style.intermediate_color, _opacity(t, T)
            out.append(
                f'<polyline data-step="{t + 1}" stroke="{color}" '
                f'stroke-opacity="{opacity:.3f}" points="{project(tr.steps[t])}"/>'
            )
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
