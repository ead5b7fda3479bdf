"""Canonical benchmark shapes: I, L, QSW, HSW, U and S.

Curved kinds are defined as unit-width parametric curves. Nodes are placed
by marching equal chords along the curve, and the chord is chosen by root
finding so the last node lands exactly on the curve end. The result is
then scaled to the requested segment length, so every segment has exactly
the rest length. All curved families bend to the left (counter-clockwise)
when walked from node 1, which keeps shape pairs with the same sense of
curvature from folding through each other when interpolated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .geometry import Configuration, rigid_transform

DENSE_SAMPLES = 100_000


class ShapeKind(str, Enum):
    QSW = "QSW"
    HSW = "HSW"
    U = "U"
    S = "S"
    I = "I"  # noqa: E741
    L = "L"


# Amplitude-to-width ratio of the sine families, depth-to-width ratio of U.
DEFAULT_ASPECT = {
    ShapeKind.QSW: 0.5,
    ShapeKind.HSW: 0.25,
    ShapeKind.S: 0.2,
    ShapeKind.U: 0.3,
}


@dataclass(frozen=True)
class ShapeSpec:
    kind: ShapeKind
    n_nodes: int
    segment_length: float
    origin: tuple[float, float] = (0.0, 0.0)
    rotation: float = 0.0
    aspect: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ShapeKind(self.kind))
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        vals = [self.segment_length, self.rotation, *self.origin]
        if self.aspect is not None:
            vals.append(self.aspect)
        if not all(math.isfinite(float(v)) for v in vals):
            raise ValueError("shape spec fields must be finite")
        if len(self.origin) != 2:
            raise ValueError("origin must be a 2-vector")
        if int(self.n_nodes) != self.n_nodes or self.n_nodes < 3:
            raise ValueError(f"n_nodes must be an integer >= 3, got {self.n_nodes}")
        if self.segment_length <= 0:
            raise ValueError("segment_length must be positive")
        if self.aspect is not None and self.aspect < 0:
            raise ValueError("aspect must be non-negative")

    @property
    def shape_aspect(self) -> float:
        return DEFAULT_ASPECT.get(self.kind, 0.0) if self.aspect is None else self.aspect

    @classmethod
    def from_dict(cls, d: dict, n_nodes: int, segment_length: float) -> ShapeSpec:
        return cls(
            kind=d["kind"],
            n_nodes=n_nodes,
            segment_length=segment_length,
            origin=tuple(d.get("origin", (0.0, 0.0))),
            rotation=float(d.get("rotation", 0.0)),
            aspect=d.get("aspect"),
        )

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value, "origin": list(self.origin), "rotation": self.rotation}
        if self.aspect is not None:
            d["aspect"] = self.aspect
        return d


def curve_function(kind: ShapeKind, aspect: float):
    """Unit-width parametric curve ``u -> (x, y)`` for u in [0, 1], starting at the origin."""
    kind = ShapeKind(kind)
    if kind is ShapeKind.QSW:
        return lambda u: np.stack([u, -aspect * np.sin(0.5 * np.pi * u)], axis=-1)
    if kind is ShapeKind.HSW:
        return lambda u: np.stack([u, -aspect * np.sin(np.pi * u)], axis=-1)
    if kind is ShapeKind.S:
        return lambda u: np.stack([u, aspect * np.sin(2.0 * np.pi * u)], axis=-1)
    if kind is ShapeKind.U:
        return _u_curve(aspect)
    raise ValueError(f"{kind.value} is not a curved family")


def _u_curve(depth: float):
    # Circular bowl from (0, 0) to (1, 0) sagging ``depth`` below the chord. Up to
    # depth 0.5 it is a single arc; deeper bowls are a semicircle with vertical tails.
    if depth <= 0.0:
        raise ValueError("U depth must be positive")
    if depth <= 0.5:
        sweep = 4.0 * np.arctan(2.0 * depth)
        radius = 0.5 / np.sin(0.5 * sweep)
        tail = 0.0
    else:
        sweep = np.pi
        radius = 0.5
        tail = depth - 0.5
    arc = sweep * radius
    total = arc + 2.0 * tail
    center_y = radius * np.cos(0.5 * sweep) - tail

    def f(u):
        s = np.asarray(u, dtype=np.float64) * total
        out = np.empty(s.shape + (2,))
        left = s < tail
        right = s > tail + arc
        mid = ~(left | right)
        out[left, 0] = 0.0
        out[left, 1] = -s[left]
        a = -0.5 * np.pi - 0.5 * sweep + (s[mid] - tail) / radius
        out[mid, 0] = 0.5 + radius * np.cos(a)
        out[mid, 1] = center_y + radius * np.sin(a)
        out[right, 0] = 1.0
        out[right, 1] = s[right] - total
        return out

    return f


def _march(curve, u_dense, pts, cum, chord: float, n_chords: int):
    """Walk ``n_chords`` equal chords along the curve; None if it runs off the end."""
    us = [0.0]
    p = pts[0]
    idx = 0
    n = len(u_dense)
    for _ in range(n_chords):
        # chord <= arc, so the crossing lies at arc distance >= chord
        j0 = int(np.searchsorted(cum, cum[idx] + chord * (1.0 - 1e-6))) - 2
        j0 = max(j0, idx + 1)
        if j0 >= n:
            return None
        j1 = min(n, j0 + 64)
        while True:
            d = np.hypot(*(pts[j0:j1] - p).T)
            hit = np.nonzero(d >= chord)[0]
            if hit.size:
                j = j0 + int(hit[0])
                break
            if j1 >= n:
                return None
            j0, j1 = j1, min(n, j1 + 4096)
        lo = max(u_dense[j - 1], us[-1])
        hi = u_dense[j]
        pc = p

        def gap(u):
            q = curve(np.array([u]))[0]
            return math.hypot(q[0] - pc[0], q[1] - pc[1]) - chord

        u_new = hi if gap(hi) == 0.0 else brentq(gap, lo, hi, xtol=1e-17, rtol=1e-15)
        us.append(u_new)
        p = curve(np.array([u_new]))[0]
        idx = j - 1
    return np.array(us)


def _resample_curve(kind: ShapeKind, aspect: float, n_nodes: int) -> np.ndarray:
    """Equal-chord nodes on the unit curve, rescaled so each chord has length 1."""
    curve = curve_function(kind, aspect)
    u_dense = np.linspace(0.0, 1.0, DENSE_SAMPLES)
    pts = curve(u_dense)
    cum = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))])
    end = pts[-1]
    n_seg = n_nodes - 1

    def residual(c):
        us = _march(curve, u_dense, pts, cum, c, n_seg - 1)
        if us is None:
            return -c
        q = curve(np.array([us[-1]]))[0]
        return math.hypot(end[0] - q[0], end[1] - q[1]) - c

    hi = cum[-1] / n_seg
    lo = 0.5 * hi
    while residual(lo) <= 0:
        lo *= 0.5
    chord = brentq(residual, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
    us = _march(curve, u_dense, pts, cum, chord, n_seg - 1)
    nodes = np.vstack([curve(us), end[None]])
    return nodes / chord


def generate_shape(spec: ShapeSpec) -> Configuration:
    """Build the configuration for ``spec``: node 1 at the origin, every segment at rest length."""
    n, ls = spec.n_nodes, spec.segment_length
    if spec.kind is ShapeKind.I:
        unit = np.column_stack([np.arange(n, dtype=np.float64), np.zeros(n)])
    elif spec.kind is ShapeKind.L:
        k = (n - 1) // 2
        idx = np.arange(n, dtype=np.float64)
        unit = np.column_stack([np.minimum(idx, k), np.maximum(idx - k, 0.0)])
    else:
        unit = _resample_curve(spec.kind, spec.shape_aspect, n)
    nodes = rigid_transform(unit * ls, spec.rotation, spec.origin)
    return Configuration(nodes)
