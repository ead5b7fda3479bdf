"""Planar DLO configurations, trajectories and the metrics defined on them.

Arrays are stored as float64 numpy arrays marked read-only, so a
``Configuration`` or ``Trajectory`` can be shared freely once built.
Indices are 0-based in code; the docs speak of nodes 1..N and steps 1..T.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class DegenerateGeometryError(ValueError):
    """A zero-length segment made a turning angle undefined."""


class DimensionMismatchError(ValueError):
    pass


def _frozen(a, shape_msg: str) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{shape_msg} contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Configuration:
    """One DLO shape: an ordered polyline of N >= 2 nodes, shape (N, 2)."""

    nodes: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.nodes, "configuration")
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError(f"configuration must have shape (N, 2), got {arr.shape}")
        if arr.shape[0] < 2:
            raise ValueError("configuration needs at least 2 nodes")
        object.__setattr__(self, "nodes", arr)

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    def segments(self) -> np.ndarray:
        return np.diff(self.nodes, axis=0)

    def segment_lengths(self) -> np.ndarray:
        return np.hypot(*self.segments().T)

    def to_list(self) -> list[list[float]]:
        return self.nodes.tolist()

    def __eq__(self, other):
        return isinstance(other, Configuration) and np.array_equal(self.nodes, other.nodes)

    def __len__(self):
        return self.n_nodes


@dataclass(frozen=True, eq=False)
class Trajectory:
    """T >= 2 configurations sharing one node count, stored as (T, N, 2)."""

    steps: np.ndarray

    def __post_init__(self):
        raw = self.steps
        if isinstance(raw, (list, tuple)) and raw and isinstance(raw[0], Configuration):
            if len({c.n_nodes for c in raw}) != 1:
                raise DimensionMismatchError("all configurations must share the same node count")
            raw = np.stack([c.nodes for c in raw])
        arr = _frozen(raw, "trajectory")
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise ValueError(f"trajectory must have shape (T, N, 2), got {arr.shape}")
        if arr.shape[0] < 2:
            raise ValueError("trajectory needs at least 2 steps")
        if arr.shape[1] < 2:
            raise ValueError("configurations need at least 2 nodes")
        object.__setattr__(self, "steps", arr)

    @property
    def T(self) -> int:
        return self.steps.shape[0]

    @property
    def n_nodes(self) -> int:
        return self.steps.shape[1]

    def __len__(self):
        return self.T

    def __getitem__(self, t: int) -> Configuration:
        return Configuration(self.steps[t])

    def __iter__(self):
        return (Configuration(s) for s in self.steps)

    def __eq__(self, other):
        return isinstance(other, Trajectory) and np.array_equal(self.steps, other.steps)

    def to_list(self) -> list:
        return self.steps.tolist()


@dataclass(frozen=True)
class DloParams:
    n_nodes: int
    segment_rest_length: float
    total_rest_length: float = field(init=False)

    def __post_init__(self):
        if self.n_nodes < 2:
            raise ValueError("n_nodes must be >= 2")
        if not (np.isfinite(self.segment_rest_length) and self.segment_rest_length > 0):
            raise ValueError("segment_rest_length must be positive and finite")
        object.__setattr__(
            self, "total_rest_length", (self.n_nodes - 1) * self.segment_rest_length
        )


def _check_same_n(a: int, b: int, what: str = "node count"):
    if a != b:
        raise DimensionMismatchError(f"{what} mismatch: {a} != {b}")


def arc_length(c: Configuration) -> float:
    """Sum of segment lengths of the polyline."""
    return float(np.sum(c.segment_lengths()))


def max_length_error(traj: Trajectory, params: DloParams) -> float:
    """Worst absolute deviation of any step's arc length from the rest length."""
    _check_same_n(traj.n_nodes, params.n_nodes)
    seg = np.diff(traj.steps, axis=1)
    lengths = np.hypot(seg[..., 0], seg[..., 1]).sum(axis=1)
    return float(np.max(np.abs(lengths - params.total_rest_length)))


def max_segment_excess(traj: Trajectory, rest_length: float) -> float:
    """Largest amount by which any segment at any step exceeds ``rest_length`` (0 if none)."""
    seg = np.diff(traj.steps, axis=1)
    return float(max(0.0, np.max(np.hypot(seg[..., 0], seg[..., 1])) - rest_length))


def turning_angles(c: Configuration) -> np.ndarray:
    """Signed CCW turning angle at each interior node, in (-pi, pi].

    Positive means the polyline turns left. Raises
    ``DegenerateGeometryError`` if any segment has zero length.
    """
    if c.n_nodes < 3:
        raise ValueError("turning angles need at least 3 nodes")
    seg = c.segments()
    if np.any(np.hypot(*seg.T) == 0.0):
        i = int(np.argmin(np.hypot(*seg.T)))
        raise DegenerateGeometryError(f"zero-length segment {i + 1}")
    a, b = seg[:-1], seg[1:]
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    dot = a[:, 0] * b[:, 0] + a[:, 1] * b[:, 1]
    ang = np.arctan2(cross, dot)
    # arctan2 returns -pi for (-0.0, negative); fold onto +pi
    ang[ang == -np.pi] = np.pi
    return ang


def build_guide(start: Configuration, target: Configuration, T: int) -> Trajectory:
    """Per-node linear interpolation from ``start`` to ``target`` over T steps."""
    _check_same_n(start.n_nodes, target.n_nodes)
    if T < 2:
        raise ValueError("T must be >= 2")
    s = np.arange(T, dtype=np.float64) / (T - 1)
    a, b = start.nodes, target.nodes
    steps = a[None] + s[:, None, None] * (b - a)[None]
    # pin the ends bit-for-bit: a + 1.0 * (b - a) need not equal b in floating point
    steps[0] = a
    steps[-1] = b
    return Trajectory(steps)


def shape_error(c: Configuration, target: Configuration) -> float:
    """Sum of squared node-to-target distances."""
    _check_same_n(c.n_nodes, target.n_nodes)
    return float(np.sum((c.nodes - target.nodes) ** 2))


def max_node_distance(c: Configuration, target: Configuration) -> float:
    _check_same_n(c.n_nodes, target.n_nodes)
    return float(np.max(np.hypot(*(c.nodes - target.nodes).T)))


def rigid_transform(points: np.ndarray, angle: float, offset=(0.0, 0.0)) -> np.ndarray:
    """Rotate ``points`` (..., 2) by ``angle`` about the origin, then translate."""
    c, s = np.cos(angle), np.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return np.asarray(points) @ rot.T + np.asarray(offset, dtype=np.float64)
