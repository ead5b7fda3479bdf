"""Scene and trajectory JSON files.

A scene looks like::

    {"n_nodes": 15, "segment_length": 0.05, "T": 10, "w1": 1.0, "w2": 0.1,
     "start":  {"kind": "QSW", "origin": [0, 0], "rotation": 0.0},
     "target": {"kind": "HSW", "origin": [0.05, 0.1], "rotation": -0.436},
     "energy": {"k_s": 1e5, "k_b": 0.01, "lambda": 1000}}

``aspect`` may be given per shape; ``w1``, ``w2``, ``T`` and ``energy`` are
optional. Instead of a generated shape, ``start`` or ``target`` may list its
nodes directly as ``{"nodes": [[x, y], ...]}``. Trajectories are written as ``{"trajectory": [T][N][2], ...}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .energy import DEFAULT_K_B, DEFAULT_K_S, DEFAULT_LAMBDA
from .geometry import Configuration, DloParams, Trajectory
from .shapes import ShapeSpec, generate_shape


class SceneError(ValueError):
    pass


@dataclass(frozen=True)
class EnergyConfig:
    k_s: float = DEFAULT_K_S
    k_b: float = DEFAULT_K_B
    lam: float = DEFAULT_LAMBDA

    def to_dict(self) -> dict:
        return {"k_s": self.k_s, "k_b": self.k_b, "lambda": self.lam}


@dataclass(frozen=True)
class Scene:
    start: ShapeSpec | Configuration
    target: ShapeSpec | Configuration
    T: int = 10
    w1: float = 1.0
    w2: float = 0.1
    energy: EnergyConfig = field(default_factory=EnergyConfig)

    n_nodes: int = 0
    segment_length: float = 0.0

    def __post_init__(self):
        for entry in (self.start, self.target):
            if isinstance(entry, ShapeSpec):
                object.__setattr__(self, "n_nodes", entry.n_nodes)
                object.__setattr__(self, "segment_length", entry.segment_length)

    @property
    def params(self) -> DloParams:
        return DloParams(self.n_nodes, self.segment_length)

    def configurations(self) -> tuple[Configuration, Configuration]:
        """Start and target node arrays, generating parametric shapes as needed."""
        return realize(self.start), realize(self.target)

    def to_dict(self) -> dict:
        return {
            "n_nodes": self.n_nodes,
            "segment_length": self.segment_length,
            "start": _entry_dict(self.start),
            "target": _entry_dict(self.target),
            "T": self.T,
            "w1": self.w1,
            "w2": self.w2,
            "energy": self.energy.to_dict(),
        }


def realize(entry: ShapeSpec | Configuration) -> Configuration:
    return generate_shape(entry) if isinstance(entry, ShapeSpec) else entry


def _entry_dict(entry) -> dict:
    return entry.to_dict() if isinstance(entry, ShapeSpec) else {"nodes": entry.to_list()}


def _parse_entry(d, n: int, ls: float) -> ShapeSpec | Configuration:
    if isinstance(d, dict) and "nodes" in d:
        c = Configuration(d["nodes"])
        if c.n_nodes != n:
            raise ValueError(f"explicit shape has {c.n_nodes} nodes, scene declares {n}")
        return c
    return ShapeSpec.from_dict(d, n, ls)


def parse_scene(data: dict) -> Scene:
    if not isinstance(data, dict):
        raise SceneError("scene must be a JSON object")
    try:
        n = data["n_nodes"]
        ls = float(data["segment_length"])
        start_d, target_d = data["start"], data["target"]
    except KeyError as exc:
        raise SceneError(f"scene is missing required field {exc.args[0]!r}") from None
    if not isinstance(n, int) or isinstance(n, bool):
        raise SceneError(f"n_nodes must be an integer, got {n!r}")
    try:
        start = _parse_entry(start_d, n, ls)
        target = _parse_entry(target_d, n, ls)
        energy_d = data.get("energy", {})
        energy = EnergyConfig(
            float(energy_d.get("k_s", DEFAULT_K_S)),
            float(energy_d.get("k_b", DEFAULT_K_B)),
            float(energy_d.get("lambda", DEFAULT_LAMBDA)),
        )
        scene = Scene(
            start=start,
            target=target,
            T=int(data.get("T", 10)),
            w1=float(data.get("w1", 1.0)),
            w2=float(data.get("w2", 0.1)),
            energy=energy,
            n_nodes=n,
            segment_length=ls,
        )
        scene.params  # validates n_nodes and segment_length
    except (KeyError, TypeError, ValueError) as exc:
        raise SceneError(f"invalid scene: {exc}") from None
    if scene.T < 2:
        raise SceneError(f"T must be >= 2, got {scene.T}")
    if scene.w1 < 0 or scene.w2 < 0 or scene.w1 + scene.w2 <= 0:
        raise SceneError("weights must be non-negative with a positive sum")
    return scene


def _read_json(path) -> object:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError(
            f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None


def load_scene(path) -> Scene:
    return parse_scene(_read_json(path))


def write_json(path, payload: dict):
    Path(path).write_text(json.dumps(payload, indent=1) + "\n")


def load_trajectory(path) -> tuple[Trajectory, dict]:
    """Read a trajectory file; returns the trajectory and the remaining metadata."""
    data = _read_json(path)
    if isinstance(data, dict):
        if "trajectory" not in data:
            raise SceneError(f"{path}: no 'trajectory' field")
        meta = {k: v for k, v in data.items() if k != "trajectory"}
        steps = data["trajectory"]
    else:
        meta, steps = {}, data
    try:
        return Trajectory(np.asarray(steps, dtype=np.float64)), meta
    except ValueError as exc:
        raise SceneError(f"{path}: {exc}") from None
