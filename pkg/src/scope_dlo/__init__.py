"""Convex trajectory planning for planar deformable linear objects, with an energy baseline."""

from .energy import (
    EnergyModel,
    EnergyReport,
    MinimizerOptions,
    bend_energy,
    internal_energy_and_gradient,
    solve_equilibrium,
    solve_trajectory,
    stretch_energy,
)
from .geometry import (
    Configuration,
    DegenerateGeometryError,
    DimensionMismatchError,
    DloParams,
    Trajectory,
    arc_length,
    build_guide,
    max_length_error,
    shape_error,
    turning_angles,
)
from .scope import (
    InfeasibleBoundaryError,
    ScopeProblem,
    ScopeSolution,
    SolverSettings,
    SolveStatus,
    assemble,
    midpoint_objective,
    objective_value,
    plan,
    smoothness_objective,
    solve,
)
from .shapes import ShapeKind, ShapeSpec, generate_shape

__version__ = "0.1.0"
