import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scope_dlo.energy import (
    EnergyModel,
    MinimizerOptions,
    MinimizerStatus,
    bend_energy,
    energy_report,
    internal_energy_and_gradient,
    solve_equilibrium,
    solve_trajectory,
    stretch_energy,
)
from scope_dlo.geometry import (
    Configuration,
    DegenerateGeometryError,
    DimensionMismatchError,
    rigid_transform,
    shape_error,
)

from .conftest import random_rope, shape


def naive_stretch(nodes, k_s, ls):
    total = 0.0
    for i in range(len(nodes) - 1):
        d = math.dist(nodes[i], nodes[i + 1])
        total += 0.5 * k_s * (d - ls) ** 2
    return total


def naive_bend(nodes, k_b, rest):
    total = 0.0
    for i in range(1, len(nodes) - 1):
        a1 = math.atan2(nodes[i][1] - nodes[i - 1][1], nodes[i][0] - nodes[i - 1][0])
        a2 = math.atan2(nodes[i + 1][1] - nodes[i][1], nodes[i + 1][0] - nodes[i][0])
        turn = (a2 - a1 + math.pi) % (2 * math.pi) - math.pi
        total += 0.5 * k_b * (turn - rest[i - 1]) ** 2
    return total


def perturbed(rng, n=12, scale=0.01):
    base = random_rope(rng, n, wiggle=0.6)
    return base, Configuration(base.nodes + rng.normal(scale=scale, size=base.nodes.shape))


# -- energies ---------------------------------------------------------------


def test_stretch_examples():
    line = Configuration([[0, 0], [0.1, 0], [0.2, 0]])
    model = EnergyModel.from_configuration(line, k_s=1.0, k_b=1.0, rest_segment_length=0.1)
    assert stretch_energy(line, model) == pytest.approx(0.0, abs=1e-30)
    long = Configuration([[0, 0], [0.1, 0], [0.22, 0]])
    assert stretch_energy(long, model) == pytest.approx(2e-4, rel=1e-12)


def test_bend_examples():
    line = Configuration([[0, 0], [1, 0], [2, 0], [3, 0]])
    model = EnergyModel.from_configuration(line, k_s=1.0, k_b=1.0)
    assert bend_energy(line, model) == 0.0
    bent = Configuration([[0, 0], [1, 0], [1, 1], [1, 2]])
    assert bend_energy(bent, model) == pytest.approx(0.5 * (math.pi / 2) ** 2, rel=1e-12)


def test_bend_rejects_degenerate():
    c = Configuration([[0, 0], [1, 0], [1, 0], [2, 0]])
    model = EnergyModel(1.0, 1.0, 1.0, np.zeros(2))
    with pytest.raises(DegenerateGeometryError):
        bend_energy(c, model)


def test_energies_match_naive_loops(rng):
    for _ in range(20):
        rest, c = perturbed(rng, scale=0.02)
        model = EnergyModel.from_configuration(rest, k_s=37.0, k_b=0.3, rest_segment_length=0.05)
        nodes = c.nodes.tolist()
        assert stretch_energy(c, model) == pytest.approx(naive_stretch(nodes, 37.0, 0.05), abs=1e-14)
        assert bend_energy(c, model) == pytest.approx(naive_bend(nodes, 0.3, model.rest_angles), abs=1e-12)


def test_model_validation():
    with pytest.raises(ValueError):
        EnergyModel(0.0, 1.0, 0.1, np.zeros(3))
    with pytest.raises(ValueError):
        EnergyModel(1.0, 1.0, 0.1, [0.0, -math.pi])
    with pytest.raises(DimensionMismatchError):
        bend_energy(shape("I", n=6), EnergyModel(1.0, 1.0, 0.05, np.zeros(3)))


def test_rest_shape_is_global_minimum():
    rest = shape("S")
    model = EnergyModel.from_configuration(rest)
    e, g = internal_energy_and_gradient(rest, model)
    assert e == pytest.approx(0.0, abs=1e-20)
    assert np.max(np.abs(g)) < 1e-8 * (model.k_s + model.k_b)


def central_difference(c, model, h=1e-6):
    x = c.nodes.copy()
    out = np.zeros_like(x)
    for idx in np.ndindex(*x.shape):
        xp, xm = x.copy(), x.copy()
        xp[idx] += h
        xm[idx] -= h
        ep = internal_energy_and_gradient(Configuration(xp), model)[0]
        em = internal_energy_and_gradient(Configuration(xm), model)[0]
        out[idx] = (ep - em) / (2 * h)
    return out


def test_gradient_matches_finite_differences(rng):
    worst = 0.0
    for _ in range(100):
        rest, c = perturbed(rng, n=int(rng.integers(3, 12)), scale=0.01)
        model = EnergyModel.from_configuration(
            rest, k_s=float(rng.uniform(1, 100)), k_b=float(rng.uniform(0.1, 2)),
        )
        g = internal_energy_and_gradient(c, model)[1]
        fd = central_difference(c, model)
        # relative per component, floored by the gradient scale to skip near-zero entries
        denom = np.maximum(np.abs(fd), 1e-3 * np.max(np.abs(fd)))
        worst = max(worst, float(np.max(np.abs(g - fd) / denom)))
    assert worst <= 1e-5


def test_gradient_rotation_equivariance(rng):
    rest, c = perturbed(rng)
    model = EnergyModel.from_configuration(rest)
    for angle in (0.3, -2.0, math.pi):
        moved = Configuration(rigid_transform(c.nodes, angle, (1.5, -0.2)))
        e0, g0 = internal_energy_and_gradient(c, model)
        e1, g1 = internal_energy_and_gradient(moved, model)
        assert e1 == pytest.approx(e0, rel=1e-12)
        np.testing.assert_allclose(g1, rigid_transform(g0, angle), atol=1e-10 * np.max(np.abs(g0)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.floats(-math.pi, math.pi), st.floats(-10, 10), st.floats(-10, 10))
def test_energy_frame_invariance_and_sign(seed, angle, dx, dy):
    rng = np.random.default_rng(seed)
    rest, c = perturbed(rng, n=8, scale=0.005)
    model = EnergyModel.from_configuration(rest, k_s=50.0, k_b=0.5)
    es, eb = stretch_energy(c, model), bend_energy(c, model)
    assert es >= 0 and eb >= 0
    moved = Configuration(rigid_transform(c.nodes, angle, (dx, dy)))
    assert stretch_energy(moved, model) + bend_energy(moved, model) == pytest.approx(es + eb, rel=1e-9)


# -- minimization -----------------------------------------------------------


def test_equilibrium_at_rest_target():
    rest = shape("QSW")
    model = EnergyModel.from_configuration(rest)
    out, report, stats = solve_equilibrium(rest, rest, model, lam=1.0)
    assert stats.converged and stats.iterations == 0
    assert out == rest
    assert report.objective == pytest.approx(0.0, abs=1e-20)


def test_lambda_sweep_tracks_target(rng):
    start = random_rope(rng, 10)
    target = Configuration(random_rope(rng, 10, wiggle=0.8).nodes + [0.05, 0.05])
    model = EnergyModel.from_configuration(start, k_s=1e-3, k_b=1e-3)
    errors = []
    for lam in (1.0, 1e2, 1e4, 1e6):
        out, report, stats = solve_equilibrium(start, target, model, lam,
                                               MinimizerOptions(grad_tol=1e-9 * lam))
        assert stats.converged
        assert report.shape_term == pytest.approx(shape_error(out, target))
        errors.append(report.shape_term)
    assert all(b < a for a, b in zip(errors, errors[1:]))
    assert errors[-1] <= 1e-6


def test_objective_never_increases(rng):
    start = shape("I")
    target = shape("S", origin=(0.05, 0.2))
    model = EnergyModel.from_configuration(start)
    _, _, stats = solve_equilibrium(start, target, model, 1e3, MinimizerOptions(record_history=True))
    h = np.array(stats.objective_history)
    assert len(h) > 1
    assert np.all(np.diff(h) <= 1e-12 * np.abs(h[:-1]))


def test_rest_is_fixed_point_without_shape_term(rng):
    rest = random_rope(rng, 9, wiggle=0.7)
    model = EnergyModel.from_configuration(rest)
    elsewhere = shape("L", n=9)
    out, _, stats = solve_equilibrium(rest, elsewhere, model, 0.0, MinimizerOptions(pin_endpoints=False))
    assert stats.converged
    np.testing.assert_allclose(out.nodes, rest.nodes, atol=1e-12)


def test_iteration_cap_reported():
    start, target = shape("I"), shape("S", origin=(0.05, 0.2))
    model = EnergyModel.from_configuration(start)
    out, _, stats = solve_equilibrium(start, target, model, 1e3, MinimizerOptions(max_iterations=2))
    assert stats.status is MinimizerStatus.MAX_ITERATIONS
    assert np.all(np.isfinite(out.nodes))


def test_equilibrium_argument_checks():
    a = shape("I")
    model = EnergyModel.from_configuration(a)
    with pytest.raises(ValueError):
        solve_equilibrium(a, a, model, -1.0)
    with pytest.raises(DimensionMismatchError):
        solve_equilibrium(a, shape("I", n=10), model)


def test_trajectory_constant_when_start_is_target():
    rest = shape("U")
    traj, stats = solve_trajectory(rest, rest, EnergyModel.from_configuration(rest), T=5)
    assert traj.T == 5 and len(stats) == 4
    assert all(step == rest for step in traj)


def test_trajectory_final_step_matches_direct_solve():
    start = shape("QSW")
    target = shape("HSW", origin=(0.05, 0.2), rotation=math.radians(-25))
    model = EnergyModel.from_configuration(start)
    traj, stats = solve_trajectory(start, target, model, T=10)
    assert all(s.converged for s in stats)
    assert traj[0] == start
    direct, report, _ = solve_equilibrium(traj[-2], target, model)
    np.testing.assert_allclose(traj.steps[-1], direct.nodes, atol=1e-6)
    for step in traj:
        e, _ = internal_energy_and_gradient(step, model)
        assert math.isfinite(e)


def test_report_fields_consistent(rng):
    rest, c = perturbed(rng)
    model = EnergyModel.from_configuration(rest, k_s=5.0, k_b=0.5)
    target = random_rope(rng, 12)
    r = energy_report(c, target, model, 3.0)
    assert r.stretch_total == pytest.approx(stretch_energy(c, model))
    assert r.bend_total == pytest.approx(bend_energy(c, model))
    assert r.objective == pytest.approx(r.stretch_total + r.bend_total + 3.0 * shape_error(c, target))
