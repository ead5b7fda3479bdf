import hashlib
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from scope_dlo.geometry import DimensionMismatchError, Trajectory
from scope_dlo.render import RenderStyle, render_svg

SVG = "{http://www.w3.org/2000/svg}"


def test_constant_trajectory(rng):
    nodes = rng.normal(size=(6, 2))
    svg = render_svg([Trajectory(np.stack([nodes] * 4))])
    root = ET.fromstring(svg.encode())
    lines = root.findall(f".//{SVG}polyline")
    assert len(lines) == 4
    assert len({p.get("points") for p in lines}) == 1
    assert [p.get("data-step") for p in lines] == ["1", "2", "3", "4"]


def test_colours_and_opacity(rng):
    style = RenderStyle()
    svg = render_svg([Trajectory(rng.normal(size=(5, 4, 2)))], style)
    lines = ET.fromstring(svg).findall(f".//{SVG}polyline")
    assert lines[0].get("stroke") == style.start_color
    assert lines[-1].get("stroke") == style.target_color
    mids = lines[1:-1]
    assert {p.get("stroke") for p in mids} == {style.intermediate_color}
    opacity = [float(p.get("stroke-opacity")) for p in mids]
    assert opacity == sorted(opacity) and len(set(opacity)) == 3


def test_overlay_dash_and_groups(rng):
    a, b = Trajectory(rng.normal(size=(4, 5, 2))), Trajectory(rng.normal(size=(4, 5, 2)))
    style = RenderStyle(baseline_dash_pattern="3,2")
    svg = render_svg([a, b], style)
    root = ET.fromstring(svg)
    groups = root.findall(f"{SVG}g")
    assert [g.get("class") for g in groups] == ["primary", "baseline"]
    assert groups[0].get("stroke-dasharray") is None
    assert groups[1].get("stroke-dasharray") == "3,2"
    assert svg.count('stroke-dasharray="3,2"') == 1


def test_points_fit_canvas(rng):
    style = RenderStyle(canvas_size=300, margin=20)
    svg = render_svg([Trajectory(rng.normal(scale=50, size=(3, 7, 2)))], style)
    pts = []
    for p in ET.fromstring(svg).findall(f".//{SVG}polyline"):
        pts += [tuple(map(float, xy.split(","))) for xy in p.get("points").split()]
    pts = np.array(pts)
    assert pts.min() >= 20 - 1e-3 and pts.max() <= 280 + 1e-3
    assert max(np.ptp(pts[:, 0]), np.ptp(pts[:, 1])) == pytest.approx(260, abs=2e-3)


def test_bytes_are_deterministic(rng):
    trajs = [Trajectory(rng.normal(size=(6, 8, 2))) for _ in range(2)]
    h1 = hashlib.sha256(render_svg(trajs).encode()).hexdigest()
    h2 = hashlib.sha256(render_svg([Trajectory(t.steps.copy()) for t in trajs]).encode()).hexdigest()
    assert h1 == h2


def test_node_count_mismatch(rng):
    with pytest.raises(DimensionMismatchError):
        render_svg([Trajectory(rng.normal(size=(3, 4, 2))), Trajectory(rng.normal(size=(3, 5, 2)))])


def test_empty_input():
    with pytest.raises(ValueError):
        render_svg([])


@pytest.mark.parametrize("kw", [
    dict(start_color="red"), dict(target_color="#12345"), dict(canvas_size=0),
    dict(margin=400), dict(stroke_width=0), dict(baseline_dash_pattern="dashed"),
])
def test_style_validation(kw):
    with pytest.raises(ValueError):
        RenderStyle(**kw)


def test_style_from_dict():
    assert RenderStyle.from_dict({"start_color": "#000"}).start_color == "#000"
    with pytest.raises(ValueError, match="unknown"):
        RenderStyle.from_dict({"colour": "#000"})


def test_suite_svg_well_formed(suite_results):
    for scope, energy in suite_results:
        root = ET.fromstring(render_svg([scope.trajectory, energy.trajectory]))
        assert len(root.findall(f".//{SVG}polyline")) == 20
