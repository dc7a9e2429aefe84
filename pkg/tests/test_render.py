import re

import numpy as np
import pytest

from floorbeam import FloorbeamError, render_svg, rudy_grid
from floorbeam.placement import PlacementState

from conftest import make_circuit


def _module_rects(svg):
    return re.findall(r'<rect class="module" x="([0-9.]+)" y="([0-9.]+)"', svg)


def test_single_module_svg():
    c = make_circuit([(2, 1)])
    svg = render_svg(c, {0: (0.0, 0.0)})
    assert svg.startswith("<svg ")
    assert svg.endswith("</svg>\n")
    assert len(_module_rects(svg)) == 1
    assert ">0</text>" in svg


def test_identical_inputs_identical_bytes():
    c = make_circuit([(2, 1), (1, 3)])
    coords = {0: (0.0, 0.0), 1: (2.0, 0.0)}
    assert render_svg(c, coords) == render_svg(c, coords)
    assert render_svg(c, coords, scale=4.0) != render_svg(c, coords)


def test_y_axis_flips_to_screen_coordinates():
    # module 1 sits above module 0, so it must appear with a smaller svg y
    c = make_circuit([(1, 1), (1, 1)])
    svg = render_svg(c, {0: (0.0, 0.0), 1: (0.0, 1.0)}, scale=8.0, margin=10.0)
    rects = _module_rects(svg)
    assert len(rects) == 2
    y_low, y_high = float(rects[0][1]), float(rects[1][1])
    assert y_high < y_low
    assert (y_high, y_low) == (10.0, 18.0)


def test_net_flylines_toggle():
    c = make_circuit([(1, 1), (1, 1)], nets=[(0, 1)])
    coords = {0: (0.0, 0.0), 1: (3.0, 0.0)}
    with_nets = render_svg(c, coords, show_nets=True)
    without = render_svg(c, coords, show_nets=False)
    assert "<polyline" in with_nets and "<polyline" not in without
    # a net with fewer than two placed pins draws nothing
    partial = render_svg(c, {0: (0.0, 0.0)}, show_nets=True)
    assert "<polyline" not in partial


def test_rudy_overlay_peaks_at_hottest_cell():
    c = make_circuit(
        [(1, 1), (1, 1), (4, 4)], nets=[(0, 1)]
    )
    s = PlacementState.from_coords(
        c, {0: (0.0, 0.0), 1: (1.0, 0.0), 2: (2.0, 0.0)}
    )
    rg = rudy_grid(s, G=4)
    svg = render_svg(c, dict(zip(s.placed, zip(s.xs[list(s.placed)], s.ys[list(s.placed)]))), rudy=rg)
    ops = [float(v) for v in re.findall(r'fill-opacity="([0-9.]+)"/>', svg)]
    heat = [v for v in ops if v != 0.55]
    assert heat and max(heat) == pytest.approx(0.6, abs=1e-3)
    n_hot = int((rg.cells == rg.cells.max()).sum())
    assert sum(1 for v in heat if v == max(heat)) == n_hot


def test_render_errors():
    c = make_circuit([(1, 1)])
    with pytest.raises(FloorbeamError):
        render_svg(c, {})
    with pytest.raises(FloorbeamError):
        render_svg(c, {5: (0.0, 0.0)})
    with pytest.raises(FloorbeamError):
        render_svg(c, {0: (0.0, 0.0)}, scale=0.0)
