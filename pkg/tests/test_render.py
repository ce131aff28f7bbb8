import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from modlayout.graph import Clustering, Layout, build_network
from modlayout.render import SHAPES, render_svg

NS = {"s": "http://www.w3.org/2000/svg"}


def _area(el):
    if el.tag.endswith("circle"):
        return math.pi * float(el.get("r")) ** 2
    pts = np.array([[float(x) for x in p.split(",")] for p in el.get("points").split()])
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _glyphs(svg):
    root = ET.fromstring(svg)
    return [g[0] for g in root.iterfind(".//s:g[@class='vertex']", NS)], root


def test_single_vertex_centered():
    net = build_network([("x", "x")], "unit")
    glyphs, root = _glyphs(render_svg(net, Layout(np.array([[3.0, 4.0]]))))
    assert len(glyphs) == 1
    x0, y0, w, h = map(float, root.get("viewBox").split())
    cx, cy = float(glyphs[0].get("cx")), float(glyphs[0].get("cy"))
    assert cx == pytest.approx(x0 + w / 2, rel=1e-6)
    assert cy == pytest.approx(y0 + h / 2, rel=1e-6)


@pytest.mark.parametrize("shape_index", range(len(SHAPES)))
def test_area_proportional_to_weight(shape_index):
    # filler singletons push the heavy pair onto cluster id `shape_index`
    fillers = [(f"z{i}", f"z{i}") for i in range(shape_index)]
    net = build_network([("a", "b")] + fillers, [4.0, 1.0] + [1.0] * shape_index)
    c = Clustering(np.array([shape_index, shape_index] + list(range(shape_index))))
    layout = Layout(np.arange(2 * net.n, dtype=float).reshape(net.n, 2))
    glyphs, _ = _glyphs(render_svg(net, layout, c))
    assert _area(glyphs[0]) / _area(glyphs[1]) == pytest.approx(4.0, rel=0.01)


def test_zero_weight_vertex_gets_floor_glyph():
    net = build_network([("a", "b")], [1.0, 0.0])
    glyphs, _ = _glyphs(render_svg(net, Layout(np.array([[0.0, 0], [1, 1]]))))
    assert _area(glyphs[1]) > 0


def test_three_clusters_three_shapes():
    net = build_network([(str(i), str(i + 1)) for i in range(5)], "unit")
    c = Clustering(np.array([0, 0, 1, 1, 2, 2]))
    svg = render_svg(net, Layout(np.random.default_rng(0).normal(size=(6, 2))), c)
    glyphs, _ = _glyphs(svg)
    kinds = {(g.tag, len(g.get("points", "").split())) for g in glyphs}
    assert len(kinds) == 3
    assert len(SHAPES) >= 6


def test_all_shapes_distinct():
    k = len(SHAPES)
    net = build_network([(str(i), str(i)) for i in range(k)], "unit")
    svg = render_svg(net, Layout(np.arange(2 * k, dtype=float).reshape(k, 2)),
                     Clustering(np.arange(k)))
    glyphs, _ = _glyphs(svg)
    kinds = {(g.tag, len(g.get("points", "").split())) for g in glyphs}
    # square and diamond share a vertex count; compare their point sets instead
    assert len(kinds) >= k - 1
    assert len({g.get("points") for g in glyphs}) == k


def test_edges_opacity_and_viewbox_margin():
    net = build_network([("a", "b", 1.0), ("b", "c", 4.0)], "unit")
    svg = render_svg(net, Layout(np.array([[0.0, 0], [1, 0], [2, 1]])))
    root = ET.fromstring(svg)
    ops = sorted(float(l.get("stroke-opacity")) for l in root.iterfind(".//s:line", NS))
    assert ops == pytest.approx([0.25, 1.0])
    x0, y0, w, h = map(float, root.get("viewBox").split())
    glyphs, _ = _glyphs(svg)
    xs = [float(g.get("cx")) for g in glyphs]
    rs = [float(g.get("r")) for g in glyphs]
    left = min(x - r for x, r in zip(xs, rs))
    right = max(x + r for x, r in zip(xs, rs))
    assert left - x0 == pytest.approx(0.05 * (right - left), rel=1e-3)
    assert "<line" not in render_svg(net, Layout(np.zeros((3, 2)) + np.arange(3)[:, None]),
                                     edges=False)


def test_deterministic_bytes():
    net = build_network([("a", "b"), ("b", "c")], "degree")
    layout = Layout(np.array([[0.0, 0], [1, 2], [3, 1]]))
    c = Clustering(np.array([0, 1, 1]))
    assert render_svg(net, layout, c) == render_svg(net, layout, c)
