"""SVG rendering of layouts: glyph area shows vertex weight, glyph shape shows cluster."""
from __future__ import annotations

import math

import numpy as np

from .graph import Clustering, InputError, Layout, Network

__all__ = ["SHAPES", "PALETTE", "render_svg", "glyph_area"]

SHAPES = ("circle", "square", "triangle", "diamond", "pentagon", "hexagon", "star", "cross")
PALETTE = ("#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666")

CANVAS = 1000.0
MAX_RADIUS = 0.03 * CANVAS      # equivalent-circle radius of the heaviest glyph
MIN_AREA_FRACTION = 0.02        # floor for light and zero-weight vertices


def _unit_polygon(shape: str) -> np.ndarray:
    """Vertices of the shape at circumradius 1, first vertex pointing up."""
    if shape == "square":
        return np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]]) / math.sqrt(2)
    if shape == "cross":
        t = 0.35
        return np.array([[-t, -1], [t, -1], [t, -t], [1, -t], [1, t], [t, t],
                         [t, 1], [-t, 1], [-t, t], [-1, t], [-1, -t], [-t, -t]], dtype=float)
    if shape == "star":
        ang = -math.pi / 2 + np.arange(10) * math.pi / 5
        rad = np.where(np.arange(10) % 2 == 0, 1.0, 0.45)
        return np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)
    sides = {"triangle": 3, "diamond": 4, "pentagon": 5, "hexagon": 6}[shape]
    ang = -math.pi / 2 + np.arange(sides) * 2 * math.pi / sides
    return np.stack([np.cos(ang), np.sin(ang)], axis=1)


def _polygon_area(p: np.ndarray) -> float:
    x, y = p[:, 0], p[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def glyph_area(weight: float, max_weight: float) -> float:
    """Drawn area of a glyph, proportional to weight above a fixed floor."""
    top = math.pi * MAX_RADIUS ** 2
    frac = weight / max_weight if max_weight > 0 else 1.0
    return top * max(frac, MIN_AREA_FRACTION)


def _glyph(shape: str, x: float, y: float, area: float, color: str) -> tuple[str, float]:
    """SVG element and its circumradius."""
    if shape == "circle":
        rad = math.sqrt(area / math.pi)
        return f'<circle cx="{x:.4f}" cy="{y:.4f}" r="{rad:.4f}" fill="{color}"/>', rad
    unit = _unit_polygon(shape)
    scale = math.sqrt(area / _polygon_area(unit))
    pts = " ".join(f"{x + scale * px:.4f},{y + scale * py:.4f}" for px, py in unit)
    return f'<polygon points="{pts}" fill="{color}"/>', scale


def render_svg(net: Network, layout: Layout, clustering: Clustering | None = None,
               edges: bool = True) -> str:
    """Deterministic SVG document of the first two layout coordinates."""
    pos = np.asarray(layout.positions, dtype=np.float64)
    if pos.shape[0] != net.n:
        raise InputError("layout does not match the network")
    xy = np.zeros((net.n, 2))
    xy[:, : min(2, pos.shape[1])] = pos[:, :2]
    lo, span = xy.min(axis=0), np.ptp(xy, axis=0)
    extent = float(span.max()) if span.max() > 0 else 1.0
    pts = (xy - lo) * (CANVAS / extent)
    pts[:, 1] = CANVAS * span[1] / extent - pts[:, 1]      # y upward

    ids = clustering.assignment if clustering is not None else np.zeros(net.n, dtype=np.int64)
    wmax = float(net.vertex_weight.max()) if net.n else 0.0
    glyphs, radius = [], np.zeros(net.n)
    for v in range(net.n):
        c = int(ids[v])
        el, radius[v] = _glyph(SHAPES[c % len(SHAPES)], pts[v, 0], pts[v, 1],
                               glyph_area(float(net.vertex_weight[v]), wmax),
                               PALETTE[c % len(PALETTE)])
        glyphs.append(f'<g class="vertex" data-label="{_escape(net.labels[v])}" '
                      f'data-cluster="{c}">{el}</g>')

    x0 = float(np.min(pts[:, 0] - radius)) if net.n else 0.0
    x1 = float(np.max(pts[:, 0] + radius)) if net.n else 1.0
    y0 = float(np.min(pts[:, 1] - radius)) if net.n else 0.0
    y1 = float(np.max(pts[:, 1] + radius)) if net.n else 1.0
    margin = 0.05 * max(x1 - x0, y1 - y0)
    vb = (x0 - margin, y0 - margin, x1 - x0 + 2 * margin, y1 - y0 + 2 * margin)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" '
           f'viewBox="{vb[0]:.4f} {vb[1]:.4f} {vb[2]:.4f} {vb[3]:.4f}">']
    if edges and net.m:
        emax = float(net.edge_w.max())
        out.append('<g class="edges" stroke="#444444" stroke-width="1.5">')
        for u, v, w in zip(net.edge_u, net.edge_v, net.edge_w):
            if u == v:
                continue
            op = max(w / emax, 0.05)
            out.append(f'<line x1="{pts[u, 0]:.4f}" y1="{pts[u, 1]:.4f}" '
                       f'x2="{pts[v, 0]:.4f}" y2="{pts[v, 1]:.4f}" stroke-opacity="{op:.4f}"/>')
        out.append("</g>")
    out.append('<g class="vertices">')
    out.extend(glyphs)
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return (s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;"))
