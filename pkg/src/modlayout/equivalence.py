"""Clusterings as simplex layouts, normalized energy, and consistency diagnostics.

Placing each cluster at a corner of a unit regular simplex turns a
clustering into a layout whose normalized (a,r)-energy

    sum_{u<v}  w_uv / w_VV * d**(a+1)  -  w_u w_v / (w_V**2 / 2) * d**(r+1)

is exactly the negated modularity, for every ``a, r > -1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .clustering import modularity
from .energy import EnergyParams
from .graph import Clustering, InputError, Layout, Network, NumericError

__all__ = [
    "simplex_corners",
    "clustering_to_simplex_layout",
    "normalized_energy",
    "normalized_params",
    "EquivalenceCheck",
    "verify_equivalence",
    "ConsistencyReport",
    "consistency_report",
    "separation_ratio",
    "cluster_densities",
]

EQUIVALENCE_TOL = 1e-10
_BLOCK = 512


def simplex_corners(k: int) -> np.ndarray:
    """Corners of a regular simplex with unit edges, shape ``(k, max(k - 1, 1))``.

    Corner ``i`` sits above the centroid of corners ``0..i-1`` along a new
    axis, at the height that makes its distance to them 1.
    """
    if k < 1:
        raise InputError("need at least one corner")
    dim = max(k - 1, 1)
    corners = np.zeros((k, dim))
    for i in range(1, k):
        g = corners[:i].mean(axis=0)
        rad2 = float(np.sum((g - corners[0]) ** 2))
        corners[i] = g
        corners[i, i - 1] = math.sqrt(1.0 - rad2)
    return corners


def clustering_to_simplex_layout(clustering: Clustering) -> Layout:
    return Layout(simplex_corners(clustering.k)[clustering.assignment])


def _row_blocks(n: int):
    for s in range(0, n, _BLOCK):
        yield s, min(n, s + _BLOCK)


def _upper_distances(pos: np.ndarray, s: int, e: int):
    """Distances from rows ``s:e`` to all vertices, masked to pairs ``i < j``."""
    diff = pos[s:e, None, :] - pos[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    upper = np.arange(pos.shape[0])[None, :] > np.arange(s, e)[:, None]
    return dist, upper


def normalized_energy(net: Network, layout: Layout, a: float, r: float) -> float:
    """Energy with weights normalized by ``w_VV`` and ``w_V**2 / 2``.

    Coincident vertices contribute nothing when ``a, r > -1``; outside that
    domain a coincident pair with positive weight is an error.
    """
    W, wV = net.total_edge_weight, net.total_vertex_weight
    if W <= 0 or wV <= 0:
        raise NumericError("normalized energy needs positive total edge and vertex weight")
    pos = np.asarray(layout.positions, dtype=np.float64)
    if pos.shape[0] != net.n:
        raise InputError(f"layout has {pos.shape[0]} positions for {net.n} vertices")

    off = net.edge_u != net.edge_v
    eu, ev, ew = net.edge_u[off], net.edge_v[off], net.edge_w[off]
    d = np.linalg.norm(pos[eu] - pos[ev], axis=1)
    if a <= -1 and np.any(d == 0):
        k = int(np.flatnonzero(d == 0)[0])
        raise NumericError(f"coincident adjacent vertices {net.labels[eu[k]]!r}, "
                           f"{net.labels[ev[k]]!r} with a <= -1")
    attr = float(np.sum(ew[d > 0] * d[d > 0] ** (a + 1.0))) / W

    w = net.vertex_weight
    rep = 0.0
    for s, e in _row_blocks(net.n):
        dist, upper = _upper_distances(pos, s, e)
        ww = w[s:e, None] * w[None, :]
        live = upper & (ww > 0)
        if r <= -1 and np.any(live & (dist == 0)):
            i, j = np.argwhere(live & (dist == 0))[0]
            raise NumericError(f"coincident vertices {net.labels[s + i]!r}, "
                               f"{net.labels[j]!r} with r <= -1")
        ok = live & (dist > 0)
        rep += float(np.sum(ww[ok] * dist[ok] ** (r + 1.0)))
    return attr - rep / (0.5 * wV * wV)


def normalized_params(net: Network, a: float, r: float) -> EnergyParams:
    """Factors under which ``ar_energy`` equals ``normalized_energy``.

    The potential ``d**(x+1) / (x+1)`` carries a ``1/(x+1)`` that the
    normalized form lacks, so the factors absorb ``a + 1`` and ``r + 1``.
    """
    if not (a > -1 and r > -1):
        raise InputError("normalized parameters need a > -1 and r > -1")
    W, wV = net.total_edge_weight, net.total_vertex_weight
    if W <= 0 or wV <= 0:
        raise NumericError("normalization needs positive total edge and vertex weight")
    return EnergyParams(a, r, (a + 1.0) / W, (r + 1.0) / (0.5 * wV * wV))


class EquivalenceCheck(NamedTuple):
    passed: bool
    residual: float
    modularity: float
    energy: float


def verify_equivalence(net: Network, clustering: Clustering, a: float, r: float,
                       tol: float = EQUIVALENCE_TOL) -> EquivalenceCheck:
    q = modularity(net, clustering)
    e = normalized_energy(net, clustering_to_simplex_layout(clustering), a, r)
    residual = abs(q + e)
    return EquivalenceCheck(residual <= tol, residual, q, e)


def separation_ratio(net: Network, layout: Layout, clustering: Clustering) -> float | None:
    """Mean inter-cluster over mean intra-cluster distance, pairs weighted by ``w_u * w_v``.

    Returns None when either mean is undefined or the intra mean is 0.
    """
    pos = np.asarray(layout.positions, dtype=np.float64)
    a = clustering.assignment
    w = net.vertex_weight
    sums = np.zeros(2)      # weighted distance: intra, inter
    mass = np.zeros(2)
    for s, e in _row_blocks(net.n):
        dist, upper = _upper_distances(pos, s, e)
        ww = np.where(upper, w[s:e, None] * w[None, :], 0.0)
        same = a[s:e, None] == a[None, :]
        for idx, mask in ((0, same), (1, ~same)):
            mass[idx] += ww[mask].sum()
            sums[idx] += (ww[mask] * dist[mask]).sum()
    if mass[0] <= 0 or mass[1] <= 0:
        return None
    intra, inter = sums[0] / mass[0], sums[1] / mass[1]
    if intra <= 0:
        return None
    return float(inter / intra)


@dataclass(frozen=True)
class ConsistencyReport:
    separation_ratio: float | None
    density_matrix: np.ndarray       # between on the off-diagonal, within on the diagonal
    density_within: np.ndarray
    modularity: float
    normalized_energy: float | None

    def items(self) -> list[tuple[str, object]]:
        """Flat key-value view for text and tabular output."""
        out: list[tuple[str, object]] = [
            ("separation_ratio", self.separation_ratio),
            ("modularity", self.modularity),
            ("normalized_energy", self.normalized_energy),
        ]
        k = self.density_matrix.shape[0]
        for c in range(k):
            out.append((f"density_within[{c}]", self.density_within[c]))
        for c in range(k):
            for d in range(c + 1, k):
                out.append((f"density_between[{c},{d}]", self.density_matrix[c, d]))
        return out


def cluster_densities(net: Network, clustering: Clustering) -> np.ndarray:
    """Density between cluster pairs, with density within on the diagonal; NaN if undefined."""
    a = clustering.assignment
    k = clustering.k
    wc = np.bincount(a, weights=net.vertex_weight, minlength=k)
    E = np.zeros((k, k))
    np.add.at(E, (a[net.edge_u], a[net.edge_v]), net.edge_w)
    E = E + E.T - np.diag(np.diag(E))
    with np.errstate(divide="ignore", invalid="ignore"):
        D = E / np.outer(wc, wc)
        np.fill_diagonal(D, np.diag(E) / (0.5 * wc * wc))
    D[~np.isfinite(D)] = np.nan
    return D


def consistency_report(net: Network, layout: Layout, clustering: Clustering,
                       a: float, r: float) -> ConsistencyReport:
    if len(layout) != net.n or len(clustering) != net.n:
        raise InputError("layout, clustering and network must cover the same vertices")
    D = cluster_densities(net, clustering)
    try:
        e = normalized_energy(net, layout, a, r)
    except NumericError:
        e = None
    return ConsistencyReport(
        separation_ratio=separation_ratio(net, layout, clustering),
        density_matrix=D,
        density_within=np.diag(D).copy(),
        modularity=modularity(net, clustering),
        normalized_energy=e,
    )
