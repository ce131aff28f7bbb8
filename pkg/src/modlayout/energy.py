"""The (a,r)-energy model: energy, pairwise forces, gradient, Barnes-Hut repulsion.

For a layout ``p`` the energy is

    sum_{u<v}  alpha * w_uv * phi_a(|p_u - p_v|)  -  beta * w_u * w_v * phi_r(|p_u - p_v|)

with ``phi_x(d) = d**(x+1) / (x+1)`` and ``phi_{-1}(d) = ln d``.  Attraction
pulls adjacent vertices together with magnitude ``w_uv * d**a``; repulsion
pushes every pair apart with magnitude ``w_u * w_v * d**r``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import kernels
from .graph import InputError, Layout, Network, NumericError
from .tree import FlatTree, build_tree

__all__ = [
    "EnergyParams",
    "BHTree",
    "phi",
    "ar_energy",
    "attraction_force",
    "repulsion_force",
    "net_force",
    "ar_forces",
    "ar_gradient",
    "two_vertex_optimal_distance",
    "coincidence_floor",
    "separate_coincident",
]


@dataclass(frozen=True)
class EnergyParams:
    a: float
    r: float
    attraction_factor: float = 1.0
    repulsion_factor: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.r)):
            raise InputError("exponents must be finite")
        if not self.a > self.r:
            raise InputError(f"energy model requires a > r (got a={self.a}, r={self.r})")
        if not (self.attraction_factor > 0 and self.repulsion_factor > 0):
            raise InputError("attraction and repulsion factors must be positive")


def phi(d, x: float):
    """Antiderivative of ``d**x``, with ``ln d`` at ``x == -1``."""
    d = np.asarray(d, dtype=np.float64)
    if x == -1.0:
        return np.log(d)
    return d ** (x + 1.0) / (x + 1.0)


class BHTree:
    """Barnes-Hut tree over the vertices weighted by their repulsion weight.

    Nodes whose box width is below ``theta`` times the distance from the
    query vertex to the nearest point of the box are treated as one body of
    their total weight at their centroid.  Nodes of zero weight are skipped.
    """

    def __init__(self, positions: np.ndarray, weights: np.ndarray,
                 theta: float = 0.5, leaf_size: int = 1):
        if theta < 0:
            raise InputError("theta must be nonnegative")
        self.positions = np.ascontiguousarray(positions, dtype=np.float64)
        self.weights = np.ascontiguousarray(weights, dtype=np.float64)
        self.theta = float(theta)
        self.flat: FlatTree = build_tree(self.positions, self.weights, leaf_size)

    @classmethod
    def for_layout(cls, net: Network, layout: Layout, theta: float = 0.5) -> "BHTree":
        return cls(layout.positions, net.vertex_weight, theta)

    @property
    def node_count(self) -> int:
        return self.flat.node_count

    def repulsion(self, r: float, beta: float = 1.0):
        """Approximate repulsive forces on all vertices and the repulsion energy."""
        return kernels.bh_repulsion(self.flat, self.positions, self.weights,
                                    float(r), float(beta), self.theta)


def _zero_pair_error(net: Network, zi: int, zj: int, what: str) -> NumericError:
    return NumericError(
        f"vertices {net.labels[zi]!r} and {net.labels[zj]!r} coincide; {what}")


def _check(net, layout) -> np.ndarray:
    pos = np.ascontiguousarray(layout.positions, dtype=np.float64)
    if pos.shape[0] != net.n:
        raise InputError(f"layout has {pos.shape[0]} positions for {net.n} vertices")
    return pos


def ar_energy(net: Network, layout: Layout, params: EnergyParams) -> float:
    """Exact (a,r)-energy, summed over unordered vertex pairs."""
    pos = _check(net, layout)
    if net.n < 2:
        return 0.0
    _, ea, zi, zj = kernels.attraction(pos, net.edge_u, net.edge_v, net.edge_w,
                                       params.a, params.attraction_factor)
    if zi >= 0 and params.a <= -1:
        raise _zero_pair_error(net, zi, zj, "attraction energy diverges")
    _, er, zi, zj = kernels.repulsion_exact(pos, net.vertex_weight, params.r,
                                            params.repulsion_factor)
    if zi >= 0 and params.r <= -1:
        raise _zero_pair_error(net, zi, zj, "repulsion energy diverges")
    e = ea + er
    if not math.isfinite(e):
        raise NumericError(f"energy is not finite ({e})")
    return float(e)


def _unit(p_u, p_v) -> tuple[np.ndarray, float]:
    diff = np.asarray(p_v, dtype=np.float64) - np.asarray(p_u, dtype=np.float64)
    d = float(np.linalg.norm(diff))
    if d == 0:
        raise NumericError("coincident positions: force direction undefined")
    return diff / d, d


def attraction_force(w_uv: float, p_u, p_v, a: float) -> np.ndarray:
    """Attractive force on ``u`` exerted by ``v``."""
    e, d = _unit(p_u, p_v)
    return w_uv * d ** a * e


def repulsion_force(w_u: float, w_v: float, p_u, p_v, r: float) -> np.ndarray:
    """Repulsive force on ``u`` exerted by ``v``."""
    e, d = _unit(p_u, p_v)
    return -(w_u * w_v * d ** r) * e


def net_force(net: Network, layout: Layout, params: EnergyParams, v: int,
              approx: BHTree | None = None) -> np.ndarray:
    """Total force on ``v``: exact attraction plus exact or tree-approximated repulsion."""
    pos = _check(net, layout)
    p = pos[v]
    force = np.zeros(pos.shape[1])
    nbr, w = net.neighbors(v)
    if nbr.size:
        diff = pos[nbr] - p
        d = np.linalg.norm(diff, axis=1)
        if np.any(d == 0):
            j = int(nbr[np.flatnonzero(d == 0)[0]])
            raise _zero_pair_error(net, v, j, "attraction force undefined")
        force += params.attraction_factor * ((w * d ** (params.a - 1.0)) @ diff)
    if net.vertex_weight[v] <= 0:
        return force
    if approx is not None:
        # the kernel sweeps all vertices; per-vertex queries are a diagnostic path
        fz, _, zi, zj = approx.repulsion(params.r, params.repulsion_factor)
        if zi >= 0 and (zi == v or zj == v):
            raise _zero_pair_error(net, zi, zj, "repulsion force undefined")
        return force + fz[v]
    others = np.flatnonzero((net.vertex_weight > 0) & (np.arange(net.n) != v))
    diff = p - pos[others]
    d = np.linalg.norm(diff, axis=1)
    if np.any(d == 0):
        j = int(others[np.flatnonzero(d == 0)[0]])
        raise _zero_pair_error(net, v, j, "repulsion force undefined")
    ww = net.vertex_weight[v] * net.vertex_weight[others]
    force += params.repulsion_factor * ((ww * d ** (params.r - 1.0)) @ diff)
    return force


def ar_forces(net: Network, pos: np.ndarray, params: EnergyParams,
              tree: BHTree | None = None) -> tuple[np.ndarray, float]:
    """Net forces on all vertices and the corresponding (approximate) energy.

    Coincident pairs whose force would be singular raise ``NumericError``.
    """
    pos = np.ascontiguousarray(pos, dtype=np.float64)
    fa, ea, zi, zj = kernels.attraction(pos, net.edge_u, net.edge_v, net.edge_w,
                                        params.a, params.attraction_factor)
    if zi >= 0 and params.a <= 0:
        raise _zero_pair_error(net, zi, zj, "attraction force singular")
    if tree is None:
        fr, er, zi, zj = kernels.repulsion_exact(pos, net.vertex_weight, params.r,
                                                 params.repulsion_factor)
    else:
        fr, er, zi, zj = kernels.bh_repulsion(tree.flat, pos, net.vertex_weight,
                                              params.r, params.repulsion_factor, tree.theta)
    if zi >= 0 and params.r <= 0:
        raise _zero_pair_error(net, zi, zj, "repulsion force singular")
    return fa + fr, float(ea + er)


def ar_gradient(net: Network, layout: Layout, params: EnergyParams) -> np.ndarray:
    """Analytic gradient of the exact energy, shape ``(n, d)``."""
    pos = _check(net, layout)
    if net.n < 2:
        return np.zeros_like(pos)
    f, e = ar_forces(net, pos, params)
    if not (math.isfinite(e) and np.all(np.isfinite(f))):
        raise NumericError("gradient is not finite")
    return -f


def two_vertex_optimal_distance(params: EnergyParams, w_uv: float, w_u: float,
                                w_v: float) -> float:
    """Energy-minimal distance of two vertices: a power of their density."""
    if w_uv <= 0:
        raise InputError("edge weight must be positive (optimum at infinite distance)")
    if w_u * w_v <= 0:
        raise InputError("vertex weights must be positive (optimum at zero distance)")
    density = (params.attraction_factor * w_uv) / (params.repulsion_factor * w_u * w_v)
    return density ** (-1.0 / (params.a - params.r))


def coincidence_floor(pos: np.ndarray) -> float:
    """Distance below which two vertices count as coincident."""
    if len(pos) == 0:
        return 1e-12
    diag = float(np.linalg.norm(np.ptp(pos, axis=0)))
    return max(1e-9 * diag, 1e-12)


def separate_coincident(pos: np.ndarray, seed: int = 0) -> np.ndarray:
    """Displace vertices lying closer than the coincidence floor to another.

    The higher-index vertex of each such pair moves by the floor distance
    along a seeded pseudo-random unit vector.
    """
    pos = np.array(pos, dtype=np.float64)
    if len(pos) < 2:
        return pos
    rng = np.random.default_rng(seed)
    for _ in range(8):
        eps = coincidence_floor(pos)
        pairs = cKDTree(pos).query_pairs(eps, output_type="ndarray")
        if pairs.size:
            d = np.linalg.norm(pos[pairs[:, 0]] - pos[pairs[:, 1]], axis=1)
            pairs = pairs[d < eps]
        if not pairs.size:
            break
        movers = np.unique(pairs.max(axis=1))
        dirs = rng.standard_normal((movers.size, pos.shape[1]))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        pos[movers] += eps * dirs
    return pos
