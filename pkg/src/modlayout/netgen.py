"""Deterministic generators for fixture and benchmark networks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Clustering, InputError, Network, build_network, subdivide_edge

__all__ = [
    "PlantedPartitionSpec",
    "planted_partition",
    "figure2_networks",
    "two_triangles",
    "two_vertex_network",
    "clique_chain",
]


@dataclass(frozen=True)
class PlantedPartitionSpec:
    cluster_count: int = 8
    vertices_per_cluster: int = 16
    p_in: float = 1.0
    p_out: float = 0.2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.cluster_count < 1 or self.vertices_per_cluster < 1:
            raise InputError("cluster count and size must be >= 1")
        if not 0.0 <= self.p_out <= self.p_in <= 1.0:
            raise InputError(f"need 0 <= p_out <= p_in <= 1 (got p_in={self.p_in}, p_out={self.p_out})")


def planted_partition(spec: PlantedPartitionSpec) -> tuple[Network, Clustering]:
    """Block random network with unit weights and its generating clustering.

    Vertex ``i`` belongs to group ``i // vertices_per_cluster``; every pair is
    drawn independently with probability ``p_in`` inside a group and
    ``p_out`` across groups.
    """
    k, s = spec.cluster_count, spec.vertices_per_cluster
    n = k * s
    truth = np.repeat(np.arange(k), s)
    iu, ju = np.triu_indices(n, 1)
    p = np.where(truth[iu] == truth[ju], spec.p_in, spec.p_out)
    keep = np.random.default_rng(spec.seed).random(iu.size) < p
    labels = [str(i) for i in range(n)]
    net = Network.from_arrays(labels, np.ones(n), iu[keep], ju[keep], np.ones(int(keep.sum())))
    return net, Clustering(truth)


def two_triangles(vertex_weight_mode="unit") -> Network:
    """Two unit triangles a-b-c and d-e-f joined by the unit edge c-d."""
    edges = [("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 1.0),
             ("d", "e", 1.0), ("e", "f", 1.0), ("d", "f", 1.0), ("c", "d", 1.0)]
    return build_network(edges, vertex_weight_mode)


def figure2_networks() -> list[Network]:
    """Two triangles joined directly, and joined through a weight-0 midpoint."""
    direct = two_triangles("unit")
    return [direct, subdivide_edge(direct, direct.index("c"), direct.index("d"), label="t")]


def two_vertex_network(w_uv: float, w_u: float, w_v: float) -> Network:
    if min(w_uv, w_u, w_v) < 0:
        raise InputError("weights must be nonnegative")
    e = [0] if w_uv > 0 else []
    return Network.from_arrays(["u", "v"], np.array([w_u, w_v], dtype=float),
                               np.array(e, dtype=np.int64), np.array([1] * len(e), dtype=np.int64),
                               np.array([w_uv] * len(e), dtype=float))


def clique_chain(clique_size: int, bridged: int = 2, ballast: int = 0,
                 vertex_weight_mode="degree") -> Network:
    """``bridged`` unit cliques joined in a path by single unit edges, plus
    ``ballast`` further disjoint cliques of the same size.

    Clique ``j`` holds vertices ``j*clique_size .. (j+1)*clique_size - 1``.
    """
    if clique_size < 1 or bridged < 1 or ballast < 0:
        raise InputError("invalid clique chain shape")
    edges = []
    for j in range(bridged + ballast):
        base = j * clique_size
        for u in range(clique_size):
            for v in range(u + 1, clique_size):
                edges.append((str(base + u), str(base + v), 1.0))
    for j in range(bridged - 1):
        edges.append((str((j + 1) * clique_size - 1), str((j + 1) * clique_size), 1.0))
    labels = [str(i) for i in range((bridged + ballast) * clique_size)]
    return build_network(edges, vertex_weight_mode, vertices=labels)
