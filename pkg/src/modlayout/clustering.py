"""Generalized modularity: evaluation, incremental deltas and maximization.

Modularity of a clustering is

    sum_c  w_cc / w_VV  -  (w_c / w_V) ** 2

where ``w_cc`` is the edge weight inside cluster ``c`` (self-edges
included) and ``w_c`` its vertex weight.  The maximizer agglomerates
clusters greedily from singletons and then refines the result level by
level with single-vertex moves.  Clusters that hide two communities are
then bisected spectrally and the result is merged and refined again.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import LinearOperator, eigsh

from .graph import Clustering, InputError, Network, NumericError

__all__ = [
    "modularity",
    "join_delta",
    "move_delta",
    "ClusterGraph",
    "MergeHierarchy",
    "coarsen",
    "PRIORITIZERS",
    "agglomerate",
    "refine",
    "spectral_bisection",
    "maximize_modularity",
    "exhaustive_best_clustering",
    "restricted_growth_strings",
    "split_diagnostic",
]

_MOVE_EPS = 1e-14
_DENSE_EIG_LIMIT = 1500


def _totals(net: Network) -> tuple[float, float]:
    W, wV = net.total_edge_weight, net.total_vertex_weight
    if net.n == 0 or W <= 0 or wV <= 0:
        raise NumericError("modularity needs positive total edge and vertex weight")
    return W, wV


def _assignment(net: Network, clustering) -> np.ndarray:
    a = clustering.assignment if isinstance(clustering, Clustering) else np.asarray(clustering)
    if a.shape != (net.n,):
        raise InputError(f"clustering covers {a.size} vertices, network has {net.n}")
    return a


def modularity(net: Network, clustering: Clustering) -> float:
    W, wV = _totals(net)
    a = _assignment(net, clustering)
    k = int(a.max()) + 1
    intra = math.fsum(net.edge_w[a[net.edge_u] == a[net.edge_v]])
    wc = np.bincount(a, weights=net.vertex_weight, minlength=k)
    # correctly rounded sums make the value independent of cluster ids
    return intra / W - math.fsum(wc * wc) / (wV * wV)


def _cluster_stats(net: Network, a: np.ndarray, c: int, d: int) -> tuple[float, float, float]:
    in_c, in_d = a == c, a == d
    if not in_c.any() or not in_d.any():
        raise InputError(f"invalid cluster id {c if not in_c.any() else d}")
    cu, cv = a[net.edge_u], a[net.edge_v]
    w_cd = float(net.edge_w[((cu == c) & (cv == d)) | ((cu == d) & (cv == c))].sum())
    return w_cd, float(net.vertex_weight[in_c].sum()), float(net.vertex_weight[in_d].sum())


def join_delta(net: Network, clustering: Clustering, c: int, d: int) -> float:
    """Modularity gain of merging clusters ``c`` and ``d``."""
    if c == d:
        raise InputError("join needs two distinct clusters")
    W, wV = _totals(net)
    w_cd, w_c, w_d = _cluster_stats(net, _assignment(net, clustering), c, d)
    return w_cd / W - w_c * w_d / (0.5 * wV * wV)


def move_delta(net: Network, clustering: Clustering, v: int, target: int) -> float:
    """Modularity gain of moving vertex ``v`` into cluster ``target``.

    ``target`` may be any unused id (such as ``k``) to denote a new cluster.
    """
    W, wV = _totals(net)
    a = _assignment(net, clustering)
    if not 0 <= v < net.n:
        raise InputError(f"invalid vertex {v}")
    source = a[v]
    if target == source:
        return 0.0
    nbr, w = net.neighbors(v)
    k_src = float(w[a[nbr] == source].sum())
    k_dst = float(w[a[nbr] == target].sum())
    wv = float(net.vertex_weight[v])
    w_src = float(net.vertex_weight[a == source].sum())
    w_dst = float(net.vertex_weight[a == target].sum())
    return (k_dst - k_src) / W - 2.0 * wv * (w_dst - w_src + wv) / (wV * wV)


@dataclass(frozen=True, eq=False)
class ClusterGraph:
    """Network with one vertex per cluster of a finer network.

    ``mapping[x]`` is the coarse vertex of fine vertex ``x``.  Intra-cluster
    edge weight is kept as coarse self-edge weight.
    """

    network: Network
    mapping: np.ndarray


def coarsen(net: Network, assignment) -> ClusterGraph:
    a = np.asarray(assignment, dtype=np.int64)
    k = int(a.max()) + 1 if a.size else 0
    wc = np.bincount(a, weights=net.vertex_weight, minlength=k)
    coarse = Network.from_arrays([f"c{i}" for i in range(k)], wc,
                                 a[net.edge_u], a[net.edge_v], net.edge_w)
    return ClusterGraph(coarse, a)


@dataclass
class MergeHierarchy:
    """Coarsening levels from fine to coarse.

    ``levels[0]`` wraps the input network with the identity mapping; the
    mapping of ``levels[i]`` sends vertices of level ``i - 1`` to vertices
    of level ``i``.  ``top`` assigns the coarsest level's vertices to the
    final clusters.
    """

    levels: list[ClusterGraph]
    top: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def compose(self) -> np.ndarray:
        a = np.asarray(self.top, dtype=np.int64)
        for lvl in reversed(self.levels[1:]):
            a = a[lvl.mapping]
        return a


def _agglomerate_network(g: Network, W: float, wV: float, prioritizer: str = "gain"):
    """Greedy merging on ``g``; returns the final ids and a snapshot at each halving."""
    n = g.n
    wc = g.vertex_weight.astype(float).tolist()
    adj: list[dict[int, float]] = [dict() for _ in range(n)]
    for u, v, w in zip(g.edge_u.tolist(), g.edge_v.tolist(), g.edge_w.tolist()):
        if u != v:
            adj[u][v] = adj[u].get(v, 0.0) + w
            adj[v][u] = adj[v].get(u, 0.0) + w
    rep = np.arange(n)              # cluster id of each vertex of g
    active = n
    snap_at = n // 2
    half_sq = 0.5 * wV * wV
    by_density = prioritizer == "density"
    version = [0] * n

    def entry(c: int, d: int, w_cd: float):
        delta = w_cd / W - wc[c] * wc[d] / half_sq
        if delta <= 0:
            return None
        if by_density:
            wcd = wc[c] * wc[d]
            delta = delta / wcd if wcd > 0 else np.inf
        return (-delta, c, d, version[c], version[d])

    # max priority first, ties to the smallest (c, d); stale entries are skipped
    heap = [e for c in range(n) for d, w in adj[c].items() if d > c
            for e in [entry(c, d, w)] if e is not None]
    heapq.heapify(heap)
    snapshots = []
    while heap:
        _, c, d, vc, vd = heapq.heappop(heap)
        if vc != version[c] or vd != version[d]:
            continue
        for x, w in adj[d].items():
            if x == c:
                continue
            adj[c][x] = adj[c].get(x, 0.0) + w
            adj[x][c] = adj[x].get(c, 0.0) + w
            del adj[x][d]
        del adj[c][d]
        adj[d] = {}
        wc[c] += wc[d]
        wc[d] = 0.0
        version[c] += 1
        version[d] += 1
        for x, w in adj[c].items():
            e = entry(min(c, x), max(c, x), w)
            if e is not None:
                heapq.heappush(heap, e)
        rep[rep == d] = c
        active -= 1
        if active <= snap_at:
            snapshots.append(rep.copy())
            snap_at = active // 2
    return rep, snapshots


def _dense(a: np.ndarray) -> np.ndarray:
    _, inv = np.unique(a, return_inverse=True)
    return inv.astype(np.int64)


PRIORITIZERS = ("gain", "density")


def agglomerate(net: Network, start: Clustering | None = None,
                prioritizer: str = "gain") -> tuple[MergeHierarchy, Clustering]:
    """Merge connected cluster pairs while some join has positive gain.

    Among pairs with positive gain the merged pair maximizes the gain
    (``prioritizer="gain"``) or the gain divided by ``w_c * w_d``
    (``"density"``), which holds back merges into already heavy clusters.
    Starts from singletons, or from ``start`` if given.  Scanning visits
    pairs in increasing ``(c, d)`` order and keeps the first maximum, so
    ties go to the smallest pair of ids.
    """
    if prioritizer not in PRIORITIZERS:
        raise InputError(f"unknown prioritizer {prioritizer!r}")
    W, wV = _totals(net)
    levels = [ClusterGraph(net, np.arange(net.n))]
    base = net
    if start is not None:
        cg = coarsen(net, _assignment(net, start))
        levels.append(cg)
        base = cg.network
    rep, snapshots = _agglomerate_network(base, W, wV, prioritizer)
    prev = np.arange(base.n)        # base vertex -> vertex of the last level
    for snap in snapshots[:-1] if snapshots and np.array_equal(snapshots[-1], rep) else snapshots:
        # map last-level vertices to snapshot clusters
        dense = _dense(snap)
        lvl_map = np.zeros(levels[-1].network.n, dtype=np.int64)
        lvl_map[prev] = dense
        levels.append(coarsen(levels[-1].network, lvl_map))
        prev = dense
    final = _dense(rep)
    top = np.zeros(levels[-1].network.n, dtype=np.int64)
    top[prev] = final
    hierarchy = MergeHierarchy(levels, top)
    return hierarchy, Clustering(hierarchy.compose())


def _sweeps(g: Network, a: np.ndarray, W: float, wV: float, max_sweeps: int = 20) -> int:
    """Single-vertex moves on ``g`` in ascending order; returns the number of moves."""
    n = g.n
    wv = g.vertex_weight
    size = n + 1
    wc = np.bincount(a, weights=wv, minlength=size)
    count = np.bincount(a, minlength=size)
    inv_sq = 1.0 / (wV * wV)
    total = 0
    for _ in range(max_sweeps):
        moved = 0
        for v in range(n):
            src = int(a[v])
            nbr, w = g.neighbors(v)
            links: dict[int, float] = {}
            for x, wx in zip(a[nbr].tolist(), w.tolist()):
                links[x] = links.get(x, 0.0) + wx
            k_src = links.get(src, 0.0)
            base_w = wc[src] - wv[v]
            best_delta, best_c = _MOVE_EPS, src
            fresh = int(np.flatnonzero(count == 0)[0]) if count[src] > 1 else src
            cand = sorted(set(links) | {fresh})
            for c in cand:
                if c == src:
                    continue
                delta = (links.get(c, 0.0) - k_src) / W - 2.0 * wv[v] * (wc[c] - base_w) * inv_sq
                if delta > best_delta:
                    best_delta, best_c = delta, c
            if best_c != src:
                a[v] = best_c
                wc[src] -= wv[v]
                wc[best_c] += wv[v]
                count[src] -= 1
                count[best_c] += 1
                moved += 1
        total += moved
        if moved == 0:
            break
    return total


def refine(net: Network, hierarchy: MergeHierarchy) -> Clustering:
    """Project from the coarsest level down, moving single vertices at each level."""
    W, wV = _totals(net)
    a = np.asarray(hierarchy.top, dtype=np.int64).copy()
    for i in range(len(hierarchy.levels) - 1, -1, -1):
        g = hierarchy.levels[i].network
        _sweeps(g, a, W, wV)
        if i > 0:
            a = a[hierarchy.levels[i].mapping]
    return Clustering(_dense(a))


def spectral_bisection(sub: Network, W: float, wV: float) -> np.ndarray | None:
    """Two-way split of ``sub`` from the leading eigenvector of its modularity matrix.

    ``W`` and ``wV`` are the totals of the whole network, so the split is
    scored by its effect on the global modularity.  The sign split is then
    polished with single-vertex moves.  Returns dense ids, or ``None`` when
    no direction increases modularity.
    """
    n = sub.n
    if n < 2:
        return None
    w = sub.vertex_weight.astype(np.float64)
    A = coo_matrix((sub.edge_w, (sub.edge_u, sub.edge_v)), shape=(n, n)).tocsr()
    A = A + A.T
    scale = 2.0 / (wV * wV)
    # B_ij = A_ij / W - scale w_i w_j, minus the row sums of B on the diagonal
    row = np.asarray(A.sum(axis=1)).ravel() / W - scale * w * w.sum()
    if n <= _DENSE_EIG_LIMIT:
        B = A.toarray() / W - scale * np.outer(w, w)
        B[np.diag_indices(n)] -= row
        vals, vecs = np.linalg.eigh(B)
        top, x = vals[-1], vecs[:, -1]
    else:
        op = LinearOperator((n, n), dtype=np.float64,
                            matvec=lambda y: A @ y / W - scale * w * (w @ y) - row * y)
        vals, vecs = eigsh(op, k=1, which="LA", v0=np.linspace(1.0, 2.0, n))
        top, x = vals[0], vecs[:, 0]
    if top <= _MOVE_EPS:
        return None
    a = (x > 0).astype(np.int64)
    if a.min() == a.max():
        return None
    _sweeps(sub, a, W, wV)
    a = _dense(a)
    return a if a.max() > 0 else None


def _split_pass(net: Network, clustering: Clustering) -> Clustering | None:
    """Bisect every cluster whose split raises modularity; ``None`` if none does."""
    W, wV = _totals(net)
    a = clustering.assignment.copy()
    q = modularity(net, clustering)
    improved = False
    for members in clustering.members():
        if members.size < 2:
            continue
        part = spectral_bisection(net.subnetwork(members), W, wV)
        if part is None:
            continue
        trial = a.copy()
        trial[members[part > 0]] = a.max() + part[part > 0]
        trial_q = modularity(net, Clustering(_dense(trial)))
        if trial_q > q + 1e-12:
            a, q, improved = trial, trial_q, True
    return Clustering(_dense(a)) if improved else None


def _maximize_with(net: Network, prioritizer: str, max_rounds: int,
                   divisive: bool = False, spectral: bool = True) -> Clustering:
    clustering, q = None, -np.inf
    if divisive:
        clustering = Clustering(np.zeros(net.n, dtype=np.int64))
        while (split := _split_pass(net, clustering)) is not None:
            clustering = split
        q = modularity(net, clustering)
    for _ in range(max_rounds):
        hierarchy, _ = agglomerate(net, start=clustering, prioritizer=prioritizer)
        refined = refine(net, hierarchy)
        refined_q = modularity(net, refined)
        if clustering is not None and refined_q < q:
            refined, refined_q = clustering, q
        stable = clustering is not None and refined.same_partition(clustering)
        clustering, q = refined, refined_q
        if stable:
            split = _split_pass(net, clustering) if spectral else None
            if split is None:
                break
            clustering, q = split, modularity(net, split)
    return clustering


def maximize_modularity(net: Network, seed: int = 0, max_rounds: int = 20,
                        prioritizers=PRIORITIZERS,
                        spectral: bool = True) -> tuple[Clustering, float]:
    """Agglomeration plus multi-level refinement, repeated until stable.

    Each round agglomerates from the previous result and refines the new
    hierarchy.  Once a round changes nothing, clusters are offered a
    spectral bisection; any accepted split starts further rounds.  This
    runs once per merge prioritizer from singletons and once more from
    repeated bisection of the whole network.  The best result is kept
    (earlier candidates win ties).  ``spectral=False`` disables both the
    bisection step and the divisive start, leaving plain agglomeration and
    vertex-move refinement.  The procedure is
    deterministic; ``seed`` is accepted for interface symmetry with the
    layout engine.
    """
    _totals(net)
    candidates = [(prio, False) for prio in prioritizers]
    if spectral:
        candidates.append((prioritizers[0], True))
    best, best_q = None, -np.inf
    for prio, div in candidates:
        c = _maximize_with(net, prio, max_rounds, divisive=div, spectral=spectral)
        q = modularity(net, c)
        if q > best_q + 1e-12:
            best, best_q = c, q
    best = Clustering.from_labels(best.assignment)
    return best, modularity(net, best)


def restricted_growth_strings(n: int) -> np.ndarray:
    """All set partitions of ``n`` elements in lexicographic order, shape (Bell(n), n)."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    rgs = np.zeros((1, 1), dtype=np.int8)
    top = np.zeros(1, dtype=np.int8)       # max value used so far
    for _ in range(1, n):
        reps = top.astype(np.int64) + 2
        parent = np.repeat(np.arange(rgs.shape[0]), reps)
        offs = np.arange(reps.sum()) - np.repeat(np.cumsum(reps) - reps, reps)
        rgs = np.concatenate([rgs[parent], offs[:, None].astype(np.int8)], axis=1)
        top = np.maximum(top[parent], offs.astype(np.int8))
    return rgs


def exhaustive_best_clustering(net: Network, max_n: int = 12) -> tuple[Clustering, float]:
    """Modularity maximum by enumerating every set partition.

    Ties (within 1e-12) go to the lexicographically smallest
    restricted-growth string.
    """
    if net.n > max_n:
        raise InputError(f"exhaustive search limited to {max_n} vertices (got {net.n})")
    W, wV = _totals(net)
    n = net.n
    A = np.zeros((n, n))
    np.add.at(A, (net.edge_u, net.edge_v), net.edge_w)
    self_total = float(np.trace(A))
    iu, ju = np.triu_indices(n, 1)
    pair_w = A[iu, ju] + A[ju, iu]
    pair_vw = 2.0 * net.vertex_weight[iu] * net.vertex_weight[ju]
    diag_vw = float(np.sum(net.vertex_weight ** 2))
    rgs = restricted_growth_strings(n)
    best_q, best_i = -np.inf, 0
    chunk = 200_000
    for s in range(0, rgs.shape[0], chunk):
        block = rgs[s:s + chunk]
        same = block[:, iu] == block[:, ju]
        q = (same @ pair_w + self_total) / W - (same @ pair_vw + diag_vw) / (wV * wV)
        i = int(np.argmax(q))
        if q[i] > best_q + 1e-12:
            best_q, best_i = float(q[i]), s + i
    # earliest string within tolerance of the maximum
    for s in range(0, rgs.shape[0], chunk):
        block = rgs[s:s + chunk]
        same = block[:, iu] == block[:, ju]
        q = (same @ pair_w + self_total) / W - (same @ pair_vw + diag_vw) / (wV * wV)
        hits = np.flatnonzero(q >= best_q - 1e-12)
        if hits.size:
            best_i = s + int(hits[0])
            break
    best = Clustering(rgs[best_i].astype(np.int64))
    return best, modularity(net, best)


def split_diagnostic(net: Network, clustering: Clustering, max_size: int = 14) -> dict[int, float]:
    """Smallest density between two halves of each cluster, over all 2-splits.

    Only clusters with at most ``max_size`` vertices and positive weight on
    both sides are examined.  For a true modularity maximum each value is at
    least the density within the whole network; the heuristic does not
    guarantee this.
    """
    from .graph import density_between

    out = {}
    for c, members in enumerate(clustering.members()):
        if not 2 <= members.size <= max_size:
            continue
        rest = members[1:]
        best = np.inf
        for r in range(0, rest.size):
            for combo in itertools.combinations(rest.tolist(), r):
                T = [int(members[0]), *combo]
                U = sorted(set(members.tolist()) - set(T))
                if not U:
                    continue
                if net.vertex_weight[T].sum() <= 0 or net.vertex_weight[U].sum() <= 0:
                    continue
                best = min(best, density_between(net, T, U))
        if np.isfinite(best):
            out[c] = float(best)
    return out
