"""Flat-array 2^d-ary space partitioning tree for Barnes-Hut summation.

The tree is built level by level with vectorized numpy operations.  Nodes
are numbered breadth-first; the children of a node are contiguous in
``child_idx[child_ptr[k]:child_ptr[k + 1]]`` and the vertices stored at a
leaf are ``leaf_pts[leaf_ptr[k]:leaf_ptr[k + 1]]`` (empty for internal
nodes).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import InputError

MAX_TREE_DIM = 8


@dataclass(frozen=True, eq=False)
class FlatTree:
    center: np.ndarray      # (N, d) box centers
    half: np.ndarray        # (N,) half box widths
    mass: np.ndarray        # (N,) total repulsion weight
    com: np.ndarray         # (N, d) weight-weighted centroid
    child_ptr: np.ndarray   # (N + 1,)
    child_idx: np.ndarray
    leaf_ptr: np.ndarray    # (N + 1,)
    leaf_pts: np.ndarray

    @property
    def node_count(self) -> int:
        return int(self.half.size)

    def is_leaf(self, k: int) -> bool:
        return self.child_ptr[k] == self.child_ptr[k + 1]


def build_tree(pos: np.ndarray, weight: np.ndarray, leaf_size: int = 1,
               max_depth: int = 40) -> FlatTree:
    pos = np.ascontiguousarray(pos, dtype=np.float64)
    weight = np.ascontiguousarray(weight, dtype=np.float64)
    n, d = pos.shape
    if d > MAX_TREE_DIM:
        raise InputError(f"tree approximation supports dimension <= {MAX_TREE_DIM}")
    if n == 0:
        raise ValueError("cannot build a tree over zero points")
    lo, hi = pos.min(axis=0), pos.max(axis=0)
    half0 = 0.5 * float(np.max(hi - lo))
    half0 = half0 * (1 + 1e-12) if half0 > 0 else 0.5

    centers = [0.5 * (lo + hi)[None, :]]
    halves = [np.array([half0])]
    parents = [np.array([-1], dtype=np.int64)]
    counts_all = [np.array([n], dtype=np.int64)]
    leaf_of = np.zeros(n, dtype=np.int64)         # deepest node holding each point

    active = np.arange(n)                          # points in splittable nodes
    node_of = np.zeros(n, dtype=np.int64)          # node of each active point
    base = 0                                       # global id of first node at the level
    n_nodes = 1
    weights_pow = 1 << np.arange(d)
    for depth in range(max_depth):
        lvl_counts = counts_all[-1]
        split = lvl_counts > leaf_size
        if depth + 1 >= max_depth or not split.any():
            break
        local = node_of[active] - base
        active = active[split[local]]
        if active.size == 0:
            break
        local = node_of[active] - base
        ctr = centers[-1][local]
        code = (pos[active] >= ctr).astype(np.int64) @ weights_pow
        key = local * (1 << d) + code
        uniq, inv, cnt = np.unique(key, return_inverse=True, return_counts=True)
        par_local = uniq >> d
        ucode = uniq & ((1 << d) - 1)
        bits = ((ucode[:, None] >> np.arange(d)) & 1).astype(np.float64) * 2 - 1
        h = halves[-1][par_local] * 0.5
        ctrs = centers[-1][par_local] + bits * h[:, None]
        new_base = n_nodes
        node_of[active] = new_base + inv
        leaf_of[active] = new_base + inv
        centers.append(ctrs)
        halves.append(h)
        parents.append(base + par_local)
        counts_all.append(cnt)
        base = new_base
        n_nodes += uniq.size

    center = np.concatenate(centers)
    half = np.concatenate(halves)
    parent = np.concatenate(parents)
    N = half.size

    # aggregate mass and centroid through ancestors
    mass = np.zeros(N)
    wsum = np.zeros((N, d))
    np.add.at(mass, leaf_of, weight)
    np.add.at(wsum, leaf_of, pos * weight[:, None])
    sizes = np.array([h.size for h in halves])
    starts = np.concatenate([[0], np.cumsum(sizes)])
    for lvl in range(len(sizes) - 1, 0, -1):
        ks = np.arange(starts[lvl], starts[lvl + 1])
        np.add.at(mass, parent[ks], mass[ks])
        np.add.at(wsum, parent[ks], wsum[ks])
    com = center.copy()
    nz = mass > 0
    com[nz] = wsum[nz] / mass[nz, None]

    # children are created in increasing id order, grouped by parent
    child_idx = np.arange(1, N, dtype=np.int64)
    child_ptr = np.zeros(N + 1, dtype=np.int64)
    np.add.at(child_ptr, parent[1:] + 1, 1)
    child_ptr = np.cumsum(child_ptr)

    order = np.argsort(leaf_of, kind="stable")
    leaf_pts = order.astype(np.int64)
    leaf_ptr = np.searchsorted(leaf_of[order], np.arange(N + 1)).astype(np.int64)
    return FlatTree(center, half, mass, com, child_ptr, child_idx, leaf_ptr, leaf_pts)
