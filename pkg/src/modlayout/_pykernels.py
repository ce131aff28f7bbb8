"""Pure numpy force/energy kernels (fallback for the compiled extension).

Every kernel returns ``(forces, energy, zi, zj)``.  Pairs at distance zero
contribute nothing; the first such pair with positive weight is reported
as ``(zi, zj)``, or ``(-1, -1)`` if there is none.
"""
from __future__ import annotations

import numpy as np

_BLOCK = 256


def _phi(d: np.ndarray, x: float) -> np.ndarray:
    if x == -1.0:
        return np.log(d)
    return d ** (x + 1.0) / (x + 1.0)


def attraction(pos, eu, ev, ew, a, alpha):
    pos = np.asarray(pos, dtype=np.float64)
    forces = np.zeros_like(pos)
    off = eu != ev
    eu, ev, ew = eu[off], ev[off], ew[off]
    diff = pos[ev] - pos[eu]
    dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    zero = dist == 0
    zi = zj = -1
    if zero.any():
        k = int(np.flatnonzero(zero)[0])
        zi, zj = int(eu[k]), int(ev[k])
    ok = ~zero
    d = dist[ok]
    f = (alpha * ew[ok] * d ** (a - 1.0))[:, None] * diff[ok]
    np.add.at(forces, eu[ok], f)
    np.add.at(forces, ev[ok], -f)
    energy = float(alpha * np.sum(ew[ok] * _phi(d, a)))
    return forces, energy, zi, zj


def repulsion_exact(pos, w, r, beta):
    pos = np.asarray(pos, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    n = pos.shape[0]
    forces = np.zeros_like(pos)
    energy = 0.0
    zi = zj = -1
    for s in range(0, n, _BLOCK):
        e = min(n, s + _BLOCK)
        diff = pos[s:e, None, :] - pos[None, :, :]          # from j to i
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        ww = w[s:e, None] * w[None, :]
        rows = np.arange(s, e)
        dist[rows - s, rows] = np.inf                         # self pairs
        zero = (dist == 0) & (ww > 0)
        if zi < 0 and zero.any():
            i, j = np.argwhere(zero)[0]
            zi, zj = int(i + s), int(j)
        ok = (dist > 0) & np.isfinite(dist) & (ww > 0)
        dd = np.where(ok, dist, 1.0)
        mag = np.where(ok, beta * ww * dd ** (r - 1.0), 0.0)
        forces[s:e] += np.einsum("ij,ijk->ik", mag, diff)
        energy -= beta * float(np.sum(np.where(ok, ww * _phi(dd, r), 0.0)))
    return forces, 0.5 * energy, zi, zj


def bh_repulsion(tree, pos, w, r, beta, theta):
    """Barnes-Hut repulsion, vectorized over frontier (vertex, node) pairs.

    A node is summarized by its centroid when its box width is below
    ``theta`` times the distance from the vertex to the nearest point of the
    box; a vertex inside a box therefore always opens it.
    """
    pos = np.asarray(pos, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    forces = np.zeros_like(pos)
    energy = 0.0
    zi = zj = -1
    qi = np.flatnonzero(w > 0)                  # zero-weight vertices feel nothing
    qk = np.zeros(qi.size, dtype=np.int64)
    while qi.size:
        keep = tree.mass[qk] > 0
        qi, qk = qi[keep], qk[keep]
        if not qi.size:
            break
        gap = np.maximum(np.abs(pos[qi] - tree.center[qk]) - tree.half[qk, None], 0.0)
        box_dist = np.sqrt(np.einsum("ij,ij->i", gap, gap))
        accept = 2.0 * tree.half[qk] < theta * box_dist
        diff = pos[qi] - tree.com[qk]
        dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        if accept.any():
            i, k, dv, dd = qi[accept], qk[accept], diff[accept], dist[accept]
            ww = w[i] * tree.mass[k]
            np.add.at(forces, i, (beta * ww * dd ** (r - 1.0))[:, None] * dv)
            energy -= beta * float(np.sum(ww * _phi(dd, r)))
        rest = ~accept
        qi, qk = qi[rest], qk[rest]
        nchild = tree.child_ptr[qk + 1] - tree.child_ptr[qk]
        leaf = nchild == 0
        if leaf.any():
            li, lk = qi[leaf], qk[leaf]
            cnt = tree.leaf_ptr[lk + 1] - tree.leaf_ptr[lk]
            pi = np.repeat(li, cnt)
            offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
            pj = tree.leaf_pts[np.repeat(tree.leaf_ptr[lk], cnt) + offs]
            m = (pi != pj) & (w[pj] > 0)
            pi, pj = pi[m], pj[m]
            dv = pos[pi] - pos[pj]
            dd = np.sqrt(np.einsum("ij,ij->i", dv, dv))
            zero = dd == 0
            if zi < 0 and zero.any():
                k0 = int(np.flatnonzero(zero)[0])
                zi, zj = int(pi[k0]), int(pj[k0])
            ok = ~zero
            pi, pj, dv, dd = pi[ok], pj[ok], dv[ok], dd[ok]
            ww = w[pi] * w[pj]
            np.add.at(forces, pi, (beta * ww * dd ** (r - 1.0))[:, None] * dv)
            energy -= beta * float(np.sum(ww * _phi(dd, r)))
        inner = ~leaf
        qi, qk, nchild = qi[inner], qk[inner], nchild[inner]
        start = tree.child_ptr[qk]
        offs = np.arange(nchild.sum()) - np.repeat(np.cumsum(nchild) - nchild, nchild)
        qk = tree.child_idx[np.repeat(start, nchild) + offs]
        qi = np.repeat(qi, nchild)
    return forces, 0.5 * energy, zi, zj
