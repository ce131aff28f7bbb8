"""Weighted undirected networks, clusterings and layouts.

Vertices are addressed externally by string labels and internally by dense
indices ``0..n-1``.  Edge weights are keyed on unordered pairs, self-pairs
included, and stored once per pair with ``u <= v``.
"""
from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "InputError",
    "NumericError",
    "Network",
    "Clustering",
    "Layout",
    "build_network",
    "degree",
    "density_between",
    "density_within",
    "subdivide_edge",
    "double_network",
    "connected_components",
]


class InputError(ValueError):
    """Malformed or semantically invalid input data."""


class NumericError(ArithmeticError):
    """A computation produced a non-finite or undefined value."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Network:
    """Immutable weighted network.

    Parameters
    ----------
    labels : tuple of str
        One label per vertex.
    vertex_weight : ndarray, shape (n,)
        Nonnegative vertex weights.
    edge_u, edge_v, edge_w : ndarray, shape (m,)
        Canonical edge list with ``edge_u <= edge_v`` and ``edge_w > 0``,
        sorted by ``(edge_u, edge_v)``.  Self-edges have ``edge_u == edge_v``.
    """

    labels: tuple[str, ...]
    vertex_weight: np.ndarray
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_w: np.ndarray
    total_vertex_weight: float = field(init=False)
    total_edge_weight: float = field(init=False)
    _index: dict[str, int] = field(init=False, repr=False)
    _indptr: np.ndarray = field(init=False, repr=False)
    _nbr: np.ndarray = field(init=False, repr=False)
    _nbr_w: np.ndarray = field(init=False, repr=False)
    _self_w: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        n = len(self.labels)
        vw = np.asarray(self.vertex_weight, dtype=np.float64)
        eu = np.asarray(self.edge_u, dtype=np.int64)
        ev = np.asarray(self.edge_v, dtype=np.int64)
        ew = np.asarray(self.edge_w, dtype=np.float64)
        if vw.shape != (n,):
            raise InputError("vertex_weight must have one entry per label")
        if not (eu.shape == ev.shape == ew.shape):
            raise InputError("edge arrays must have equal length")
        if np.any(~np.isfinite(vw)) or np.any(vw < 0):
            raise InputError("vertex weights must be finite and nonnegative")
        if np.any(~np.isfinite(ew)) or np.any(ew <= 0):
            raise InputError("stored edge weights must be finite and positive")
        if eu.size and (eu.min() < 0 or ev.max() >= n or np.any(eu > ev)):
            raise InputError("edge endpoints must satisfy 0 <= u <= v < n")
        index = {lab: i for i, lab in enumerate(self.labels)}
        if len(index) != n:
            raise InputError("vertex labels must be unique")

        # adjacency without self-edges, CSR layout
        off = eu != ev
        src = np.concatenate([eu[off], ev[off]])
        dst = np.concatenate([ev[off], eu[off]])
        wts = np.concatenate([ew[off], ew[off]])
        order = np.lexsort((dst, src))
        src, dst, wts = src[order], dst[order], wts[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        indptr = np.cumsum(indptr)
        self_w = np.zeros(n)
        np.add.at(self_w, eu[~off], ew[~off])

        put = object.__setattr__
        put(self, "labels", tuple(self.labels))
        put(self, "vertex_weight", _frozen(vw))
        put(self, "edge_u", _frozen(eu))
        put(self, "edge_v", _frozen(ev))
        put(self, "edge_w", _frozen(ew))
        put(self, "total_vertex_weight", float(vw.sum()))
        put(self, "total_edge_weight", float(ew.sum()))
        put(self, "_index", index)
        put(self, "_indptr", _frozen(indptr))
        put(self, "_nbr", _frozen(dst))
        put(self, "_nbr_w", _frozen(wts))
        put(self, "_self_w", _frozen(self_w))

    @classmethod
    def from_arrays(cls, labels, vertex_weight, u, v, w) -> "Network":
        """Build from raw (possibly unsorted, duplicated) pair arrays."""
        n = len(labels)
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        w = np.asarray(w, dtype=np.float64)
        if np.any(w < 0):
            raise InputError("edge weights must be nonnegative")
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        if lo.size:
            key = lo * n + hi
            uniq, inv = np.unique(key, return_inverse=True)
            summed = np.zeros(uniq.size)
            np.add.at(summed, inv, w)
            keep = summed > 0
            uniq, summed = uniq[keep], summed[keep]
            lo, hi = uniq // n, uniq % n
        else:
            summed = w
        return cls(tuple(labels), np.asarray(vertex_weight, float), lo, hi, summed)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def m(self) -> int:
        return int(self.edge_w.size)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise InputError(f"unknown vertex label {label!r}") from None

    def neighbors(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        """Neighbor indices (self excluded) and edge weights of ``v``."""
        s, e = self._indptr[v], self._indptr[v + 1]
        return self._nbr[s:e], self._nbr_w[s:e]

    def self_weight(self, v: int) -> float:
        return float(self._self_w[v])

    def edge_weight(self, u: int, v: int) -> float:
        if u == v:
            return float(self._self_w[u])
        nbr, w = self.neighbors(u)
        j = np.searchsorted(nbr, v)
        if j < nbr.size and nbr[j] == v:
            return float(w[j])
        return 0.0

    def degrees(self) -> np.ndarray:
        d = np.zeros(self.n)
        np.add.at(d, self.edge_u, self.edge_w)
        np.add.at(d, self.edge_v, self.edge_w)
        return d

    def with_vertex_weights(self, weights) -> "Network":
        return Network(self.labels, np.asarray(weights, float),
                       self.edge_u, self.edge_v, self.edge_w)

    def subnetwork(self, vertices: Sequence[int]) -> "Network":
        """Induced subnetwork on ``vertices`` (in the given order)."""
        vertices = np.asarray(vertices, dtype=np.int64)
        remap = np.full(self.n, -1, dtype=np.int64)
        remap[vertices] = np.arange(vertices.size)
        keep = (remap[self.edge_u] >= 0) & (remap[self.edge_v] >= 0)
        return Network.from_arrays(
            [self.labels[i] for i in vertices],
            self.vertex_weight[vertices],
            remap[self.edge_u[keep]], remap[self.edge_v[keep]], self.edge_w[keep])

    def __repr__(self) -> str:
        return (f"Network(n={self.n}, m={self.m}, w_V={self.total_vertex_weight:g}, "
                f"w_VV={self.total_edge_weight:g})")


@dataclass(frozen=True, eq=False)
class Clustering:
    """Partition of the vertices into clusters with dense ids ``0..k-1``."""

    assignment: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.assignment, dtype=np.int64)
        if a.ndim != 1:
            raise InputError("assignment must be one-dimensional")
        if a.size:
            used = np.unique(a)
            if used[0] != 0 or used[-1] != used.size - 1:
                raise InputError("cluster ids must be dense integers 0..k-1")
        object.__setattr__(self, "assignment", _frozen(a))

    @classmethod
    def from_labels(cls, ids) -> "Clustering":
        """Compact arbitrary hashable ids to dense ids in order of first use."""
        seen: dict = {}
        dense = [seen.setdefault(x, len(seen)) for x in ids]
        return cls(np.asarray(dense, dtype=np.int64))

    @classmethod
    def singletons(cls, n: int) -> "Clustering":
        return cls(np.arange(n))

    @property
    def k(self) -> int:
        return int(self.assignment.max()) + 1 if self.assignment.size else 0

    def members(self) -> list[np.ndarray]:
        order = np.argsort(self.assignment, kind="stable")
        bounds = np.searchsorted(self.assignment[order], np.arange(self.k + 1))
        return [order[bounds[c]:bounds[c + 1]] for c in range(self.k)]

    def same_partition(self, other: "Clustering") -> bool:
        """True if both describe the same partition up to relabeling."""
        a, b = self.assignment, other.assignment
        if a.shape != b.shape:
            return False
        return bool(np.array_equal(Clustering.from_labels(a).assignment,
                                   Clustering.from_labels(b).assignment))

    def __len__(self) -> int:
        return int(self.assignment.size)


@dataclass(frozen=True, eq=False)
class Layout:
    """Positions of the vertices in ``dimension``-dimensional space."""

    positions: np.ndarray

    def __post_init__(self) -> None:
        p = np.array(self.positions, dtype=np.float64)
        if p.ndim == 1:
            p = p[:, None]
        if p.ndim != 2 or (p.size and p.shape[1] < 1):
            raise InputError("positions must have shape (n, d) with d >= 1")
        if not np.all(np.isfinite(p)):
            raise NumericError("layout coordinates must be finite")
        object.__setattr__(self, "positions", _frozen(p))

    @property
    def dimension(self) -> int:
        return int(self.positions.shape[1])

    def distance(self, u: int, v: int) -> float:
        return float(np.linalg.norm(self.positions[u] - self.positions[v]))

    def diameter_bound(self) -> float:
        """Diagonal of the axis-aligned bounding box."""
        if len(self.positions) == 0:
            return 0.0
        return float(np.linalg.norm(np.ptp(self.positions, axis=0)))

    def __len__(self) -> int:
        return int(self.positions.shape[0])


def build_network(
    edges: Iterable[tuple],
    vertex_weight_mode: str | Mapping[str, float] | Sequence[float] = "degree",
    vertices: Iterable[str] | None = None,
) -> Network:
    """Construct a network from ``(u, v[, weight])`` tuples.

    Duplicate pairs are summed.  ``vertex_weight_mode`` is ``"unit"``,
    ``"degree"``, a mapping label -> weight, or a sequence aligned with the
    vertex order (first appearance, after ``vertices`` if given).
    """
    index: dict[str, int] = {}
    if vertices is not None:
        for lab in vertices:
            index.setdefault(str(lab), len(index))
    us, vs, ws = [], [], []
    for i, e in enumerate(edges):
        if len(e) == 2:
            a, b, w = e[0], e[1], 1.0
        elif len(e) == 3:
            a, b, w = e
        else:
            raise InputError(f"edge entry {i}: expected (u, v[, weight]), got {e!r}")
        a, b = str(a), str(b)
        if not a or not b:
            raise InputError(f"edge entry {i}: empty vertex label")
        w = float(w)
        if not np.isfinite(w) or w < 0:
            raise InputError(f"edge entry {i}: weight must be finite and >= 0, got {w}")
        us.append(index.setdefault(a, len(index)))
        vs.append(index.setdefault(b, len(index)))
        ws.append(w)
    labels = list(index)
    n = len(labels)

    net = Network.from_arrays(labels, np.zeros(n), us, vs, ws)
    if isinstance(vertex_weight_mode, str):
        if vertex_weight_mode == "unit":
            vw = np.ones(n)
        elif vertex_weight_mode == "degree":
            vw = net.degrees()
        else:
            raise InputError(f"unknown vertex weight mode {vertex_weight_mode!r}")
    elif isinstance(vertex_weight_mode, Mapping):
        missing = [lab for lab in labels if lab not in vertex_weight_mode]
        if missing:
            raise InputError(f"vertex weights missing for: {', '.join(missing[:10])}")
        vw = np.array([float(vertex_weight_mode[lab]) for lab in labels])
    else:
        vw = np.asarray(vertex_weight_mode, dtype=np.float64)
        if vw.shape != (n,):
            raise InputError(f"expected {n} explicit vertex weights, got {vw.size}")
    if np.any(~np.isfinite(vw)) or np.any(vw < 0):
        raise InputError("vertex weights must be finite and nonnegative")
    return net.with_vertex_weights(vw)


def degree(net: Network, v: int) -> float:
    """Total incident edge weight of ``v``, its self-edge counted twice."""
    _, w = net.neighbors(v)
    return float(w.sum()) + 2.0 * net.self_weight(v)


def _as_index_set(net: Network, vs) -> np.ndarray:
    idx = np.unique(np.asarray(list(vs), dtype=np.int64))
    if idx.size and (idx[0] < 0 or idx[-1] >= net.n):
        raise InputError("vertex index out of range")
    return idx


def _weight_between(net: Network, T: np.ndarray, U: np.ndarray) -> float:
    in_t = np.zeros(net.n, bool)
    in_u = np.zeros(net.n, bool)
    in_t[T] = True
    in_u[U] = True
    eu, ev = net.edge_u, net.edge_v
    mask = (in_t[eu] & in_u[ev]) | (in_u[eu] & in_t[ev])
    return float(net.edge_w[mask].sum())


def _weight_within(net: Network, U: np.ndarray) -> float:
    in_u = np.zeros(net.n, bool)
    in_u[U] = True
    return float(net.edge_w[in_u[net.edge_u] & in_u[net.edge_v]].sum())


def density_between(net: Network, T, U) -> float:
    """Edge weight between disjoint sets over the product of their weights."""
    T, U = _as_index_set(net, T), _as_index_set(net, U)
    if T.size == 0 or U.size == 0:
        raise InputError("vertex sets must be nonempty")
    if np.intersect1d(T, U).size:
        raise InputError("vertex sets must be disjoint")
    wt = float(net.vertex_weight[T].sum())
    wu = float(net.vertex_weight[U].sum())
    if wt <= 0 or wu <= 0:
        raise NumericError("density between sets of zero weight is undefined")
    return _weight_between(net, T, U) / (wt * wu)


def density_within(net: Network, U) -> float:
    """Internal edge weight (self-edges included) over ``w_U**2 / 2``."""
    U = _as_index_set(net, U)
    if U.size == 0:
        raise InputError("vertex set must be nonempty")
    wu = float(net.vertex_weight[U].sum())
    if wu <= 0:
        raise NumericError("density within a set of zero weight is undefined")
    return _weight_within(net, U) / (0.5 * wu * wu)


def subdivide_edge(net: Network, u: int, v: int, label: str | None = None) -> Network:
    """Replace edge ``{u, v}`` by a path ``u - t - v`` through a new zero-weight vertex.

    Both new edges inherit the weight of the removed edge.
    """
    if u == v:
        raise InputError("cannot subdivide a self-edge")
    w = net.edge_weight(u, v)
    if w <= 0:
        raise InputError(f"no edge between {net.labels[u]!r} and {net.labels[v]!r}")
    lo, hi = min(u, v), max(u, v)
    keep = ~((net.edge_u == lo) & (net.edge_v == hi))
    t = net.n
    if label is None:
        label = f"{net.labels[u]}~{net.labels[v]}"
        while label in net._index:
            label += "'"
    return Network.from_arrays(
        list(net.labels) + [label],
        np.append(net.vertex_weight, 0.0),
        np.concatenate([net.edge_u[keep], [u, t]]),
        np.concatenate([net.edge_v[keep], [t, v]]),
        np.concatenate([net.edge_w[keep], [w, w]]))


def double_network(net: Network, suffix: str = "'") -> Network:
    """Disjoint union of two copies of ``net``."""
    n = net.n
    labels = list(net.labels) + [lab + suffix for lab in net.labels]
    return Network.from_arrays(
        labels,
        np.tile(net.vertex_weight, 2),
        np.concatenate([net.edge_u, net.edge_u + n]),
        np.concatenate([net.edge_v, net.edge_v + n]),
        np.tile(net.edge_w, 2))


def connected_components(net: Network) -> list[np.ndarray]:
    """Components ordered by their smallest vertex index."""
    parent = np.arange(net.n)

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for a, b in zip(net.edge_u.tolist(), net.edge_v.tolist()):
        ra, rb = find(a), find(b)
        if ra != rb:
            if ra < rb:
                parent[rb] = ra
            else:
                parent[ra] = rb
    roots = np.array([find(i) for i in range(net.n)], dtype=np.int64)
    # each root is the smallest index of its component
    return [np.flatnonzero(roots == r) for r in np.unique(roots)]
