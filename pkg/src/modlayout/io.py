"""Tab-separated text formats for networks, vertex weights, positions and clusterings.

Every format is UTF-8, one record per line, LF or CRLF; lines starting with
``#`` and blank lines are ignored.  Parse errors raise ``InputError`` naming
the file and line.
"""
from __future__ import annotations

import math
from typing import Iterable, Iterator, Sequence

import numpy as np

from .graph import Clustering, InputError, Network, build_network

__all__ = [
    "read_edge_list",
    "write_edge_list",
    "read_vertex_weights",
    "write_vertex_weights",
    "read_network",
    "read_positions",
    "write_positions",
    "read_assignment",
    "write_assignment",
    "format_positions",
    "format_assignment",
    "align_to_network",
    "parse_weight_mode",
]

FULL_PRECISION = 17


def _records(path) -> Iterator[tuple[int, list[str]]]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            text = fh.read()
    except UnicodeDecodeError as exc:
        raise InputError(f"{path}: not valid UTF-8 ({exc.reason} at byte {exc.start})") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t") if "\t" in line else line.split()
        yield lineno, [f.strip() for f in fields]


def _number(path, lineno: int, text: str, what: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise InputError(f"{path}:{lineno}: {what} {text!r} is not a number") from None
    if not math.isfinite(x):
        raise InputError(f"{path}:{lineno}: {what} must be finite")
    return x


def _fmt(x: float, digits: int) -> str:
    return f"{x:.{digits}g}"


def read_edge_list(path) -> list[tuple[str, str, float]]:
    """Edges ``source, target[, weight]``; weight defaults to 1."""
    edges = []
    for lineno, f in _records(path):
        if len(f) not in (2, 3) or not f[0] or not f[1]:
            raise InputError(f"{path}:{lineno}: expected source<TAB>target[<TAB>weight]")
        w = _number(path, lineno, f[2], "weight") if len(f) == 3 else 1.0
        if w < 0:
            raise InputError(f"{path}:{lineno}: negative weight {w}")
        edges.append((f[0], f[1], w))
    if not edges:
        raise InputError(f"{path}: no edges")
    return edges


def write_edge_list(net: Network, path, digits: int = FULL_PRECISION) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for u, v, w in zip(net.edge_u, net.edge_v, net.edge_w):
            fh.write(f"{net.labels[u]}\t{net.labels[v]}\t{_fmt(w, digits)}\n")


def read_vertex_weights(path) -> dict[str, float]:
    weights: dict[str, float] = {}
    for lineno, f in _records(path):
        if len(f) != 2 or not f[0]:
            raise InputError(f"{path}:{lineno}: expected label<TAB>weight")
        w = _number(path, lineno, f[1], "vertex weight")
        if w < 0:
            raise InputError(f"{path}:{lineno}: negative vertex weight {w}")
        if f[0] in weights:
            raise InputError(f"{path}:{lineno}: duplicate label {f[0]!r}")
        weights[f[0]] = w
    return weights


def write_vertex_weights(net: Network, path, digits: int = FULL_PRECISION) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for lab, w in zip(net.labels, net.vertex_weight):
            fh.write(f"{lab}\t{_fmt(w, digits)}\n")


def parse_weight_mode(spec: str):
    """``unit``, ``degree`` or ``file=PATH`` (returns the weight mapping)."""
    if spec in ("unit", "degree"):
        return spec
    if spec.startswith("file="):
        return read_vertex_weights(spec[5:])
    raise InputError(f"vertex weights must be unit, degree or file=PATH (got {spec!r})")


def read_network(path, vertex_weights="degree") -> Network:
    """Edge list plus vertex-weight mode; a mapping lists every vertex's weight."""
    if isinstance(vertex_weights, str):
        vertex_weights = parse_weight_mode(vertex_weights)
    edges = read_edge_list(path)
    if isinstance(vertex_weights, dict):
        order = dict.fromkeys(lab for e in edges for lab in e[:2])
        # weight-file labels without edges become isolated vertices at the end
        order.update(dict.fromkeys(vertex_weights))
        return build_network(edges, vertex_weights, vertices=list(order))
    return build_network(edges, vertex_weights)


def read_positions(path) -> tuple[list[str], np.ndarray]:
    labels, rows, width = [], [], None
    for lineno, f in _records(path):
        if len(f) < 2:
            raise InputError(f"{path}:{lineno}: expected label<TAB>x[<TAB>y...]")
        if width is None:
            width = len(f)
        elif len(f) != width:
            raise InputError(f"{path}:{lineno}: expected {width - 1} coordinates, got {len(f) - 1}")
        labels.append(f[0])
        rows.append([_number(path, lineno, x, "coordinate") for x in f[1:]])
    if not rows:
        raise InputError(f"{path}: no positions")
    _no_duplicates(path, labels)
    return labels, np.array(rows, dtype=np.float64)


def write_positions(labels: Sequence[str], positions, path, digits: int = FULL_PRECISION) -> None:
    pos = np.asarray(positions, dtype=np.float64)
    if pos.ndim == 1:
        pos = pos[:, None]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_positions(labels, pos, digits))


def format_positions(labels: Sequence[str], pos: np.ndarray, digits: int = FULL_PRECISION) -> str:
    return "".join(lab + "\t" + "\t".join(_fmt(x, digits) for x in row) + "\n"
                   for lab, row in zip(labels, pos))


def read_assignment(path) -> tuple[list[str], np.ndarray]:
    labels, ids = [], []
    for lineno, f in _records(path):
        if len(f) != 2:
            raise InputError(f"{path}:{lineno}: expected label<TAB>cluster_id")
        try:
            c = int(f[1])
        except ValueError:
            raise InputError(f"{path}:{lineno}: cluster id {f[1]!r} is not an integer") from None
        if c < 0:
            raise InputError(f"{path}:{lineno}: negative cluster id")
        labels.append(f[0])
        ids.append(c)
    if not ids:
        raise InputError(f"{path}: no assignments")
    _no_duplicates(path, labels)
    return labels, np.array(ids, dtype=np.int64)


def write_assignment(labels: Sequence[str], clustering: Clustering, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_assignment(labels, clustering))


def format_assignment(labels: Sequence[str], clustering: Clustering) -> str:
    return "".join(f"{lab}\t{c}\n" for lab, c in zip(labels, clustering.assignment))


def _no_duplicates(path, labels: Iterable[str]) -> None:
    seen = set()
    for lab in labels:
        if lab in seen:
            raise InputError(f"{path}: duplicate label {lab!r}")
        seen.add(lab)


def align_to_network(net: Network, labels: Sequence[str], values: np.ndarray, what: str) -> np.ndarray:
    """Reorder per-label rows into the network's vertex order.

    Missing or unknown labels raise ``InputError`` listing (up to ten) offenders.
    """
    index = {lab: i for i, lab in enumerate(labels)}
    missing = [lab for lab in net.labels if lab not in index]
    known = set(net.labels)
    extra = [lab for lab in labels if lab not in known]
    if missing or extra:
        parts = []
        if missing:
            parts.append("missing " + ", ".join(map(repr, missing[:10])))
        if extra:
            parts.append("unknown " + ", ".join(map(repr, extra[:10])))
        raise InputError(f"{what} labels do not match the network: " + "; ".join(parts))
    return np.asarray(values)[[index[lab] for lab in net.labels]]
