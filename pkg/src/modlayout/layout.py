"""Iterative force-directed minimization of the (a,r)-energy."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .energy import BHTree, EnergyParams, ar_energy, ar_forces, separate_coincident
from .graph import InputError, Layout, Network, NumericError, connected_components
from .tree import MAX_TREE_DIM

__all__ = ["LayoutOptions", "LayoutState", "LayoutResult", "minimize_energy",
           "layout_step", "initial_positions", "refit_zero_weight"]


@dataclass(frozen=True)
class LayoutOptions:
    dimension: int = 2
    max_iterations: int = 500
    seed: int = 0
    convergence_tol: float = 1e-4
    initial_step: float | None = None      # default 0.05 * n**(1/dimension)
    use_barnes_hut: bool | None = None     # default: n > 200
    theta: float = 0.5

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise InputError("dimension must be >= 1")
        if self.max_iterations < 1:
            raise InputError("max_iterations must be >= 1")
        if not self.convergence_tol > 0:
            raise InputError("convergence_tol must be positive")
        if self.initial_step is not None and not self.initial_step > 0:
            raise InputError("initial_step must be positive")
        if self.theta < 0:
            raise InputError("theta must be nonnegative")


@dataclass
class LayoutState:
    net: Network
    params: EnergyParams
    pos: np.ndarray
    step: float
    use_tree: bool = False
    theta: float = 0.5
    seed: int = 0
    iteration: int = 0
    forces: np.ndarray | None = None
    energy: float = math.nan
    displacement: float = 0.0
    accepted: bool = False
    halvings: int = 0

    def __post_init__(self) -> None:
        self.pos = np.array(self.pos, dtype=np.float64)
        self.has_zero_weight = bool(np.any(self.net.vertex_weight <= 0))


@dataclass(frozen=True)
class LayoutResult:
    layout: Layout
    energy: float
    iterations: int
    converged: bool

    @property
    def positions(self) -> np.ndarray:
        return self.layout.positions


def initial_positions(n: int, dimension: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform positions in a cube of side ``n**(1/dimension)``."""
    side = n ** (1.0 / dimension)
    return rng.uniform(0.0, side, size=(n, dimension))


def _evaluate(state: LayoutState, pos: np.ndarray) -> tuple[np.ndarray, float]:
    tree = BHTree(pos, state.net.vertex_weight, state.theta) if state.use_tree else None
    return ar_forces(state.net, pos, state.params, tree)


def _capped_move(forces: np.ndarray, step: float) -> np.ndarray:
    disp = step * forces
    norm = np.linalg.norm(disp, axis=1)
    over = norm > step
    disp[over] *= (step / norm[over])[:, None]
    return disp


def _local_attraction(pos_t, nbr_pos, w, a):
    d = np.linalg.norm(nbr_pos - pos_t, axis=1)
    return float(np.sum(w * d ** (a + 1.0)))


def refit_zero_weight(net: Network, pos: np.ndarray, a: float) -> bool:
    """Re-place zero-weight vertices at a minimizer of their attraction energy.

    Zero-weight vertices feel no repulsion, so given their neighbors their
    optimal position solves a convex problem for ``0 <= a <= 1``.  The
    majorize-minimize iteration starts from the weighted mean of the
    neighbors, which keeps such vertices away from the kinks of the energy
    at their neighbors' positions.  A new position is kept only if it does
    not increase the vertex's energy.  Returns True if anything moved.
    """
    if not (0.0 <= a <= 1.0):
        return False
    moved = False
    for t in np.flatnonzero(net.vertex_weight <= 0):
        nbr, w = net.neighbors(t)
        if nbr.size == 0:
            continue
        q = pos[nbr]
        x = (w @ q) / w.sum()
        for _ in range(100):
            d = np.linalg.norm(q - x, axis=1)
            if np.any(d == 0):
                break
            c = w * d ** (a - 1.0)
            x_new = (c @ q) / c.sum()
            if np.linalg.norm(x_new - x) <= 1e-14 * (1.0 + np.linalg.norm(x)):
                x = x_new
                break
            x = x_new
        if (not np.array_equal(x, pos[t])
                and _local_attraction(x, q, w, a) <= _local_attraction(pos[t], q, w, a)):
            pos[t] = x
            moved = True
    return moved


def layout_step(state: LayoutState) -> LayoutState:
    """One synchronous sweep with the adaptive step rule; updates ``state`` in place."""
    state.iteration += 1
    state.accepted = False
    state.displacement = 0.0
    if state.net.n < 2:
        return state
    pos = separate_coincident(state.pos, seed=state.seed * 1_000_003 + state.iteration)
    refit = state.has_zero_weight and refit_zero_weight(state.net, pos, state.params.a)
    if refit:
        pos = separate_coincident(pos, seed=state.seed * 1_000_003 + state.iteration)
    if state.forces is None or refit or not np.array_equal(pos, state.pos):
        state.pos = pos
        state.forces, state.energy = _evaluate(state, pos)
    if not (math.isfinite(state.energy) and np.all(np.isfinite(state.forces))):
        raise NumericError("energy or forces not finite at current layout")

    for attempt in range(2):
        disp = _capped_move(state.forces, state.step)
        trial = state.pos + disp
        try:
            f_new, e_new = _evaluate(state, trial)
            ok = math.isfinite(e_new) and np.all(np.isfinite(f_new)) and e_new < state.energy
        except NumericError:
            ok = False
        if ok:
            state.pos, state.forces, state.energy = trial, f_new, e_new
            state.displacement = float(np.max(np.linalg.norm(disp, axis=1)))
            state.accepted = True
            if attempt == 0:
                state.step *= 1.1
            return state
        state.step *= 0.5
        state.halvings += 1
    return state


def _scale(pos: np.ndarray) -> float:
    diag = float(np.linalg.norm(np.ptp(pos, axis=0))) if len(pos) else 0.0
    return max(diag, 1e-12)


def _run_component(net: Network, params: EnergyParams, opts: LayoutOptions,
                   pos: np.ndarray, use_tree: bool, seed: int) -> tuple[np.ndarray, int, bool]:
    n = net.n
    if n == 1:
        return np.zeros((1, opts.dimension)), 0, True
    step = opts.initial_step if opts.initial_step is not None else 0.05 * n ** (1.0 / opts.dimension)
    state = LayoutState(net, params, pos, step, use_tree, opts.theta, seed)
    converged = False
    while state.iteration < opts.max_iterations:
        layout_step(state)
        tol = opts.convergence_tol * _scale(state.pos)
        # before the first rejected step the step may still be far below the
        # inverse curvature, and small moves then understate the remaining error
        settled = state.accepted and state.halvings > 0 and state.displacement < tol
        if settled or state.step < tol:
            converged = True
            break
    if not np.all(np.isfinite(state.pos)):
        raise NumericError("layout diverged")
    return state.pos, state.iteration, converged


def _pack(parts: list[np.ndarray], dimension: int) -> list[np.ndarray]:
    """Center each component and place the components on a grid."""
    if len(parts) == 1:
        return parts
    diags = [float(np.linalg.norm(np.ptp(p, axis=0))) for p in parts]
    cell = 3.0 * max(diags) if max(diags) > 0 else 1.0
    cols = math.ceil(math.sqrt(len(parts))) if dimension > 1 else len(parts)
    out = []
    for i, p in enumerate(parts):
        offset = np.zeros(dimension)
        offset[0] = (i % cols) * cell
        if dimension > 1:
            offset[1] = (i // cols) * cell
        lo, hi = p.min(axis=0), p.max(axis=0)
        out.append(p - 0.5 * (lo + hi) + offset)
    return out


def minimize_energy(net: Network, params: EnergyParams,
                    opts: LayoutOptions | None = None,
                    initial: np.ndarray | None = None) -> LayoutResult:
    """Minimize the (a,r)-energy; components are laid out separately and packed.

    ``initial`` optionally supplies starting positions, shape ``(n, dimension)``.
    """
    opts = opts or LayoutOptions()
    if net.n == 0:
        raise InputError("cannot lay out an empty network")
    if initial is not None:
        initial = np.asarray(initial, dtype=np.float64)
        if initial.ndim == 1:
            initial = initial[:, None]
        if initial.shape[0] != net.n:
            raise InputError("initial positions do not match the vertex count")
        opts = replace(opts, dimension=initial.shape[1])
    if opts.use_barnes_hut is None:
        use_tree = net.n > 200 and opts.dimension <= MAX_TREE_DIM
    elif opts.use_barnes_hut and opts.dimension > MAX_TREE_DIM:
        raise InputError(f"Barnes-Hut supports dimension <= {MAX_TREE_DIM}; use exact repulsion")
    else:
        use_tree = opts.use_barnes_hut

    comps = connected_components(net)
    parts, iters, conv = [], 0, True
    for ci, comp in enumerate(comps):
        sub = net.subnetwork(comp) if len(comps) > 1 else net
        rng = np.random.default_rng([opts.seed, ci])
        start = initial[comp] if initial is not None else initial_positions(comp.size, opts.dimension, rng)
        pos, it, ok = _run_component(sub, params, opts, start, use_tree and sub.n > 1,
                                     opts.seed + ci)
        parts.append(pos)
        iters = max(iters, it)
        conv = conv and ok
    packed = _pack(parts, opts.dimension)
    positions = np.zeros((net.n, opts.dimension))
    for comp, p in zip(comps, packed):
        positions[comp] = p
    layout = Layout(positions)
    return LayoutResult(layout, ar_energy(net, layout, params), iters, conv)
