import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize_scalar
from scipy.spatial.transform import Rotation

from modlayout.energy import (BHTree, EnergyParams, ar_energy, ar_forces, ar_gradient,
                              attraction_force, net_force, repulsion_force,
                              separate_coincident, two_vertex_optimal_distance)
from modlayout.graph import InputError, Layout, NumericError, build_network
from modlayout.netgen import two_vertex_network

from conftest import random_network

GRID = [(0, -1), (1, 0), (2, -1), (0, -2), (-0.5, -1.5)]


def brute_energy(net, pos, a, r):
    """Independent double loop over unordered pairs."""
    def pot(d, x):
        return math.log(d) if x == -1 else d ** (x + 1) / (x + 1)

    e = 0.0
    for u in range(net.n):
        for v in range(u + 1, net.n):
            d = float(np.linalg.norm(pos[u] - pos[v]))
            w = net.edge_weight(u, v)
            if w:
                e += w * pot(d, a)
            ww = net.vertex_weight[u] * net.vertex_weight[v]
            if ww:
                e -= ww * pot(d, r)
    return e


def test_params_require_a_greater_than_r():
    with pytest.raises(InputError):
        EnergyParams(-1, -1)
    with pytest.raises(InputError):
        EnergyParams(0, -1, attraction_factor=0)


def test_energy_examples(dumbbell):
    p = EnergyParams(0, -1)
    single = build_network([("x", "x", 1)], "unit")
    assert ar_energy(single, Layout(np.zeros((1, 2))), p) == 0.0
    assert ar_energy(dumbbell, Layout(np.array([[0.0], [1.0]])), p) == pytest.approx(1.0, abs=1e-15)
    assert ar_energy(dumbbell, Layout(np.array([[0.0], [2.0]])), p) == pytest.approx(
        2 - math.log(2), rel=1e-14)


@pytest.mark.parametrize("a,r", GRID)
def test_energy_matches_pair_loop(a, r):
    rng = np.random.default_rng(11)
    net = random_network(rng, 9, 0.5, weighted=True, self_edges=True)
    pos = rng.normal(size=(9, 3))
    assert ar_energy(net, Layout(pos), EnergyParams(a, r)) == pytest.approx(
        brute_energy(net, pos, a, r), rel=1e-12)


def test_energy_coincident_divergent_pair_named(dumbbell):
    with pytest.raises(NumericError, match="'u'.*'v'"):
        ar_energy(dumbbell, Layout(np.zeros((2, 2))), EnergyParams(0, -1))
    # a convergent potential tolerates coincidence
    assert ar_energy(dumbbell, Layout(np.zeros((2, 2))), EnergyParams(1, 0)) == 0.0


def test_attraction_force_examples():
    np.testing.assert_allclose(attraction_force(1, [0, 0], [1, 0], 3.7), [1, 0])
    np.testing.assert_allclose(attraction_force(1, [0, 0], [0, 2], 2), [0, 4])
    np.testing.assert_allclose(attraction_force(0, [0, 0], [0, 2], 2), [0, 0])
    with pytest.raises(NumericError):
        attraction_force(1, [1, 1], [1, 1], 0)


def test_repulsion_force_examples():
    np.testing.assert_allclose(repulsion_force(1, 1, [0, 0], [1, 0], -2.3), [-1, 0])
    np.testing.assert_allclose(repulsion_force(1, 1, [0, 0], [2, 0], -1), [-0.5, 0])
    np.testing.assert_allclose(repulsion_force(0, 1, [0, 0], [2, 0], -1), [0, 0])
    with pytest.raises(NumericError):
        repulsion_force(1, 1, [0, 0], [0, 0], -1)


def test_net_force_is_sum_of_pair_forces():
    rng = np.random.default_rng(3)
    net = random_network(rng, 7, 0.6, weighted=True)
    pos = rng.normal(size=(7, 2))
    p = EnergyParams(1, -1)
    v = 2
    expect = np.zeros(2)
    for u in range(7):
        if u == v:
            continue
        expect += attraction_force(net.edge_weight(v, u), pos[v], pos[u], p.a)
        expect += repulsion_force(net.vertex_weight[v], net.vertex_weight[u], pos[v], pos[u], p.r)
    np.testing.assert_allclose(net_force(net, Layout(pos), p, v), expect, rtol=1e-12)


def test_net_force_symmetric_star_cancels():
    k = 7
    ang = 2 * np.pi * np.arange(k) / k
    pos = np.vstack([[0.0, 0.0], np.c_[np.cos(ang), np.sin(ang)]])
    net = build_network([("c", str(i)) for i in range(k)], "unit")
    f = net_force(net, Layout(pos), EnergyParams(0, -1), 0)
    assert np.linalg.norm(f) <= 1e-9


@pytest.mark.parametrize("a,r", GRID)
def test_gradient_matches_finite_differences(a, r):
    rng = np.random.default_rng(5)
    net = random_network(rng, 8, 0.5, weighted=True, vertex_weights="random")
    pos = rng.normal(size=(8, 2)) * 2
    p = EnergyParams(a, r)
    g = ar_gradient(net, Layout(pos), p)
    h = 1e-6 * float(np.linalg.norm(np.ptp(pos, axis=0)))
    fd = np.zeros_like(pos)
    for i in range(pos.shape[0]):
        for c in range(pos.shape[1]):
            hi, lo = pos.copy(), pos.copy()
            hi[i, c] += h
            lo[i, c] -= h
            fd[i, c] = (ar_energy(net, Layout(hi), p) - ar_energy(net, Layout(lo), p)) / (2 * h)
    assert np.linalg.norm(g - fd) <= 1e-5 * np.linalg.norm(fd)
    np.testing.assert_allclose(-g[3], net_force(net, Layout(pos), p, 3), rtol=1e-10, atol=1e-12)


def test_gradient_trivial_cases():
    assert np.all(ar_gradient(build_network([("x", "x")], "unit"), Layout(np.zeros((1, 2))),
                              EnergyParams(0, -1)) == 0)
    p = EnergyParams(2, -1)
    d0 = two_vertex_optimal_distance(p, 1, 2, 2)
    g = ar_gradient(two_vertex_network(1, 2, 2), Layout(np.array([[0.0], [d0]])), p)
    assert np.linalg.norm(g) <= 1e-9


def test_two_vertex_distance_examples():
    assert two_vertex_optimal_distance(EnergyParams(1, 0), 1, 1, 1) == 1
    assert two_vertex_optimal_distance(EnergyParams(0, -1), 1, 2, 2) == pytest.approx(4, rel=1e-14)
    assert two_vertex_optimal_distance(EnergyParams(2, -1), 1, 2, 2) == pytest.approx(
        4 ** (1 / 3), rel=1e-14)
    with pytest.raises(InputError):
        two_vertex_optimal_distance(EnergyParams(0, -1), 0, 1, 1)


@pytest.mark.parametrize("a,r", [(0, -1), (1, -1), (2, -1), (0, -2), (1, 0), (0.5, -0.5)])
@pytest.mark.parametrize("w", [(1, 1, 1), (1, 2, 2), (3, 1, 2), (0.2, 5, 0.5)])
def test_two_vertex_optimum_vs_scalar_minimizer(a, r, w):
    p = EnergyParams(a, r)
    net = two_vertex_network(*w)
    d0 = two_vertex_optimal_distance(p, *w)

    def f(logd):
        return ar_energy(net, Layout(np.array([[0.0], [math.exp(logd)]])), p)

    res = minimize_scalar(f, bracket=(math.log(d0) - 1, math.log(d0) + 1),
                          options={"xtol": 1e-12})
    assert math.exp(res.x) == pytest.approx(d0, rel=1e-6)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), ai=st.integers(0, len(GRID) - 1))
def test_rigid_motion_invariance(seed, ai):
    rng = np.random.default_rng(seed)
    net = random_network(rng, 8, 0.5, weighted=True)
    pos = rng.normal(size=(8, 3))
    p = EnergyParams(*GRID[ai])
    moved = pos @ Rotation.random(random_state=seed).as_matrix().T + rng.normal(size=3) * 10
    e0, e1 = ar_energy(net, Layout(pos), p), ar_energy(net, Layout(moved), p)
    assert abs(e0 - e1) <= 1e-10 * max(1.0, abs(e0))


def test_zero_weight_vertices_do_not_repulse():
    rng = np.random.default_rng(0)
    pos = rng.normal(size=(6, 2))
    heavy = build_network([("a", "b")], "unit", vertices=list("abcdef"))
    w = np.array([1, 1, 0, 0, 0, 0.0])
    net = heavy.with_vertex_weights(w)
    p = EnergyParams(0, -1)
    f, _ = ar_forces(net, pos, p)
    assert np.all(f[2:] == 0)
    pair = build_network([("a", "b")], "unit")
    f2, _ = ar_forces(pair, pos[:2], p)
    np.testing.assert_allclose(f[:2], f2, rtol=1e-13)


def test_bh_theta_zero_is_exact():
    rng = np.random.default_rng(2)
    pos = rng.uniform(size=(300, 2))
    w = rng.uniform(0.5, 2, 300)
    from modlayout import kernels

    exact, e_exact, _, _ = kernels.repulsion_exact(pos, w, -1.0, 1.0)
    approx, e_approx = BHTree(pos, w, theta=0.0).repulsion(-1.0)[:2]
    np.testing.assert_allclose(approx, exact, rtol=1e-12, atol=1e-12 * np.abs(exact).max())
    assert e_approx == pytest.approx(e_exact, rel=1e-12)


def _bh_errors(pos, w, theta, r=-1.0):
    from modlayout import kernels

    exact = kernels.repulsion_exact(pos, w, r, 1.0)[0]
    approx = BHTree(pos, w, theta).repulsion(r)[0]
    return np.linalg.norm(approx - exact, axis=1) / np.linalg.norm(exact, axis=1)


def test_bh_error_monotone_in_theta():
    rng = np.random.default_rng(8)
    pos = rng.uniform(size=(400, 3))
    w = np.ones(400)
    errs = [np.median(_bh_errors(pos, w, t)) for t in (0.0, 0.25, 0.5, 0.75, 1.0)]
    assert all(x <= y + 1e-15 for x, y in zip(errs, errs[1:]))


def test_bh_tree_masses():
    rng = np.random.default_rng(4)
    pos = rng.uniform(size=(200, 2))
    w = rng.uniform(0, 1, 200)
    w[:50] = 0
    t = BHTree(pos, w).flat
    for k in range(t.node_count):
        kids = t.child_idx[t.child_ptr[k]:t.child_ptr[k + 1]]
        if kids.size:
            assert t.mass[kids].sum() == pytest.approx(t.mass[k], rel=1e-9)
        if t.mass[k] == 0:
            np.testing.assert_array_equal(t.com[k], t.center[k])
    assert t.mass[0] == pytest.approx(w.sum(), rel=1e-12)


def test_bh_zero_weight_nodes_skipped():
    pos = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.5], [0.25, 0.75]])
    w = np.array([1.0, 1.0, 0.0, 0.0])
    f = BHTree(pos, w, theta=0.5).repulsion(-1.0)[0]
    assert np.all(f[2:] == 0)
    np.testing.assert_allclose(f[0], [-1, 0])


def test_separate_coincident_is_deterministic():
    pos = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]])
    a = separate_coincident(pos, seed=3)
    b = separate_coincident(pos, seed=3)
    np.testing.assert_array_equal(a, b)
    assert np.linalg.norm(a[0] - a[1]) > 0
    np.testing.assert_array_equal(a[0], pos[0])     # lower index stays


def test_ar_forces_singular_coincidence_raises(dumbbell):
    with pytest.raises(NumericError):
        ar_forces(dumbbell, np.zeros((2, 2)), EnergyParams(0, -1))
