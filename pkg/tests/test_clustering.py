import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modlayout.clustering import (agglomerate, coarsen, exhaustive_best_clustering, join_delta,
                                  maximize_modularity, modularity, move_delta, refine,
                                  restricted_growth_strings, spectral_bisection,
                                  split_diagnostic)
from modlayout.graph import (Clustering, InputError, Network, NumericError, build_network,
                             density_between, density_within)
from modlayout.netgen import PlantedPartitionSpec, clique_chain, planted_partition

from conftest import random_network


def brute_modularity(net, assignment):
    """Pairwise-sum oracle: sum over same-cluster pairs of w_uv/W - w_u w_v/(w_V^2 / 2)."""
    W, wV = net.total_edge_weight, net.total_vertex_weight
    q = 0.0
    for u in range(net.n):
        for v in range(u, net.n):
            if assignment[u] != assignment[v]:
                continue
            q += net.edge_weight(u, v) / W
            ww = net.vertex_weight[u] * net.vertex_weight[v]
            q -= (ww if u != v else 0.5 * ww) / (0.5 * wV * wV)
    return q


def bell(n):
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def test_modularity_examples(triangles):
    assert modularity(triangles, Clustering(np.zeros(6, int))) == pytest.approx(0, abs=1e-15)
    pair = build_network([("u", "v")], "degree")
    assert modularity(pair, Clustering.singletons(2)) == pytest.approx(-0.5, abs=1e-15)
    per_triangle = Clustering(np.array([0, 0, 0, 1, 1, 1]))
    assert modularity(triangles, per_triangle) == pytest.approx(5 / 14, abs=1e-15)


def test_modularity_errors():
    zero = build_network([("u", "v")], "unit").with_vertex_weights([0, 0])
    with pytest.raises(NumericError):
        modularity(zero, Clustering.singletons(2))
    with pytest.raises(InputError):
        modularity(build_network([("u", "v")]), Clustering.singletons(3))


def test_join_delta_examples(triangles):
    per_triangle = Clustering(np.array([0, 0, 0, 1, 1, 1]))
    assert join_delta(triangles, per_triangle, 0, 1) == pytest.approx(-5 / 14, abs=1e-15)
    two = build_network([("a", "b"), ("c", "d")])
    assert join_delta(two, Clustering(np.array([0, 0, 1, 1])), 0, 1) < 0
    with pytest.raises(InputError):
        join_delta(triangles, per_triangle, 0, 0)
    with pytest.raises(InputError):
        join_delta(triangles, per_triangle, 0, 5)


def test_move_delta_examples(triangles):
    c = Clustering(np.array([0, 0, 0, 1, 1, 1]))
    assert move_delta(triangles, c, 0, 0) == 0.0
    moved = np.array([0, 0, 0, 0, 1, 1])   # d joins the first triangle
    assert move_delta(triangles, c, 3, 0) == pytest.approx(
        modularity(triangles, Clustering(moved)) - modularity(triangles, c), abs=1e-12)
    iso = build_network([("a", "b")], "degree", vertices=["a", "b", "x"])
    assert move_delta(iso, Clustering(np.array([0, 0, 1])), 2, 0) == 0.0
    with pytest.raises(InputError):
        move_delta(triangles, c, 9, 0)


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 100_000), n=st.integers(2, 10))
def test_modularity_matches_pair_oracle(seed, n):
    rng = np.random.default_rng(seed)
    net = random_network(rng, n, 0.5, weighted=True, self_edges=True, vertex_weights="random")
    a = Clustering.from_labels(rng.integers(0, 4, n))
    if net.total_vertex_weight > 0:
        assert modularity(net, a) == pytest.approx(brute_modularity(net, a.assignment), abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 100_000), n=st.integers(2, 10))
def test_deltas_match_recomputation(seed, n):
    rng = np.random.default_rng(seed)
    net = random_network(rng, n, 0.5, weighted=True, self_edges=True, vertex_weights="random")
    if net.total_vertex_weight <= 0:
        return
    c = Clustering.from_labels(rng.integers(0, 4, n))
    q = modularity(net, c)
    if c.k >= 2:
        i, j = rng.choice(c.k, 2, replace=False)
        joined = np.where(c.assignment == j, i, c.assignment)
        assert join_delta(net, c, i, j) == pytest.approx(
            modularity(net, Clustering.from_labels(joined)) - q, abs=1e-12)
    v = int(rng.integers(n))
    for target in range(c.k + 1):        # k is a fresh cluster
        moved = c.assignment.copy()
        moved[v] = target
        assert move_delta(net, c, v, target) == pytest.approx(
            modularity(net, Clustering.from_labels(moved)) - q, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_invariances(seed):
    rng = np.random.default_rng(seed)
    net = random_network(rng, 9, 0.5, weighted=True, self_edges=True)
    a = rng.integers(0, 3, 9)
    c = Clustering.from_labels(a)
    perm = rng.permutation(c.k)
    relabeled = Clustering(perm[c.assignment])
    assert modularity(net, relabeled) == modularity(net, c)
    scaled = Network.from_arrays(net.labels, 7.3 * net.vertex_weight, net.edge_u, net.edge_v,
                                 7.3 * net.edge_w)
    assert abs(modularity(scaled, c) - modularity(net, c)) <= 1e-12
    assert modularity(net, c) <= 1
    assert modularity(net, Clustering(np.zeros(9, int))) == pytest.approx(0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_coarsening_preserves_modularity(seed):
    rng = np.random.default_rng(seed)
    net = random_network(rng, 12, 0.4, weighted=True, self_edges=True)
    c = Clustering.from_labels(rng.integers(0, 5, 12))
    cg = coarsen(net, c.assignment)
    assert np.allclose(cg.network.vertex_weight,
                       np.bincount(c.assignment, weights=net.vertex_weight))
    assert modularity(cg.network, Clustering.singletons(c.k)) == pytest.approx(
        modularity(net, c), abs=1e-12)


def test_hierarchy_levels_compose():
    net, _ = planted_partition(PlantedPartitionSpec(4, 8, 0.9, 0.1, seed=2))
    hierarchy, merged = agglomerate(net)
    assert np.array_equal(hierarchy.compose(), merged.assignment)
    W = net.total_edge_weight
    a = np.arange(net.n)
    for lvl in hierarchy.levels[1:]:
        a = lvl.mapping[a]
        assert lvl.network.total_edge_weight == pytest.approx(W, rel=1e-12)
        assert modularity(lvl.network, Clustering.singletons(lvl.network.n)) == pytest.approx(
            modularity(net, Clustering.from_labels(a)), abs=1e-12)


def test_agglomerate_two_triangles(triangles):
    _, c = agglomerate(triangles)
    assert c.same_partition(Clustering(np.array([0, 0, 0, 1, 1, 1])))
    assert modularity(triangles, c) == pytest.approx(5 / 14, abs=1e-15)


def test_agglomerate_self_looped_vertices_stay_apart():
    net = build_network([("a", "a"), ("b", "b"), ("c", "c")], "degree")
    _, c = agglomerate(net)
    assert c.k == 3


def test_agglomerate_prioritizers_and_errors(triangles):
    _, c = agglomerate(triangles, prioritizer="density")
    assert modularity(triangles, c) == pytest.approx(5 / 14)
    with pytest.raises(InputError):
        agglomerate(triangles, prioritizer="random")


def test_k4_heuristic_at_most_oracle():
    k4 = build_network([(u, v) for u, v in itertools.combinations("abcd", 2)])
    _, q_h = maximize_modularity(k4)
    _, q_o = exhaustive_best_clustering(k4)
    assert q_h <= q_o + 1e-12
    assert q_o == pytest.approx(0, abs=1e-12)


def test_refine_keeps_optimum(triangles):
    hierarchy, c = agglomerate(triangles)
    assert refine(triangles, hierarchy).same_partition(c)


@pytest.mark.parametrize("seed", range(25))
def test_refine_never_worse_and_locally_optimal(seed):
    rng = np.random.default_rng(seed)
    net = random_network(rng, int(rng.integers(3, 9)), 0.5)
    hierarchy, merged = agglomerate(net)
    refined = refine(net, hierarchy)
    assert modularity(net, refined) >= modularity(net, merged) - 1e-15
    for v in range(net.n):
        for t in range(refined.k + 1):
            assert move_delta(net, refined, v, t) <= 1e-12


def test_maximize_two_triangles(triangles):
    c, q = maximize_modularity(triangles)
    assert q == pytest.approx(5 / 14, abs=1e-15)
    assert c.k == 2


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_maximize_recovers_planted_groups(seed):
    net, truth = planted_partition(PlantedPartitionSpec(seed=seed))
    c, _ = maximize_modularity(net)
    assert c.same_partition(truth)


@pytest.mark.parametrize("seed", range(6))
def test_maximize_recovers_planted_groups_in_any_vertex_order(seed):
    net, truth = planted_partition(PlantedPartitionSpec(seed=seed))
    perm = np.random.default_rng(seed).permutation(net.n)
    shuffled = net.subnetwork(perm)
    c, _ = maximize_modularity(shuffled)
    assert c.same_partition(Clustering.from_labels(truth.assignment[perm]))


def test_spectral_bisection_separates_two_cliques():
    net, truth = planted_partition(PlantedPartitionSpec(2, 8, 1.0, 0.0, seed=0))
    net = net.with_vertex_weights(net.degrees())
    W, wV = net.total_edge_weight, net.total_vertex_weight
    part = spectral_bisection(net, W, wV)
    assert Clustering(part).same_partition(truth)
    clique, _ = planted_partition(PlantedPartitionSpec(1, 6, 1.0, 0.0))
    clique = clique.with_vertex_weights(clique.degrees())
    assert spectral_bisection(clique, clique.total_edge_weight, clique.total_vertex_weight) is None


def test_spectral_bisection_sparse_path_agrees(monkeypatch):
    from modlayout import clustering as mod
    net, truth = planted_partition(PlantedPartitionSpec(2, 12, 1.0, 0.05, seed=3))
    W, wV = net.total_edge_weight, net.total_vertex_weight
    dense = spectral_bisection(net, W, wV)
    monkeypatch.setattr(mod, "_DENSE_EIG_LIMIT", 0)
    sparse = spectral_bisection(net, W, wV)
    assert Clustering(dense).same_partition(Clustering(sparse))
    assert Clustering(dense).same_partition(truth)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_spectral_step_never_hurts(seed):
    rng = np.random.default_rng(seed)
    net = random_network(rng, int(rng.integers(2, 25)), float(rng.uniform(0.1, 0.6)), weighted=True)
    plain, q_plain = maximize_modularity(net, spectral=False)
    _, q = maximize_modularity(net)
    assert q >= q_plain - 1e-12
    for i, j in itertools.combinations(range(plain.k), 2):
        assert join_delta(net, plain, i, j) <= 1e-12


def test_maximize_deterministic():
    net, _ = planted_partition(PlantedPartitionSpec(6, 10, 0.6, 0.1, seed=4))
    a, qa = maximize_modularity(net, seed=1)
    b, qb = maximize_modularity(net, seed=1)
    assert np.array_equal(a.assignment, b.assignment) and qa == qb


@pytest.mark.parametrize("seed", range(30))
def test_maximize_output_properties(seed):
    rng = np.random.default_rng(100 + seed)
    net = random_network(rng, int(rng.integers(2, 9)), 0.5)
    c, q = maximize_modularity(net)
    _, q_o = exhaustive_best_clustering(net)
    assert q <= q_o + 1e-12
    assert np.array_equal(np.unique(c.assignment), np.arange(c.k))
    dens_v = density_within(net, range(net.n))
    members = c.members()
    for i, j in itertools.combinations(range(c.k), 2):
        assert join_delta(net, c, i, j) <= 1e-12
        if net.vertex_weight[members[i]].sum() > 0 and net.vertex_weight[members[j]].sum() > 0:
            assert density_between(net, members[i], members[j]) <= dens_v + 1e-9


def test_join_sign_matches_density_comparison():
    rng = np.random.default_rng(9)
    for _ in range(50):
        net = random_network(rng, 8, 0.5, weighted=True)
        c = Clustering.from_labels(rng.integers(0, 3, 8))
        if c.k < 2:
            continue
        m = c.members()
        delta = join_delta(net, c, 0, 1)
        gap = density_between(net, m[0], m[1]) - density_within(net, range(8))
        if abs(gap) > 1e-12:
            assert (delta > 0) == (gap > 0)


def test_resolution_limit_threshold():
    # two bridged 5-cliques plus ballast cliques: the join turns positive when
    # w_cd / (w_c w_d) exceeds w_VV / (w_V^2 / 2)
    signs = []
    for k in range(0, 30):
        net = clique_chain(5, bridged=2, ballast=k)
        c = Clustering(np.repeat(np.arange(2 + k), 5))
        signs.append(join_delta(net, c, 0, 1) > 0)
    first = signs.index(True)
    assert not any(signs[:first]) and all(signs[first:])
    assert first == 20


def test_restricted_growth_strings():
    for n in range(0, 9):
        rgs = restricted_growth_strings(n)
        assert rgs.shape == (bell(n), n)
        assert len({tuple(r) for r in rgs}) == rgs.shape[0]
        assert [tuple(r) for r in rgs] == sorted(tuple(r) for r in rgs)
        if n:
            assert np.all(rgs[:, 0] == 0)
            assert np.all(rgs.max(axis=1) + 1 == np.array([len(set(r)) for r in rgs]))


def test_exhaustive_examples(triangles):
    loop = build_network([("x", "x")], "degree")
    c, q = exhaustive_best_clustering(loop)
    assert c.k == 1 and q == pytest.approx(0, abs=1e-15)
    pair = build_network([("u", "v")], "degree")
    c, q = exhaustive_best_clustering(pair)
    assert c.k == 1 and q == pytest.approx(0, abs=1e-15)
    c, q = exhaustive_best_clustering(triangles)
    assert q == pytest.approx(5 / 14, abs=1e-15)
    assert list(c.assignment) == [0, 0, 0, 1, 1, 1]
    with pytest.raises(InputError):
        exhaustive_best_clustering(clique_chain(5, 3), max_n=12)


def test_exhaustive_matches_itertools_oracle():
    rng = np.random.default_rng(21)
    net = random_network(rng, 6, 0.6, weighted=True)

    def partitions(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for p in partitions(rest):
            for i in range(len(p)):
                yield p[:i] + [[first] + p[i]] + p[i + 1:]
            yield [[first]] + p

    best = -np.inf
    for p in partitions(list(range(6))):
        a = np.zeros(6, int)
        for c, block in enumerate(p):
            a[block] = c
        best = max(best, brute_modularity(net, a))
    assert exhaustive_best_clustering(net)[1] == pytest.approx(best, abs=1e-12)


def test_split_diagnostic_on_optimum(triangles):
    c, _ = exhaustive_best_clustering(triangles)
    diag = split_diagnostic(triangles, c)
    dens_v = density_within(triangles, range(6))
    assert set(diag) == {0, 1}
    assert all(x >= dens_v - 1e-12 for x in diag.values())
