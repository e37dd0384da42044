import io

import networkx as nx
import numpy as np
import pytest

from katzdp.evaluation import (
    CommunityPartition,
    avg_f1,
    load_partition,
    louvain,
    modularity,
    pair_f1,
    to_networkx,
)
from katzdp.graph import Graph

from helpers import brute_force_best_modularity, dense_adjacency, set_partitions


def two_cliques():
    edges = [(i, j) for i in range(5) for j in range(i + 1, 5)]
    edges += [(i + 5, j + 5) for i, j in edges]
    edges.append((4, 5))
    return Graph.from_edges(10, edges)


def test_set_partition_count():
    assert len(set_partitions(6)) == 203  # Bell(6)


def test_two_cliques_split_is_optimal_and_found():
    g = two_cliques()
    best_q, labels = brute_force_best_modularity(dense_adjacency(g))
    optimum = CommunityPartition.from_labels(labels.tolist())
    assert optimum.communities == (frozenset(range(5)), frozenset(range(5, 10)))
    for seed in range(5):
        part = louvain(g, np.random.default_rng(seed))
        assert part == optimum
        assert modularity(g, part) == pytest.approx(best_q)


def test_complete_graph_one_community():
    g = Graph.from_edges(5, [(i, j) for i in range(5) for j in range(i + 1, 5)])
    assert len(louvain(g, np.random.default_rng(0))) == 1


def test_edgeless_graph_singletons():
    part = louvain(Graph(4, ()), np.random.default_rng(0))
    assert len(part) == 4


def test_louvain_deterministic_and_valid(rng):
    nxg = nx.planted_partition_graph(4, 20, 0.5, 0.05, seed=3)
    g = Graph.from_edges(80, nxg.edges())
    a = louvain(g, np.random.default_rng(5))
    b = louvain(g, np.random.default_rng(5))
    assert a == b
    assert a.n == 80


def test_louvain_weighted_graph():
    edges = [(0, 1), (1, 2), (2, 3), (3, 0)]
    g = Graph.from_edges(4, edges, [10.0, 0.1, 10.0, 0.1])
    part = louvain(g, np.random.default_rng(0))
    assert part.communities == (frozenset({0, 1}), frozenset({2, 3}))


def test_modularity_non_decreasing_across_levels():
    nxg = nx.planted_partition_graph(5, 15, 0.4, 0.05, seed=8)
    levels = list(nx.community.louvain_partitions(nxg, seed=1))
    q = [nx.community.modularity(nxg, lvl) for lvl in levels]
    assert all(b >= a - 1e-12 for a, b in zip(q, q[1:]))


def test_pair_f1_examples():
    assert pair_f1({1, 2, 3}, {1, 2, 3}) == 1.0
    assert pair_f1({1, 2}, {3, 4}) == 0.0
    # prec 1/2, recall 1/3
    assert pair_f1({1, 2}, {2, 3, 4}) == pytest.approx(0.4, abs=1e-15)
    with pytest.raises(ValueError):
        pair_f1(set(), {1})


def test_avg_f1_identical():
    p = CommunityPartition.from_sets([{0, 1}, {2, 3, 4}])
    rep = avg_f1(p, p)
    assert rep.avg_f1 == 1.0
    assert rep.per_community_f1 == ((0, 0, 1.0), (1, 1, 1.0))


def test_avg_f1_one_vs_singletons():
    one = CommunityPartition.from_sets([{0, 1, 2, 3}])
    singles = CommunityPartition.from_sets([{i} for i in range(4)])
    rep = avg_f1(one, singles)
    assert rep.detected_to_reference == pytest.approx(0.4)
    assert rep.reference_to_detected == pytest.approx(0.4)
    assert rep.avg_f1 == pytest.approx(0.4)
    # every singleton ties; the lowest index wins
    assert rep.per_community_f1 == ((0, 0, pytest.approx(0.4)),)


def brute_avg_f1(a, b):
    d = np.mean([max(pair_f1(c, r) for r in b.communities) for c in a.communities])
    r = np.mean([max(pair_f1(c, x) for x in a.communities) for c in b.communities])
    return 0.5 * (d + r)


def random_partition(rng, n):
    return CommunityPartition.from_labels(rng.integers(0, int(rng.integers(1, n + 1)), n).tolist())


def test_avg_f1_matches_brute_force_and_is_symmetric(rng):
    for _ in range(100):
        n = int(rng.integers(1, 30))
        a, b = random_partition(rng, n), random_partition(rng, n)
        ab, ba = avg_f1(a, b).avg_f1, avg_f1(b, a).avg_f1
        assert ab == pytest.approx(brute_avg_f1(a, b), abs=1e-12)
        assert ab == pytest.approx(ba, abs=1e-15)
        assert 0 <= ab <= 1
        assert (ab == pytest.approx(1.0)) == (a == b)


def test_avg_f1_relabel_and_order_invariant(rng):
    for _ in range(30):
        n = 25
        a, b = random_partition(rng, n), random_partition(rng, n)
        perm = rng.permutation(n)
        pa = CommunityPartition.from_sets([{int(perm[x]) for x in c} for c in a.communities])
        pb = CommunityPartition.from_sets([{int(perm[x]) for x in c} for c in b.communities])
        shuffled = CommunityPartition(tuple(reversed(a.communities)))
        base = avg_f1(a, b).avg_f1
        assert avg_f1(pa, pb).avg_f1 == pytest.approx(base, abs=1e-15)
        assert avg_f1(shuffled, b).avg_f1 == pytest.approx(base, abs=1e-15)


def test_avg_f1_mismatched_nodes():
    with pytest.raises(ValueError, match="different node sets"):
        avg_f1(CommunityPartition.from_sets([{0, 1}]), CommunityPartition.from_sets([{0}]))


def test_partition_invariants():
    with pytest.raises(ValueError):
        CommunityPartition((frozenset({0, 1}), frozenset({1, 2})))
    with pytest.raises(ValueError):
        CommunityPartition((frozenset({0}), frozenset()))
    with pytest.raises(ValueError):
        CommunityPartition((frozenset({0, 2}),))


def test_load_partition_with_labels():
    text = "# node community\nalice x\nbob y\ncarol x\n"
    part = load_partition(io.StringIO(text), 3, ("alice", "bob", "carol"))
    assert part.communities == (frozenset({0, 2}), frozenset({1}))
    with pytest.raises(ValueError, match="no community"):
        load_partition(io.StringIO("0 a\n"), 2)


def test_to_networkx_weights():
    g = Graph.from_edges(3, [(0, 1)], [2.5])
    nxg = to_networkx(g)
    assert nxg.number_of_nodes() == 3
    assert nxg[0][1]["weight"] == 2.5
