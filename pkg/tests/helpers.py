"""Independent oracles and generators shared by the test modules."""

from __future__ import annotations

import itertools

import numpy as np

from katzdp.graph import Graph


def random_graph(rng: np.random.Generator, n: int, p: float) -> Graph:
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return Graph.from_edges(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def random_connected_graph(rng: np.random.Generator, n: int, p: float) -> Graph:
    # random spanning tree plus G(n, p) extras
    perm = rng.permutation(n)
    edges = [(int(perm[i]), int(perm[rng.integers(i)])) for i in range(1, n)]
    extra = random_graph(rng, n, p)
    return Graph.from_edges(n, edges + list(extra.edges))


def dense_adjacency(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for u, v in g.edges:
        a[u, v] = a[v, u] = 1.0
    return a


def katz_partial_sum(a: np.ndarray, beta: float, terms: int) -> np.ndarray:
    """Brute-force sum_{l=1}^{terms} beta^l A^l with explicit matrix powers."""
    return sum(beta ** l * np.linalg.matrix_power(a, l) for l in range(1, terms + 1))


def batched_truncated_katz(adjs: np.ndarray, beta: float, h: int) -> np.ndarray:
    """Truncated Katz for a stack of dense adjacency matrices (explicit powers)."""
    total = np.zeros_like(adjs)
    power = np.broadcast_to(np.eye(adjs.shape[-1]), adjs.shape).copy()
    for l in range(1, 2 * h + 2):
        power = power @ adjs
        total += beta ** l * power
    return total


def all_neighbor_sets(m: int) -> np.ndarray:
    """Every 0/1 vector of length m, shape (2^m, m)."""
    return np.array(list(itertools.product((0.0, 1.0), repeat=m)))


def rewiring_stacks(base: np.ndarray) -> np.ndarray:
    """All graphs obtained by attaching a new last node to ``base`` in every way.

    Any two members differ only in the edges of that node, so together they
    enumerate every neighboring pair whose rewired node is the last one.
    """
    m = base.shape[0]
    n = m + 1
    sets = all_neighbor_sets(m)
    stack = np.zeros((sets.shape[0], n, n))
    stack[:, :m, :m] = base
    stack[:, m, :m] = sets
    stack[:, :m, m] = sets
    return stack


def all_graphs(n: int):
    """Every labeled simple graph on n nodes as a dense adjacency matrix."""
    iu, ju = np.triu_indices(n, 1)
    for bits in itertools.product((0.0, 1.0), repeat=iu.size):
        a = np.zeros((n, n))
        a[iu, ju] = bits
        yield a + a.T


def max_katz_change(base: np.ndarray, beta: float, h: int) -> float:
    """Largest entrywise change of truncated Katz over rewirings of the extra node."""
    hk = batched_truncated_katz(rewiring_stacks(base), beta, h)
    return float(np.max(hk.max(axis=0) - hk.min(axis=0)))


def max_projected_change(base: np.ndarray, beta: float, h: int, v: np.ndarray) -> float:
    """Largest Frobenius change of (truncated Katz) @ v over rewirings of the extra node."""
    hk = batched_truncated_katz(rewiring_stacks(base), beta, h)
    proj = hk @ v
    flat = proj.reshape(proj.shape[0], -1)
    # pairwise distances among all rewirings
    sq = np.sum(flat ** 2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2 * flat @ flat.T
    return float(np.sqrt(max(d2.max(), 0.0)))


def set_partitions(n: int) -> np.ndarray:
    """All set partitions of n items as restricted growth strings."""
    out = []

    def grow(prefix, top):
        if len(prefix) == n:
            out.append(prefix)
            return
        for c in range(top + 2):
            grow(prefix + [c], max(top, c))

    grow([0], 0)
    return np.array(out)


def brute_force_best_modularity(a: np.ndarray) -> tuple[float, np.ndarray]:
    deg = a.sum(axis=1)
    two_m = deg.sum()
    b = a - np.outer(deg, deg) / two_m
    labels = set_partitions(a.shape[0])
    same = labels[:, :, None] == labels[:, None, :]
    q = np.einsum("pij,ij->p", same, b) / two_m
    best = int(np.argmax(q))
    return float(q[best]), labels[best]


def subspace_sin(u: np.ndarray, v: np.ndarray) -> float:
    """Sine of the largest principal angle between two orthonormal bases."""
    cos = np.linalg.svd(u.T @ v, compute_uv=False)
    return float(np.sqrt(max(0.0, 1.0 - cos.min() ** 2)))


def random_psd(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.standard_normal((n, n))
    return g @ g.T


def thresholded_edges(recovered: Graph, truth: Graph) -> set | None:
    """Recovered edges weighing at least half the smallest recovered true-edge weight.

    None when some true edge was not recovered with positive weight.
    """
    weights = dict(zip(recovered.edges, recovered.weights))
    true_weights = [weights.get(e, 0.0) for e in truth.edges]
    threshold = 0.5 * min(true_weights)
    if threshold <= 0:
        return None
    return {e for e, w in weights.items() if w >= threshold}
