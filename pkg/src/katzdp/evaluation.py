"""Community detection and Avg-F1 comparison of partitions."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import networkx as nx
import numpy as np

from .graph import COMMENT_PREFIXES, Graph


@dataclass(frozen=True)
class CommunityPartition:
    """Disjoint, nonempty communities covering nodes ``0..n-1``."""

    communities: tuple[frozenset[int], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for c in self.communities:
            if not c:
                raise ValueError("communities must be nonempty")
            if seen & c:
                raise ValueError("communities must be disjoint")
            seen |= c
        if seen != set(range(len(seen))):
            raise ValueError("communities must cover nodes 0..n-1")

    @classmethod
    def from_sets(cls, communities: Iterable[Iterable[int]]) -> "CommunityPartition":
        sets = [frozenset(int(x) for x in c) for c in communities]
        # canonical order: by smallest member
        sets.sort(key=min)
        return cls(tuple(sets))

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "CommunityPartition":
        groups: dict[int, set[int]] = {}
        for node, lab in enumerate(labels):
            groups.setdefault(lab, set()).add(node)
        return cls.from_sets(groups.values())

    @property
    def n(self) -> int:
        return sum(len(c) for c in self.communities)

    def __len__(self) -> int:
        return len(self.communities)

    def labels(self) -> np.ndarray:
        out = np.empty(self.n, dtype=np.int64)
        for i, c in enumerate(self.communities):
            out[list(c)] = i
        return out


@dataclass(frozen=True)
class F1Report:
    avg_f1: float
    per_community_f1: tuple[tuple[int, int, float], ...]
    detected_to_reference: float
    reference_to_detected: float


def to_networkx(g: Graph) -> nx.Graph:
    nxg = nx.Graph()
    nxg.add_nodes_from(range(g.n))
    if g.weights is None:
        nxg.add_edges_from(g.edges)
    else:
        nxg.add_weighted_edges_from((u, v, w) for (u, v), w in zip(g.edges, g.weights))
    return nxg


def louvain(g: Graph, rng: np.random.Generator, resolution: float = 1.0) -> CommunityPartition:
    """Louvain modularity maximization; the node visit order is seeded from ``rng``."""
    if g.n == 0:
        raise ValueError("graph has no nodes")
    seed = int(rng.integers(2**32))
    comms = nx.community.louvain_communities(
        to_networkx(g), weight="weight", resolution=resolution, seed=seed
    )
    return CommunityPartition.from_sets(comms)


def modularity(g: Graph, partition: CommunityPartition) -> float:
    return nx.community.modularity(to_networkx(g), partition.communities, weight="weight")


def pair_f1(c1: frozenset[int] | set[int], c2: frozenset[int] | set[int]) -> float:
    """F1 of precision ``|c1&c2|/|c1|`` and recall ``|c1&c2|/|c2|``; 0 if disjoint."""
    if not c1 or not c2:
        raise ValueError("communities must be nonempty")
    inter = len(c1 & c2)
    if inter == 0:
        return 0.0
    prec = inter / len(c1)
    rec = inter / len(c2)
    return 2 * prec * rec / (prec + rec)


def _f1_matrix(a: CommunityPartition, b: CommunityPartition) -> np.ndarray:
    la, lb = a.labels(), b.labels()
    inter = np.zeros((len(a), len(b)))
    np.add.at(inter, (la, lb), 1.0)
    sa = np.array([len(c) for c in a.communities], dtype=np.float64)
    sb = np.array([len(c) for c in b.communities], dtype=np.float64)
    # harmonic mean of prec and recall simplifies to 2|c1&c2| / (|c1| + |c2|)
    return 2.0 * inter / (sa[:, None] + sb[None, :])


def avg_f1(detected: CommunityPartition, reference: CommunityPartition) -> F1Report:
    """Symmetric best-match Avg-F1 between two partitions of the same nodes.

    Each community is matched to its highest-F1 partner on the other side
    (lowest index wins ties); the two directional means are averaged.
    """
    if detected.n != reference.n:
        raise ValueError(
            f"partitions cover different node sets ({detected.n} vs {reference.n} nodes)"
        )
    f1 = _f1_matrix(detected, reference)
    match = np.argmax(f1, axis=1)
    best_d = f1[np.arange(len(detected)), match]
    best_r = f1.max(axis=0)
    d2r = float(best_d.mean())
    r2d = float(best_r.mean())
    per = tuple((i, int(j), float(s)) for i, (j, s) in enumerate(zip(match, best_d)))
    return F1Report(
        avg_f1=0.5 * (d2r + r2d),
        per_community_f1=per,
        detected_to_reference=d2r,
        reference_to_detected=r2d,
    )


def load_partition(
    source: TextIO | str | os.PathLike,
    n: int,
    labels: tuple[str, ...] | None = None,
) -> CommunityPartition:
    """Read ``node_id community_id`` lines into a partition over ``n`` nodes."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return load_partition(fh, n, labels)
    index = {tok: i for i, tok in enumerate(labels)} if labels is not None else None
    assignment: dict[int, str] = {}
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith(COMMENT_PREFIXES):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'node community'")
        tok, comm = parts
        if index is not None:
            if tok not in index:
                raise ValueError(f"line {lineno}: unknown node {tok!r}")
            node = index[tok]
        else:
            node = int(tok)
        if not 0 <= node < n:
            raise ValueError(f"line {lineno}: node {node} out of range")
        assignment[node] = comm
    missing = n - len(assignment)
    if missing:
        raise ValueError(f"{missing} nodes have no community label")
    groups: dict[str, set[int]] = {}
    for node, comm in assignment.items():
        groups.setdefault(comm, set()).add(node)
    return CommunityPartition.from_sets(groups.values())
