"""Simple undirected graphs, edge-list I/O and adjacency matrices."""

from __future__ import annotations

import gzip
import io
import os
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np
import scipy.sparse as sp

COMMENT_PREFIXES = ("#", "%")


class EdgeListError(ValueError):
    """Raised when an edge list cannot be parsed."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on nodes ``0..n-1``.

    ``edges`` holds sorted ``(u, v)`` pairs with ``u < v``. ``weights`` is
    parallel to ``edges`` when the graph is weighted. ``labels`` maps node id
    to the token it was read from, when relabeling was used.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    weights: tuple[float, ...] | None = None
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("node count must be nonnegative")
        prev = None
        for u, v in self.edges:
            if not 0 <= u < v < self.n:
                raise ValueError(f"invalid edge ({u}, {v}) for n={self.n}")
            if prev is not None and (u, v) <= prev:
                raise ValueError("edges must be sorted and unique")
            prev = (u, v)
        if self.weights is not None:
            if len(self.weights) != len(self.edges):
                raise ValueError("weights must align with edges")
            if any(not w > 0 for w in self.weights):
                raise ValueError("edge weights must be strictly positive")
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("labels must name every node")

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        weights: Iterable[float] | None = None,
        labels: tuple[str, ...] | None = None,
    ) -> "Graph":
        """Build a graph, dropping self-loops and duplicates (first weight wins)."""
        ws = None if weights is None else list(weights)
        seen: dict[tuple[int, int], float | None] = {}
        for i, (u, v) in enumerate(edges):
            u, v = int(u), int(v)
            if u == v:
                continue
            key = (u, v) if u < v else (v, u)
            if key in seen:
                continue
            seen[key] = None if ws is None else float(ws[i])
        if ws is not None:
            seen = {e: w for e, w in seen.items() if w > 0}
        keys = tuple(sorted(seen))
        w_out = None if ws is None else tuple(seen[e] for e in keys)
        return cls(n=n, edges=keys, weights=w_out, labels=labels)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def weighted(self) -> bool:
        return self.weights is not None

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        if self.edges:
            arr = np.asarray(self.edges, dtype=np.int64)
            np.add.at(deg, arr[:, 0], 1)
            np.add.at(deg, arr[:, 1], 1)
        return deg

    def edge_set(self) -> set[tuple[int, int]]:
        return set(self.edges)

    def label(self, node: int) -> str:
        return self.labels[node] if self.labels is not None else str(node)

    def with_labels(self, labels: tuple[str, ...] | None) -> "Graph":
        return Graph(self.n, self.edges, self.weights, labels)

    def unweighted(self) -> "Graph":
        return Graph(self.n, self.edges, None, self.labels)


def _open_text(path: str | os.PathLike, mode: str) -> TextIO:
    if str(path).endswith(".gz"):
        return gzip.open(path, mode + "t", encoding="utf-8")
    return open(path, mode, encoding="utf-8")


def load_edge_list(
    source: TextIO | str | os.PathLike,
    relabel: bool = False,
    *,
    labels: tuple[str, ...] | None = None,
    n: int | None = None,
) -> Graph:
    """Parse a whitespace-separated edge list.

    Each non-comment line is ``u v`` or ``u v w``. Self-loops and repeated
    pairs are dropped. With ``relabel`` set, tokens are assigned dense ids in
    order of first appearance and kept as ``Graph.labels``; otherwise tokens
    must be nonnegative integers. Passing ``labels`` reuses an existing
    mapping (unknown tokens are an error). ``n`` forces a minimum node count,
    which keeps trailing isolated nodes.
    """
    if isinstance(source, (str, os.PathLike)):
        with _open_text(source, "r") as fh:
            return load_edge_list(fh, relabel, labels=labels, n=n)

    index: dict[str, int] = {}
    if labels is not None:
        index = {tok: i for i, tok in enumerate(labels)}
    pairs: list[tuple[int, int]] = []
    weights: list[float] = []
    has_weight: bool | None = None
    saw_content = False

    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith(COMMENT_PREFIXES):
            continue
        saw_content = True
        parts = line.split()
        if len(parts) not in (2, 3):
            raise EdgeListError(f"line {lineno}: expected 2 or 3 fields, got {len(parts)}")
        line_weighted = len(parts) == 3
        if has_weight is None:
            has_weight = line_weighted
        elif has_weight != line_weighted:
            raise EdgeListError(f"line {lineno}: mixed weighted and unweighted lines")
        ids = []
        for tok in parts[:2]:
            if labels is not None:
                if tok not in index:
                    raise EdgeListError(f"line {lineno}: unknown node {tok!r}")
                ids.append(index[tok])
            elif relabel:
                ids.append(index.setdefault(tok, len(index)))
            else:
                try:
                    val = int(tok)
                except ValueError:
                    raise EdgeListError(f"line {lineno}: node id {tok!r} is not an integer") from None
                if val < 0:
                    raise EdgeListError(f"line {lineno}: negative node id {val}")
                ids.append(val)
        if line_weighted:
            try:
                weights.append(float(parts[2]))
            except ValueError:
                raise EdgeListError(f"line {lineno}: bad weight {parts[2]!r}") from None
        pairs.append((ids[0], ids[1]))

    if not saw_content:
        raise EdgeListError("edge list is empty")

    if labels is not None:
        node_count = len(labels)
        out_labels = labels
    elif relabel:
        node_count = len(index)
        out_labels = tuple(index)
    else:
        node_count = 1 + max(max(p) for p in pairs)
        out_labels = None
    if n is not None:
        if out_labels is not None and n != node_count:
            raise EdgeListError(f"node count {n} does not match {node_count} labels")
        node_count = max(node_count, n)
    return Graph.from_edges(node_count, pairs, weights if has_weight else None, out_labels)


def format_weight(w: float) -> str:
    # repr is the shortest string that round-trips
    return repr(float(w))


def write_edge_list(g: Graph, sink: TextIO | str | os.PathLike) -> None:
    """Write one ``u v`` (or ``u v w``) line per edge, using labels if present."""
    if isinstance(sink, (str, os.PathLike)):
        with _open_text(sink, "w") as fh:
            write_edge_list(g, fh)
        return
    buf = io.StringIO()
    if g.weights is None:
        for u, v in g.edges:
            buf.write(f"{g.label(u)} {g.label(v)}\n")
    else:
        for (u, v), w in zip(g.edges, g.weights):
            buf.write(f"{g.label(u)} {g.label(v)} {format_weight(w)}\n")
    sink.write(buf.getvalue())


def adjacency_matrix(g: Graph) -> sp.csr_array:
    """Binary symmetric adjacency matrix (float64, sparse)."""
    if not g.edges:
        return sp.csr_array((g.n, g.n), dtype=np.float64)
    arr = np.asarray(g.edges, dtype=np.int64)
    rows = np.concatenate([arr[:, 0], arr[:, 1]])
    cols = np.concatenate([arr[:, 1], arr[:, 0]])
    data = np.ones(rows.size, dtype=np.float64)
    return sp.csr_array((data, (rows, cols)), shape=(g.n, g.n))


def max_degree(g: Graph) -> int:
    if g.n == 0:
        return 0
    return int(g.degrees().max())


def binarize_top_edges(g: Graph, m: int) -> Graph:
    """Keep the ``m`` heaviest edges as an unweighted graph.

    Ties are broken by edge order so the result is deterministic.
    """
    if g.weights is None or m >= g.num_edges:
        return g.unweighted()
    w = np.asarray(g.weights)
    order = np.argsort(-w, kind="stable")[: max(m, 0)]
    keep = sorted(g.edges[i] for i in order)
    return Graph(g.n, tuple(keep), None, g.labels)


def graph_stats(g: Graph) -> dict:
    deg = g.degrees()
    stats = {
        "nodes": g.n,
        "edges": g.num_edges,
        "max_degree": int(deg.max()) if g.n else 0,
        "mean_degree": float(deg.mean()) if g.n else 0.0,
        "isolated_nodes": int((deg == 0).sum()),
    }
    if g.weights is not None and g.weights:
        stats["total_weight"] = float(np.sum(g.weights))
    return stats
