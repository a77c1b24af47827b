"""Sparse undirected graph storage, connected components, and truncated all-pairs
shortest paths.

Graphs are simple (no self-loops, no multi-edges) and immutable once built.
Distances are hop counts; pairs farther than the truncation cap (or in another
component) carry the finite sentinel ``2 * cap`` so downstream matrix work stays
bounded.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse import csgraph

from .errors import PipelineError, ValidationError


def default_cap(n: int, k: float = 3.0) -> int:
    """Truncation depth for shortest-path searches: ceil(k * ln n), at least 1."""
    if n < 1:
        raise ValidationError("default_cap: n must be >= 1")
    if k <= 0:
        raise ValidationError("default_cap: k must be > 0")
    return max(1, math.ceil(k * math.log(n)))


class Graph:
    """Undirected simple graph in CSR form with 0-based dense vertex ids.

    Build with :meth:`from_edges`; the raw constructor trusts its arguments.
    """

    __slots__ = ("n", "indptr", "indices")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        self.indptr = indptr
        self.indices = indices
        self.indptr.flags.writeable = False
        self.indices.flags.writeable = False

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        """Build a graph on ``n`` vertices from an iterable of (u, v) pairs.

        Duplicate pairs are merged. Self-loops and out-of-range endpoints are
        rejected.
        """
        if n < 0:
            raise ValidationError("Graph: vertex count must be nonnegative")
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                       dtype=np.int64)
        if e.size == 0:
            e = e.reshape(0, 2)
        if e.ndim != 2 or e.shape[1] != 2:
            raise ValidationError("Graph: edges must be pairs")
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValidationError("Graph: edge endpoint out of range")
        if np.any(e[:, 0] == e[:, 1]):
            raise ValidationError("Graph: self-loops are not allowed")
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        if lo.size:
            canon = np.unique(np.stack([lo, hi], axis=1), axis=0)
            lo, hi = canon[:, 0], canon[:, 1]
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(n, indptr, dst)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def n_edges(self) -> int:
        return int(self.indices.size // 2)

    def edge_array(self) -> np.ndarray:
        """Canonical (u < v) edge list as an (m, 2) array."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        keep = src < self.indices
        return np.stack([src[keep], self.indices[keep]], axis=1)

    def to_csr(self) -> csr_matrix:
        data = np.ones(self.indices.size, dtype=np.float64)
        return csr_matrix((data, self.indices.copy(), self.indptr.copy()),
                          shape=(self.n, self.n))


@dataclass(frozen=True)
class DistanceMatrix:
    """Truncated geodesic distances: entries in {0..cap} plus the sentinel."""

    entries: np.ndarray
    cap: int
    sentinel: int

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def finite_mask(self) -> np.ndarray:
        return self.entries != self.sentinel


@dataclass(frozen=True)
class ComponentLabels:
    """Partition of the vertex set into connected components."""

    labels: np.ndarray
    sizes: np.ndarray

    @property
    def n_components(self) -> int:
        return int(self.sizes.size)


@dataclass(frozen=True)
class DegreeStats:
    min: int
    max: int
    mean: float
    median: float
    per_group_mean: dict | None = field(default=None)


def bfs_distances(g: Graph, source: int, cap: int) -> np.ndarray:
    """Hop counts from ``source``, truncated at ``cap``; unreachable or farther
    vertices carry the sentinel ``2 * cap``."""
    if not 0 <= source < g.n:
        raise ValidationError(f"bfs_distances: source {source} out of range [0, {g.n})")
    if cap < 1:
        raise ValidationError("bfs_distances: cap must be >= 1")
    sentinel = 2 * cap
    dist = np.full(g.n, sentinel, dtype=np.int32)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    level = 0
    indptr, indices = g.indptr, g.indices
    while frontier.size and level < cap:
        level += 1
        # gather all neighbors of the frontier in one shot
        starts = indptr[frontier]
        counts = indptr[frontier + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        within = np.arange(total, dtype=np.int64)
        within -= np.repeat(np.cumsum(counts) - counts, counts)
        out = indices[np.repeat(starts, counts) + within]
        fresh = out[dist[out] == sentinel]
        if fresh.size == 0:
            break
        frontier = np.unique(fresh)
        dist[frontier] = level
    return dist


def _allocate_square_int32(n: int) -> np.ndarray:
    try:
        return np.empty((n, n), dtype=np.int32)
    except MemoryError as exc:
        raise PipelineError(
            f"cannot allocate {n}x{n} distance matrix ({4 * n * n / 1e9:.1f} GB)"
        ) from exc


def all_pairs_distances(g: Graph, cap: int, workers: int = 1) -> DistanceMatrix:
    """Truncated all-pairs hop counts via one breadth-first search per source.

    The result is bitwise identical for any ``workers`` count; workers only
    split the source set.
    """
    if cap < 1:
        raise ValidationError("all_pairs_distances: cap must be >= 1")
    n = g.n
    sentinel = 2 * cap
    out = _allocate_square_int32(n)
    if n == 0:
        return DistanceMatrix(out, cap, sentinel)
    adj = g.to_csr()

    def fill(chunk: np.ndarray) -> None:
        d = csgraph.dijkstra(adj, directed=False, unweighted=True,
                             limit=cap, indices=chunk)
        np.copyto(out[chunk], np.where(np.isfinite(d), d, sentinel).astype(np.int32))

    sources = np.arange(n, dtype=np.int64)
    if workers <= 1 or n < 2 * workers:
        fill(sources)
    else:
        chunks = np.array_split(sources, workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, chunks))
    return DistanceMatrix(out, cap, sentinel)


def connected_components(g: Graph) -> ComponentLabels:
    if g.n == 0:
        return ComponentLabels(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))
    _, labels = csgraph.connected_components(g.to_csr(), directed=False)
    labels = labels.astype(np.int64)
    sizes = np.bincount(labels)
    return ComponentLabels(labels, sizes)


def giant_component(g: Graph) -> tuple[Graph, np.ndarray]:
    """Induced subgraph on the largest component plus the original-vertex map.

    Ties between equal-size components go to the one containing the smallest
    vertex id, so seeded pipelines stay deterministic.
    """
    if g.n == 0:
        raise ValidationError("giant_component: empty graph")
    comp = connected_components(g)
    max_size = comp.sizes.max()
    # first vertex lying in any maximum-size component wins the tie-break
    winner = int(np.flatnonzero(comp.sizes[comp.labels] == max_size)[0])
    cid = comp.labels[winner]
    mapping = np.flatnonzero(comp.labels == cid).astype(np.int64)
    new_id = np.full(g.n, -1, dtype=np.int64)
    new_id[mapping] = np.arange(mapping.size)
    src = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(g.indptr))
    keep = (new_id[src] >= 0) & (src < g.indices)
    edges = np.stack([new_id[src[keep]], new_id[g.indices[keep]]], axis=1)
    return Graph.from_edges(mapping.size, edges), mapping


def degree_stats(g: Graph, labels: np.ndarray | None = None) -> DegreeStats:
    """Order statistics of the degree sequence, optionally grouped by label."""
    deg = g.degrees()
    if deg.size == 0:
        raise ValidationError("degree_stats: empty graph")
    per_group = None
    if labels is not None:
        labels = np.asarray(labels)
        if labels.shape[0] != g.n:
            raise ValidationError("degree_stats: labels length mismatch")
        per_group = {int(a): float(deg[labels == a].mean())
                     for a in np.unique(labels)}
    return DegreeStats(
        min=int(deg.min()),
        max=int(deg.max()),
        mean=float(deg.mean()),
        median=float(np.median(deg)),
        per_group_mean=per_group,
    )
