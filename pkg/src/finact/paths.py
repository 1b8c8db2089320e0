"""Path metrics on weighted graphs.

Two graph flavours share one neighbour protocol, ``neighbors(v)`` yielding
``(u, weight, label)``, plus ``key(v)`` giving a hashable, ordered vertex key:

* :class:`MaterializedGraph` -- integer vertices with an explicit edge list
* :class:`ImplicitGraph`     -- vertices (finite element, x-index) generated on demand
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

from .exceptions import BudgetExceeded

INF = math.inf


class MaterializedGraph:
    """Undirected graph on ``range(n)``; parallel edges keep the minimum weight."""

    def __init__(self, n: int, edges: Iterable[tuple] = ()):
        self.n = n
        self._w: dict = {}
        self._label: dict = {}
        self._min = INF
        for e in edges:
            self.add_edge(*e)
        self._adj = None

    def add_edge(self, i: int, j: int, w: float, label: Any = None) -> None:
        if w < 0:
            raise ValueError("negative weights are not supported")
        if i == j:
            return
        key = (i, j) if i < j else (j, i)
        if w < self._w.get(key, INF):
            self._w[key] = w
            self._label[key] = label
            self._min = min(self._min, w)
        self._adj = None

    @property
    def min_weight(self) -> float:
        return self._min

    @property
    def edges(self) -> list:
        return [(i, j, w) for (i, j), w in sorted(self._w.items())]

    def _adjacency(self):
        if self._adj is None:
            adj = [[] for _ in range(self.n)]
            for (i, j), w in sorted(self._w.items()):
                adj[i].append((j, w, self._label[(i, j)]))
                adj[j].append((i, w, self._label[(i, j)]))
            self._adj = adj
        return self._adj

    def neighbors(self, v: int):
        return self._adjacency()[v]

    def key(self, v: int):
        return v

    def weight_matrix(self) -> np.ndarray:
        W = np.full((self.n, self.n), INF)
        np.fill_diagonal(W, 0.0)
        for (i, j), w in self._w.items():
            W[i, j] = W[j, i] = w
        return W


class ImplicitGraph:
    """Graph on pairs (q, x) of quotient elements and window point indices.

    ``steps[x]`` lists ``(s, y, weight, label)``: from (v, x) there is an edge
    to (v * s, y).  Neighbour generation is pure.
    """

    def __init__(self, quotient, steps: dict):
        self.quotient = quotient
        self.steps = steps
        self.min_weight = min((w for lst in steps.values() for _, _, w, _ in lst), default=INF)

    def neighbors(self, v):
        q = self.quotient
        elem, x = v
        for s, y, w, label in self.steps.get(x, ()):
            yield (q.mul(elem, s), y), w, label

    def key(self, v):
        return (self.quotient.key(v[0]), v[1])


@dataclass
class SearchResult:
    source: Any
    dist: dict = field(default_factory=dict)
    parent: dict = field(default_factory=dict)
    vertices: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.dist)

    def __getitem__(self, key):
        return self.dist[key]

    def __contains__(self, key):
        return key in self.dist

    def get(self, key, default=None):
        return self.dist.get(key, default)

    def path_to(self, key) -> list:
        """Edges ``(from_key, to_key, label)`` of the recorded shortest path."""
        if key not in self.dist:
            raise KeyError(key)
        out = []
        while key in self.parent:
            prev, label = self.parent[key]
            out.append((prev, key, label))
            key = prev
        out.reverse()
        return out


def bounded_dijkstra(graph, source, bound: float = INF, max_vertices: int | None = None) -> SearchResult:
    """Exact distances from ``source`` to every vertex within ``bound``.

    Only vertices whose tentative distance is within the bound are ever
    stored, so the search stays inside the metric ball.  Ties in the queue
    break by vertex key.
    """
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    res = SearchResult(source=graph.key(source))
    sk = graph.key(source)
    res.dist[sk] = 0.0
    res.vertices[sk] = source
    done = set()
    heap = [(0.0, sk)]
    while heap:
        d, k = heapq.heappop(heap)
        if k in done or d > res.dist[k]:
            continue
        done.add(k)
        if d + graph.min_weight > bound:
            continue
        for u, w, label in graph.neighbors(res.vertices[k]):
            nd = d + w
            if nd > bound:
                continue
            uk = graph.key(u)
            if nd < res.dist.get(uk, INF):
                if uk not in res.dist:
                    if max_vertices is not None and len(res.dist) >= max_vertices:
                        raise BudgetExceeded(f"search visited more than {max_vertices} vertices")
                    res.vertices[uk] = u
                res.dist[uk] = nd
                res.parent[uk] = (k, label)
                heapq.heappush(heap, (nd, uk))
    return res


def all_pairs_oracle(graph: MaterializedGraph, cap: int = 2000) -> np.ndarray:
    """Floyd-Warshall distance matrix; unreachable pairs are +inf."""
    if graph.n > cap:
        raise BudgetExceeded(f"{graph.n} vertices exceed the all-pairs cap {cap}")
    D = graph.weight_matrix()
    for k in range(graph.n):
        np.minimum(D, D[:, k, None] + D[None, k, :], out=D)
    return D


def diameter(graph: MaterializedGraph, component: int | None = None, cap: int = 2000,
             distances: np.ndarray | None = None) -> float:
    """Largest finite distance, optionally restricted to the component of one vertex."""
    D = all_pairs_oracle(graph, cap) if distances is None else distances
    if D.size == 0:
        return 0.0
    if component is not None:
        members = np.isfinite(D[component])
        D = D[np.ix_(members, members)]
    finite = D[np.isfinite(D)]
    return float(finite.max()) if finite.size else 0.0
