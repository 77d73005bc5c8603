"""Exact evaluation of the chain-infimum transform on finite spaces.

On a finite space every chain can be loop-erased without increasing its
cost (link costs are nonnegative and deleting a cycle keeps the shared
endpoints), so the infimum is attained by a simple chain and equals the
all-pairs shortest path length on the complete graph weighted by the link
cost.  ``dphi_exact`` computes that; ``dphi_bruteforce`` re-derives it by
enumerating every simple chain, sharing no search logic with the shortest
path so the two act as independent oracles for each other.
"""
from __future__ import annotations

import heapq
import io
from dataclasses import dataclass

import numpy as np

from .core import Chain, MetricContext, delta, verify_metric_axioms


@dataclass(frozen=True)
class FiniteSpace:
    """A finite metric space given by an explicit distance matrix.

    ``weights[i, j]`` is the symmetric nonnegative weight attached to the
    pair; a missing weight matrix means weight 0 everywhere.  Points are
    addressed by index, the anchor is one of them.
    """

    distances: np.ndarray
    anchor_index: int = 0
    weights: np.ndarray | None = None

    def __post_init__(self):
        D = np.asarray(self.distances, dtype=float)
        object.__setattr__(self, "distances", D)
        report = verify_metric_axioms(D, tol=1e-12)
        if not report.ok:
            raise ValueError(f"invalid distance matrix: {report.summary()}")
        if not 0 <= self.anchor_index < len(D):
            raise ValueError(f"anchor index {self.anchor_index} out of range")
        if self.weights is not None:
            W = np.asarray(self.weights, dtype=float)
            if W.shape != D.shape:
                raise ValueError("weight matrix shape mismatch")
            if np.any(W < 0) or np.any(np.abs(W - W.T) > 0):
                raise ValueError("weights must be nonnegative and symmetric")
            object.__setattr__(self, "weights", W)

    def __len__(self) -> int:
        return len(self.distances)

    def context(self) -> MetricContext:
        D = self.distances
        W = self.weights
        if W is None:
            weight = lambda i, j: 0.0
        else:
            weight = lambda i, j: W[i, j]
        return MetricContext(
            base_distance=lambda i, j: D[i, j],
            weight=weight,
            anchor=self.anchor_index,
        )


@dataclass(frozen=True)
class DphiMatrix:
    """Exact transformed-distance matrix over a finite space."""

    values: np.ndarray

    def __getitem__(self, key):
        return self.values[key]


def link_table(ctx: MetricContext, space: FiniteSpace) -> np.ndarray:
    """All-pairs single-link costs."""
    n = len(space)
    table = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            table[i, j] = table[j, i] = delta(ctx, i, j)
    return table


def _dijkstra_row(weights: np.ndarray, source: int) -> np.ndarray:
    n = len(weights)
    dist = np.full(n, np.inf)
    dist[source] = 0.0
    done = np.zeros(n, dtype=bool)
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        row = weights[u]
        for v in range(n):
            if not done[v]:
                nd = d + row[v]
                if nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
    return dist


def dphi_exact(ctx: MetricContext, space: FiniteSpace) -> DphiMatrix:
    """Exact transform via shortest paths over the complete link-cost graph."""
    n = len(space)
    if n == 0:
        raise ValueError("space must have at least 1 point")
    table = link_table(ctx, space)
    values = np.vstack([_dijkstra_row(table, s) for s in range(n)])
    return DphiMatrix(values=values)


def dphi_bruteforce(
    ctx: MetricContext, space: FiniteSpace, max_points: int = 10
) -> DphiMatrix:
    """Exact transform by exhaustive enumeration of all simple chains.

    Depth-first with a visited set and deliberately no cost pruning, to keep
    this oracle maximally independent of the shortest-path implementation.
    """
    n = len(space)
    if n > max_points:
        raise ValueError(f"space with {n} points too large for enumeration")
    table = [[delta(ctx, i, j) for j in range(n)] for i in range(n)]
    values = np.zeros((n, n))

    def best_chain(start: int, target: int) -> float:
        best = np.inf
        visited = [False] * n
        visited[start] = True

        def extend(u: int, cost: float):
            nonlocal best
            row = table[u]
            for v in range(n):
                if v == target:
                    c = cost + row[v]
                    if c < best:
                        best = c
                elif not visited[v]:
                    visited[v] = True
                    extend(v, cost + row[v])
                    visited[v] = False

        extend(start, 0.0)
        return best

    for i in range(n):
        for j in range(i + 1, n):
            values[i, j] = values[j, i] = best_chain(i, j)
    return DphiMatrix(values=values)


def witness_chain(space: FiniteSpace, node_path: list[int]) -> Chain:
    return Chain(node_path)


def parse_distance_matrix(text: str) -> np.ndarray:
    """Parse the text format: first line n, then n rows of n reals."""
    tokens = text.split()
    if not tokens:
        raise ValueError("empty distance matrix input")
    n = int(tokens[0])
    values = [float(t) for t in tokens[1:]]
    if len(values) != n * n:
        raise ValueError(f"expected {n * n} entries, got {len(values)}")
    return np.array(values).reshape(n, n)


def load_distance_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return parse_distance_matrix(fh.read())


def dump_distance_matrix(matrix: np.ndarray, fh: io.TextIOBase) -> None:
    n = len(matrix)
    fh.write(f"{n}\n")
    for row in matrix:
        fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
