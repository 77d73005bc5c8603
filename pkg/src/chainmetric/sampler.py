"""Sampled upper bounds for the chain-infimum transform on R^s.

The infimum over all chains is approximated from above by restricting the
intermediate points to a structured finite sample: nets on the
identification spheres, radial or ray ladders, the query endpoints and
their sphere projections.  These are exactly the chain shapes the
underlying constructions use, so they capture the optimal-chain geometry
at far lower node counts than uniform sampling.  Shortest paths on the
link-cost graph then give certified upper bounds, with the analytic floor
from :mod:`chainmetric.core` closing the bracket from below.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import rays as _rays
from . import std_map as _std
from .core import Chain, MetricContext
from .rays import ConeParam, psi, psi_matrix, ray_of, ray_through
from .std_map import harmonic_radius, phi_std, phi_std_matrix, sphere_bracket


@dataclass(frozen=True)
class SamplerConfig:
    dimension: int = 2
    max_sphere_index: int = 5
    angular_resolution: float = 0.5
    radial_steps: int = 2
    graph_mode: str = "auto"  # complete | structured | auto
    seed: int = 0

    def __post_init__(self):
        if self.dimension < 2:
            raise ValueError(f"dimension must be >= 2, got {self.dimension}")
        if self.max_sphere_index < 1:
            raise ValueError("max_sphere_index must be >= 1")
        if self.angular_resolution <= 0:
            raise ValueError("angular_resolution must be positive")
        if self.graph_mode not in ("complete", "structured", "auto"):
            raise ValueError(f"unknown graph mode {self.graph_mode!r}")


@dataclass(frozen=True)
class EuclidContext(MetricContext):
    """Euclidean base metric with the origin anchor and one of the two
    compactification weights; carries a vectorized pairwise link-cost path."""

    weight_kind: str = "std_phi"
    tau: float = 1e-9
    cone: Optional[ConeParam] = None

    def weight_matrix(self, points: np.ndarray) -> np.ndarray:
        if self.weight_kind == "std_phi":
            return phi_std_matrix(points, self.tau)
        return psi_matrix(points, self.cone, self.tau)

    def link_matrix(self, points: np.ndarray) -> np.ndarray:
        P = np.asarray(points, dtype=float)
        D = np.linalg.norm(P[:, None, :] - P[None, :, :], axis=2)
        inv = 1.0 / (1.0 + np.linalg.norm(P, axis=1))
        detour = inv[:, None] + self.weight_matrix(P) + inv[None, :]
        W = np.minimum(D, detour)
        np.fill_diagonal(W, 0.0)
        return W


def euclid_context(
    weight_kind: str = "std_phi",
    tau: float = 1e-9,
    cone: Optional[ConeParam] = None,
    dim: int = 2,
) -> EuclidContext:
    if weight_kind not in ("std_phi", "ray_psi"):
        raise ValueError(f"unknown weight kind {weight_kind!r}")
    if weight_kind == "ray_psi":
        cone = cone or ConeParam(dim=dim)
        weight = lambda x, y: psi(x, y, cone, tau)
    else:
        weight = lambda x, y: phi_std(x, y, tau)
    dist = lambda x, y: float(np.linalg.norm(np.asarray(x, float) - np.asarray(y, float)))
    return EuclidContext(
        base_distance=dist,
        weight=weight,
        anchor=np.zeros(dim),
        weight_kind=weight_kind,
        tau=tau,
        cone=cone,
    )


@dataclass
class NodeSet:
    """Sample points with provenance tags; endpoints come first."""

    points: np.ndarray
    provenance: list

    def __len__(self) -> int:
        return len(self.points)


def _net_directions(config: SamplerConfig) -> np.ndarray:
    s, res = config.dimension, config.angular_resolution
    if s == 2:
        count = max(1, int(np.ceil(2.0 * np.pi / res)))
        angles = np.arange(count) * (2.0 * np.pi / count)
        return np.column_stack([np.cos(angles), np.sin(angles)])
    count = min(2000, max(8, int(np.ceil((np.pi / res) ** (s - 1)))))
    rng = np.random.default_rng(config.seed)
    dirs = rng.normal(size=(count, s))
    return dirs / np.linalg.norm(dirs, axis=1)[:, None]


def _dedupe(points: list, provenance: list) -> NodeSet:
    seen, keep_p, keep_t = {}, [], []
    for p, tag in zip(points, provenance):
        key = tuple(np.round(np.asarray(p, float), 12))
        if key not in seen:
            seen[key] = True
            keep_p.append(np.asarray(p, float))
            keep_t.append(tag)
    return NodeSet(points=np.array(keep_p), provenance=keep_t)


def build_sample(
    config: SamplerConfig,
    endpoints,
    weight_kind: str = "std_phi",
    cone: Optional[ConeParam] = None,
) -> NodeSet:
    """Structured sample: endpoints, their sphere projections and ladders,
    plus angular nets placed exactly on the identification spheres."""
    if weight_kind == "ray_psi":
        cone = cone or ConeParam(dim=config.dimension)
    pts, prov = [], []
    for e in endpoints:
        e = np.asarray(e, dtype=float)
        if not np.all(np.isfinite(e)) or len(e) != config.dimension:
            raise ValueError(f"bad endpoint {e!r} for dimension {config.dimension}")
        pts.append(e)
        prov.append("endpoint")

    M = config.max_sphere_index
    dirs = _net_directions(config)
    if weight_kind == "std_phi":
        for m in range(1, M + 1):
            am = harmonic_radius(m)
            for u in dirs:
                pts.append(am * u)
                prov.append(f"sphere({m})")
    else:
        for u in dirs:
            pts.append(u)
            prov.append("sphere(1)")
            ray = ray_of(u, cone)
            for m in range(2, M + 1):
                t = _rays._ray_sphere_param(ray, harmonic_radius(m))
                pts.append(ray.point_at(t))
                prov.append("ray-ladder")

    for e in endpoints:
        e = np.asarray(e, dtype=float)
        n = float(np.linalg.norm(e))
        if n < 1.0:
            continue
        m = sphere_bracket(n) if n > 1.0 else 1
        if weight_kind == "std_phi":
            u = e / n
            for j in (m, m + 1):
                pts.append(harmonic_radius(j) * u)
                prov.append(f"sphere({j})")
            for j in range(1, M + 1):
                pts.append(harmonic_radius(j) * u)
                prov.append("radial")
            anchor_pt = u
        else:
            ray, _ = ray_through(e, cone)
            for j in (m, m + 1):
                t = _rays._ray_sphere_param(ray, harmonic_radius(j))
                pts.append(ray.point_at(t))
                prov.append(f"sphere({j})")
            for j in range(1, M + 1):
                t = _rays._ray_sphere_param(ray, harmonic_radius(j))
                pts.append(ray.point_at(t))
                prov.append("ray-ladder")
            anchor_pt = ray.base
        for j in range(1, config.radial_steps + 1):
            f = j / (config.radial_steps + 1)
            pts.append((1.0 - f) * anchor_pt + f * e)
            prov.append("radial")
    return _dedupe(pts, prov)


@dataclass
class SampleGraph:
    """Link-cost graph over a node set; shortest paths certify upper bounds."""

    ctx: EuclidContext
    nodes: NodeSet
    adjacency: list
    mode: str
    link: np.ndarray = field(repr=False, default=None)

    def node_index(self, x, tol: float = 1e-9) -> int:
        x = np.asarray(x, dtype=float)
        d = np.linalg.norm(self.nodes.points - x, axis=1)
        i = int(np.argmin(d))
        if d[i] > tol:
            raise KeyError(f"point {x} is not a graph node (nearest at {d[i]})")
        return i


def _knearest_pairs(D: np.ndarray, k: int) -> set:
    pairs = set()
    n = len(D)
    k = min(k, n - 1)
    order = np.argsort(D, axis=1, kind="stable")
    for i in range(n):
        for j in order[i, 1 : k + 1]:
            pairs.add((min(i, int(j)), max(i, int(j))))
    return pairs


def build_graph(ctx: EuclidContext, nodes: NodeSet, mode: str = "auto") -> SampleGraph:
    """Weight every retained node pair with the link cost.

    Complete mode keeps all pairs.  Structured mode keeps same-sphere and
    nearby Euclidean neighbors, zero-weight identification links and every
    edge incident to an endpoint; cheaper for large samples and validated
    against complete mode in the tests.
    """
    n = len(nodes)
    if n < 2:
        raise ValueError("need at least 2 nodes")
    if mode == "auto":
        mode = "complete" if n <= 2000 else "structured"
    W = ctx.link_matrix(nodes.points)

    if mode == "complete":
        adjacency = [
            [(j, W[i, j]) for j in range(n) if j != i] for i in range(n)
        ]
        return SampleGraph(ctx=ctx, nodes=nodes, adjacency=adjacency, mode=mode, link=W)

    P = nodes.points
    D = np.linalg.norm(P[:, None, :] - P[None, :, :], axis=2)
    pairs = _knearest_pairs(D, 6)
    # Identification and same-sphere structure: keep every pair whose weight
    # drops below the Euclidean distance, plus same-sphere near neighbors.
    cheap = np.transpose(np.nonzero(W < D - 1e-15))
    for i, j in cheap:
        if i < j:
            pairs.add((int(i), int(j)))
    for i, tag in enumerate(nodes.provenance):
        if tag == "endpoint":
            for j in range(n):
                if j != i:
                    pairs.add((min(i, j), max(i, j)))
    adjacency = [[] for _ in range(n)]
    for i, j in sorted(pairs):
        adjacency[i].append((j, W[i, j]))
        adjacency[j].append((i, W[i, j]))
    for lst in adjacency:
        lst.sort()
    return SampleGraph(ctx=ctx, nodes=nodes, adjacency=adjacency, mode=mode, link=W)


def _dijkstra(adjacency, source: int):
    n = len(adjacency)
    dist = np.full(n, np.inf)
    pred = np.full(n, -1, dtype=int)
    dist[source] = 0.0
    done = np.zeros(n, dtype=bool)
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in adjacency[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
    return dist, pred


def approx_dphi(graph: SampleGraph, x, y) -> tuple[float, Chain]:
    """Shortest-path upper bound between two graph nodes, with the realizing
    node chain as witness."""
    i, j = graph.node_index(x), graph.node_index(y)
    if i == j:
        return 0.0, Chain([graph.nodes.points[i], graph.nodes.points[j]])
    dist, pred = _dijkstra(graph.adjacency, i)
    if not np.isfinite(dist[j]):
        raise RuntimeError("graph is disconnected between the query endpoints")
    path = [j]
    while path[-1] != i:
        path.append(int(pred[path[-1]]))
    path.reverse()
    return float(dist[j]), Chain([graph.nodes.points[k] for k in path])


def _merge(a: NodeSet, b: NodeSet) -> NodeSet:
    return _dedupe(
        list(a.points) + list(b.points), list(a.provenance) + list(b.provenance)
    )


def convergence_run(
    ctx: EuclidContext,
    x,
    y,
    levels: int,
    config: Optional[SamplerConfig] = None,
) -> list[tuple[int, int, float]]:
    """Refinement table: each level halves the angular resolution and doubles
    the radial step count, keeping all previous nodes, so the upper bound
    can only go down."""
    if levels < 1:
        raise ValueError("levels must be >= 1")
    config = config or SamplerConfig(dimension=len(np.asarray(x, float)))
    rows = []
    nodes = None
    for level in range(levels):
        cfg = replace(
            config,
            angular_resolution=config.angular_resolution / (2**level),
            radial_steps=config.radial_steps * (2**level),
        )
        fresh = build_sample(cfg, [x, y], ctx.weight_kind, ctx.cone)
        nodes = fresh if nodes is None else _merge(nodes, fresh)
        graph = build_graph(ctx, nodes, config.graph_mode)
        value, _ = approx_dphi(graph, x, y)
        rows.append((level, len(nodes), value))
    return rows


def make_net_solver(k: int, ctx: Optional[EuclidContext] = None):
    """Coverage solver for epsilon-net verification.

    For a sample point, assembles the projection / identification chain
    nodes toward sphere k plus the two best candidate centers, and returns
    the shortest-path upper bound to the nearest center.
    """
    ak = harmonic_radius(k)

    def solve(x, centers) -> float:
        x = np.asarray(x, dtype=float)
        local = ctx or euclid_context("std_phi", dim=len(x))
        n = float(np.linalg.norm(x))
        pts = [x]
        cand = [int(np.argmin(np.linalg.norm(centers - x, axis=1)))]
        if n >= 1.0:
            u = x / n
            m = sphere_bracket(n) if n > 1.0 else 1
            ladder = {1, m, m + 1, k, k + 1}
            for j in sorted(ladder):
                pts.append(harmonic_radius(j) * u)
            z = ak * u
            cand.append(int(np.argmin(np.linalg.norm(centers - z, axis=1))))
        first_center = len(pts)
        for c in dict.fromkeys(cand):
            pts.append(np.asarray(centers[c], dtype=float))
        W = local.link_matrix(np.array(pts))
        adjacency = [
            [(j, W[i, j]) for j in range(len(pts)) if j != i] for i in range(len(pts))
        ]
        dist, _ = _dijkstra(adjacency, 0)
        return float(dist[first_center:].min())

    return solve


def dump_edges(graph: SampleGraph, fh) -> None:
    """Edge list, one 'i j weight' line per edge, 17 significant digits."""
    for i, lst in enumerate(graph.adjacency):
        for j, w in lst:
            if i < j:
                fh.write(f"{i} {j} {w:.17g}\n")


def dump_nodes(graph: SampleGraph, fh) -> None:
    """Node table: index, coordinates, provenance."""
    for i, (p, tag) in enumerate(zip(graph.nodes.points, graph.nodes.provenance)):
        coords = " ".join(f"{v:.17g}" for v in p)
        fh.write(f"{i} {coords} {tag}\n")
