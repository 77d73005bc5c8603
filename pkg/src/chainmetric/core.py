"""Link-cost and chain-cost primitives of the metric transform.

The transformed distance between x and y is the infimum, over all finite
point chains joining them, of summed link costs

    link(x, y) = min{ d(x, y),  1/(1+d(m,x)) + w(x,y) + 1/(1+d(m,y)) }

where d is the base metric, w a nonnegative symmetric weight and m a fixed
anchor point.  The second branch is a "detour" whose price shrinks as both
endpoints move away from the anchor; a well chosen weight makes far-apart
points cheap to connect, which is what turns an unbounded space into a
totally bounded one.

This module only deals with single links, explicit chains and analytic
bound certificates.  Exact evaluation of the infimum on finite spaces lives
in :mod:`chainmetric.finite`; sampled upper bounds on R^s live in
:mod:`chainmetric.sampler`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


def _require_finite(x) -> None:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"non-finite point rejected: {x!r}")


def _order_key(p):
    return tuple(np.atleast_1d(np.asarray(p, dtype=float)))


@dataclass(frozen=True)
class MetricContext:
    """Base metric d, symmetric weight w and anchor m defining the transform.

    ``base_distance`` and ``weight`` are callables over whatever point
    representation the space uses (coordinate arrays, indices, ...).  The
    weight is always evaluated on the canonically ordered pair so that a
    floating-point asymmetric implementation cannot leak asymmetry into the
    link cost.
    """

    base_distance: Callable
    weight: Callable
    anchor: object

    def weight_sym(self, x, y) -> float:
        if _order_key(y) < _order_key(x):
            x, y = y, x
        return float(self.weight(x, y))

    def anchor_distance(self, x) -> float:
        return float(self.base_distance(self.anchor, x))


@dataclass(frozen=True)
class Chain:
    """An ordered finite point sequence joining its two endpoints."""

    points: tuple

    def __init__(self, points: Sequence):
        object.__setattr__(self, "points", tuple(points))
        if len(self.points) < 2:
            raise ValueError("a chain needs at least 2 points")

    @property
    def endpoints(self):
        return self.points[0], self.points[-1]

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class BoundCertificate:
    """Certified bracket [lower, upper] around the true transformed distance."""

    lower: float
    upper: float
    pair: tuple

    def __post_init__(self):
        if self.lower > self.upper + 1e-12:
            raise ValueError(f"invalid bracket: {self.lower} > {self.upper}")


def delta(ctx: MetricContext, x, y) -> float:
    """Single-link cost: min of the direct distance and the detour branch."""
    _require_finite(x)
    _require_finite(y)
    direct = float(ctx.base_distance(x, y))
    detour = (
        1.0 / (1.0 + ctx.anchor_distance(x))
        + ctx.weight_sym(x, y)
        + 1.0 / (1.0 + ctx.anchor_distance(y))
    )
    return min(direct, detour)


def chain_cost(ctx: MetricContext, chain: Chain) -> float:
    """Sum of link costs along the chain."""
    pts = chain.points
    return sum(delta(ctx, pts[i - 1], pts[i]) for i in range(1, len(pts)))


def lower_bound_certificate(ctx: MetricContext, x, y) -> float:
    """Analytic lower bound on the transformed distance.

    Whenever the transformed distance differs from d(x,y) it is at least
    1/(2(1+d(m,x))); by symmetry the same holds with y in place of x.  The
    min with d(x,y) covers the remaining case, so the returned value never
    exceeds the true transformed distance.
    """
    _require_finite(x)
    _require_finite(y)
    direct = float(ctx.base_distance(x, y))
    floor_x = 1.0 / (2.0 * (1.0 + ctx.anchor_distance(x)))
    floor_y = 1.0 / (2.0 * (1.0 + ctx.anchor_distance(y)))
    return min(direct, max(floor_x, floor_y))


def certificate(ctx: MetricContext, x, y) -> BoundCertificate:
    """Certified bracket from the analytic floor and the single-link cost."""
    return BoundCertificate(
        lower=lower_bound_certificate(ctx, x, y),
        upper=delta(ctx, x, y),
        pair=(x, y),
    )


def local_isometry_radius(ctx: MetricContext, x) -> float:
    """Radius of the ball around x on which the transform equals d.

    Inside the transformed-metric ball of this radius around x, the
    transformed distance between any two points coincides with the base
    distance.
    """
    _require_finite(x)
    return 1.0 / (8.0 * (1.0 + ctx.anchor_distance(x)))


@dataclass
class AxiomReport:
    """Violations of the metric axioms found in a square distance matrix."""

    tol: float
    nonnegativity: list = field(default_factory=list)
    identity: list = field(default_factory=list)
    symmetry: list = field(default_factory=list)
    triangle: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (
            self.nonnegativity or self.identity or self.symmetry or self.triangle
        )

    def summary(self) -> str:
        if self.ok:
            return "all metric axioms hold"
        parts = []
        for name in ("nonnegativity", "identity", "symmetry", "triangle"):
            wit = getattr(self, name)
            if wit:
                parts.append(f"{name}: {len(wit)} violation(s), first {wit[0]}")
        return "; ".join(parts)


def verify_metric_axioms(matrix, tol: float = 1e-12) -> AxiomReport:
    """Check nonnegativity, identity, symmetry and the triangle inequality.

    Every violation is recorded with its witnessing indices.  ``identity``
    records nonzero diagonal entries and vanishing off-diagonal entries
    (distinct points at distance 0).
    """
    M = np.asarray(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    n = M.shape[0]
    report = AxiomReport(tol=tol)

    for i, j in zip(*np.nonzero(M < -tol)):
        report.nonnegativity.append((int(i), int(j), float(M[i, j])))
    for i in range(n):
        if abs(M[i, i]) > tol:
            report.identity.append((i, i, float(M[i, i])))
    off = np.abs(M) <= tol
    np.fill_diagonal(off, False)
    for i, j in zip(*np.nonzero(off)):
        report.identity.append((int(i), int(j), float(M[i, j])))
    asym = np.abs(M - M.T) > tol
    for i, j in zip(*np.nonzero(np.triu(asym, 1))):
        report.symmetry.append((int(i), int(j), float(M[i, j] - M[j, i])))
    for k in range(n):
        slack = M - (M[:, k, None] + M[None, k, :])
        bad = slack > tol
        bad[:, k] = False
        bad[k, :] = False
        for i, j in zip(*np.nonzero(bad)):
            report.triangle.append((int(i), int(k), int(j), float(slack[i, j])))
    return report
