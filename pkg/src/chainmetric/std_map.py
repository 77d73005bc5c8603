"""The radial compactification weight on (R^s, d_E).

Identification spheres sit at the harmonic radii a_m = 1 + 1/2 + ... + 1/m.
Points on different spheres that share a radial line are identified for
free; points on the same sphere pay the chord length rescaled by 1/a_m;
everything else pays the plain Euclidean distance.  Because the radii grow
without bound while the detour price 1/(1+a_m) shrinks, the transformed
space becomes totally bounded and its completion is homeomorphic to the
closed unit ball, with the unit sphere as boundary at infinity.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

_RADII_LOCK = threading.Lock()
_RADII = np.array([1.0])  # _RADII[m-1] = a_m, grown lazily
M_MAX_DEFAULT = 10**6


def _radii_upto(m: int) -> np.ndarray:
    """Cached harmonic partial sums a_1..a_m, accumulated in increasing term order."""
    global _RADII
    if m > len(_RADII):
        with _RADII_LOCK:
            if m > len(_RADII):
                start = len(_RADII)
                grow_to = max(m, 2 * start)
                terms = 1.0 / np.arange(start + 1, grow_to + 1)
                _RADII = np.concatenate([_RADII, _RADII[-1] + np.cumsum(terms)])
    return _RADII[:m]


def harmonic_radius(m: int) -> float:
    """a_m = 1 + 1/2 + ... + 1/m."""
    if m < 1:
        raise ValueError(f"sphere index must be >= 1, got {m}")
    return float(_radii_upto(m)[m - 1])


def sphere_index(
    norm: float, tau: float = 1e-9, m_max: int = M_MAX_DEFAULT
) -> Optional[int]:
    """Index m with |norm - a_m| <= tau * a_m, or None if off every sphere."""
    if norm < 1.0 - tau:
        return None
    radii = _radii_upto(min(m_max, 1024))
    while radii[-1] < norm * (1.0 + tau) and len(radii) < m_max:
        radii = _radii_upto(min(m_max, 2 * len(radii)))
    pos = int(np.searchsorted(radii, norm))
    for m in (pos, pos + 1):
        if 1 <= m <= len(radii) and abs(norm - radii[m - 1]) <= tau * radii[m - 1]:
            return m
    return None


def sphere_bracket(norm: float, m_max: int = M_MAX_DEFAULT) -> int:
    """Index m with a_m <= norm < a_{m+1}; requires norm >= 1."""
    if norm < 1.0:
        raise ValueError(f"norm {norm} below the first sphere radius")
    radii = _radii_upto(1024)
    while radii[-1] <= norm and len(radii) < m_max:
        radii = _radii_upto(min(m_max, 2 * len(radii)))
    if radii[-1] <= norm:
        raise ValueError(f"norm {norm} beyond sphere index cap {m_max}")
    return int(np.searchsorted(radii, norm, side="right"))


def h_pq_std(x, p: int, q: int, tau: float = 1e-9) -> np.ndarray:
    """Radial identification: scale a point of sphere p onto sphere q."""
    x = np.asarray(x, dtype=float)
    ap, aq = harmonic_radius(p), harmonic_radius(q)
    norm = float(np.linalg.norm(x))
    if abs(norm - ap) > tau * ap:
        raise ValueError(f"point with norm {norm} is not on sphere {p} (radius {ap})")
    return (aq / ap) * x


def phi_std(x, y, tau: float = 1e-9) -> float:
    """Radial weight: 0 on identified pairs, rescaled chord on a shared sphere,
    Euclidean distance otherwise.  Cases are tested in that order."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    nx, ny = float(np.linalg.norm(x)), float(np.linalg.norm(y))
    p, q = sphere_index(nx, tau), sphere_index(ny, tau)
    if p is not None and q is not None:
        if float(np.linalg.norm(x / nx - y / ny)) <= tau:
            return 0.0
        if p == q:
            return float(np.linalg.norm(x - y)) / harmonic_radius(p)
    return float(np.linalg.norm(x - y))


def phi_std_matrix(points: np.ndarray, tau: float = 1e-9) -> np.ndarray:
    """Vectorized pairwise weight over a point set (rows of ``points``)."""
    P = np.asarray(points, dtype=float)
    norms = np.linalg.norm(P, axis=1)
    idx = np.array([sphere_index(n, tau) or 0 for n in norms])  # 0 = off-sphere
    diff = P[:, None, :] - P[None, :, :]
    D = np.linalg.norm(diff, axis=2)
    W = D.copy()
    on = idx > 0
    same = on[:, None] & on[None, :] & (idx[:, None] == idx[None, :])
    if np.any(same):
        radii = _radii_upto(int(idx.max()))
        am = np.where(on, radii[np.maximum(idx, 1) - 1], 1.0)
        W[same] = (D / am[:, None])[same]
    both = on[:, None] & on[None, :]
    if np.any(both):
        units = P / np.where(norms > 0, norms, 1.0)[:, None]
        udist = np.linalg.norm(units[:, None, :] - units[None, :, :], axis=2)
        W[both & (udist <= tau)] = 0.0
    return W


@dataclass(frozen=True)
class BoundaryRepStd:
    """Canonical completion point: a finite point or a direction at infinity.

    ``representative(i)`` realizes a Cauchy sequence in the class: constant
    for interior points, the harmonic-radius ladder along the direction for
    points at infinity.
    """

    kind: str  # 'interior' | 'at_infinity'
    point: np.ndarray

    def __post_init__(self):
        if self.kind not in ("interior", "at_infinity"):
            raise ValueError(f"unknown boundary kind {self.kind!r}")
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        if self.kind == "at_infinity":
            n = float(np.linalg.norm(self.point))
            if abs(n - 1.0) > 1e-12:
                raise ValueError(f"direction must be unit, got norm {n}")

    def representative(self, i: int) -> np.ndarray:
        if self.kind == "interior":
            return self.point
        return harmonic_radius(i) * self.point


def boundary_map_h_std(x, tol: float = 1e-12) -> BoundaryRepStd:
    """Closed-ball parameterization of the completion: interior points blow up
    by 1/(1 - |x|), unit vectors map to their ladder class at infinity."""
    x = np.asarray(x, dtype=float)
    n = float(np.linalg.norm(x))
    if n > 1.0 + tol:
        raise ValueError(f"point with norm {n} outside the closed unit ball")
    if n >= 1.0 - tol:
        return BoundaryRepStd(kind="at_infinity", point=x / n)
    return BoundaryRepStd(kind="interior", point=x / (1.0 - n))


def boundary_map_k_std(rep: BoundaryRepStd) -> np.ndarray:
    """Inverse of :func:`boundary_map_h_std`, back into the closed unit ball."""
    if rep.kind == "interior":
        y = rep.point
        return y / (1.0 + float(np.linalg.norm(y)))
    return rep.point


def net_index(epsilon: float) -> int:
    """Smallest k with 1/(1+k) < eps/4 and 1/(1+a_k) < eps/4."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    quarter = epsilon / 4.0
    k = 1
    while 1.0 / (1.0 + k) >= quarter or 1.0 / (1.0 + harmonic_radius(k)) >= quarter:
        k += 1
    return k


def _sphere_net(radius: float, spacing: float, s: int) -> np.ndarray:
    """Euclidean ``spacing``-net of the sphere of the given radius."""
    if s == 2:
        step = 2.0 * np.arcsin(min(1.0, spacing / (2.0 * radius)))
        count = int(np.ceil(2.0 * np.pi / step))
        angles = np.arange(count) * (2.0 * np.pi / count)
        return radius * np.column_stack([np.cos(angles), np.sin(angles)])
    # Grid-projection net: an axis grid of cell diagonal <= spacing/2 has a
    # point within spacing/2 of every sphere point; projecting that grid
    # point to the sphere moves it by at most another spacing/2.
    g = spacing / (2.0 * np.sqrt(s))
    axis = np.arange(-radius - g, radius + 2 * g, g)
    mesh = np.stack(np.meshgrid(*([axis] * s), indexing="ij"), axis=-1).reshape(-1, s)
    norms = np.linalg.norm(mesh, axis=1)
    keep = np.abs(norms - radius) <= spacing / 2.0
    pts = mesh[keep] * (radius / norms[keep])[:, None]
    # Dedupe projected points that collapsed together.
    seen, out = set(), []
    for p in pts:
        key = tuple(np.round(p / (spacing / 4.0)).astype(int))
        if key not in seen:
            seen.add(key)
            out.append(p)
    return np.array(out)


def _ball_net(radius: float, spacing: float, s: int) -> np.ndarray:
    """Euclidean ``spacing``-net of the closed ball of the given radius."""
    g = spacing / np.sqrt(s)
    axis = np.arange(-radius, radius + g, g)
    mesh = np.stack(np.meshgrid(*([axis] * s), indexing="ij"), axis=-1).reshape(-1, s)
    return mesh[np.linalg.norm(mesh, axis=1) <= radius + spacing / 2.0]


@dataclass
class EpsilonNet:
    """Finite center set whose transformed-metric eps-balls cover all of R^s."""

    epsilon: float
    k: int
    centers: np.ndarray
    sphere_center_count: int
    verification: dict = field(default_factory=dict)


def epsilon_net(
    epsilon: float,
    s: int,
    solver: Optional[Callable] = None,
    samples: int = 10_000,
    max_norm: Optional[float] = None,
    rng: Optional[np.random.Generator] = None,
) -> EpsilonNet:
    """Constructive total-boundedness: a finite eps-cover of (R^s, transformed).

    Centers are a Euclidean (eps/4)-net of the identification sphere k union
    a Euclidean eps-net of the ball of radius a_{k+1}; Euclidean nets suffice
    because the transform never exceeds d_E.  Points beyond the ball reach a
    sphere-net center through the projection / identification chain of cost
    < eps, which ``solver(x, centers) -> upper bound`` certifies numerically
    when provided.
    """
    if s < 2:
        raise ValueError(f"dimension must be >= 2, got {s}")
    k = net_index(epsilon)
    ak = harmonic_radius(k)
    sphere_centers = _sphere_net(ak, epsilon / 4.0, s)
    ball_centers = _ball_net(harmonic_radius(k + 1), epsilon, s)
    centers = np.vstack([sphere_centers, ball_centers])
    net = EpsilonNet(
        epsilon=epsilon,
        k=k,
        centers=centers,
        sphere_center_count=len(sphere_centers),
    )
    if solver is not None:
        rng = rng or np.random.default_rng(0)
        if max_norm is None:
            max_norm = harmonic_radius(200)
        dirs = rng.normal(size=(samples, s))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        norms = rng.uniform(0.0, max_norm, size=samples)
        worst = 0.0
        covered = 0
        for u, n in zip(dirs, norms):
            d = float(solver(n * u, centers))
            worst = max(worst, d)
            covered += d < epsilon
        net.verification = {
            "epsilon": epsilon,
            "k": k,
            "center_count": int(len(centers)),
            "samples": int(samples),
            "max_min_distance": worst,
            "covered": int(covered),
        }
    return net
