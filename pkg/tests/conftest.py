import numpy as np
import pytest

from chainmetric.core import MetricContext
from chainmetric.finite import FiniteSpace


def euclid_norm(x, y):
    return float(np.linalg.norm(np.asarray(x, float) - np.asarray(y, float)))


def zero_weight_context(dim=2):
    """Euclidean base with weight identically 0: link costs and brackets have
    closed forms, handy as a hand-checkable reference."""
    return MetricContext(
        base_distance=euclid_norm, weight=lambda x, y: 0.0, anchor=np.zeros(dim)
    )


def random_finite_space(n, rng):
    """Random metric via shortest-path completion of random symmetric weights,
    with a random symmetric nonnegative pair weight and random anchor."""
    W = rng.uniform(0.1, 2.0, size=(n, n))
    W = (W + W.T) / 2.0
    np.fill_diagonal(W, 0.0)
    D = W.copy()
    for k in range(n):
        D = np.minimum(D, D[:, k, None] + D[None, k, :])
    phi = rng.uniform(0.0, 1.0, size=(n, n))
    phi = (phi + phi.T) / 2.0
    np.fill_diagonal(phi, 0.0)
    return FiniteSpace(
        distances=D, anchor_index=int(rng.integers(n)), weights=phi
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def three_point_line():
    """The hand-evaluated 3-point space {0, 10, -10} on the real line with
    the origin as anchor and zero weight."""
    coords = np.array([0.0, 10.0, -10.0])
    D = np.abs(coords[:, None] - coords[None, :])
    return FiniteSpace(distances=D, anchor_index=0)
