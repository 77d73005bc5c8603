import numpy as np
import pytest

from chainmetric.std_map import (
    BoundaryRepStd,
    boundary_map_h_std,
    boundary_map_k_std,
    epsilon_net,
    h_pq_std,
    harmonic_radius,
    net_index,
    phi_std,
    phi_std_matrix,
    sphere_bracket,
    sphere_index,
)


class TestHarmonicRadius:
    def test_first_values(self):
        assert harmonic_radius(1) == 1.0
        assert harmonic_radius(2) == 1.5
        assert harmonic_radius(4) == pytest.approx(25.0 / 12.0, abs=1e-15)

    def test_strictly_increasing(self):
        values = [harmonic_radius(m) for m in range(1, 200)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_increments(self):
        for m in (1, 5, 50, 500):
            assert harmonic_radius(m + 1) - harmonic_radius(m) == pytest.approx(
                1.0 / (m + 1), abs=1e-12
            )

    def test_rejects_bad_index(self):
        with pytest.raises(ValueError):
            harmonic_radius(0)


class TestSphereClassification:
    def test_exact_radii_classified(self):
        for m in (1, 2, 7, 100):
            assert sphere_index(harmonic_radius(m)) == m

    def test_off_sphere_is_none(self):
        assert sphere_index(0.5) is None
        assert sphere_index(1.2) is None  # between a_1 = 1 and a_2 = 1.5

    def test_bracket(self):
        assert sphere_bracket(2.0) == 3  # a_3 ~ 1.833 <= 2 < a_4 ~ 2.083
        assert sphere_bracket(1.0) == 1
        with pytest.raises(ValueError):
            sphere_bracket(0.5)


class TestRadialIdentification:
    def test_basic_scaling(self):
        out = h_pq_std(np.array([1.0, 0.0]), 1, 2)
        assert np.allclose(out, [1.5, 0.0])

    def test_identity(self):
        x = np.array([0.0, 1.5])
        assert np.allclose(h_pq_std(x, 2, 2), x)

    def test_derived_scaling(self):
        out = h_pq_std(np.array([0.0, 1.5]), 2, 4)
        assert np.allclose(out, [0.0, 25.0 / 12.0], atol=1e-12)

    def test_inverse_pair(self, rng):
        for _ in range(50):
            p, q = int(rng.integers(1, 20)), int(rng.integers(1, 20))
            u = rng.normal(size=3)
            u /= np.linalg.norm(u)
            x = harmonic_radius(p) * u
            back = h_pq_std(h_pq_std(x, p, q), q, p)
            assert np.linalg.norm(back - x) < 1e-12

    def test_rejects_off_sphere_point(self):
        with pytest.raises(ValueError):
            h_pq_std(np.array([1.2, 0.0]), 1, 2)


class TestStdWeight:
    def test_identified_pair_is_free(self):
        assert phi_std(np.array([1.0, 0.0]), np.array([1.5, 0.0])) == 0.0

    def test_same_sphere_rescaled_chord(self):
        x, y = np.array([1.5, 0.0]), np.array([0.0, 1.5])
        assert phi_std(x, y) == pytest.approx(np.sqrt(2.0), abs=1e-12)

    def test_generic_pair_plain_distance(self):
        x, y = np.array([0.3, 0.4]), np.array([2.0, 7.0])
        assert phi_std(x, y) == pytest.approx(np.sqrt(46.45), abs=1e-12)

    def test_symmetric_nonnegative(self, rng):
        for _ in range(100):
            x, y = rng.normal(size=2, scale=3), rng.normal(size=2, scale=3)
            v = phi_std(x, y)
            assert v >= 0.0
            assert v == phi_std(y, x)

    def test_matrix_agrees_with_scalar(self, rng):
        pts = [rng.normal(size=2, scale=2) for _ in range(8)]
        pts += [harmonic_radius(m) * np.array([np.cos(t), np.sin(t)])
                for m, t in ((1, 0.0), (1, 1.0), (3, 0.0), (3, 2.0), (5, 0.0))]
        P = np.array(pts)
        W = phi_std_matrix(P)
        for i in range(len(P)):
            for j in range(len(P)):
                assert W[i, j] == pytest.approx(phi_std(P[i], P[j]), abs=1e-12)


class TestBoundaryMaps:
    def test_interior_blowup(self):
        rep = boundary_map_h_std(np.array([0.5, 0.0]))
        assert rep.kind == "interior"
        assert np.allclose(rep.point, [1.0, 0.0])

    def test_origin_fixed(self):
        rep = boundary_map_h_std(np.zeros(2))
        assert rep.kind == "interior"
        assert np.allclose(rep.point, 0.0)

    def test_unit_vector_maps_to_ladder(self):
        rep = boundary_map_h_std(np.array([0.0, 1.0]))
        assert rep.kind == "at_infinity"
        assert np.allclose(rep.representative(3), [0.0, harmonic_radius(3)])

    def test_rejects_outside_ball(self):
        with pytest.raises(ValueError):
            boundary_map_h_std(np.array([1.5, 0.0]))

    def test_k_compresses_interior(self):
        rep = BoundaryRepStd(kind="interior", point=np.array([3.0, 0.0]))
        assert np.allclose(boundary_map_k_std(rep), [0.75, 0.0])

    def test_k_fixes_directions(self):
        rep = BoundaryRepStd(kind="at_infinity", point=np.array([0.0, 1.0]))
        assert np.allclose(boundary_map_k_std(rep), [0.0, 1.0])

    def test_roundtrip_on_random_ball_points(self, rng):
        for _ in range(200):
            x = rng.normal(size=2)
            x *= rng.uniform() / max(1.0, np.linalg.norm(x))
            back = boundary_map_k_std(boundary_map_h_std(x))
            assert np.linalg.norm(back - x) < 1e-12


class TestEpsilonNet:
    def test_rejects_bad_epsilon(self):
        with pytest.raises(ValueError):
            net_index(3.0)
        with pytest.raises(ValueError):
            net_index(0.0)
        with pytest.raises(ValueError):
            epsilon_net(1.0, 2)

    def test_index_anchors(self):
        assert net_index(0.99) == 12
        assert net_index(0.5) == 616

    def test_sphere_centers_lie_on_sphere(self):
        net = epsilon_net(0.99, 2)
        ak = harmonic_radius(net.k)
        sphere_part = net.centers[: net.sphere_center_count]
        norms = np.linalg.norm(sphere_part, axis=1)
        assert np.max(np.abs(norms - ak)) < 1e-9

    def test_sphere_net_spacing(self):
        net = epsilon_net(0.99, 2)
        ak = harmonic_radius(net.k)
        sphere_part = net.centers[: net.sphere_center_count]
        # every sphere point within eps/4 (Euclidean) of some center
        angles = np.linspace(0.0, 2 * np.pi, 500, endpoint=False)
        probes = ak * np.column_stack([np.cos(angles), np.sin(angles)])
        d = np.linalg.norm(probes[:, None, :] - sphere_part[None, :, :], axis=2)
        assert d.min(axis=1).max() <= 0.99 / 4.0 + 1e-9

    def test_ball_net_covers(self, rng):
        net = epsilon_net(0.9, 2)
        ball_part = net.centers[net.sphere_center_count:]
        radius = harmonic_radius(net.k + 1)
        for _ in range(200):
            x = rng.normal(size=2)
            x *= rng.uniform(0.0, radius) / max(np.linalg.norm(x), 1e-9)
            d = np.linalg.norm(ball_part - x, axis=1).min()
            assert d <= 0.9 + 1e-9

    def test_grid_projection_net_in_3d(self):
        net = epsilon_net(0.99, 3)
        ak = harmonic_radius(net.k)
        sphere_part = net.centers[: net.sphere_center_count]
        rng = np.random.default_rng(5)
        probes = rng.normal(size=(300, 3))
        probes = ak * probes / np.linalg.norm(probes, axis=1)[:, None]
        d = np.linalg.norm(probes[:, None, :] - sphere_part[None, :, :], axis=2)
        assert d.min(axis=1).max() <= 0.99 / 4.0 + 1e-9
