import numpy as np
import pytest
from hypothesis import given, strategies as st

from ramcast.geometry import (
    ScenarioGeometry,
    aligned_pointing,
    arc_user_layout,
    boresight_vector,
    check_pointing,
    upa_positions,
)
from ramcast.harness import default_config


class TestBoresightVector:
    def test_zenith_zero_is_x_axis(self):
        for azimuth in (0.0, 1.3, 5.9):
            np.testing.assert_allclose(boresight_vector(0.0, azimuth),
                                       [1.0, 0.0, 0.0], atol=1e-15)

    def test_right_angle_along_y(self):
        np.testing.assert_allclose(boresight_vector(np.pi / 2, 0.0),
                                   [0.0, 1.0, 0.0], atol=1e-15)

    def test_sixty_degree_case(self):
        np.testing.assert_allclose(boresight_vector(np.pi / 3, np.pi / 2),
                                   [0.5, 0.0, 0.8660254], atol=1e-7)

    @given(st.floats(0, np.pi), st.floats(0, 2 * np.pi, exclude_max=True))
    def test_unit_norm(self, zenith, azimuth):
        assert abs(np.linalg.norm(boresight_vector(zenith, azimuth)) - 1.0) < 1e-12

    def test_vectorized_matches_scalar(self):
        tz = np.array([0.1, 0.9]); ta = np.array([2.0, 4.0])
        f = boresight_vector(tz, ta)
        assert f.shape == (3, 2)
        np.testing.assert_allclose(f[:, 1], boresight_vector(0.9, 4.0))


class TestUpaPositions:
    def test_single_element_at_origin(self):
        np.testing.assert_array_equal(upa_positions(1, 0.0625), [[0, 0, 0]])

    def test_two_by_two_grid(self):
        lam = 0.125
        pos = upa_positions(4, lam / 2)
        assert np.all(pos[:, 0] == 0)
        ys = np.sort(np.unique(pos[:, 1]))
        zs = np.sort(np.unique(pos[:, 2]))
        np.testing.assert_allclose(ys, [-lam / 4, lam / 4])
        np.testing.assert_allclose(zs, [-lam / 4, lam / 4])

    def test_pair_along_y(self):
        lam = 0.125
        pos = upa_positions(2, lam / 2)
        np.testing.assert_allclose(pos[:, 1], [-lam / 4, lam / 4])
        np.testing.assert_allclose(pos[:, 2], 0.0, atol=1e-300)

    @pytest.mark.parametrize("n", list(range(1, 21)))
    def test_centroid_at_origin(self, n):
        pos = upa_positions(n, 0.0625)
        np.testing.assert_allclose(pos.mean(axis=0), 0.0, atol=1e-12)

    @pytest.mark.parametrize("n", [3, 5, 8, 12, 20])
    def test_near_square_shape(self, n):
        pos = upa_positions(n, 1.0)
        rows = int(np.floor(np.sqrt(n)))
        cols = int(np.ceil(n / rows))
        assert len(np.unique(np.round(pos[:, 2], 9))) == min(rows, int(np.ceil(n / cols)))
        assert len(np.unique(np.round(pos[:, 1], 9))) <= cols


class TestArcLayout:
    def test_single_user_centered(self):
        cfg = default_config(num_groups=1, group_sizes=[1])
        geo = arc_user_layout(cfg, 50.0, 10.0, 2 * np.pi / 3)
        np.testing.assert_allclose(geo.user_positions[0], [50.0, 0.0, -10.0])

    def test_semicircle_endpoints(self):
        cfg = default_config(num_groups=1, group_sizes=[2])
        geo = arc_user_layout(cfg, 50.0, 10.0, np.pi)
        np.testing.assert_allclose(geo.user_positions[0], [0.0, -50.0, -10.0], atol=1e-12)
        np.testing.assert_allclose(geo.user_positions[1], [0.0, 50.0, -10.0], atol=1e-12)

    def test_four_users_two_groups(self):
        cfg = default_config()
        geo = arc_user_layout(cfg, 50.0, 10.0, 2 * np.pi / 3)
        alphas = np.arctan2(geo.user_positions[:, 1], geo.user_positions[:, 0])
        np.testing.assert_allclose(alphas, [-np.pi / 3, -np.pi / 9, np.pi / 9, np.pi / 3],
                                   atol=1e-12)
        np.testing.assert_array_equal(geo.group_of, [0, 0, 1, 1])

    def test_arc_radius_invariant(self):
        cfg = default_config(num_groups=3, group_sizes=[2, 2, 3])
        geo = arc_user_layout(cfg, 42.0, 7.0, np.pi / 2)
        center = np.array([0.0, 0.0, -7.0])
        radii = np.linalg.norm(geo.user_positions - center, axis=1)
        np.testing.assert_allclose(radii, 42.0, atol=1e-9)

    @pytest.mark.parametrize("spread", [0.0, -0.5, np.pi + 1e-6])
    def test_rejects_bad_spread(self, spread):
        with pytest.raises(ValueError):
            arc_user_layout(default_config(), 50.0, 10.0, spread)

    def test_groups_partition_users(self):
        cfg = default_config(num_groups=3, group_sizes=[1, 2, 2])
        geo = arc_user_layout(cfg, 20.0, 5.0, np.pi / 2)
        members = [geo.group_members(m) for m in range(3)]
        all_members = np.concatenate(members)
        assert sorted(all_members.tolist()) == list(range(5))
        assert [len(m) for m in members] == [1, 2, 2]


class TestScenarioGeometry:
    def test_link_directions_unit_norm(self):
        geo = arc_user_layout(default_config(), 30.0, 10.0, np.pi / 2)
        norms = np.linalg.norm(geo.link_direction, axis=2)
        np.testing.assert_allclose(norms, 1.0, atol=1e-12)
        assert np.all(geo.link_distance > 0)

    def test_rejects_user_on_antenna(self):
        with pytest.raises(ValueError):
            ScenarioGeometry(np.zeros((1, 3)), np.zeros((1, 3)), np.array([0]))


class TestCheckPointing:
    def test_aligned_passes(self):
        check_pointing(aligned_pointing(3), np.pi / 3)
        check_pointing(aligned_pointing(3), np.pi / 3, unit=True)

    def test_ball_escape_caught(self):
        f = aligned_pointing(2) * 1.01
        with pytest.raises(AssertionError):
            check_pointing(f, np.pi / 3)

    def test_cone_escape_caught(self):
        f = boresight_vector(np.array([np.pi / 2]), np.array([0.0]))
        with pytest.raises(AssertionError):
            check_pointing(f, np.pi / 3)
