"""
Unit tests for user dropping and cooperator selection.
"""
import math

import numpy as np
import pytest

from thz_cnoma.config import build_config
from thz_cnoma.scenario import PolarPoint, deploy_users, euclidean_distance
from thz_cnoma.sim import substream

MANY_DROPS = 10_000


@pytest.fixture(scope="module")
def many_layouts():
    config = build_config({})
    return config, [deploy_users(config, substream(config.master_seed, i)) for i in range(MANY_DROPS)]


class TestDeployUsers:
    """Geometry of one drop."""

    def test_counts(self, default_config):
        layout = deploy_users(default_config, substream(1, 0))
        assert layout.num_pairs == default_config.num_pairs
        assert layout.edge_users.shape == (default_config.num_pairs, 2)
        assert len(layout.center_users) >= default_config.num_pairs
        assert len(layout.cooperator_points()) == len(layout.edge_points()) == 5

    @pytest.mark.parametrize("index", range(25))
    def test_users_stay_in_their_regions(self, default_config, index):
        layout = deploy_users(default_config, substream(default_config.master_seed, index))
        d_center = default_config.center_radius_m
        angles = np.concatenate([layout.center_users[:, 1], layout.edge_users[:, 1]])
        assert np.all(angles >= default_config.sector_start_rad)
        assert np.all(angles <= default_config.sector_end_rad)
        assert np.all(layout.center_users[:, 0] > 0)
        assert np.all(layout.center_users[:, 0] <= d_center)
        assert np.all(layout.edge_users[:, 0] > d_center)
        assert np.all(layout.edge_users[:, 0] <= default_config.coverage_radius_m)
        coop_r = layout.cooperators[:, 0]
        assert np.all(coop_r >= default_config.cooperator_inner_radius_m)
        assert np.all(coop_r <= d_center)

    def test_cooperators_are_first_in_band_draws(self, default_config):
        """Out-of-band center users are kept but never cooperate."""
        layout = deploy_users(default_config, substream(3, 11))
        idx = layout.cooperator_indices
        assert np.all(np.diff(idx) > 0)
        in_band = np.flatnonzero(layout.center_users[:, 0] >= default_config.cooperator_inner_radius_m)
        np.testing.assert_array_equal(in_band, idx)
        assert idx[-1] == len(layout.center_users) - 1

    def test_same_stream_same_layout(self, default_config):
        a = deploy_users(default_config, substream(42, 5))
        b = deploy_users(default_config, substream(42, 5))
        np.testing.assert_array_equal(a.center_users, b.center_users)
        np.testing.assert_array_equal(a.edge_users, b.edge_users)
        np.testing.assert_array_equal(a.cooperator_indices, b.cooperator_indices)

    def test_different_index_different_layout(self, default_config):
        a = deploy_users(default_config, substream(42, 5))
        b = deploy_users(default_config, substream(42, 6))
        assert not np.array_equal(a.edge_users, b.edge_users)

    def test_every_drop_respects_its_regions(self, many_layouts):
        config, layouts = many_layouts
        center = np.concatenate([layout.center_users for layout in layouts])
        edge = np.concatenate([layout.edge_users for layout in layouts])
        coop = np.concatenate([layout.cooperators for layout in layouts])
        angles = np.concatenate([center[:, 1], edge[:, 1]])
        assert np.all((angles >= config.sector_start_rad) & (angles <= config.sector_end_rad))
        assert np.all((center[:, 0] > 0) & (center[:, 0] <= config.center_radius_m))
        assert np.all((edge[:, 0] > config.center_radius_m) & (edge[:, 0] <= config.coverage_radius_m))
        assert np.all((coop[:, 0] >= config.cooperator_inner_radius_m) & (coop[:, 0] <= config.center_radius_m))
        assert all(layout.num_pairs == len(layout.edge_users) == config.num_pairs for layout in layouts)

    def test_center_users_uniform_in_area(self, many_layouts):
        """Uniform over a disc of radius 4 m gives E[r^2] = 16 / 2."""
        config, layouts = many_layouts
        assert config.center_radius_m == pytest.approx(4.0)
        radii = np.concatenate([layout.center_users[:, 0] for layout in layouts])
        assert np.mean(radii**2) == pytest.approx(8.0, rel=0.02)

    def test_edge_users_uniform_in_area(self):
        """Half the area of the edge annulus lies inside the equal-area radius."""
        config = build_config({"num_pairs": 200})
        r_in, r_out = config.center_radius_m, config.coverage_radius_m
        median = math.sqrt((r_in**2 + r_out**2) / 2)
        radii = np.concatenate(
            [deploy_users(config, substream(9, i)).edge_users[:, 0] for i in range(10)]
        )
        assert np.mean(radii <= median) == pytest.approx(0.5, abs=0.05)

    def test_full_band_makes_every_center_user_cooperate(self):
        config = build_config({"cooperator_band_fraction": 1.0})
        layout = deploy_users(config, substream(1, 0))
        assert len(layout.center_users) == config.num_pairs

    def test_rejects_raw_dict(self):
        with pytest.raises(Exception):
            deploy_users({"num_pairs": 5}, substream(1, 0))


class TestEuclideanDistance:
    """Law-of-cosines distance between polar points."""

    def test_right_angle(self):
        assert euclidean_distance(PolarPoint(3.0, 0.0), PolarPoint(4.0, math.pi / 2)) == pytest.approx(5.0)

    def test_same_point(self):
        p = PolarPoint(2.5, 0.3)
        assert euclidean_distance(p, p) == 0.0

    def test_collinear(self):
        assert euclidean_distance(PolarPoint(1.0, 0.2), PolarPoint(4.0, 0.2)) == pytest.approx(3.0)

    def test_symmetric(self):
        a, b = PolarPoint(3.3, -0.4), PolarPoint(5.1, 1.2)
        assert euclidean_distance(a, b) == euclidean_distance(b, a)

    def test_matches_cartesian(self):
        a, b = PolarPoint(3.3, -0.4), PolarPoint(5.1, 1.2)
        xa, ya = a.radius_m * math.cos(a.angle_rad), a.radius_m * math.sin(a.angle_rad)
        xb, yb = b.radius_m * math.cos(b.angle_rad), b.radius_m * math.sin(b.angle_rad)
        assert euclidean_distance(a, b) == pytest.approx(math.hypot(xa - xb, ya - yb), rel=1e-12)

    def test_sixty_degrees_apart(self):
        assert euclidean_distance(PolarPoint(3.0, 0.0), PolarPoint(4.0, math.pi / 3)) == pytest.approx(math.sqrt(13.0))

    def test_triangle_inequality(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            a, b, c = (PolarPoint(rng.uniform(0.0, 7.0), rng.uniform(-math.pi, math.pi)) for _ in range(3))
            assert euclidean_distance(a, c) <= euclidean_distance(a, b) + euclidean_distance(b, c) + 1e-12
