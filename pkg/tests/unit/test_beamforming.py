"""
Unit tests for the beam codebook and cosine-similarity scheduling.
"""
import math

import numpy as np
import pytest

from thz_cnoma.beamforming import build_codebook, cosine_similarity, fejer_similarity, schedule_beams
from thz_cnoma.channel import bs_user_channel, steering_vector
from thz_cnoma.config import build_config
from thz_cnoma.errors import DomainError
from thz_cnoma.scenario import UserLayout, deploy_users
from thz_cnoma.sim import substream


def _layout(angles, radius=3.5):
    coop = np.column_stack([np.full(len(angles), radius), angles])
    edge = np.column_stack([np.full(len(angles), 5.5), angles])
    return UserLayout(center_users=coop, edge_users=edge, cooperator_indices=np.arange(len(angles)))


class TestCodebook:
    """Fixed analog beams."""

    def test_default_sector(self, default_config):
        codebook = build_codebook(default_config)
        assert len(codebook) == 21
        assert codebook.beams.shape == (21, 4)
        assert codebook.beam_angles[0] == pytest.approx(-math.pi / 6)
        assert codebook.beam_angles[-1] == pytest.approx(math.pi / 2)

    def test_six_degree_spacing(self, default_config):
        spacing = np.diff(build_codebook(default_config).beam_angles)
        np.testing.assert_allclose(np.degrees(spacing), 6.0, rtol=1e-12)

    def test_single_interval_hits_sector_edges(self):
        config = build_config({"num_beams": 1})
        angles = build_codebook(config).beam_angles
        assert len(angles) == 2
        assert angles[0] == config.sector_start_rad
        assert angles[1] == pytest.approx(config.sector_end_rad)

    def test_beams_are_unit_norm(self, default_config):
        np.testing.assert_allclose(np.linalg.norm(build_codebook(default_config).beams, axis=1), 1.0, atol=1e-12)


class TestCosineSimilarity:
    """Inner-product similarity and its closed form."""

    def test_aligned(self):
        a = steering_vector(4, 0.3)
        assert cosine_similarity(a, a) == pytest.approx(1.0, abs=1e-15)

    def test_first_null(self):
        """sin(theta_u) - sin(theta_b) = 0.5 with four elements lands on a null."""
        value = cosine_similarity(steering_vector(4, math.pi / 6), steering_vector(4, 0.0))
        assert value == pytest.approx(0.0, abs=1e-12)
        assert fejer_similarity(4, math.pi / 6, 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_matches_fejer_closed_form(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            n = int(rng.integers(1, 33))
            t_u, t_b = rng.uniform(-math.pi / 2, math.pi / 2, size=2)
            inner = cosine_similarity(steering_vector(n, t_u), steering_vector(n, t_b))
            assert abs(inner - fejer_similarity(n, t_u, t_b)) <= 1e-12

    def test_fejer_singularity_is_one(self):
        assert fejer_similarity(8, 0.7, 0.7) == 1.0

    def test_in_unit_interval(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            h = rng.normal(size=4) + 1j * rng.normal(size=4)
            w = rng.normal(size=4) + 1j * rng.normal(size=4)
            assert 0.0 <= cosine_similarity(h, w) <= 1.0

    def test_invariant_to_complex_scaling(self, default_config):
        h = bs_user_channel(default_config, 3.4, 0.25)
        w = steering_vector(4, 0.1)
        scaled = (2.5 - 7.0j) * h
        assert cosine_similarity(scaled, w) == pytest.approx(cosine_similarity(h, w), rel=1e-12)

    def test_decreasing_inside_main_lobe(self):
        n = 8
        offsets = np.linspace(0.0, 0.95 * 2 / n, 40)  # |x| < 2 pi / N
        values = [cosine_similarity(steering_vector(n, math.asin(s)), steering_vector(n, 0.0)) for s in offsets]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            cosine_similarity(steering_vector(4, 0.0), steering_vector(8, 0.0))

    def test_zero_vector(self):
        with pytest.raises(DomainError):
            cosine_similarity(np.zeros(4, dtype=complex), steering_vector(4, 0.0))


class TestScheduleBeams:
    """Best-beam assignment of cooperators."""

    def test_user_on_a_beam_gets_that_beam(self, default_config):
        codebook = build_codebook(default_config)
        theta = codebook.beam_angles[5]
        layout = _layout([theta])
        channels = [bs_user_channel(default_config, 3.5, theta)]
        assignment = schedule_beams(layout, codebook, channels)
        assert assignment.beam_indices[0] == 5
        assert assignment.similarities[0] == pytest.approx(1.0, abs=1e-12)

    def test_identical_angles_share_a_beam(self, default_config):
        codebook = build_codebook(default_config)
        layout = _layout([0.41, 0.41])
        channels = [bs_user_channel(default_config, r, t) for r, t in layout.cooperators]
        assignment = schedule_beams(layout, codebook, channels)
        assert assignment.beam_indices[0] == assignment.beam_indices[1]

    @pytest.mark.parametrize("index", range(20))
    def test_matches_brute_force_argmax(self, default_config, index):
        layout = deploy_users(default_config, substream(99, index))
        codebook = build_codebook(default_config)
        channels = [bs_user_channel(default_config, r, t) for r, t in layout.cooperators]
        assignment = schedule_beams(layout, codebook, channels)
        for u, h in enumerate(channels):
            scores = [cosine_similarity(h, w) for w in codebook.beams]
            best = max(range(len(scores)), key=lambda b: (scores[b], -b))
            assert assignment.beam_indices[u] == best
            assert assignment.similarities[u] == scores[best]

    def test_ties_go_to_lowest_index(self):
        """A single antenna sees every beam equally."""
        config = build_config({"num_antennas": 1})
        layout = _layout([0.2, -0.1])
        channels = [bs_user_channel(config, r, t) for r, t in layout.cooperators]
        assignment = schedule_beams(layout, build_codebook(config), channels)
        assert list(assignment.beam_indices) == [0, 0]

    def test_channel_count_must_match(self, default_config):
        layout = _layout([0.1, 0.2])
        with pytest.raises(DomainError):
            schedule_beams(layout, build_codebook(default_config), [bs_user_channel(default_config, 3.5, 0.1)])

    def test_zero_channel_falls_back_to_first_beam(self, default_config):
        codebook = build_codebook(default_config)
        layout = _layout([0.3, 0.3])
        channels = [np.zeros(default_config.num_antennas, dtype=complex), bs_user_channel(default_config, 3.5, 0.3)]
        assignment = schedule_beams(layout, codebook, channels)
        assert assignment.beam_indices[0] == 0
        assert assignment.similarities[0] == 0.0
        assert assignment.similarities[1] > 0.9
