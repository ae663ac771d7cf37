"""
Fixed analog beam codebook for one sector and cosine-similarity beam scheduling.
"""
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import steering_vector
from .config import SimConfig
from .errors import DomainError
from .scenario import UserLayout

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BeamCodebook:
    """B+1 steering-vector precoders spanning the sector; row b is beam b."""

    beams: np.ndarray
    beam_angles: np.ndarray

    def __len__(self) -> int:
        return len(self.beam_angles)


@dataclass(frozen=True)
class BeamAssignment:
    """Best beam and its similarity for every cooperating user, in layout order."""

    beam_indices: np.ndarray
    similarities: np.ndarray


def build_codebook(config: SimConfig) -> BeamCodebook:
    """Beams at sector_start + b * width / B for b = 0..B."""
    b_count = config.num_beams
    if b_count < 1:
        raise DomainError(f"codebook needs at least one beam interval, got {b_count}")
    step = config.sector_width_rad / b_count
    angles = np.array([config.sector_start_rad + b * step for b in range(b_count + 1)])
    beams = np.vstack([steering_vector(config.num_antennas, theta) for theta in angles])
    return BeamCodebook(beams=beams, beam_angles=angles)


def cosine_similarity(h: np.ndarray, w: np.ndarray) -> float:
    """|h^H w| / (||h|| ||w||), in [0, 1]."""
    h = np.asarray(h)
    w = np.asarray(w)
    if h.shape != w.shape:
        raise DomainError(f"dimension mismatch: channel {h.shape} vs precoder {w.shape}")
    norm = np.linalg.norm(h) * np.linalg.norm(w)
    if norm == 0:
        raise DomainError("cosine similarity of a zero-norm vector")
    return float(min(abs(np.vdot(h, w)) / norm, 1.0))


def fejer_similarity(n_antennas: int, theta_user: float, theta_beam: float) -> float:
    """Closed-form ULA similarity |sin(N x / 2) / (N sin(x / 2))|, x = pi (sin theta_u - sin theta_b)."""
    x = math.pi * (math.sin(theta_user) - math.sin(theta_beam))
    den = n_antennas * math.sin(x / 2.0)
    if abs(den) < 1e-15:
        return 1.0
    return abs(math.sin(n_antennas * x / 2.0) / den)


def schedule_beams(
    layout: UserLayout, codebook: BeamCodebook, channels: Sequence[np.ndarray]
) -> BeamAssignment:
    """Give each cooperating user the beam with the highest cosine similarity.

    Ties go to the lowest beam index. Several users may share a beam since
    every pair is served on its own orthogonal channel use.
    """
    if len(channels) != layout.num_pairs:
        raise DomainError(
            f"expected {layout.num_pairs} cooperator channels, got {len(channels)}"
        )
    indices = np.empty(len(channels), dtype=np.int64)
    values = np.empty(len(channels))
    for u, h in enumerate(channels):
        if not np.any(h):
            # out of range: no beam helps, and the pair ends up infeasible
            logger.debug(f"Cooperator {u} has a zero channel; defaulting to beam 0")
            indices[u] = 0
            values[u] = 0.0
            continue
        scores = np.array([cosine_similarity(h, w) for w in codebook.beams])
        best = int(np.argmax(scores))
        indices[u] = best
        values[u] = scores[best]
    return BeamAssignment(beam_indices=indices, similarities=values)
