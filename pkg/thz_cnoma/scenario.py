"""
User drops inside one BS sector and selection of the cooperating cell-center users.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, NamedTuple

import numpy as np

from .config import SimConfig
from .errors import ConfigurationError

logger = logging.getLogger(__name__)

RandomStream = np.random.Generator

# Draws per batch while filling the cooperator band.
_CENTER_BATCH = 16


class PolarPoint(NamedTuple):
    radius_m: float
    angle_rad: float


@dataclass(frozen=True)
class UserLayout:
    """Polar user positions of one drop.

    ``center_users`` and ``edge_users`` are ``(n, 2)`` arrays of
    ``(radius_m, angle_rad)`` rows; ``cooperator_indices`` index into
    ``center_users``.
    """

    center_users: np.ndarray
    edge_users: np.ndarray
    cooperator_indices: np.ndarray

    @property
    def cooperators(self) -> np.ndarray:
        """Polar coordinates of the cooperating center users."""
        return self.center_users[self.cooperator_indices]

    @property
    def num_pairs(self) -> int:
        return len(self.cooperator_indices)

    def cooperator_points(self) -> List[PolarPoint]:
        """Cooperators as PolarPoints."""
        return [PolarPoint(float(r), float(a)) for r, a in self.cooperators]

    def edge_points(self) -> List[PolarPoint]:
        """Edge users as PolarPoints."""
        return [PolarPoint(float(r), float(a)) for r, a in self.edge_users]


def _annulus_radii(stream: RandomStream, size: int, r_in: float, r_out: float) -> np.ndarray:
    # inverse CDF of the area-uniform radius; 1 - U lies in (0, 1] so r > r_in
    u = 1.0 - stream.random(size)
    return np.sqrt(u * (r_out**2 - r_in**2) + r_in**2)


def _sector_angles(stream: RandomStream, size: int, config: SimConfig) -> np.ndarray:
    return config.sector_start_rad + stream.random(size) * config.sector_width_rad


def deploy_users(config: SimConfig, stream: RandomStream) -> UserLayout:
    """Drop cell-center and cell-edge users uniformly in area over the sector.

    Center users are drawn over the whole center region until ``num_pairs`` of
    them fall in the cooperator band (the outer ``cooperator_band_fraction`` of
    the center radius); those become the cooperators. Exactly ``num_pairs``
    edge users are drawn in the edge annulus.
    """
    if not isinstance(config, SimConfig):
        raise ConfigurationError("deploy_users needs a validated SimConfig")
    k = config.num_pairs
    d_center = config.center_radius_m
    band_inner = config.cooperator_inner_radius_m

    radii: List[float] = []
    angles: List[float] = []
    cooperators: List[int] = []
    while len(cooperators) < k:
        batch_r = _annulus_radii(stream, _CENTER_BATCH, 0.0, d_center)
        batch_a = _sector_angles(stream, _CENTER_BATCH, config)
        for r, a in zip(batch_r, batch_a):
            radii.append(float(r))
            angles.append(float(a))
            if r >= band_inner:
                cooperators.append(len(radii) - 1)
                if len(cooperators) == k:
                    break

    edge_r = _annulus_radii(stream, k, d_center, config.coverage_radius_m)
    edge_a = _sector_angles(stream, k, config)

    layout = UserLayout(
        center_users=np.column_stack([radii, angles]),
        edge_users=np.column_stack([edge_r, edge_a]),
        cooperator_indices=np.asarray(cooperators, dtype=np.int64),
    )
    logger.debug(f"Dropped {len(radii)} center users ({k} cooperators) and {k} edge users")
    return layout


def euclidean_distance(a: PolarPoint, b: PolarPoint) -> float:
    """Distance between two polar points by the law of cosines."""
    r_a, t_a = a
    r_b, t_b = b
    sq = r_a * r_a + r_b * r_b - 2.0 * r_a * r_b * math.cos(t_a - t_b)
    return math.sqrt(max(sq, 0.0))
