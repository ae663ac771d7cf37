"""
Cooperator / cell-edge user pairing as a minimum-distance assignment (Hungarian method).
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import ConfigurationError, DomainError
from .scenario import UserLayout, euclidean_distance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Assignment:
    """``permutation[i]`` is the edge user matched with cooperator ``i``."""

    permutation: Tuple[int, ...]
    total_cost: float


def distance_matrix(layout: UserLayout) -> np.ndarray:
    """Entry (i, j): distance between cooperator i and edge user j."""
    coops = layout.cooperator_points()
    edges = layout.edge_points()
    if len(coops) != len(edges):
        raise ConfigurationError(
            f"pairing needs equal counts, got {len(coops)} cooperators and {len(edges)} edge users"
        )
    return np.array([[euclidean_distance(c, e) for e in edges] for c in coops], dtype=float)


def hungarian(cost: np.ndarray) -> Assignment:
    """Minimum-cost perfect matching of a square cost matrix in O(K^3).

    Shortest augmenting path with row/column potentials; rows are inserted one
    at a time and the inner column scan is vectorised.
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1] or cost.shape[0] == 0:
        raise DomainError(f"cost matrix must be non-empty and square, got shape {cost.shape}")
    if not np.all(np.isfinite(cost)):
        raise DomainError("cost matrix holds non-finite entries")

    n = cost.shape[0]
    # 1-indexed potentials; column 0 is the virtual source
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=np.int64)  # p[j] = row matched to column j
    way = np.zeros(n + 1, dtype=np.int64)

    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used[1:]
            cur = cost[i0 - 1] - u[i0] - v[1:]
            improve = free & (cur < minv[1:])
            minv[1:][improve] = cur[improve]
            way[1:][improve] = j0
            candidates = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(candidates)) + 1
            delta = candidates[j1 - 1]

            u[p[used]] += delta
            v[used] -= delta
            minv[~used] -= delta

            j0 = j1
            if p[j0] == 0:
                break

        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break

    permutation = [-1] * n
    for j in range(1, n + 1):
        permutation[p[j] - 1] = j - 1
    total = float(sum(cost[r, permutation[r]] for r in range(n)))
    return Assignment(permutation=tuple(permutation), total_cost=total)
