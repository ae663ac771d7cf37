"""
Invariant suite run by ``thz-cnoma validate`` on small instances.
"""
import itertools
import logging
import math
from typing import Callable, Dict, List, Tuple

import numpy as np

from . import beamforming, channel, pairing, power, scenario, sim
from .config import SimConfig

logger = logging.getLogger(__name__)

CheckResult = Dict[str, str]


def _edge_rate_and_sic(config: SimConfig, n: int) -> Tuple[bool, str]:
    worst_rate = 0.0
    worst_sic = 0.0
    checked = 0
    for i in range(n):
        res = sim.run_realization(config, sim.substream(config.master_seed, i), i)
        for pair in res.feasible_pairs:
            sinrs = power.link_sinrs(pair.allocation, pair.link, config.si_kappa)
            if config.min_rate_bps > 0:
                worst_rate = max(
                    worst_rate, abs(pair.rates.r_edge_bps - config.min_rate_bps) / config.min_rate_bps
                )
            if sinrs.edge > 0:
                worst_sic = max(worst_sic, abs(sinrs.edge_at_center - sinrs.edge) / sinrs.edge)
            checked += 1
    ok = worst_rate <= 1e-6 and worst_sic <= 1e-9
    return ok, f"{checked} feasible pairs, max edge-rate error {worst_rate:.2e}, max SIC imbalance {worst_sic:.2e}"


def _hungarian_vs_brute_force(rng: np.random.Generator, n: int) -> Tuple[bool, str]:
    for _ in range(n):
        k = int(rng.integers(1, 7))
        cost = rng.integers(0, 50, size=(k, k)).astype(float)
        best = min(
            sum(cost[r, perm[r]] for r in range(k)) for perm in itertools.permutations(range(k))
        )
        got = pairing.hungarian(cost).total_cost
        if got != best:
            return False, f"K={k}: solver {got} vs brute force {best}"
    return True, f"{n} random matrices matched brute force"


def _fejer_equivalence(rng: np.random.Generator, n: int) -> Tuple[bool, str]:
    worst = 0.0
    for _ in range(n):
        n_ant = int(rng.integers(1, 33))
        t_u, t_b = rng.uniform(-math.pi / 2, math.pi / 2, size=2)
        inner = beamforming.cosine_similarity(
            channel.steering_vector(n_ant, t_u), channel.steering_vector(n_ant, t_b)
        )
        worst = max(worst, abs(inner - beamforming.fejer_similarity(n_ant, t_u, t_b)))
    return worst <= 1e-12, f"max deviation {worst:.2e} over {n} cases"


def _steering_norm(rng: np.random.Generator, n: int) -> Tuple[bool, str]:
    worst = max(
        abs(np.linalg.norm(channel.steering_vector(int(rng.integers(1, 65)), rng.uniform(-math.pi, math.pi))) - 1.0)
        for _ in range(n)
    )
    return worst <= 1e-12, f"max norm deviation {worst:.2e}"


def _layout_regions(config: SimConfig, n: int) -> Tuple[bool, str]:
    d_center = config.center_radius_m
    for i in range(n):
        layout = scenario.deploy_users(config, sim.substream(config.master_seed, i))
        angles = np.concatenate([layout.center_users[:, 1], layout.edge_users[:, 1]])
        coop_r = layout.cooperators[:, 0]
        checks = [
            np.all((angles >= config.sector_start_rad) & (angles <= config.sector_end_rad)),
            np.all((layout.center_users[:, 0] > 0) & (layout.center_users[:, 0] <= d_center)),
            np.all((layout.edge_users[:, 0] > d_center) & (layout.edge_users[:, 0] <= config.coverage_radius_m)),
            np.all((coop_r >= config.cooperator_inner_radius_m) & (coop_r <= d_center)),
            layout.num_pairs == len(layout.edge_users) == config.num_pairs,
        ]
        if not all(checks):
            return False, f"drop {i} violates the region invariants"
    return True, f"{n} drops inside their regions"


def _determinism(config: SimConfig) -> Tuple[bool, str]:
    """Two Monte Carlo runs with the same seed must agree exactly."""
    small = config.replace(num_realizations=min(config.num_realizations, 20))
    first = sim.run_monte_carlo(small, workers=1)
    second = sim.run_monte_carlo(small, workers=1)
    return first == second, "repeat run with the same seed"


def run_checks(config: SimConfig, num_realizations: int = 50) -> List[CheckResult]:
    """Run every check; each result is ``{"name", "status", "detail"}``."""
    rng = np.random.default_rng(config.master_seed)
    checks: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
        ("edge_rate_and_sic_balance", lambda: _edge_rate_and_sic(config, num_realizations)),
        ("hungarian_optimality", lambda: _hungarian_vs_brute_force(rng, 100)),
        ("fejer_equivalence", lambda: _fejer_equivalence(rng, 1000)),
        ("steering_vector_norm", lambda: _steering_norm(rng, 1000)),
        ("layout_regions", lambda: _layout_regions(config, num_realizations)),
        ("determinism", lambda: _determinism(config)),
    ]
    results = []
    for name, check in checks:
        try:
            ok, detail = check()
            status = "pass" if ok else "fail"
        except Exception as e:
            logger.error(f"Check {name} raised: {e}")
            status, detail = "fail", f"error: {e}"
        logger.info(f"Check {name}: {status} ({detail})")
        results.append({"name": name, "status": status, "detail": detail})
    return results
