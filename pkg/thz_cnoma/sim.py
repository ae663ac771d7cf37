"""
End-to-end pipeline of the three-stage cooperative scheme, seeded Monte Carlo
ensembles and parameter sweeps.
"""
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import beamforming, channel, pairing, power, scenario
from .config import SimConfig, watts_to_dbm
from .errors import ConfigurationError

logger = logging.getLogger(__name__)

THREADS_ENV = "THZ_SIM_THREADS"
AXES = ("bs_power", "min_rate", "num_users", "band", "si_kappa")
BANDS = ("thz", "mmwave")


@dataclass(frozen=True)
class PairRecord:
    cooperator: int  # index into layout.center_users
    edge: int  # index into layout.edge_users
    beam_index: int
    similarity: float
    distance_m: float
    link: power.PairLink
    allocation: power.PairAllocation
    rates: Optional[power.PairRates]


@dataclass(frozen=True)
class RealizationResult:
    index: int
    pairs: Tuple[PairRecord, ...]
    ee_bits_per_joule: float
    sum_rate_bps: float
    consumed_power_w: float
    center_rate_bps: float
    infeasible_count: int

    @property
    def feasible_pairs(self) -> List[PairRecord]:
        """Pairs whose power allocation succeeded."""
        return [p for p in self.pairs if p.allocation.feasible]

    def recompute_ee(self, config: SimConfig) -> float:
        """EE rebuilt from the stored pair records."""
        feasible = self.feasible_pairs
        return power.energy_efficiency(
            [p.rates for p in feasible], [p.allocation for p in feasible], config
        )


@dataclass(frozen=True)
class MonteCarloSummary:
    """Per-realization metrics averaged in realization-index order."""

    num_realizations: int
    mean_ee_bits_per_joule: float
    std_ee_bits_per_joule: float
    mean_sum_rate_bps: float
    mean_consumed_power_w: float
    mean_center_rate_bps: float
    mean_edge_rate_bps: float
    infeasibility_rate: float
    mean_cooperation_power_w: float
    max_cooperation_power_w: float
    mean_beta_j: float
    mean_feasible_pairs: float


@dataclass(frozen=True)
class SweepResult:
    axis: str
    values: Tuple[Any, ...]
    points: Tuple[MonteCarloSummary, ...]
    num_realizations: int
    master_seed: int
    config: Dict[str, Any] = field(default_factory=dict)

    def column(self, name: str) -> List[float]:
        """One summary field across all sweep points."""
        return [getattr(p, name) for p in self.points]


def substream(master_seed: int, index: int) -> np.random.Generator:
    """Independent generator for realization ``index``.

    The (seed, index) pair is hashed to a 64-bit key for a counter-based
    Philox generator, so a realization's draws never depend on scheduling.
    """
    key = np.random.SeedSequence([master_seed, index]).generate_state(1, np.uint64)[0]
    return np.random.Generator(np.random.Philox(key=int(key)))


def resolve_workers(workers: Optional[int] = None) -> int:
    """Worker count from the argument, else THZ_SIM_THREADS; 0 means every core."""
    if workers is None:
        raw = os.environ.get(THREADS_ENV, "0")
        try:
            workers = int(raw)
        except ValueError:
            raise ConfigurationError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if workers < 0:
        raise ConfigurationError(f"worker count must be >= 0, got {workers}")
    return workers or (os.cpu_count() or 1)


def run_realization(config: SimConfig, stream: np.random.Generator, index: int = 0) -> RealizationResult:
    """One drop through scheduling, pairing and power optimization."""
    layout = scenario.deploy_users(config, stream)

    coop_channels = [
        channel.bs_user_channel(config, channel.clamp_distance(r, config), theta)
        for r, theta in layout.cooperators
    ]

    # stage A: best beam per cooperator
    codebook = beamforming.build_codebook(config)
    beams = beamforming.schedule_beams(layout, codebook, coop_channels)

    # stage B: cooperator / edge pairing
    distances = pairing.distance_matrix(layout)
    match = pairing.hungarian(distances)

    # stage C: p_ku, then beta, pair by pair
    gamma_min = power.min_sinr(config.min_rate_bps, config.bandwidth_hz)
    noise_center = channel.noise_power(config.bandwidth_hz, config.noise_figure_db)
    noise_edge = channel.noise_power(config.bandwidth_hz, config.edge_noise_db)

    records = []
    for coop_pos, edge_idx in enumerate(match.permutation):
        h = coop_channels[coop_pos]
        w = codebook.beams[beams.beam_indices[coop_pos]]
        d_ij = channel.clamp_distance(float(distances[coop_pos, edge_idx]), config)
        side = channel.side_link_gain(config, d_ij)
        link = power.PairLink(
            effective_bs_gain=float(abs(np.vdot(h, w)) ** 2),
            side_gain=abs(side) ** 2,
            si_gain=config.si_gain_linear,
            noise_center_w=noise_center,
            noise_edge_w=noise_edge,
        )
        alloc = power.allocate_pair(config.bs_power_w, gamma_min, link, config.si_kappa)
        rates = None
        if alloc.feasible:
            sinrs = power.link_sinrs(alloc, link, config.si_kappa)
            rates = power.pair_rates(sinrs, config.bandwidth_hz)
        records.append(
            PairRecord(
                cooperator=int(layout.cooperator_indices[coop_pos]),
                edge=int(edge_idx),
                beam_index=int(beams.beam_indices[coop_pos]),
                similarity=float(beams.similarities[coop_pos]),
                distance_m=d_ij,
                link=link,
                allocation=alloc,
                rates=rates,
            )
        )

    feasible = [r for r in records if r.allocation.feasible]
    feasible_rates = [r.rates for r in feasible]
    feasible_allocs = [r.allocation for r in feasible]
    ee = power.energy_efficiency(feasible_rates, feasible_allocs, config)
    consumed = power.consumed_power(feasible_allocs, config) if feasible else 0.0
    center = float(np.mean([r.r_center_bps for r in feasible_rates])) if feasible else 0.0

    result = RealizationResult(
        index=index,
        pairs=tuple(records),
        ee_bits_per_joule=ee,
        sum_rate_bps=sum(r.sum_rate_bps for r in feasible_rates),
        consumed_power_w=consumed,
        center_rate_bps=center,
        infeasible_count=len(records) - len(feasible),
    )
    logger.debug(
        f"Realization {index}: EE={ee:.4g} b/J, {result.infeasible_count} infeasible of {len(records)}"
    )
    return result


def _realization_row(config: SimConfig, index: int) -> Tuple[float, ...]:
    """Per-realization metrics in MonteCarloSummary field order."""
    res = run_realization(config, substream(config.master_seed, index), index)
    feasible = res.feasible_pairs
    edge = float(np.mean([p.rates.r_edge_bps for p in feasible])) if feasible else 0.0
    # infeasible pairs may carry an unbounded relay power
    p_ku = [p.allocation.p_ku_w for p in feasible] or [0.0]
    beta_j = float(np.mean([p.allocation.beta_j for p in feasible])) if feasible else 0.0
    return (
        res.ee_bits_per_joule,
        res.sum_rate_bps,
        res.consumed_power_w,
        res.center_rate_bps,
        edge,
        res.infeasible_count / len(res.pairs),
        float(np.mean(p_ku)),
        float(np.max(p_ku)),
        beta_j,
        float(len(feasible)),
    )


def run_monte_carlo(config: SimConfig, workers: Optional[int] = None) -> MonteCarloSummary:
    """Average ``config.num_realizations`` independent drops.

    Realization i always draws from ``substream(master_seed, i)`` and rows are
    reduced in index order, so the summary is identical for any worker count.
    """
    n = config.num_realizations
    if n < 1:
        raise ConfigurationError("num_realizations must be >= 1")
    n_workers = min(resolve_workers(workers), n)
    task = partial(_realization_row, config)
    if n_workers == 1:
        rows = [task(i) for i in range(n)]
    else:
        chunk = max(1, n // (n_workers * 4))
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            rows = list(pool.map(task, range(n), chunksize=chunk))

    table = np.asarray(rows, dtype=float)
    means = table.mean(axis=0)
    summary = MonteCarloSummary(
        num_realizations=n,
        mean_ee_bits_per_joule=float(means[0]),
        std_ee_bits_per_joule=float(table[:, 0].std()),
        mean_sum_rate_bps=float(means[1]),
        mean_consumed_power_w=float(means[2]),
        mean_center_rate_bps=float(means[3]),
        mean_edge_rate_bps=float(means[4]),
        infeasibility_rate=float(means[5]),
        mean_cooperation_power_w=float(means[6]),
        max_cooperation_power_w=float(table[:, 7].max()),
        mean_beta_j=float(means[8]),
        mean_feasible_pairs=float(means[9]),
    )
    if summary.infeasibility_rate > 0:
        logger.warning(f"{summary.infeasibility_rate:.2%} of pairs were infeasible and left out")
    return summary


def config_for_point(config: SimConfig, axis: str, value: Any) -> SimConfig:
    """The config of one sweep point."""
    if axis == "bs_power":
        return config.replace(bs_power_w=value)
    if axis == "min_rate":
        return config.replace(min_rate_bps=value)
    if axis == "si_kappa":
        return config.replace(si_kappa=value)
    if axis == "num_users":
        users = int(value)
        if users != value or users < 2 or users % 2:
            raise ConfigurationError(f"num_users must be an even count >= 2, got {value}")
        return config.replace(num_pairs=users // 2)
    if axis == "band":
        if value not in BANDS:
            raise ConfigurationError(f"band must be one of {BANDS}, got {value!r}")
        return config if value == "thz" else config.with_band(config.mmwave)
    raise ConfigurationError(f"unknown sweep axis {axis!r}; expected one of {AXES}")


def sweep(
    config: SimConfig, axis: str, values: Sequence[Any], workers: Optional[int] = None
) -> SweepResult:
    """Monte Carlo at every value of ``axis`` with the same master seed.

    Sharing the seed gives every point the same drops (common random numbers).
    """
    if axis not in AXES:
        raise ConfigurationError(f"unknown sweep axis {axis!r}; expected one of {AXES}")
    if not values:
        raise ConfigurationError("sweep needs at least one value")
    point_configs = [config_for_point(config, axis, v) for v in values]
    points = []
    for value, point_config in zip(values, point_configs):
        logger.info(f"Sweep {axis}={value}: {point_config.num_realizations} realizations")
        summary = run_monte_carlo(point_config, workers)
        logger.info(f"Sweep {axis}={value}: mean EE {summary.mean_ee_bits_per_joule:.4g} b/J")
        points.append(summary)
    return SweepResult(
        axis=axis,
        values=tuple(values),
        points=tuple(points),
        num_realizations=config.num_realizations,
        master_seed=config.master_seed,
        config=config.snapshot(),
    )


def compare_bands(
    config: SimConfig, min_rates: Sequence[float], workers: Optional[int] = None
) -> Tuple[SweepResult, SweepResult]:
    """Min-rate sweeps in the THz band and in the mmWave preset on identical drops."""
    thz = sweep(config, "min_rate", min_rates, workers)
    mmwave = sweep(config.with_band(config.mmwave), "min_rate", min_rates, workers)
    return thz, mmwave


def link_budget(config: SimConfig) -> Dict[str, float]:
    """Derived quantities of a parameter set, for a desk check before a long run."""
    noise = channel.noise_power(config.bandwidth_hz, config.noise_figure_db)
    n = config.num_antennas
    aligned = {}
    for label, d in (("inner", config.cooperator_inner_radius_m), ("outer", config.center_radius_m)):
        h = channel.bs_user_channel(config, d, 0.0)
        aligned[label] = float(abs(np.vdot(h, channel.steering_vector(n, 0.0))) ** 2)
    gamma_min = power.min_sinr(config.min_rate_bps, config.bandwidth_hz)
    side_1m = abs(channel.side_link_gain(config, 1.0)) ** 2
    return {
        "noise_power_w": noise,
        "noise_power_dbm": watts_to_dbm(noise),
        "gamma_min": gamma_min,
        "circuit_power_w": power.circuit_power(config),
        "beam_spacing_deg": math.degrees(config.sector_width_rad / config.num_beams),
        "aligned_gain_band_inner": aligned["inner"],
        "aligned_gain_band_outer": aligned["outer"],
        "snr_band_outer": config.bs_power_w * aligned["outer"] / noise,
        "cooperation_power_at_1m_w": power.cooperation_power(gamma_min, noise, side_1m),
    }
