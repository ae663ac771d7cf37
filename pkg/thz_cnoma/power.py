"""
SINR and rate chain of one cooperative NOMA pair, closed-form sequential power
allocation, circuit power and network energy efficiency.
"""
import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

from .config import SimConfig
from .errors import DomainError, InfeasibleLinkError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PairLink:
    """Linear link gains and noise powers seen by one cooperator/edge pair."""

    effective_bs_gain: float  # |h_i^H w|^2
    side_gain: float  # |h_ij|^2
    si_gain: float  # |h_ii|^2
    noise_center_w: float
    noise_edge_w: float


@dataclass(frozen=True)
class PairAllocation:
    p_k_w: float
    p_ku_w: float
    beta_i: float
    beta_j: float
    feasible: bool


@dataclass(frozen=True)
class PairSinrs:
    edge_at_center: float
    center_own: float
    edge: float


@dataclass(frozen=True)
class PairRates:
    r_center_bps: float
    r_edge_bps: float
    r_edge_at_center_bps: float

    @property
    def sum_rate_bps(self) -> float:
        """Center plus edge rate of the pair."""
        return self.r_center_bps + self.r_edge_bps


def min_sinr(min_rate_bps: float, bandwidth_hz: float) -> float:
    """gamma_0 = 2^(R_0 / W) - 1."""
    return 2.0 ** (min_rate_bps / bandwidth_hz) - 1.0


def cooperation_power(gamma_min: float, noise_edge_w: float, side_gain: float) -> float:
    """Relay power that puts the edge user's SNR exactly at ``gamma_min``."""
    if side_gain <= 0:
        raise InfeasibleLinkError("side link has zero gain; no finite relay power meets the rate")
    return gamma_min * noise_edge_w / side_gain


def noma_fractions(
    p_k_w: float, p_ku_w: float, link: PairLink, kappa: float
) -> Tuple[float, float, bool]:
    """BS power split that makes SIC of the edge signal at the cooperator just succeed.

    Solves gamma_edge_at_center == gamma_edge for beta_i; the pair is feasible
    when beta_i lands in [0, 1].
    """
    if not math.isfinite(p_ku_w):
        return math.nan, math.nan, False
    a = link.effective_bs_gain
    h_ij = link.side_gain
    numerator = (
        p_ku_w * p_ku_w * kappa * link.si_gain * h_ij
        + link.noise_center_w * p_ku_w * h_ij
        - p_k_w * a * link.noise_edge_w
    )
    denominator = -p_k_w * a * link.noise_edge_w - p_k_w * p_ku_w * h_ij * a
    if denominator == 0:
        return math.nan, math.nan, False
    beta_i = numerator / denominator
    if not math.isfinite(beta_i):
        return math.nan, math.nan, False
    beta_j = 1.0 - beta_i
    return beta_i, beta_j, 0.0 <= beta_i <= 1.0


def allocate_pair(p_k_w: float, gamma_min: float, link: PairLink, kappa: float) -> PairAllocation:
    """Cooperation power first, then the NOMA fractions for that power.

    A dead side link gives an infeasible allocation with infinite relay power.
    """
    try:
        p_ku = cooperation_power(gamma_min, link.noise_edge_w, link.side_gain)
    except InfeasibleLinkError as e:
        logger.debug(f"Pair left infeasible: {e}")
        return PairAllocation(p_k_w=p_k_w, p_ku_w=math.inf, beta_i=math.nan, beta_j=math.nan, feasible=False)
    beta_i, beta_j, feasible = noma_fractions(p_k_w, p_ku, link, kappa)
    return PairAllocation(p_k_w=p_k_w, p_ku_w=p_ku, beta_i=beta_i, beta_j=beta_j, feasible=feasible)


def link_sinrs(alloc: PairAllocation, link: PairLink, kappa: float) -> PairSinrs:
    """SIC SINR of the edge signal at the cooperator, its own SINR, and the edge SINR."""
    a = link.effective_bs_gain
    received = alloc.p_k_w * a
    interference = alloc.p_ku_w * kappa * link.si_gain + link.noise_center_w
    return PairSinrs(
        edge_at_center=alloc.beta_j * received / (alloc.beta_i * received + interference),
        center_own=alloc.beta_i * received / interference,
        edge=alloc.p_ku_w * link.side_gain / link.noise_edge_w,
    )


def pair_rates(sinrs: PairSinrs, bandwidth_hz: float) -> PairRates:
    """Shannon rates; the edge rate is capped by what the cooperator can decode."""
    r_edge_at_center = bandwidth_hz * math.log2(1.0 + sinrs.edge_at_center)
    return PairRates(
        r_center_bps=bandwidth_hz * math.log2(1.0 + sinrs.center_own),
        r_edge_bps=min(r_edge_at_center, bandwidth_hz * math.log2(1.0 + sinrs.edge)),
        r_edge_at_center_bps=r_edge_at_center,
    )


def circuit_power(config: SimConfig) -> float:
    """P_loss = P_B + N_RF P_RF + N_T P_A + N_T P_P, with N_T the antenna count."""
    c = config.circuit_powers_w
    n_t = config.num_antennas
    return c.baseband_w + config.num_rf_chains * c.rf_chain_w + n_t * c.amplifier_w + n_t * c.phase_shifter_w


def consumed_power(allocs: Sequence[PairAllocation], config: SimConfig) -> float:
    """xi * sum_k (p_k + p_ku,k) + K P_loss."""
    transmit = sum(a.p_k_w + a.p_ku_w for a in allocs)
    return config.pa_inefficiency * transmit + len(allocs) * circuit_power(config)


def energy_efficiency(
    rates: Sequence[PairRates], allocs: Sequence[PairAllocation], config: SimConfig
) -> float:
    """Sum rate over consumed power, in bits per joule."""
    if len(rates) != len(allocs):
        raise DomainError(f"got {len(rates)} rate records for {len(allocs)} allocations")
    if not allocs:
        return 0.0
    total_rate = sum(r.r_center_bps + r.r_edge_bps for r in rates)
    return total_rate / consumed_power(allocs, config)
