"""
Line-of-sight THz / mmWave channel: path loss, ULA steering vectors,
BS-to-user channel vectors, side-link gains and thermal noise.

All quantities are SI-linear (Hz, m, W, linear gain).
"""
import math

import numpy as np

from .config import SimConfig
from .errors import DomainError

SPEED_OF_LIGHT = 299_792_458.0
THERMAL_NOISE_DBM_PER_HZ = -174.0


def path_loss(f: float, d: float, k_abs: float) -> float:
    """Spreading loss times molecular absorption loss, (4 pi f d / c)^2 e^(k_abs d)."""
    if d <= 0:
        raise DomainError(f"path loss is undefined at distance {d} m")
    if f <= 0:
        raise DomainError(f"carrier frequency must be positive, got {f} Hz")
    if k_abs < 0:
        raise DomainError(f"absorption coefficient must be non-negative, got {k_abs}")
    try:
        spread = (4.0 * math.pi * f * d / SPEED_OF_LIGHT) ** 2
        absorption = math.exp(k_abs * d)
    except OverflowError:
        # beyond float range the link is dead; callers see a zero channel
        return math.inf
    return spread * absorption


def clamp_distance(d: float, config: SimConfig) -> float:
    """Distance floored at the configured minimum link distance."""
    return max(d, config.min_link_distance_m)


def steering_vector(n_antennas: int, theta: float) -> np.ndarray:
    """Unit-norm half-wavelength ULA response toward ``theta`` (radians)."""
    if n_antennas < 1:
        raise DomainError(f"array needs at least one element, got {n_antennas}")
    n = np.arange(n_antennas)
    return np.exp(1j * math.pi * n * math.sin(theta)) / math.sqrt(n_antennas)


def bs_user_channel(config: SimConfig, d: float, theta: float) -> np.ndarray:
    """Channel vector h = sqrt(N) sqrt(1/PL) Omega a(theta), Omega = sqrt(G_BS G_user)."""
    loss = path_loss(config.carrier_frequency_hz, d, config.absorption_coeff_per_m)
    omega = math.sqrt(config.bs_gain_linear * config.user_gain_linear)
    n = config.num_antennas
    return math.sqrt(n) * math.sqrt(1.0 / loss) * omega * steering_vector(n, theta)


def side_link_gain(config: SimConfig, d_ij: float) -> complex:
    """Scalar user-to-user channel; single element with the user gain on both ends.

    Only the magnitude matters downstream, so the phase is fixed at zero.
    """
    loss = path_loss(config.carrier_frequency_hz, d_ij, config.absorption_coeff_per_m)
    return complex(config.user_gain_linear * math.sqrt(1.0 / loss))


def noise_power(bandwidth_hz: float, noise_figure_db: float) -> float:
    """Thermal noise 10 log10(W) + N_f - 174 dBm, returned in watts."""
    if bandwidth_hz <= 0:
        raise DomainError(f"bandwidth must be positive, got {bandwidth_hz} Hz")
    noise_dbm = 10.0 * math.log10(bandwidth_hz) + noise_figure_db + THERMAL_NOISE_DBM_PER_HZ
    return 10.0 ** ((noise_dbm - 30.0) / 10.0)
