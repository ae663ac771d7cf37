"""
Simulation configuration: models, file loading, overrides and dB/linear conversion.
"""
import json
import logging
import math
import os
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigurationError

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]


def db_to_linear(value_db: float) -> float:
    """Convert a power ratio in dB (or dBi) to linear scale."""
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    """Convert a linear power ratio to dB."""
    return 10.0 * math.log10(value)


def watts_to_dbm(value_w: float) -> float:
    """Convert watts to dBm."""
    return linear_to_db(value_w) + 30.0


class CircuitPowers(BaseModel):
    """Static hardware consumption of the BS, in watts."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    baseband_w: float = Field(0.2, ge=0)
    rf_chain_w: float = Field(0.16, ge=0)
    amplifier_w: float = Field(0.02, ge=0)
    phase_shifter_w: float = Field(0.04, ge=0)


class BandPreset(BaseModel):
    """Carrier, bandwidth and absorption of an alternative band."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    carrier_frequency_hz: float = Field(28e9, gt=0)
    bandwidth_hz: float = Field(2e9, gt=0)
    absorption_coeff_per_m: float = Field(0.0, ge=0)


class SimConfig(BaseModel):
    """Every physical, hardware and sweep parameter of a simulation run.

    Gains and noise figures are held in dB exactly as written in the config
    file; the simulation core reads them through the ``*_linear`` properties.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    carrier_frequency_hz: float = Field(3.42e12, gt=0)
    bandwidth_hz: float = Field(137e9, gt=0)
    absorption_coeff_per_m: float = Field(0.28, ge=0)
    num_antennas: int = Field(4, ge=1)
    num_beams: int = Field(20, ge=1)
    sector_start_rad: float = -math.pi / 6
    sector_end_rad: float = math.pi / 2
    bs_gain_dbi: float = 20.0
    user_gain_dbi: float = 3.0
    si_channel_gain_db: float = -110.0
    bs_power_w: float = Field(5.0, gt=0)
    si_kappa: float = Field(0.4, ge=0, le=1)
    pa_inefficiency: float = Field(1 / 0.38, gt=0)
    circuit_powers_w: CircuitPowers = Field(default_factory=CircuitPowers)
    num_rf_chains: int = Field(1, ge=1)
    min_rate_bps: float = Field(5e9, ge=0)
    coverage_radius_m: float = Field(7.0, gt=0)
    center_fraction: float = Field(4 / 7, gt=0, lt=1)
    cooperator_band_fraction: float = Field(0.2, gt=0, le=1)
    num_pairs: int = Field(5, ge=1)
    noise_figure_db: float = 10.0
    edge_noise_figure_db: Optional[float] = None
    min_link_distance_m: float = Field(0.1, gt=0)
    num_realizations: int = Field(1000, ge=1)
    master_seed: int = Field(1, ge=0, lt=2**64)
    mmwave: BandPreset = Field(default_factory=BandPreset)

    @model_validator(mode="after")
    def _check_sector(self) -> "SimConfig":
        if not self.sector_end_rad > self.sector_start_rad:
            raise ValueError("sector_end_rad must be greater than sector_start_rad")
        return self

    @property
    def bs_gain_linear(self) -> float:
        return db_to_linear(self.bs_gain_dbi)

    @property
    def user_gain_linear(self) -> float:
        return db_to_linear(self.user_gain_dbi)

    @property
    def si_gain_linear(self) -> float:
        """|h_ii|^2 of the full-duplex self-interference channel."""
        return db_to_linear(self.si_channel_gain_db)

    @property
    def center_radius_m(self) -> float:
        return self.coverage_radius_m * self.center_fraction

    @property
    def cooperator_inner_radius_m(self) -> float:
        return (1.0 - self.cooperator_band_fraction) * self.center_radius_m

    @property
    def sector_width_rad(self) -> float:
        return self.sector_end_rad - self.sector_start_rad

    @property
    def edge_noise_db(self) -> float:
        """Noise figure of the edge user, defaulting to the shared one."""
        if self.edge_noise_figure_db is None:
            return self.noise_figure_db
        return self.edge_noise_figure_db

    def snapshot(self) -> Dict[str, Any]:
        """JSON-ready dict of the configuration (dB fields as stored)."""
        return self.model_dump(mode="json")

    def replace(self, **updates: Any) -> "SimConfig":
        """Validated copy with ``updates`` applied."""
        return build_config(self.snapshot(), updates)

    def with_band(self, preset: BandPreset) -> "SimConfig":
        """Copy with carrier, bandwidth and absorption taken from ``preset``."""
        return self.replace(
            carrier_frequency_hz=preset.carrier_frequency_hz,
            bandwidth_hz=preset.bandwidth_hz,
            absorption_coeff_per_m=preset.absorption_coeff_per_m,
        )


def deep_update(d: Dict[str, Any], u: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively merge ``u`` into ``d`` (in place) and return ``d``."""
    for k, v in u.items():
        if isinstance(v, dict) and k in d and isinstance(d[k], dict):
            d[k] = deep_update(d[k], v)
        else:
            d[k] = v
    return d


def _format_validation_error(error: ValidationError) -> str:
    """Pydantic errors as ``path: message`` items joined by ``; ``."""
    messages = []
    for item in error.errors():
        key_path = ".".join(str(part) for part in item["loc"]) or "<root>"
        messages.append(f"{key_path}: {item['msg']}")
    return "; ".join(messages)


def build_config(values: Dict[str, Any], overrides: Optional[Dict[str, Any]] = None) -> SimConfig:
    """Validate ``values`` (with ``overrides`` merged on top) into a SimConfig."""
    merged = deep_update(json.loads(json.dumps(values)), overrides or {})
    try:
        return SimConfig.model_validate(merged)
    except ValidationError as e:
        raise ConfigurationError(_format_validation_error(e)) from None


def load_config_file(path: PathLike) -> Dict[str, Any]:
    """Read a YAML or JSON config file into a plain dict."""
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"Configuration file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Malformed configuration file {path}: {e}") from None
    except OSError as e:
        logger.error(f"Error reading configuration {path}: {e}")
        raise ConfigurationError(f"Cannot read configuration file {path}: {e}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"Configuration file {path} must hold a mapping at the top level")
    logger.info(f"Loaded configuration from {path}")
    return data


def parse_overrides(pairs: Iterable[str]) -> Dict[str, Any]:
    """Turn ``key=value`` strings into a nested dict; dotted keys address nested fields."""
    result: Dict[str, Any] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigurationError(f"Override must look like key=value: {pair!r}")
        key, raw = pair.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigurationError(f"Override has an empty key: {pair!r}")
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError:
            value = raw
        node = result
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigurationError(f"Override {key!r} conflicts with a scalar override")
        node[parts[-1]] = value
    return result


def parse_config(path: Optional[PathLike] = None, overrides: Iterable[str] = ()) -> SimConfig:
    """Load a SimConfig: overrides win over file values, which win over defaults.

    ``path=None`` starts from the built-in defaults.
    """
    values = load_config_file(path) if path is not None else {}
    config = build_config(values, parse_overrides(overrides))
    logger.debug(f"Parsed configuration: {config.snapshot()}")
    return config


def dump_config(config: SimConfig, path: PathLike) -> Path:
    """Write ``config`` as JSON that :func:`parse_config` reads back unchanged."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(config.snapshot(), f, indent=2, sort_keys=True)
            f.write("\n")
    except OSError as e:
        logger.error(f"Error saving configuration to {path}: {e}")
        raise
    logger.info(f"Saved configuration to {path}")
    return path
