"""
Machine-readable result emission (CSV / JSON) and the run manifest.
"""
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd

from . import __version__
from .errors import ConfigurationError, SimulationError
from .sim import SweepResult

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]

CSV_COLUMNS = [
    "axis_value",
    "mean_ee_bits_per_joule",
    "mean_sum_rate_bps",
    "mean_consumed_power_w",
    "mean_center_rate_bps",
    "infeasibility_rate",
    "num_realizations",
    "seed",
]

EXTRA_COLUMNS = [
    "std_ee_bits_per_joule",
    "mean_edge_rate_bps",
    "mean_cooperation_power_w",
    "max_cooperation_power_w",
    "mean_beta_j",
    "mean_feasible_pairs",
]


def tool_version() -> str:
    """Program name and version as written into manifests."""
    return f"thz-cnoma v{__version__}"


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the clock for reproducible artifacts
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    now = datetime.fromtimestamp(int(epoch), tz=timezone.utc) if epoch else datetime.now(timezone.utc)
    return now.replace(microsecond=0).isoformat()


@dataclass
class RunManifest:
    """Everything needed to regenerate an emitted file."""

    config: Dict[str, Any]
    master_seed: int
    version: str = field(default_factory=tool_version)
    timestamp: str = field(default_factory=_timestamp)
    output_paths: List[str] = field(default_factory=list)
    command: Optional[str] = None

    @classmethod
    def for_result(cls, result: SweepResult, command: Optional[str] = None) -> "RunManifest":
        """Manifest for a finished sweep."""
        return cls(config=result.config, master_seed=result.master_seed, command=command)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def results_frame(result: SweepResult, extras: bool = False) -> pd.DataFrame:
    """One row per sweep point in the published column order."""
    rows = []
    for value, point in zip(result.values, result.points):
        row = {
            "axis_value": value,
            "mean_ee_bits_per_joule": point.mean_ee_bits_per_joule,
            "mean_sum_rate_bps": point.mean_sum_rate_bps,
            "mean_consumed_power_w": point.mean_consumed_power_w,
            "mean_center_rate_bps": point.mean_center_rate_bps,
            "infeasibility_rate": point.infeasibility_rate,
            "num_realizations": point.num_realizations,
            "seed": result.master_seed,
        }
        if extras:
            row.update({name: getattr(point, name) for name in EXTRA_COLUMNS})
        rows.append(row)
    columns = CSV_COLUMNS + (EXTRA_COLUMNS if extras else [])
    return pd.DataFrame(rows, columns=columns)


def render_csv(result: SweepResult) -> str:
    """CSV text of ``result``: LF line endings, no index."""
    return results_frame(result).to_csv(index=False, lineterminator="\n")


def render_json(result: SweepResult, manifest: RunManifest) -> str:
    """JSON document with the CSV rows, per-point extras and the manifest."""
    document = {
        "axis": result.axis,
        "columns": CSV_COLUMNS,
        "points": results_frame(result, extras=True).to_dict(orient="records"),
        "manifest": manifest.to_dict(),
    }
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def load_results_csv(path: PathLike) -> pd.DataFrame:
    """Read an emitted CSV back with exact float round-trip."""
    return pd.read_csv(path, float_precision="round_trip")


class BaseReporter:
    """Base class for result writers."""

    suffix = ""  # file extension of the format

    def __init__(self, path: PathLike):
        self.path = Path(path)
        self._ensure_output_dir()

    def _ensure_output_dir(self) -> None:
        """Create the parent directory of the output file."""
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            logger.error(f"Error creating output directory for {self.path}: {e}")
            raise SimulationError(f"Cannot create output directory for {self.path}: {e}") from e

    def save_report(self, result: SweepResult, manifest: RunManifest) -> List[Path]:
        """Write ``result``; returns every path written."""
        raise NotImplementedError("Subclasses must implement save_report method")

    def _write_text(self, path: Path, text: str) -> None:
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
        except OSError as e:
            logger.error(f"Error writing {path}: {e}")
            raise SimulationError(f"Cannot write {path}: {e}") from e
        logger.info(f"Wrote {path}")


class CSVReporter(BaseReporter):
    """CSV rows plus a ``<file>.manifest.json`` sidecar."""

    suffix = ".csv"

    def manifest_path(self) -> Path:
        """Sidecar path, ``<file>.manifest.json``."""
        return self.path.with_name(self.path.name + ".manifest.json")

    def save_report(self, result: SweepResult, manifest: RunManifest) -> List[Path]:
        self._write_text(self.path, render_csv(result))
        sidecar = self.manifest_path()
        manifest.output_paths = [str(self.path), str(sidecar)]
        self._write_text(sidecar, json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n")
        return [self.path, sidecar]


class JSONReporter(BaseReporter):
    """Same rows as the CSV plus per-point extras and the manifest."""

    suffix = ".json"

    def save_report(self, result: SweepResult, manifest: RunManifest) -> List[Path]:
        manifest.output_paths = [str(self.path)]
        self._write_text(self.path, render_json(result, manifest))
        return [self.path]


REPORTERS = {"csv": CSVReporter, "json": JSONReporter}


def emit_results(
    result: SweepResult, fmt: str, path: PathLike, manifest: Optional[RunManifest] = None
) -> List[Path]:
    """Write ``result`` as ``csv`` or ``json`` to ``path``."""
    try:
        reporter_cls = REPORTERS[fmt]
    except KeyError:
        raise ConfigurationError(f"unknown output format {fmt!r}; expected one of {sorted(REPORTERS)}") from None
    manifest = manifest or RunManifest.for_result(result)
    return reporter_cls(path).save_report(result, manifest)
