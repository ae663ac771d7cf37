"""
Command-line driver: ``run``, ``sweep``, ``compare-bands``, ``validate``,
``summary`` and ``history``.
"""
import functools
import logging
import re
import sys
import time
from pathlib import Path
from typing import Any, Callable, List, Optional, Sequence

import click

from . import __version__, sim
from .config import SimConfig, parse_config
from .database import history_from_env
from .errors import SimulationError
from .reports import REPORTERS, RunManifest, emit_results, render_csv, render_json
from .validation import run_checks

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s"
DEFAULT_MIN_RATES = "5G,10G,15G,20G"
_SI_SUFFIX = {"": 1.0, "k": 1e3, "M": 1e6, "G": 1e9, "T": 1e12}


def setup_logging(level: str = "WARNING", log_file: Optional[str] = None) -> None:
    """Route log records to stderr (stdout carries results) and optionally a file."""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(level=getattr(logging, level.upper()), format=LOG_FORMAT, handlers=handlers, force=True)


def parse_values(axis: str, text: str) -> List[Any]:
    """Comma-separated sweep values; numbers may carry an SI suffix (``5G``)."""
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise click.BadParameter("at least one value is required", param_hint="--values")
    if axis == "band":
        return items
    values = []
    for item in items:
        match = re.fullmatch(r"([-+0-9.eE]+)\s*([kMGT]?)", item)
        if not match:
            raise click.BadParameter(f"not a number: {item!r}", param_hint="--values")
        try:
            values.append(float(match.group(1)) * _SI_SUFFIX[match.group(2)])
        except ValueError:
            raise click.BadParameter(f"not a number: {item!r}", param_hint="--values") from None
    return values


def _load(ctx: click.Context) -> SimConfig:
    """Config from --config with --set, --seed and --realizations applied."""
    opts = ctx.obj
    overrides = list(opts["set"])
    if opts["seed"] is not None:
        overrides.append(f"master_seed={opts['seed']}")
    if opts["realizations"] is not None:
        overrides.append(f"num_realizations={opts['realizations']}")
    return parse_config(opts["config"], overrides)


def _record(ctx: click.Context, command: str, config: Optional[SimConfig], started: float, **kwargs) -> None:
    history = history_from_env(ctx.obj.get("db"))
    if history is None:
        return
    try:
        history.add_run(
            command=command,
            duration_s=time.perf_counter() - started,
            config=config.snapshot() if config is not None else None,
            **kwargs,
        )
    finally:
        history.close()


def simulation_command(name: str) -> Callable:
    """Common flags for commands that load a config and write results."""

    def decorator(func: Callable) -> Callable:
        @click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                      help="YAML/JSON config file (defaults: built-in parameter table)")
        @click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="Master seed")
        @click.option("--realizations", type=click.IntRange(min=1), default=None, help="Monte Carlo drops per point")
        @click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file (stdout if omitted)")
        @click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
        @click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE", help="Config override, repeatable")
        @click.option("--workers", type=click.IntRange(min=0), default=None,
                      help="Worker processes (0 = all cores; default $THZ_SIM_THREADS)")
        @click.pass_context
        @functools.wraps(func)
        def wrapper(ctx, config_path, seed, realizations, out, fmt, overrides, workers, **kwargs):
            ctx.obj.update(config=config_path, seed=seed, realizations=realizations, set=overrides)
            started = time.perf_counter()
            config = None
            try:
                config = _load(ctx)
                outputs = func(ctx, config, out=out, fmt=fmt, workers=workers, **kwargs)
            except SimulationError as e:
                _record(ctx, name, config, started, status="fail", error_message=str(e))
                raise click.ClickException(str(e)) from e
            _record(ctx, name, config, started, status="pass",
                    axis=kwargs.get("axis"), output_path=",".join(str(p) for p in outputs or []) or None)

        return wrapper

    return decorator


def _write(result: sim.SweepResult, out: Optional[str], fmt: str, command: str) -> List[Path]:
    """Print to stdout, or write files when --out is given."""
    manifest = RunManifest.for_result(result, command=command)
    if out is None:
        text = render_csv(result) if fmt == "csv" else render_json(result, manifest)
        click.echo(text, nl=False)
        return []
    paths = emit_results(result, fmt, out, manifest)
    for path in paths:
        click.echo(f"wrote {path}", err=True)
    return paths


@click.group()
@click.version_option(__version__, prog_name="thz-cnoma")
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
              default="WARNING", show_default=True)
@click.option("--log-file", type=click.Path(dir_okay=False), default=None)
@click.option("--db", type=click.Path(dir_okay=False), default=None,
              help="Record runs in this SQLite file (default $THZ_SIM_DB, off if unset)")
@click.pass_context
def cli(ctx, log_level, log_file, db):
    """Energy-efficient cooperative NOMA in indoor THz-MISO networks."""
    setup_logging(log_level, log_file)
    ctx.ensure_object(dict)
    ctx.obj["db"] = db


@cli.command()
@simulation_command("run")
def run(ctx, config, out, fmt, workers):
    """Single Monte Carlo ensemble at the configured operating point."""
    result = sim.sweep(config, "bs_power", [config.bs_power_w], workers)
    return _write(result, out, fmt, "run")


@cli.command(name="sweep")
@click.option("--axis", type=click.Choice(sim.AXES), required=True)
@click.option("--values", "values_text", required=True, help="Comma-separated values, e.g. 1,3,5,7,9 or 5G,10G")
@simulation_command("sweep")
def sweep_command(ctx, config, out, fmt, workers, axis, values_text):
    """Monte Carlo at every value of one parameter, with common random numbers."""
    result = sim.sweep(config, axis, parse_values(axis, values_text), workers)
    return _write(result, out, fmt, f"sweep --axis {axis}")


def _band_path(out: str, band: str, fmt: str) -> str:
    """``<stem>_<band>.<ext>`` beside ``out``."""
    path = Path(out)
    stem = path.stem if path.suffix else path.name
    return str(path.with_name(f"{stem}_{band}{REPORTERS[fmt].suffix}"))


@cli.command(name="compare-bands")
@click.option("--values", "values_text", default=DEFAULT_MIN_RATES, show_default=True,
              help="Minimum edge rates to sweep")
@simulation_command("compare-bands")
def compare_bands_command(ctx, config, out, fmt, workers, values_text):
    """THz versus mmWave minimum-rate sweeps on identical user drops."""
    thz, mmwave = sim.compare_bands(config, parse_values("min_rate", values_text), workers)
    if out is None:
        out = "compare_bands"
    paths = []
    for band, result in (("thz", thz), ("mmwave", mmwave)):
        paths += _write(result, _band_path(out, band, fmt), fmt, f"compare-bands {band}")
    return paths


@cli.command()
@click.option("--instances", type=click.IntRange(min=1), default=50, show_default=True,
              help="Drops per pipeline-level check")
@simulation_command("validate")
def validate(ctx, config, out, fmt, workers, instances):
    """Run the invariant suite on small instances; exit 1 on any failure."""
    results = run_checks(config, instances)
    for item in results:
        click.echo(f"{item['status'].upper():4}  {item['name']}: {item['detail']}")
    failed = [item["name"] for item in results if item["status"] != "pass"]
    if failed:
        raise SimulationError(f"{len(failed)} check(s) failed: {', '.join(failed)}")
    return []


@cli.command()
@simulation_command("summary")
def summary(ctx, config, out, fmt, workers):
    """Print the derived link budget of the configuration."""
    for key, value in sim.link_budget(config).items():
        click.echo(f"{key:28} {value:.6g}")
    return []


@cli.command()
@click.option("--limit", type=click.IntRange(min=1), default=20, show_default=True)
@click.pass_context
def history(ctx, limit):
    """List recorded runs (needs --db or $THZ_SIM_DB)."""
    store = history_from_env(ctx.obj.get("db"))
    if store is None:
        raise click.UsageError("no run history configured; pass --db or set THZ_SIM_DB")
    try:
        for record in store.get_runs(limit):
            click.echo(
                f"{record.id:5}  {record.timestamp:%Y-%m-%d %H:%M:%S}  {record.status:4}  "
                f"{record.command:14} seed={record.master_seed} n={record.num_realizations} "
                f"{record.duration_s:.2f}s  {record.output_path or ''}"
            )
    finally:
        store.close()


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point returning a process exit code."""
    try:
        cli.main(args=list(argv) if argv is not None else None, prog_name="thz-cnoma", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.UsageError as e:
        e.show()
        return 2
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
