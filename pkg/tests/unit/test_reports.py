"""
Unit tests for CSV/JSON result emission and the run manifest.
"""
import json

import pytest

from thz_cnoma import __version__, sim
from thz_cnoma.config import build_config
from thz_cnoma.errors import ConfigurationError, SimulationError
from thz_cnoma.reports import (
    CSV_COLUMNS,
    EXTRA_COLUMNS,
    CSVReporter,
    RunManifest,
    emit_results,
    load_results_csv,
    results_frame,
)


@pytest.fixture(scope="module")
def power_sweep():
    config = build_config({"num_realizations": 4, "master_seed": 21})
    return sim.sweep(config, "bs_power", [1.0, 3.0, 5.0, 7.0, 9.0], workers=1)


class TestResultsFrame:
    """Tabular view of a sweep."""

    def test_columns_and_rows(self, power_sweep):
        frame = results_frame(power_sweep)
        assert list(frame.columns) == CSV_COLUMNS
        assert len(frame) == 5
        assert list(frame["axis_value"]) == [1.0, 3.0, 5.0, 7.0, 9.0]
        assert set(frame["seed"]) == {21}
        assert set(frame["num_realizations"]) == {4}

    def test_extras(self, power_sweep):
        frame = results_frame(power_sweep, extras=True)
        assert list(frame.columns) == CSV_COLUMNS + EXTRA_COLUMNS


class TestCSVReporter:
    """CSV rows plus manifest sidecar."""

    def test_writes_header_and_rows(self, power_sweep, tmp_path):
        path = tmp_path / "fig2.csv"
        written = emit_results(power_sweep, "csv", path)
        assert written == [path, CSVReporter(path).manifest_path()]
        lines = path.read_bytes().split(b"\n")
        assert lines[0].decode() == ",".join(CSV_COLUMNS)
        assert len([line for line in lines if line]) == 6
        assert b"\r" not in path.read_bytes()

    def test_round_trip_is_exact(self, power_sweep, tmp_path):
        path = tmp_path / "sweep.csv"
        emit_results(power_sweep, "csv", path)
        frame = load_results_csv(path)
        assert list(frame["mean_ee_bits_per_joule"]) == power_sweep.column("mean_ee_bits_per_joule")
        assert list(frame["mean_consumed_power_w"]) == power_sweep.column("mean_consumed_power_w")
        assert list(frame["infeasibility_rate"]) == power_sweep.column("infeasibility_rate")

    def test_same_result_same_bytes(self, power_sweep, tmp_path, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
        a, b = tmp_path / "a" / "out.csv", tmp_path / "b" / "out.csv"
        emit_results(power_sweep, "csv", a)
        emit_results(power_sweep, "csv", b)
        assert a.read_bytes() == b.read_bytes()
        manifest_a = json.loads(CSVReporter(a).manifest_path().read_text())
        manifest_b = json.loads(CSVReporter(b).manifest_path().read_text())
        assert manifest_a["timestamp"] == manifest_b["timestamp"]

    def test_manifest_contents(self, power_sweep, tmp_path, monkeypatch):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
        path = tmp_path / "out.csv"
        emit_results(power_sweep, "csv", path, RunManifest.for_result(power_sweep, command="sweep"))
        manifest = json.loads(CSVReporter(path).manifest_path().read_text())
        assert manifest["version"] == f"thz-cnoma v{__version__}"
        assert manifest["master_seed"] == 21
        assert manifest["timestamp"] == "1970-01-01T00:00:00+00:00"
        assert manifest["command"] == "sweep"
        assert manifest["config"] == power_sweep.config
        assert manifest["output_paths"][0] == str(path)

    def test_manifest_rebuilds_the_run(self, power_sweep, tmp_path):
        path = tmp_path / "out.csv"
        emit_results(power_sweep, "csv", path)
        manifest = json.loads(CSVReporter(path).manifest_path().read_text())
        again = sim.sweep(build_config(manifest["config"]), "bs_power", list(power_sweep.values), workers=1)
        rerun = tmp_path / "rerun.csv"
        emit_results(again, "csv", rerun)
        assert rerun.read_bytes() == path.read_bytes()


class TestJSONReporter:
    """Single JSON document."""

    def test_schema(self, power_sweep, tmp_path):
        path = tmp_path / "out.json"
        assert emit_results(power_sweep, "json", path) == [path]
        document = json.loads(path.read_text())
        assert document["axis"] == "bs_power"
        assert document["columns"] == CSV_COLUMNS
        assert len(document["points"]) == 5
        assert set(document["points"][0]) == set(CSV_COLUMNS + EXTRA_COLUMNS)
        assert document["manifest"]["output_paths"] == [str(path)]
        assert document["points"][2]["mean_ee_bits_per_joule"] == power_sweep.points[2].mean_ee_bits_per_joule


class TestErrors:
    """Bad formats and paths."""

    def test_unknown_format(self, power_sweep, tmp_path):
        with pytest.raises(ConfigurationError, match="xml"):
            emit_results(power_sweep, "xml", tmp_path / "out.xml")

    def test_unwritable_path(self, power_sweep, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("not a directory")
        with pytest.raises(SimulationError, match="blocker"):
            emit_results(power_sweep, "csv", blocker / "out.csv")
