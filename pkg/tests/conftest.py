"""
Shared fixtures for the simulator test suite.
"""
import pytest

from thz_cnoma.config import SimConfig, build_config


@pytest.fixture
def default_config() -> SimConfig:
    """Built-in operating point."""
    return SimConfig()


@pytest.fixture
def small_config() -> SimConfig:
    """Default physics with a short Monte Carlo run."""
    return build_config({"num_realizations": 20, "master_seed": 7})


@pytest.fixture(autouse=True)
def _isolate_env(monkeypatch):
    """Run in-process by default and keep the caller's run ledger and clock out of the tests."""
    monkeypatch.setenv("THZ_SIM_THREADS", "1")
    monkeypatch.delenv("THZ_SIM_DB", raising=False)
    monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)
