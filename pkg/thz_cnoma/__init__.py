"""
THz cooperative NOMA - link-level simulator of energy-efficient cooperative
NOMA for indoor THz-MISO downlinks.
"""

__version__ = "0.1.0"
__author__ = "Your Name"
__license__ = "MIT"

from .config import SimConfig, parse_config
from .errors import SimulationError
from .sim import run_monte_carlo, run_realization, sweep
