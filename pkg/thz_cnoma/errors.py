"""
Exception hierarchy for the THz cooperative-NOMA simulator.
"""


class SimulationError(Exception):
    """Base class for every error raised by the simulator."""


class ConfigurationError(SimulationError, ValueError):
    """Invalid configuration value, unknown key, malformed file or sweep request."""


class DomainError(SimulationError, ValueError):
    """Input outside the mathematical domain of a model equation."""


class InfeasibleLinkError(SimulationError):
    """A link that cannot carry the requested rate at any finite power."""
