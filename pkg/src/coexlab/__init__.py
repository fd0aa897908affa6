"""Analytic and simulated coexistence of Wi-Fi sensing (802.11bf) and 802.11ax APs."""

from coexlab.config import ScenarioConfig, config_from_dict, load_config
from coexlab.errors import (
    CoexError,
    ConvergenceFailure,
    InvalidParameter,
    ModelInconsistency,
    OutputError,
    SingularModel,
    UnstableSystem,
)

__version__ = "0.1.0"

__all__ = [
    "CoexError",
    "ConvergenceFailure",
    "InvalidParameter",
    "ModelInconsistency",
    "OutputError",
    "ScenarioConfig",
    "SingularModel",
    "UnstableSystem",
    "config_from_dict",
    "load_config",
]
