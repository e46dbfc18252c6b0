"""Numerical workbench for Dirac scattering off commutative and
Moyal-deformed scalar potentials."""

import json as _json

from ._core import (
    ConfigError,
    InvalidInput,
    NumericalError,
    __version__,
    run,
    star_product,
)
from ._core import load_config as _load_config_str


def load_config(path):
    """Load and validate a run configuration file; returns it as a dict."""
    return _json.loads(_load_config_str(path))


__all__ = [
    "ConfigError",
    "InvalidInput",
    "NumericalError",
    "__version__",
    "load_config",
    "run",
    "star_product",
]
