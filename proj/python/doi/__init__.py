"""Degree-of-interference causal inference on networks."""

import json as _json
import os as _os

from ._core import (
    ChainError,
    ConfigError,
    DataError,
    EstimandError,
    Network,
    NetworkError,
    __version__,
    barabasi_albert,
    erdos_renyi,
    group_network,
    ht_e_ate,
    inverse_distance_network,
    pagerank,
    simulate,
    summarize,
)
from . import _core


def _text(config):
    return config if isinstance(config, str) else _json.dumps(config)


def fit(config, base_dir=None):
    """Fit a model from a config dict or JSON text."""
    return _core.fit(_text(config), base_dir or _os.getcwd())


def run(config, base_dir=None):
    """Run a fit, simulate or benchmark config and write its report."""
    return _core.run(_text(config), base_dir or _os.getcwd())
