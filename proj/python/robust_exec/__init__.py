"""Entropy-regularized robust optimal execution.

Configurations are plain dicts in the same schema as the CLI's JSON files.
A string is taken as a preset name.
"""

import json as _json

from . import _core
from ._core import Error, kl_gaussian, minimize_entropy, preset_names

__all__ = [
    "Error",
    "ValueFunction",
    "coefficients",
    "kl_gaussian",
    "minimize_entropy",
    "preset",
    "preset_names",
    "run_check",
    "run_simulate",
    "run_solve",
    "run_stress",
    "simulate",
]


def _text(config):
    if isinstance(config, str):
        config = {"preset": config}
    return _json.dumps(config)


def preset(name):
    """Fully expanded configuration dict for a named preset."""
    return _json.loads(_core.preset(name))


def normalize(config):
    """Validates a config and returns it with every field filled in."""
    return _json.loads(_core.normalize_config(_text(config)))


def coefficients(config, t=0.0):
    """Derived model coefficients at time t; closed-form-only values are None outside their regime."""
    return _json.loads(_core.coefficients(_text(config), t))


class ValueFunction(_core.ValueFunction):
    """V(t, x) = H2 x^2 / 2 + H1 x + H0 and the optimal feedback rate."""

    def __init__(self, config, prefer_closed_form=True):
        super().__init__(_text(config), prefer_closed_form)


def simulate(config):
    """Monte Carlo run in memory: per-strategy path columns and summary stats."""
    return _json.loads(_core.simulate(_text(config)))


def run_solve(config, out):
    return _json.loads(_core.run_solve(_text(config), str(out)))


def run_simulate(config, out):
    return _json.loads(_core.run_simulate(_text(config), str(out)))


def run_stress(table, out, seed=None, paths=None, steps=None):
    return _json.loads(_core.run_stress(table, str(out), seed, paths, steps))


def run_check(suite, out="", seed=None):
    return _json.loads(_core.run_check(suite, str(out), seed))
