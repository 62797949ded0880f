"""Skipping sampler: MCMC on constrained supports and the monotonic optimiser."""

import json

from ._skipping import *  # noqa: F401,F403
from ._skipping import _table, _tail_experiment, _validate_config


def tail_experiment(dim, seed=1, steps=100000):
    """Tuned RWM vs skipping on a mixture tail; returns the comparison dict."""
    return json.loads(_tail_experiment(dim, seed, steps))


def table1(runs=1000, m=100, seed=1, threads=1):
    return json.loads(_table(1, runs, m, seed, threads))


def table2(runs=1000, m=100, seed=1, threads=1):
    return json.loads(_table(2, runs, m, seed, threads))


def validate_config(config):
    """Raises ConfigError naming the bad key."""
    _validate_config(json.dumps(config))
