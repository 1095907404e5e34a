"""Viscous stochastic conservation laws.

Thin layer over the compiled ``_core`` module. ``run`` executes a registry
experiment, ``diagnose`` a single-configuration diagnostic.
"""

from ._core import (
    Assertion,
    Config,
    ConfigError,
    ResultRecord,
    __version__,
    c_d_laguerre,
    c_d_simpson,
    config_keys,
    default_config,
    diagnostic_kinds,
    git_blob_id,
    kappa1,
    kappa2,
    list_experiments,
    max_relative_difference,
    run_diagnostic,
    run_experiment,
    set_workers,
)


def _strings(overrides):
    return {k: ",".join(map(str, v)) if isinstance(v, (list, tuple)) else str(v) for k, v in overrides.items()}


def run(name, quick=False, **overrides):
    """Run a registry experiment; keyword arguments override config keys."""
    return run_experiment(name, quick, _strings(overrides))


def diagnose(kind, config=None, **overrides):
    """Run one diagnostic (solve, kato, contraction, ...) on a config."""
    return run_diagnostic(kind, config if config is not None else Config(), _strings(overrides))


def table(record, name):
    """A result table as a list of dicts keyed by column (numbers left as strings)."""
    import csv
    import io

    rows = list(csv.reader(io.StringIO(record.tables[name])))
    return [dict(zip(rows[0], r)) for r in rows[1:]]


__all__ = [n for n in dir() if not n.startswith("_")]
