"""Multistate interval functions: exact path-space oracles, estimators and checks.

Configs are plain dicts in the same shape as the JSON files the CLI reads.
"""

import json

from . import _core
from ._core import ConfigError, CsvError, PathSpace, PathSpaceTooLarge, suite_names

__all__ = [
    "ConfigError",
    "CsvError",
    "PathSpace",
    "PathSpaceTooLarge",
    "convergence",
    "estimate",
    "exact_pathspace",
    "idn_scenario",
    "pathspace_from_dict",
    "simulate",
    "suite_names",
    "surv_scenario",
    "verify",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def idn_scenario():
    return json.loads(_core.idn_scenario())


def surv_scenario():
    return json.loads(_core.surv_scenario())


def exact_pathspace(scenario, max_paths=1_000_000):
    return _core.exact_pathspace(_text(scenario), max_paths)


def pathspace_from_dict(doc):
    return _core.pathspace_from_json(_text(doc))


def simulate(scenario, censoring, n, seed):
    """Event CSV text for n simulated subjects."""
    return _core.simulate(_text(scenario), _text(censoring), n, seed)


def estimate(events_csv, d, tau):
    return json.loads(_core.estimate(events_csv, d, tau))


def verify(pathspace, label="pathspace", markov=False, only=(), tol=None):
    return _core.verify(pathspace, label, markov, list(only), dict(tol or {}))


def convergence(scenario, conforming, violating=None, ns=(100, 1000, 10000), seed=7, tol=None):
    return json.loads(
        _core.convergence(
            _text(scenario),
            _text(conforming),
            None if violating is None else _text(violating),
            list(ns),
            seed,
            dict(tol or {}),
        )
    )
