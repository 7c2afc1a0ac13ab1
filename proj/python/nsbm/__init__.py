"""Nomination stochastic block model for directed networks.

Labels are 0-based integer sequences; matrices are numpy arrays with the
edge i -> j stored at row i, column j.
"""

import json

from ._core import (
    DataError,
    DimensionError,
    DomainError,
    Error,
    NumericalError,
    cluster,
    estimate_baseline,
    estimate_nsbm,
    expected_matrix,
    misclustering,
    preprocess,
    relative_frobenius,
    sample_nsbm,
    simulate,
)
from . import _core


def analyze(A, K, method="right_sc", seed=1):
    """Cluster, fit the model and rank communities by internal strength."""
    return json.loads(_core.analyze_json(A, K, method, seed))


def run_sweep(config, jobs=1):
    """Run a simulation sweep described by a config dict.

    Returns the per-replication CSV text and the parsed summary.
    """
    csv, summary = _core.run_sweep_json(json.dumps(config), jobs)
    return csv, json.loads(summary)


__all__ = [
    "DataError",
    "DimensionError",
    "DomainError",
    "Error",
    "NumericalError",
    "analyze",
    "cluster",
    "estimate_baseline",
    "estimate_nsbm",
    "expected_matrix",
    "misclustering",
    "preprocess",
    "relative_frobenius",
    "run_sweep",
    "sample_nsbm",
    "simulate",
]
