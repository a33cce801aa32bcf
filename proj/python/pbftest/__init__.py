"""Projected Baringhaus-Franz two-sample test for functional data."""

import numpy as np

from ._core import (
    DataError,
    NumericalError,
    draw_scenario,
    gram,
    pbf_statistic,
    pbf_statistic_oracle,
    permutation_test,
    run_power,
    sample_limit_law,
    spectrum_estimate,
)

__all__ = [
    "DataError",
    "NumericalError",
    "draw_scenario",
    "gram",
    "pbf_statistic",
    "pbf_statistic_oracle",
    "permutation_test",
    "run_power",
    "sample_limit_law",
    "spectrum_estimate",
    "two_sample_test",
]

__version__ = "0.1.0"


def two_sample_test(x, y, phi="l2", B=500, seed=1, repr="grid", grid=None,
                    rule="trapezoid", threads=1, keep_replicates=False):
    """Permutation test of equal laws for curve samples x (n rows) and y (m rows)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2 or y.ndim != 2 or x.shape[1] != y.shape[1]:
        raise ValueError("x and y must be 2-d with the same number of columns")
    rows = np.vstack([x, y])
    labels = [0] * len(x) + [1] * len(y)
    g = gram(rows, repr=repr, grid=grid, rule=rule)
    return permutation_test(g, labels, phi=phi, B=B, seed=seed, threads=threads,
                            keep_replicates=keep_replicates)
