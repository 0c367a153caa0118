"""Scikit-learn style estimators wrapping the adjustment pipeline.

These exist so the tests compose with the wider ecosystem (`get_params`,
`clone`, pipelines that expect fitted attributes). The statistical work
lives in the functional modules; the estimators validate inputs, run the
pipeline, and expose results as fitted attributes, with float views for
convenience and the exact rational report alongside.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .adjust import compute_report
from .curves import Grid, TwoGroupDataset, validate_curveset
from .permutation import permutation_curves
from .ranks import erl_depths, minrank_depths, pointwise_ranks


def _as_grid(grid, n_points: int) -> Grid:
    if grid is None:
        return Grid(np.arange(n_points, dtype=float))
    return grid if isinstance(grid, Grid) else Grid(grid)


class _ReportAttributesMixin:
    def _ingest(self, curves, direction):
        report = compute_report(curves, direction)
        ranks = pointwise_ranks(curves, direction)
        self.curves_ = curves
        self.ranks_ = ranks
        self.depths_minrank_ = minrank_depths(ranks)
        self.depths_erl_ = erl_depths(ranks)
        self.report_ = report
        self.pvalue_global_ = float(report.global_minrank)
        self.pvalue_global_erl_ = float(report.global_erl)
        self.pvalues_raw_ = np.array([float(p) for p in report.raw])
        self.pvalues_single_step_ = np.array([float(p) for p in report.single_step])
        self.pvalues_step_down_ = np.array([float(p) for p in report.step_down])
        self.pvalues_erl_ = np.array([float(p) for p in report.erl])

    def significant_points(self, alpha: float, family: str = "step_down") -> np.ndarray:
        """Grid indices rejected at level alpha by the chosen family."""
        check_is_fitted(self, "report_")
        pvals = getattr(self.report_, family)
        return np.flatnonzero([p <= alpha for p in pvals])


class GlobalEnvelopeTest(_ReportAttributesMixin, BaseEstimator):
    """Envelope test and adjusted pointwise p-values for a precomputed ensemble.

    Parameters
    ----------
    direction : {"high", "low", "two-sided"}, default="two-sided"
        Which tail of the pointwise null distribution counts as extreme.
    ties : {"strict", "conservative"}, default="strict"
        Strict rejects pointwise ties among curves; conservative admits
        them and ranks tied curves as less extreme.
    grid : array-like of shape (n_points,), optional
        Domain locations; defaults to 0..G-1.

    Attributes
    ----------
    report_ : PvalueReport
        Exact rational p-values for all families.
    pvalue_global_, pvalue_global_erl_ : float
        Global test p-values under min-rank and ERL depths.
    pvalues_raw_, pvalues_single_step_, pvalues_step_down_, pvalues_erl_ :
        ndarray of shape (n_points,), float views of the report.
    """

    def __init__(self, direction="two-sided", ties="strict", grid=None):
        self.direction = direction
        self.ties = ties
        self.grid = grid

    def fit(self, X, y=None):
        """Fit on an (n_curves, n_points) matrix whose row 0 is the observed curve."""
        X = check_array(X, dtype=float, ensure_min_samples=2)
        curves = validate_curveset(X, _as_grid(self.grid, X.shape[1]), self.ties)
        self._ingest(curves, self.direction)
        return self


class TwoSampleEnvelopeTest(_ReportAttributesMixin, BaseEstimator):
    """Permutation envelope test for a two-group functional dataset.

    Builds the pointwise pooled-t statistic curve for the real group labels
    and for ``n_permutations - 1`` uniformly random label permutations,
    then runs the full adjustment pipeline on that ensemble.

    Parameters
    ----------
    n_permutations : int, default=4000
        Ensemble size M (observed curve included).
    direction : {"high", "low", "two-sided"}, default="two-sided"
    ties : {"strict", "conservative"}, default="strict"
    random_state : int, default=0
        Seed for the permutation streams; fitting is deterministic in it.
    grid : array-like of shape (n_points,), optional

    Attributes
    ----------
    Same as :class:`GlobalEnvelopeTest`, fitted on the permutation ensemble.
    """

    def __init__(
        self,
        n_permutations=4000,
        direction="two-sided",
        ties="strict",
        random_state=0,
        grid=None,
    ):
        self.n_permutations = n_permutations
        self.direction = direction
        self.ties = ties
        self.random_state = random_state
        self.grid = grid

    def fit(self, X, y):
        """Fit on responses X of shape (n_subjects, n_points) and binary labels y."""
        X = check_array(X, dtype=float)
        y = np.asarray(y)
        data = TwoGroupDataset(_as_grid(self.grid, X.shape[1]), X, y)
        curves = permutation_curves(
            data, self.n_permutations, self.random_state, self.ties
        )
        self._ingest(curves, self.direction)
        return self
