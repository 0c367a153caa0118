"""Two-group pointwise t statistic and the label-permutation engine.

The engine produces the statistic-curve ensemble consumed by the rank and
envelope machinery: row 0 is the statistic on the real labels, rows 1..M-1
are statistics on independently drawn uniform label permutations. Each
row's permutation derives from the seed and the row index alone, so the
result is identical no matter how rows are scheduled.
"""

from __future__ import annotations

import numpy as np

from .curves import CurveSet, TiePolicy, TwoGroupDataset, validate_curveset
from .errors import DegeneratePermutationsError, ZeroVarianceError

RETRY_CAP = 100


def _pooled_t(responses: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Pooled-variance two-sample t per grid column (group 1 minus group 0).

    Raises ZeroVarianceError at the first column where the pooled sum of
    squares vanishes (both groups constant there).
    """
    g1 = responses[labels == 1]
    g0 = responses[labels == 0]
    n1, n0 = g1.shape[0], g0.shape[0]
    m1 = g1.mean(axis=0)
    m0 = g0.mean(axis=0)
    # deviation form keeps the zero-variance test exact for constant columns
    ss = ((g1 - m1) ** 2).sum(axis=0) + ((g0 - m0) ** 2).sum(axis=0)
    dead = np.flatnonzero(ss == 0.0)
    if dead.size:
        raise ZeroVarianceError(int(dead[0]))
    sp2 = ss / (n1 + n0 - 2)
    se = np.sqrt(sp2 * (1.0 / n1 + 1.0 / n0))
    return (m1 - m0) / se


def pointwise_t(data: TwoGroupDataset) -> np.ndarray:
    """Standardized group-difference curve: pooled two-sample t at each grid point."""
    return _pooled_t(data.responses, data.labels)


def _row_rng(seed: int, row: int) -> np.random.Generator:
    # one child stream per permuted row; row indices start at 1
    root = np.random.SeedSequence(seed)
    return np.random.default_rng(root.spawn(row)[row - 1])


def permutation_curves(
    data: TwoGroupDataset,
    n_permutations: int,
    seed: int,
    tie_policy=TiePolicy.STRICT,
) -> CurveSet:
    """Build the M-row statistic ensemble: observed curve plus M-1 permuted ones.

    Deterministic given (data, n_permutations, seed). Permutations whose
    statistic is degenerate (zero pooled variance somewhere) are rejected
    and resampled from the same row stream, up to RETRY_CAP attempts;
    exhaustion raises DegeneratePermutationsError.
    """
    if n_permutations < 2:
        raise ValueError(f"need n_permutations >= 2, got {n_permutations}")
    n = data.n_subjects
    curves = np.empty((n_permutations, len(data.grid)))
    curves[0] = pointwise_t(data)
    children = np.random.SeedSequence(seed).spawn(n_permutations - 1)
    for row in range(1, n_permutations):
        rng = np.random.default_rng(children[row - 1])
        for _ in range(RETRY_CAP):
            permuted = data.labels[rng.permutation(n)]
            try:
                curves[row] = _pooled_t(data.responses, permuted)
                break
            except ZeroVarianceError:
                continue
        else:
            raise DegeneratePermutationsError(row, RETRY_CAP)
    return validate_curveset(curves, data.grid, tie_policy)
