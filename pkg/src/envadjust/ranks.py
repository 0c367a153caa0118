"""Pointwise rank matrices and the two functional depths built on them.

Rank 1 always marks the value most inconsistent with the null at that grid
point; the direction decides which tail (or both) that is. The min-rank
depth of a curve is its best pointwise rank anywhere on the grid; the
extreme-rank-length (ERL) depth refines that ordering by comparing entire
ascending-sorted rank rows lexicographically, so a curve that holds an
extreme rank over a wider region is ranked as more extreme.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .curves import CurveSet, Direction


class DepthKind(str, enum.Enum):
    MIN_RANK = "min_rank"
    ERL = "erl"


@dataclass(frozen=True)
class RankMatrix:
    """M x G matrix of pointwise ranks; entries in [1, M], low = extreme."""

    ranks: np.ndarray
    direction: Direction

    @property
    def n_curves(self) -> int:
        return int(self.ranks.shape[0])

    @property
    def n_points(self) -> int:
        return int(self.ranks.shape[1])

    @property
    def observed(self) -> np.ndarray:
        return self.ranks[0]


@dataclass(frozen=True)
class DepthVector:
    """One integer depth per curve; small depth = globally extreme curve."""

    depths: np.ndarray
    kind: DepthKind

    @property
    def n_curves(self) -> int:
        return int(self.depths.size)

    @property
    def observed(self) -> int:
        return int(self.depths[0])


def _at_least_as_extreme(values: np.ndarray, direction: Direction) -> np.ndarray:
    # count of curves at least as extreme per column; "max" ranks push ties
    # toward less extreme, which is the conservative convention
    if direction is Direction.HIGH:
        return rankdata(-values, method="max", axis=0)
    if direction is Direction.LOW:
        return rankdata(values, method="max", axis=0)
    high = rankdata(-values, method="max", axis=0)
    low = rankdata(values, method="max", axis=0)
    return np.minimum(high, low)


def pointwise_ranks(curves: CurveSet, direction) -> RankMatrix:
    """Rank every curve at every grid point under the chosen extremeness direction."""
    direction = Direction.parse(direction)
    ranks = _at_least_as_extreme(curves.values, direction).astype(np.int64)
    ranks.setflags(write=False)
    return RankMatrix(ranks=ranks, direction=direction)


def minrank_depths(ranks: RankMatrix) -> DepthVector:
    """Depth of each curve = the minimum of its pointwise ranks over the grid."""
    depths = ranks.ranks.min(axis=1)
    depths.setflags(write=False)
    return DepthVector(depths=depths, kind=DepthKind.MIN_RANK)


def erl_depths(ranks: RankMatrix) -> DepthVector:
    """Depth of each curve = count of curves whose sorted rank row is lex <= its own.

    Sorting each row ascending and comparing lexicographically makes a
    curve with a wider extreme-rank region more extreme than one sharing
    the same minimum rank over a narrower region. Curves with identical
    sorted rows all receive the shared count, so residual ties never
    understate a p-value.
    """
    m = ranks.n_curves
    rows = np.sort(ranks.ranks, axis=1)
    # lexsort keys: last key is primary, so feed columns in reverse
    order = np.lexsort(tuple(rows[:, g] for g in range(rows.shape[1] - 1, -1, -1)))
    depths = np.empty(m, dtype=np.int64)
    start = 0
    for i in range(1, m + 1):
        if i == m or not np.array_equal(rows[order[i]], rows[order[start]]):
            depths[order[start:i]] = i  # whole tie group gets the <=lex count
            start = i
    depths.setflags(write=False)
    return DepthVector(depths=depths, kind=DepthKind.ERL)
