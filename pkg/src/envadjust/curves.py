"""Data model for statistic-curve ensembles and two-group functional data.

A curve set holds M statistic curves evaluated on a common grid; row 0 is
always the curve computed from the real data, rows 1..M-1 come from
permutations (or any simulated null). All downstream rank computations
assume this layout.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    InputValidationError,
    NonFiniteValueError,
    PointwiseTieError,
)

OBSERVED_INDEX = 0


class Direction(str, enum.Enum):
    """Which tail of the pointwise null distribution counts as extreme."""

    HIGH = "high"
    LOW = "low"
    TWO_SIDED = "two-sided"

    @classmethod
    def parse(cls, value) -> "Direction":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InputValidationError(
                f"unknown direction {value!r}; expected one of "
                f"{[d.value for d in cls]}"
            ) from None


class TiePolicy(str, enum.Enum):
    """How pointwise ties among curves are handled.

    STRICT rejects tied inputs outright; CONSERVATIVE admits them and lets
    the ranking push tied curves toward less extreme ranks, which keeps
    every p-value valid (never anti-conservative).
    """

    STRICT = "strict"
    CONSERVATIVE = "conservative"

    @classmethod
    def parse(cls, value) -> "TiePolicy":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InputValidationError(
                f"unknown tie policy {value!r}; expected one of "
                f"{[p.value for p in cls]}"
            ) from None


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Grid:
    """Strictly increasing, finite evaluation points of the function domain."""

    points: np.ndarray

    def __init__(self, points):
        pts = np.asarray(points, dtype=float).reshape(-1)
        if pts.size == 0:
            raise InputValidationError("grid must contain at least one point")
        if not np.all(np.isfinite(pts)):
            raise InputValidationError("grid points must be finite")
        if pts.size > 1 and not np.all(np.diff(pts) > 0):
            raise InputValidationError("grid points must be strictly increasing")
        object.__setattr__(self, "points", _freeze(pts))

    def __len__(self) -> int:
        return int(self.points.size)

    def __eq__(self, other) -> bool:
        return isinstance(other, Grid) and np.array_equal(self.points, other.points)

    @property
    def width(self) -> float:
        return float(self.points[-1] - self.points[0])


@dataclass(frozen=True)
class CurveSet:
    """M statistic curves on a common grid; row 0 is the observed curve.

    Construct through :func:`validate_curveset`, which enforces the
    invariants (finite entries, M >= 2, and, under the strict tie policy,
    pairwise-distinct values in every grid column).
    """

    grid: Grid
    values: np.ndarray
    tie_policy: TiePolicy = TiePolicy.STRICT

    @property
    def n_curves(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_points(self) -> int:
        return int(self.values.shape[1])

    @property
    def observed(self) -> np.ndarray:
        return self.values[OBSERVED_INDEX]


def validate_curveset(values, grid, tie_policy=TiePolicy.STRICT) -> CurveSet:
    """Validate a raw M x G matrix of statistic curves against a grid.

    Raises DimensionMismatchError, NonFiniteValueError, or (strict policy
    only) PointwiseTieError identifying the offending entries. Idempotent:
    revalidating the values of a returned CurveSet yields an equal one.
    """
    tie_policy = TiePolicy.parse(tie_policy)
    if not isinstance(grid, Grid):
        grid = Grid(grid)
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 2:
        raise DimensionMismatchError(
            f"curve matrix must be 2-dimensional, got shape {vals.shape}",
            actual=vals.shape,
        )
    n_curves, n_points = vals.shape
    if n_points != len(grid):
        raise DimensionMismatchError(
            f"curves have {n_points} columns but grid has {len(grid)} points",
            expected=len(grid),
            actual=n_points,
        )
    if n_curves < 2:
        raise DimensionMismatchError(
            f"need at least 2 curves (observed plus one reference), got {n_curves}",
            expected=2,
            actual=n_curves,
        )
    finite = np.isfinite(vals)
    if not finite.all():
        row, col = np.argwhere(~finite)[0]
        raise NonFiniteValueError(int(row), int(col))
    if tie_policy is TiePolicy.STRICT:
        for s in range(n_points):
            col = vals[:, s]
            order = np.argsort(col, kind="stable")
            dup = np.flatnonzero(np.diff(col[order]) == 0)
            if dup.size:
                i = dup[0]
                tied = sorted((int(order[i]), int(order[i + 1])))
                raise PointwiseTieError(s, tied)
    return CurveSet(grid=grid, values=_freeze(vals.copy()), tie_policy=tie_policy)


@dataclass(frozen=True)
class TwoGroupDataset:
    """Dense functional responses for two groups on a shared grid.

    labels hold one binary group indicator per response row; both groups
    need at least two members so pointwise variances exist.
    """

    grid: Grid
    responses: np.ndarray
    labels: np.ndarray = field(compare=False)

    def __init__(self, grid, responses, labels):
        if not isinstance(grid, Grid):
            grid = Grid(grid)
        resp = np.asarray(responses, dtype=float)
        labs = np.asarray(labels)
        if resp.ndim != 2:
            raise DimensionMismatchError(
                f"responses must be 2-dimensional, got shape {resp.shape}"
            )
        if resp.shape[1] != len(grid):
            raise DimensionMismatchError(
                f"responses have {resp.shape[1]} columns but grid has "
                f"{len(grid)} points",
                expected=len(grid),
                actual=resp.shape[1],
            )
        if labs.ndim != 1 or labs.shape[0] != resp.shape[0]:
            raise DimensionMismatchError(
                f"labels length {labs.shape} does not match "
                f"{resp.shape[0]} response rows"
            )
        if not np.isfinite(resp).all():
            row, col = np.argwhere(~np.isfinite(resp))[0]
            raise NonFiniteValueError(int(row), int(col))
        uniq = set(np.unique(labs).tolist())
        if not uniq <= {0, 1}:
            raise InputValidationError(
                f"labels must be binary 0/1 indicators, got values {sorted(uniq)}"
            )
        labs = labs.astype(np.int8)
        n1 = int(labs.sum())
        n0 = labs.size - n1
        if min(n0, n1) < 2:
            raise InputValidationError(
                f"each group needs at least 2 members, got sizes {n0} and {n1}"
            )
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "responses", _freeze(resp.copy()))
        object.__setattr__(self, "labels", _freeze(labs))

    @property
    def n_subjects(self) -> int:
        return int(self.responses.shape[0])

    @property
    def group_sizes(self) -> tuple[int, int]:
        n1 = int(self.labels.sum())
        return self.labels.size - n1, n1
