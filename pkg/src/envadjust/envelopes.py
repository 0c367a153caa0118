"""Envelopes over depth-retained curves, exit detection, and the global p-value.

For a depth threshold j, the envelope is the pointwise min/max band of the
curves whose depth exceeds j; kappa_j counts the curves it excludes. The
observed curve "exiting" the band at some grid point is equivalent to the
global p-value being at most kappa_j / M, which is what makes these bands a
graphical rendering of the test.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .curves import CurveSet, Direction
from .ranks import DepthKind, DepthVector


@dataclass(frozen=True)
class KappaTable:
    """kappa_j = number of curves with depth <= j, for j = 1..M."""

    counts: np.ndarray  # index j; counts[0] unused and fixed at 0
    kind: DepthKind

    @classmethod
    def from_depths(cls, depths: DepthVector) -> "KappaTable":
        m = depths.n_curves
        per_depth = np.bincount(depths.depths, minlength=m + 1)
        counts = np.cumsum(per_depth)
        counts.setflags(write=False)
        return cls(counts=counts, kind=depths.kind)

    @property
    def n_curves(self) -> int:
        return int(self.counts.size - 1)

    def kappa(self, j: int) -> int:
        if not 1 <= j <= self.n_curves:
            raise ValueError(f"j must lie in [1, {self.n_curves}], got {j}")
        return int(self.counts[j])


@dataclass(frozen=True)
class Envelope:
    """Pointwise bounds over the curves retained at depth threshold j."""

    j: int
    kappa_j: int
    lower: np.ndarray | None
    upper: np.ndarray | None
    retained_count: int

    @property
    def is_empty(self) -> bool:
        return self.retained_count == 0


def build_envelope(curves: CurveSet, depths: DepthVector, j: int) -> Envelope:
    """Envelope of the curves with depth > j; empty once every curve is excluded."""
    m = curves.n_curves
    if not 1 <= j <= m:
        raise ValueError(f"j must lie in [1, {m}], got {j}")
    retained = depths.depths > j
    count = int(retained.sum())
    kappa_j = m - count
    if count == 0:
        return Envelope(j=j, kappa_j=kappa_j, lower=None, upper=None, retained_count=0)
    sub = curves.values[retained]
    lower = sub.min(axis=0)
    upper = sub.max(axis=0)
    lower.setflags(write=False)
    upper.setflags(write=False)
    return Envelope(j=j, kappa_j=kappa_j, lower=lower, upper=upper, retained_count=count)


def exit_profile(envelope: Envelope, curves: CurveSet, direction) -> np.ndarray:
    """Boolean per grid point: does the observed curve leave the envelope there?

    One-sided directions test only the matching bound; two-sided tests the
    band. An empty envelope is exited everywhere by convention.
    """
    direction = Direction.parse(direction)
    t0 = curves.observed
    if envelope.is_empty:
        return np.ones(t0.size, dtype=bool)
    if direction is Direction.HIGH:
        return t0 > envelope.upper
    if direction is Direction.LOW:
        return t0 < envelope.lower
    return (t0 < envelope.lower) | (t0 > envelope.upper)


def exits_at(envelope: Envelope, curves: CurveSet, s_index: int, direction) -> bool:
    if not 0 <= s_index < curves.n_points:
        raise IndexError(f"grid index {s_index} out of range [0, {curves.n_points})")
    return bool(exit_profile(envelope, curves, direction)[s_index])


def global_p(depths: DepthVector) -> Fraction:
    """Global envelope-test p-value from any depth ordering.

    (number of reference curves at least as extreme as the observed one,
    plus one for the observed curve itself) / M. Always in [1/M, 1].
    """
    d = depths.depths
    m = depths.n_curves
    count = int((d[1:] <= d[0]).sum())
    return Fraction(count + 1, m)
