"""Pointwise p-values from a curve ensemble: raw, single-step, step-down, ERL.

All four families return exact rationals with denominator M (the ensemble
size), so ordering comparisons between them are never at the mercy of
floating point. The "+1 in the numerator" convention is built in, which
keeps every p-value strictly positive.

Two independent routes to the single-step adjustment are provided: the
counting form (reference depths versus the observed pointwise rank) and a
graphical form that sweeps nested envelopes at each grid point until the
observed curve falls outside. They are provably identical on tie-free
input, and the test suite holds them to that.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .curves import CurveSet, Direction, Grid, TiePolicy
from .envelopes import KappaTable, global_p
from .ranks import (
    DepthKind,
    DepthVector,
    RankMatrix,
    erl_depths,
    minrank_depths,
    pointwise_ranks,
)


def raw_pvalues(ranks: RankMatrix) -> tuple[Fraction, ...]:
    """Unadjusted pointwise permutation p-values: observed rank over M."""
    m = ranks.n_curves
    return tuple(Fraction(int(r), m) for r in ranks.observed)


def single_step(ranks: RankMatrix, minrank: DepthVector) -> tuple[Fraction, ...]:
    """Single-step adjusted p-values via depth counting.

    At each grid point, count the reference curves whose min-rank depth is
    at most the observed pointwise rank there, add one, divide by M.
    """
    if minrank.kind is not DepthKind.MIN_RANK:
        raise ValueError("single_step requires min-rank depths")
    m = ranks.n_curves
    ref = np.sort(minrank.depths[1:])
    counts = np.searchsorted(ref, ranks.observed, side="right")
    return tuple(Fraction(int(c) + 1, m) for c in counts)


def _first_exit_threshold(col_values, col_ranks, direction: Direction) -> int:
    """Smallest threshold j at which the observed value leaves the band of
    values whose pointwise rank at this column exceeds j."""
    m = col_values.size
    t0 = col_values[0]
    order = np.argsort(col_ranks, kind="stable")
    ranks_sorted = col_ranks[order]
    vals = col_values[order]
    # suffix bounds: band of the values still retained past position i
    suf_min = np.minimum.accumulate(vals[::-1])[::-1]
    suf_max = np.maximum.accumulate(vals[::-1])[::-1]
    for j in range(1, m + 1):
        start = int(np.searchsorted(ranks_sorted, j, side="right"))
        if start == m:
            return j  # nothing retained: exited by convention
        if direction is Direction.HIGH:
            hit = t0 > suf_max[start]
        elif direction is Direction.LOW:
            hit = t0 < suf_min[start]
        else:
            hit = t0 < suf_min[start] or t0 > suf_max[start]
        if hit:
            return j
    raise AssertionError("unreachable: the empty band always exits")


def single_step_graphical(
    curves: CurveSet, minrank: DepthVector, direction
) -> tuple[Fraction, ...]:
    """Single-step adjusted p-values via envelope sweeps.

    At each grid point, peel the pointwise-most-extreme values one
    threshold at a time and report kappa_j / M for the first threshold j
    whose band no longer contains the observed value. kappa_j counts the
    curves with min-rank depth <= j, so the value returned is a depth-band
    coverage probability, not a pointwise count.
    """
    direction = Direction.parse(direction)
    if minrank.kind is not DepthKind.MIN_RANK:
        raise ValueError("single_step_graphical requires min-rank depths")
    m = curves.n_curves
    table = KappaTable.from_depths(minrank)
    col_ranks = pointwise_ranks(curves, direction).ranks
    out = []
    for s in range(curves.n_points):
        j = _first_exit_threshold(curves.values[:, s], col_ranks[:, s], direction)
        out.append(Fraction(table.kappa(j), m))
    return tuple(out)


@dataclass(frozen=True)
class StepdownLevel:
    """Audit record for one step-down level i."""

    i: int
    active: tuple[int, ...]  # grid indices with observed rank >= i
    restricted_depths: np.ndarray  # min rank over the active set, rows 1..M-1
    numerator: int  # count(restricted depth <= i) + 1


@dataclass(frozen=True)
class StepdownTrace:
    levels: tuple[StepdownLevel, ...]

    def level(self, i: int) -> StepdownLevel:
        return self.levels[i - 1]


def step_down(ranks: RankMatrix) -> tuple[tuple[Fraction, ...], StepdownTrace]:
    """Step-down adjusted p-values with a per-level audit trace.

    Level i restricts every reference curve's depth to the grid points
    where the observed rank is still at least i, counts how many restricted
    depths fall at or below i, and the p-value at s is the running maximum
    of those level terms up to the observed rank at s. The active sets are
    nested, so restricted depths are recomputed only when the set shrinks.
    """
    m = ranks.n_curves
    r0 = ranks.observed
    max_level = int(r0.max())
    perm = ranks.ranks[1:]

    distinct = np.unique(r0)  # ascending; S_i is constant between these
    levels: list[StepdownLevel] = []
    numerators = np.empty(max_level + 1, dtype=np.int64)
    seg = 0
    active_idx: tuple[int, ...] = ()
    restricted: np.ndarray | None = None
    restricted_sorted: np.ndarray | None = None
    for i in range(1, max_level + 1):
        if seg < distinct.size and i > (distinct[seg - 1] if seg else 0):
            # i entered a new segment: active set is {s: r0[s] >= distinct[seg]}
            keep = r0 >= distinct[seg]
            active_idx = tuple(int(s) for s in np.flatnonzero(keep))
            restricted = perm[:, keep].min(axis=1)
            restricted.setflags(write=False)
            restricted_sorted = np.sort(restricted)
            seg += 1
        assert active_idx, "active set cannot be empty for i <= max observed rank"
        count = int(np.searchsorted(restricted_sorted, i, side="right"))
        numerators[i] = count + 1
        levels.append(
            StepdownLevel(
                i=i,
                active=active_idx,
                restricted_depths=restricted,
                numerator=count + 1,
            )
        )
    running = np.maximum.accumulate(numerators[1:])
    pvals = tuple(Fraction(int(running[r - 1]), m) for r in r0)
    return pvals, StepdownTrace(levels=tuple(levels))


def erl_adjusted(curves: CurveSet, erl: DepthVector, direction) -> tuple[Fraction, ...]:
    """ERL-adjusted p-values via the nested ERL envelope sweep.

    At each grid point, sweep the envelopes of curves with ERL depth above
    j for ascending j and report kappa_j / M at the first exit. The
    envelopes shrink as j grows (suffix bounds over curves sorted by
    depth), so the sweep can stop at the first exit.
    """
    direction = Direction.parse(direction)
    if erl.kind is not DepthKind.ERL:
        raise ValueError("erl_adjusted requires ERL depths")
    m = curves.n_curves
    table = KappaTable.from_depths(erl)
    order = np.argsort(erl.depths, kind="stable")
    depths_sorted = erl.depths[order]
    vals = curves.values[order]
    suf_lower = np.minimum.accumulate(vals[::-1], axis=0)[::-1]
    suf_upper = np.maximum.accumulate(vals[::-1], axis=0)[::-1]
    t0 = curves.observed

    # candidate thresholds: the band only changes where a depth value is crossed
    candidates = np.unique(depths_sorted)
    starts = np.searchsorted(depths_sorted, candidates, side="right")
    kappas = [table.kappa(int(j)) for j in candidates]
    out = []
    for s in range(curves.n_points):
        result = None
        for start, kappa_j in zip(starts, kappas):
            if start == m:
                result = Fraction(kappa_j, m)
                break
            if direction is Direction.HIGH:
                hit = t0[s] > suf_upper[start, s]
            elif direction is Direction.LOW:
                hit = t0[s] < suf_lower[start, s]
            else:
                hit = t0[s] < suf_lower[start, s] or t0[s] > suf_upper[start, s]
            if hit:
                result = Fraction(kappa_j, m)
                break
        assert result is not None, "the empty envelope always exits"
        out.append(result)
    return tuple(out)


@dataclass(frozen=True)
class PvalueReport:
    """Every p-value family for one ensemble, stored as numerators over M."""

    grid: Grid
    n_curves: int
    direction: Direction
    tie_policy: TiePolicy
    raw_k: np.ndarray
    single_step_k: np.ndarray
    step_down_k: np.ndarray
    erl_k: np.ndarray
    global_minrank_k: int
    global_erl_k: int

    @property
    def n_points(self) -> int:
        return len(self.grid)

    def _frac(self, k: int) -> Fraction:
        return Fraction(int(k), self.n_curves)

    @property
    def raw(self) -> tuple[Fraction, ...]:
        return tuple(self._frac(k) for k in self.raw_k)

    @property
    def single_step(self) -> tuple[Fraction, ...]:
        return tuple(self._frac(k) for k in self.single_step_k)

    @property
    def step_down(self) -> tuple[Fraction, ...]:
        return tuple(self._frac(k) for k in self.step_down_k)

    @property
    def erl(self) -> tuple[Fraction, ...]:
        return tuple(self._frac(k) for k in self.erl_k)

    @property
    def global_minrank(self) -> Fraction:
        return self._frac(self.global_minrank_k)

    @property
    def global_erl(self) -> Fraction:
        return self._frac(self.global_erl_k)


def _numerators(pvals, m: int) -> np.ndarray:
    out = np.array([int(p * m) for p in pvals], dtype=np.int64)
    out.setflags(write=False)
    return out


def compute_report(curves: CurveSet, direction) -> PvalueReport:
    """Run the full adjustment pipeline on a validated ensemble."""
    direction = Direction.parse(direction)
    ranks = pointwise_ranks(curves, direction)
    mr = minrank_depths(ranks)
    erl = erl_depths(ranks)
    m = curves.n_curves
    sd, _ = step_down(ranks)
    return PvalueReport(
        grid=curves.grid,
        n_curves=m,
        direction=direction,
        tie_policy=curves.tie_policy,
        raw_k=_numerators(raw_pvalues(ranks), m),
        single_step_k=_numerators(single_step(ranks, mr), m),
        step_down_k=_numerators(sd, m),
        erl_k=_numerators(erl_adjusted(curves, erl, direction), m),
        global_minrank_k=int(global_p(mr) * m),
        global_erl_k=int(global_p(erl) * m),
    )
