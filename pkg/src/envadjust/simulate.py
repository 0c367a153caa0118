"""Monte Carlo harness checking family-wise error control empirically.

Each replicate draws a fresh two-group dataset (smooth Gaussian-process
noise by default, optionally iid), runs the permutation ensemble and the
full adjustment pipeline, and tallies whether any truly-null grid point was
rejected. Replicates derive independent seeds from the configuration seed,
so results are reproducible and order-independent.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .adjust import compute_report
from .curves import Grid, TwoGroupDataset
from .permutation import permutation_curves

ADJUSTMENTS = ("single_step", "step_down", "erl")
THREADS_ENV_VAR = "ENVADJ_THREADS"


def _threshold(alpha) -> Fraction:
    # text goes through Fraction(str(...)) so "0.05" means exactly 1/20
    if isinstance(alpha, Fraction):
        return alpha
    if isinstance(alpha, str):
        return Fraction(alpha)
    return Fraction(str(alpha))


@dataclass(frozen=True)
class SimConfig:
    n0: int = 15
    n1: int = 15
    grid_size: int = 40
    n_permutations: int = 200
    replicates: int = 1000
    alpha: float | str = 0.05
    noise: str = "gp"  # "gp" (squared-exponential correlation) or "iid"
    length_scale: float = 0.1  # fraction of the domain width
    signal: tuple[float, ...] | None = None  # added to group 1; None = global null
    seed: int = 0

    def __post_init__(self):
        if min(self.n0, self.n1) < 2:
            raise ValueError("group sizes must be at least 2")
        if self.grid_size < 1 or self.n_permutations < 2 or self.replicates < 1:
            raise ValueError("grid_size, n_permutations, replicates must be positive")
        a = _threshold(self.alpha)
        if not 0 < a < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.noise not in ("gp", "iid"):
            raise ValueError(f"noise must be 'gp' or 'iid', got {self.noise!r}")
        if self.signal is not None:
            sig = tuple(float(x) for x in self.signal)
            if len(sig) != self.grid_size:
                raise ValueError(
                    f"signal length {len(sig)} != grid size {self.grid_size}"
                )
            object.__setattr__(self, "signal", sig)

    @property
    def alpha_fraction(self) -> Fraction:
        return _threshold(self.alpha)

    def null_mask(self) -> np.ndarray:
        if self.signal is None:
            return np.ones(self.grid_size, dtype=bool)
        return np.asarray(self.signal) == 0.0

    def to_json_dict(self) -> dict:
        return {
            "n0": self.n0,
            "n1": self.n1,
            "grid_size": self.grid_size,
            "n_permutations": self.n_permutations,
            "replicates": self.replicates,
            "alpha": str(self.alpha),
            "noise": self.noise,
            "length_scale": self.length_scale,
            "signal": list(self.signal) if self.signal is not None else None,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class AdjustmentSummary:
    fwer: float
    fwer_se: float
    mean_signal_rejections: float | None


@dataclass(frozen=True)
class SimResult:
    config: SimConfig
    summaries: dict[str, AdjustmentSummary]
    dominance_violations: int = 0
    _family_errors: dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    def to_json_dict(self) -> dict:
        return {
            "config": self.config.to_json_dict(),
            "adjustments": {
                name: {
                    "fwer": s.fwer,
                    "fwer_se": s.fwer_se,
                    "mean_signal_rejections": s.mean_signal_rejections,
                }
                for name, s in self.summaries.items()
            },
            "dominance_violations": self.dominance_violations,
        }

    def table(self) -> str:
        lines = [
            f"{'adjustment':<12} {'FWER':>8} {'MC s.e.':>8} {'signal rej.':>12}",
        ]
        for name, s in self.summaries.items():
            rej = "-" if s.mean_signal_rejections is None else f"{s.mean_signal_rejections:.3f}"
            lines.append(f"{name:<12} {s.fwer:>8.4f} {s.fwer_se:>8.4f} {rej:>12}")
        lines.append(
            f"replicates={self.config.replicates} alpha={self.config.alpha} "
            f"M={self.config.n_permutations} dominance_violations={self.dominance_violations}"
        )
        return "\n".join(lines)


def _noise_transform(config: SimConfig, grid: Grid) -> np.ndarray | None:
    """Cholesky factor of the noise correlation, or None for iid noise."""
    if config.noise == "iid":
        return None
    pts = grid.points
    width = grid.width if grid.width > 0 else 1.0
    rho = config.length_scale * width
    d = pts[:, None] - pts[None, :]
    corr = np.exp(-(d ** 2) / (2.0 * rho ** 2))
    corr[np.diag_indices_from(corr)] += 1e-9  # jitter for numerical PD
    return np.linalg.cholesky(corr)


def _replicate(config: SimConfig, grid: Grid, chol, seed_seq) -> dict:
    noise_seq, perm_seq = seed_seq.spawn(2)
    rng = np.random.default_rng(noise_seq)
    n = config.n0 + config.n1
    z = rng.standard_normal((n, config.grid_size))
    responses = z if chol is None else z @ chol.T
    labels = np.r_[np.zeros(config.n0, dtype=int), np.ones(config.n1, dtype=int)]
    if config.signal is not None:
        responses = responses + np.outer(labels, np.asarray(config.signal))
    data = TwoGroupDataset(grid, responses, labels)
    rep_seed = int(np.random.default_rng(perm_seq).integers(2 ** 63))
    # permutations are drawn with replacement, so two rows can repeat the
    # same grouping and tie exactly; conservative ranking keeps that valid
    curves = permutation_curves(
        data, config.n_permutations, rep_seed, tie_policy="conservative"
    )
    report = compute_report(curves, "two-sided")
    alpha = config.alpha_fraction
    m = config.n_permutations
    null = config.null_mask()
    out = {"reject": {}, "dominance_ok": True}
    reject_sets = {}
    for name in ADJUSTMENTS:
        k = getattr(report, f"{name}_k")
        rejected = np.array([Fraction(int(x), m) <= alpha for x in k])
        reject_sets[name] = rejected
        out["reject"][name] = {
            "family_error": bool(rejected[null].any()),
            "signal_count": int(rejected[~null].sum()),
        }
    ss = reject_sets["single_step"]
    out["dominance_ok"] = bool(
        np.all(ss <= reject_sets["step_down"]) and np.all(ss <= reject_sets["erl"])
    )
    return out


def _worker_count() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "")
    try:
        cap = int(raw)
    except ValueError:
        return 1
    return max(1, cap)


def fwer_experiment(config: SimConfig) -> SimResult:
    """Run the replicated experiment and summarize family-wise error rates."""
    grid = Grid(np.linspace(0.0, 1.0, config.grid_size))
    chol = _noise_transform(config, grid)
    children = np.random.SeedSequence(config.seed).spawn(config.replicates)

    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(lambda ss: _replicate(config, grid, chol, ss), children)
            )
    else:
        results = [_replicate(config, grid, chol, ss) for ss in children]

    r = config.replicates
    has_signal = config.signal is not None and (~config.null_mask()).any()
    summaries = {}
    family_errors = {}
    for name in ADJUSTMENTS:
        errors = np.array([res["reject"][name]["family_error"] for res in results])
        fwer = float(errors.mean())
        se = math.sqrt(fwer * (1.0 - fwer) / r)
        mean_sig = (
            float(np.mean([res["reject"][name]["signal_count"] for res in results]))
            if has_signal
            else None
        )
        summaries[name] = AdjustmentSummary(fwer, se, mean_sig)
        family_errors[name] = errors
    violations = sum(1 for res in results if not res["dominance_ok"])
    return SimResult(
        config=config,
        summaries=summaries,
        dominance_violations=violations,
        _family_errors=family_errors,
    )
