"""Distribution-free envelope tests and adjusted pointwise p-values.

Given an ensemble of statistic curves on a common grid (observed curve
first, permutation replicates after), the package computes pointwise ranks,
min-rank and extreme-rank-length depths, depth envelopes, the global
envelope-test p-value, and four families of pointwise p-values: raw,
single-step adjusted, step-down adjusted, and ERL adjusted. All p-values
are exact rationals with denominator M.
"""

__version__ = "0.1.0"

from .adjust import (
    PvalueReport,
    StepdownTrace,
    compute_report,
    erl_adjusted,
    raw_pvalues,
    single_step,
    single_step_graphical,
    step_down,
)
from .curves import (
    CurveSet,
    Direction,
    Grid,
    TiePolicy,
    TwoGroupDataset,
    validate_curveset,
)
from .envelopes import Envelope, KappaTable, build_envelope, exits_at, global_p
from .errors import (
    DegeneratePermutationsError,
    DimensionMismatchError,
    InputValidationError,
    NonFiniteValueError,
    PointwiseTieError,
    ZeroVarianceError,
)
from .estimators import GlobalEnvelopeTest, TwoSampleEnvelopeTest
from .permutation import permutation_curves, pointwise_t
from .ranks import (
    DepthKind,
    DepthVector,
    RankMatrix,
    erl_depths,
    minrank_depths,
    pointwise_ranks,
)
from .simulate import SimConfig, SimResult, fwer_experiment

__all__ = [
    "__version__",
    "CurveSet",
    "DegeneratePermutationsError",
    "DepthKind",
    "DepthVector",
    "DimensionMismatchError",
    "Direction",
    "Envelope",
    "GlobalEnvelopeTest",
    "Grid",
    "InputValidationError",
    "KappaTable",
    "NonFiniteValueError",
    "PointwiseTieError",
    "PvalueReport",
    "RankMatrix",
    "SimConfig",
    "SimResult",
    "StepdownTrace",
    "TiePolicy",
    "TwoGroupDataset",
    "TwoSampleEnvelopeTest",
    "ZeroVarianceError",
    "build_envelope",
    "compute_report",
    "erl_adjusted",
    "erl_depths",
    "exits_at",
    "fwer_experiment",
    "global_p",
    "minrank_depths",
    "permutation_curves",
    "pointwise_ranks",
    "pointwise_t",
    "raw_pvalues",
    "single_step",
    "single_step_graphical",
    "step_down",
    "validate_curveset",
]
