"""Exception types shared across the package.

The CLI maps these onto exit codes: validation problems (dimension,
finiteness, group sizes, inconsistent files) exit 2, pointwise ties under
the strict policy exit 3, and permutation degeneracy exits 4.
"""


class InputValidationError(ValueError):
    """Base class for rejected inputs."""


class DimensionMismatchError(InputValidationError):
    def __init__(self, message, expected=None, actual=None):
        super().__init__(message)
        self.expected = expected
        self.actual = actual


class NonFiniteValueError(InputValidationError):
    def __init__(self, row, column):
        super().__init__(f"non-finite value at curve {row}, grid column {column}")
        self.row = row
        self.column = column


class PointwiseTieError(InputValidationError):
    """Two or more curves share a value at one grid point (strict policy)."""

    def __init__(self, grid_index, curve_indices):
        ids = ", ".join(str(i) for i in curve_indices)
        super().__init__(
            f"pointwise tie at grid column {grid_index} between curves {ids}"
        )
        self.grid_index = grid_index
        self.curve_indices = tuple(curve_indices)


class ZeroVarianceError(InputValidationError):
    """Pooled variance vanishes at a grid point; the statistic is undefined there."""

    def __init__(self, grid_index):
        super().__init__(f"zero pooled variance at grid column {grid_index}")
        self.grid_index = grid_index


class DegeneratePermutationsError(RuntimeError):
    """Resampling could not find a non-degenerate permutation within the retry cap."""

    def __init__(self, row, retries):
        super().__init__(
            f"permutation row {row}: zero-variance permutations persisted "
            f"after {retries} retries"
        )
        self.row = row
        self.retries = retries
