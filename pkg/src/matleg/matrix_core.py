"""Dense small-matrix kernels: determinants, signed cofactors, k-minor grids
and minor gradients.

Conventions used throughout the package:

* cofactors are always SIGNED: the (n, k) cofactor is (-1)^(n+k) times the
  minor obtained by deleting row n and column k, so that
  sum_{n,k} x[n,k] * cof(x)[n,k] = N * det(x);
* index sets are 1-based and strictly increasing, enumerated in
  lexicographic order (this fixes the layout of every minor grid);
* the duality pairing between an N x K matrix x and a K x N matrix y is
  <x, y> = sum_{n,j} x[n,j] * y[j,n].
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import DimensionError, DomainError, ParseError


@dataclass(frozen=True, eq=False)
class Matrix:
    """Immutable dense real matrix.

    Entries are validated to be finite at construction and the underlying
    array is frozen, so instances are safe to share between threads.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64, order="C")
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError(f"matrix must be 2-D and non-empty, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("matrix entries must be finite (no NaN/Inf)")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @staticmethod
    def identity(n: int) -> "Matrix":
        return Matrix(np.eye(n))

    @staticmethod
    def diag(*values: float) -> "Matrix":
        return Matrix(np.diag(np.asarray(values, dtype=np.float64)))

    @staticmethod
    def from_rows(rows) -> "Matrix":
        return Matrix(np.asarray(rows, dtype=np.float64))

    def transpose(self) -> "Matrix":
        return Matrix(self.data.T)

    def scaled(self, t: float) -> "Matrix":
        return Matrix(t * self.data)

    def to_json_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[float(v) for v in row] for row in self.data],
        }

    @staticmethod
    def from_json_dict(d: dict) -> "Matrix":
        if not isinstance(d, dict):
            raise ParseError("matrix JSON must be an object")
        extra = set(d) - {"rows", "cols", "entries"}
        if extra:
            raise ParseError(f"unknown matrix keys: {sorted(extra)}")
        try:
            rows, cols, entries = d["rows"], d["cols"], d["entries"]
        except KeyError as e:
            raise ParseError(f"matrix JSON missing key {e.args[0]!r}") from None
        if not isinstance(rows, int) or not isinstance(cols, int):
            raise ParseError("matrix rows/cols must be integers")
        if (
            not isinstance(entries, list)
            or len(entries) != rows
            or any(not isinstance(r, list) or len(r) != cols for r in entries)
        ):
            raise ParseError("matrix entries do not match the declared shape")
        try:
            m = Matrix(np.asarray(entries, dtype=np.float64))
        except (TypeError, ValueError) as e:
            raise ParseError(f"bad matrix entries: {e}") from None
        return m

    def __repr__(self) -> str:
        return f"Matrix({self.data.tolist()!r})"


@dataclass(frozen=True)
class IndexSet:
    """Strictly increasing 1-based index selection inside 1..ambient."""

    ambient: int
    picks: tuple[int, ...]

    def __post_init__(self):
        if self.ambient < 1:
            raise DimensionError("ambient size must be >= 1")
        picks = tuple(int(p) for p in self.picks)
        object.__setattr__(self, "picks", picks)
        if not picks:
            raise DimensionError("an index set must pick at least one index")
        if any(p < 1 or p > self.ambient for p in picks):
            raise DimensionError(f"picks {picks} out of range 1..{self.ambient}")
        if any(a >= b for a, b in zip(picks, picks[1:])):
            raise DimensionError(f"picks {picks} must be strictly increasing")

    @property
    def size(self) -> int:
        return len(self.picks)

    def zero_based(self) -> np.ndarray:
        return np.asarray([p - 1 for p in self.picks], dtype=np.intp)


@dataclass(frozen=True, eq=False)
class CofactorGrid:
    """All signed k-minor determinants of a matrix.

    ``values[i, j]`` is the determinant of the submatrix selecting columns
    ``col_sets[i]`` and rows ``row_sets[j]``; both enumerations are
    lexicographic, so the layout is canonical.
    """

    order: int
    row_sets: tuple[IndexSet, ...]
    col_sets: tuple[IndexSet, ...]
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (len(self.col_sets), len(self.row_sets)):
            raise DimensionError(
                f"grid values shape {vals.shape} does not match "
                f"{len(self.col_sets)} column sets x {len(self.row_sets)} row sets"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def value(self, col_index: int, row_index: int) -> float:
        return float(self.values[col_index, row_index])


def _require_square(m: Matrix, who: str) -> None:
    if not m.is_square:
        raise DimensionError(f"{who} requires a square matrix, got {m.rows}x{m.cols}")


def det(m: Matrix) -> float:
    """Determinant (direct expansion up to 3x3, pivoted elimination above)."""
    _require_square(m, "det")
    return float(backend.det(m.data))


def cofactor_matrix(m: Matrix) -> Matrix:
    """Matrix of signed cofactors; satisfies m @ cof(m).T = det(m) * I.

    For a 1x1 input this is [[1]] (the empty minor has determinant 1).
    """
    _require_square(m, "cofactor_matrix")
    return Matrix(backend.cofactor_matrix(m.data))


def index_sets(ambient: int, k: int) -> list[IndexSet]:
    """All strictly increasing k-element selections of 1..ambient, lexicographic."""
    if k < 1 or k > ambient:
        raise DomainError(f"need 1 <= k <= ambient, got k={k}, ambient={ambient}")
    return [IndexSet(ambient, picks) for picks in itertools.combinations(range(1, ambient + 1), k)]


def _index_matrix(sets: list[IndexSet]) -> np.ndarray:
    return np.asarray([[p - 1 for p in s.picks] for s in sets], dtype=np.intp)


def minor_grid(m: Matrix, k: int) -> CofactorGrid:
    """All k x k minor determinants of m, as a CofactorGrid.

    For k = rows = cols the grid degenerates to the single value det(m).
    """
    if k < 1 or k > min(m.rows, m.cols):
        raise DomainError(f"minor order k={k} out of range 1..{min(m.rows, m.cols)}")
    row_sets = index_sets(m.rows, k)
    col_sets = index_sets(m.cols, k)
    values = backend.minor_dets(m.data, _index_matrix(row_sets), _index_matrix(col_sets))
    return CofactorGrid(order=k, row_sets=tuple(row_sets), col_sets=tuple(col_sets), values=values)


def minor_count(rows: int, cols: int, k: int) -> int:
    """Number of k x k minors of a rows x cols matrix."""
    return math.comb(rows, k) * math.comb(cols, k)


def _check_minor_spec(m: Matrix, row_set: IndexSet, col_set: IndexSet) -> None:
    if row_set.size != col_set.size:
        raise DimensionError(
            f"row set size {row_set.size} != column set size {col_set.size}"
        )
    if row_set.ambient != m.rows or col_set.ambient != m.cols:
        raise DimensionError(
            f"index sets sized for {row_set.ambient}x{col_set.ambient}, "
            f"matrix is {m.rows}x{m.cols}"
        )


def minor_value(m: Matrix, row_set: IndexSet, col_set: IndexSet) -> float:
    """Determinant of the selected square submatrix."""
    _check_minor_spec(m, row_set, col_set)
    vals = backend.minor_dets(
        m.data,
        row_set.zero_based().reshape(1, -1),
        col_set.zero_based().reshape(1, -1),
    )
    return float(vals[0, 0])


def minor_gradient(m: Matrix, row_set: IndexSet, col_set: IndexSet) -> Matrix:
    """Entrywise partial derivatives of the selected minor determinant.

    Zero outside the selected rows/columns; within the selection, the entry
    is the signed (k-1)-cofactor inside the submatrix.  The determinant of
    the restriction of this gradient to the selection equals
    (minor value)^(k-1).
    """
    _check_minor_spec(m, row_set, col_set)
    return Matrix(backend.minor_gradient(m.data, row_set.zero_based(), col_set.zero_based()))


def euler_residual(m: Matrix, row_set: IndexSet, col_set: IndexSet) -> float:
    """Defect of the degree-k homogeneity identity for one minor.

    Returns minor - (1/k) * sum_{n,j} x[n,j] * d(minor)/dx[n,j], which is
    zero in exact arithmetic because a k x k minor is homogeneous of
    degree k in the matrix entries.
    """
    _check_minor_spec(m, row_set, col_set)
    k = row_set.size
    value = minor_value(m, row_set, col_set)
    grad = backend.minor_gradient(m.data, row_set.zero_based(), col_set.zero_based())
    return float(value - float(np.sum(m.data * grad)) / k)


def pairing(x: Matrix, y: Matrix) -> float:
    """Duality pairing <x, y> = sum_{n,j} x[n,j] * y[j,n]."""
    if x.rows != y.cols or x.cols != y.rows:
        raise DimensionError(
            f"pairing needs transposed shapes, got {x.rows}x{x.cols} and {y.rows}x{y.cols}"
        )
    return float(np.sum(x.data * y.data.T))
