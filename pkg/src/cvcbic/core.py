"""Domain types and the correctness / maximality / coverage predicates.

Row and column indices are 0-based everywhere in the library.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np


class CVCError(Exception):
    """Base class for all library errors."""


class ConfigError(CVCError, ValueError):
    """Invalid parameters or configuration."""


class DataError(CVCError, ValueError):
    """Malformed input data."""


class ColumnKind(str, enum.Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"
    ORDINAL = "ordinal"
    NOMINAL = "nominal"

    @property
    def is_numeric(self) -> bool:
        return self in (ColumnKind.CONTINUOUS, ColumnKind.DISCRETE)


class NumericMatrix:
    """An immutable n x m value grid with a per-cell missing mask.

    Cells flagged in ``missing`` hold 0.0 and are never read by the algorithms.
    ``levels`` maps a categorical column index to its code table (code -> label).
    """

    __slots__ = ("values", "missing", "col_kinds", "col_names", "levels")

    def __init__(
        self,
        values,
        missing=None,
        col_kinds: Sequence[ColumnKind | str] | None = None,
        col_names: Sequence[str] | None = None,
        levels: Mapping[int, Sequence[str]] | None = None,
    ):
        vals = np.array(values, dtype=float)
        if vals.ndim != 2:
            raise DataError(f"expected a 2-D matrix, got shape {vals.shape}")
        n, m = vals.shape
        if n < 1 or m < 1:
            raise DataError(f"matrix must have at least one row and column, got {n}x{m}")
        if missing is None:
            miss = np.isnan(vals)
        else:
            miss = np.array(missing, dtype=bool)
            if miss.shape != vals.shape:
                raise DataError(f"missing mask shape {miss.shape} != values shape {vals.shape}")
            miss = miss | np.isnan(vals)
        vals[miss] = 0.0
        vals.flags.writeable = False
        miss.flags.writeable = False

        if col_kinds is None:
            kinds = (ColumnKind.CONTINUOUS,) * m
        else:
            kinds = tuple(ColumnKind(k) for k in col_kinds)
            if len(kinds) != m:
                raise DataError(f"{len(kinds)} column kinds for {m} columns")
        if col_names is None:
            names = tuple(f"y{j + 1}" for j in range(m))
        else:
            names = tuple(str(c) for c in col_names)
            if len(names) != m:
                raise DataError(f"{len(names)} column names for {m} columns")

        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "missing", miss)
        object.__setattr__(self, "col_kinds", kinds)
        object.__setattr__(self, "col_names", names)
        object.__setattr__(
            self, "levels", {int(k): tuple(v) for k, v in (levels or {}).items()}
        )

    def __setattr__(self, name, value):
        raise AttributeError("NumericMatrix is immutable")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def replace(self, **changes) -> "NumericMatrix":
        kw = dict(
            values=self.values,
            missing=self.missing,
            col_kinds=self.col_kinds,
            col_names=self.col_names,
            levels=self.levels,
        )
        kw.update(changes)
        return NumericMatrix(**kw)

    def label(self, j: int, value: float) -> str:
        """Human-readable form of ``value`` in column ``j``."""
        table = self.levels.get(j)
        if table is not None and float(value).is_integer() and 0 <= int(value) < len(table):
            return table[int(value)]
        if float(value).is_integer():
            return str(int(value))
        return f"{value:g}"

    def __eq__(self, other):
        if not isinstance(other, NumericMatrix):
            return NotImplemented
        return (
            np.array_equal(self.values, other.values)
            and np.array_equal(self.missing, other.missing)
            and self.col_kinds == other.col_kinds
            and self.col_names == other.col_names
            and self.levels == other.levels
        )

    __hash__ = None

    def __repr__(self):
        return f"NumericMatrix({self.n_rows}x{self.n_cols}, missing={int(self.missing.sum())})"


VARIANTS = ("cvc3", "cvcp", "cvc_legacy")


@dataclass(frozen=True)
class EnumParams:
    """Enumeration parameters.

    ``eps`` is a scalar (expanded to every column) or one entry per column.
    ``pn_inheritance=False`` gives the CVC2 behaviour; ``min_col_pruning``
    toggles the early discard of nodes that cannot reach ``min_col`` columns.
    """

    min_row: int = 1
    min_col: int = 1
    eps: float | tuple[float, ...] = 0.0
    pn_inheritance: bool = True
    min_col_pruning: bool = True
    variant: str = "cvc3"

    def __post_init__(self):
        if not isinstance(self.eps, (int, float, np.floating, np.integer)):
            object.__setattr__(self, "eps", tuple(float(e) for e in self.eps))
        if self.min_row < 1 or self.min_col < 1:
            raise ConfigError("min_row and min_col must be >= 1")
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")

    def eps_vector(self, mat: NumericMatrix) -> np.ndarray:
        """Per-column perturbation vector, validated against ``mat``."""
        if isinstance(self.eps, tuple):
            eps = np.array(self.eps, dtype=float)
            if eps.shape != (mat.n_cols,):
                raise ConfigError(f"eps has {eps.size} entries for {mat.n_cols} columns")
        else:
            eps = np.full(mat.n_cols, float(self.eps))
        if np.any(eps < 0) or not np.all(np.isfinite(eps)):
            raise ConfigError("eps entries must be finite and >= 0")
        for j, kind in enumerate(mat.col_kinds):
            if kind is ColumnKind.NOMINAL and eps[j] != 0:
                raise ConfigError(f"nominal column {mat.col_names[j]!r} requires eps = 0")
        return eps


def _index_tuple(idx: Iterable[int], what: str) -> tuple[int, ...]:
    out = tuple(sorted(int(i) for i in idx))
    if not out:
        raise ValueError(f"bicluster {what} must be nonempty")
    if len(set(out)) != len(out):
        raise ValueError(f"bicluster {what} contain duplicates")
    if out[0] < 0:
        raise ValueError(f"negative {what[:-1]} index")
    return out


@dataclass(frozen=True, order=True)
class Bicluster:
    rows: tuple[int, ...]
    cols: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", _index_tuple(self.rows, "rows"))
        object.__setattr__(self, "cols", _index_tuple(self.cols, "cols"))

    @classmethod
    def one_based(cls, rows: Iterable[int], cols: Iterable[int]) -> "Bicluster":
        return cls(tuple(r - 1 for r in rows), tuple(c - 1 for c in cols))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    def contains(self, other: "Bicluster") -> bool:
        return set(other.rows) <= set(self.rows) and set(other.cols) <= set(self.cols)

    def __repr__(self):
        return f"Bicluster(rows={list(self.rows)}, cols={list(self.cols)})"


@dataclass
class BiclusterSolution:
    """A set of biclusters keyed by row-set.

    Adding a bicluster whose row-set is already present merges the column
    sets and counts a collision; two maximal CVC biclusters never share a
    row-set, so an enumerator output must have ``collisions == 0``.
    """

    params: EnumParams | None = None
    _by_rows: dict = field(default_factory=dict, repr=False)
    collisions: int = 0

    @classmethod
    def from_iter(cls, bics: Iterable[Bicluster], params: EnumParams | None = None):
        sol = cls(params)
        for b in bics:
            sol.add(b)
        return sol

    def add(self, bic: Bicluster) -> bool:
        prev = self._by_rows.get(bic.rows)
        if prev is None:
            self._by_rows[bic.rows] = bic.cols
            return True
        self.collisions += 1
        self._by_rows[bic.rows] = tuple(sorted(set(prev) | set(bic.cols)))
        return False

    def discard(self, bic: Bicluster) -> None:
        if self._by_rows.get(bic.rows) == bic.cols:
            del self._by_rows[bic.rows]

    def get(self, rows: Iterable[int]) -> Bicluster | None:
        key = tuple(sorted(rows))
        cols = self._by_rows.get(key)
        return None if cols is None else Bicluster(key, cols)

    def __iter__(self) -> Iterator[Bicluster]:
        for rows in sorted(self._by_rows):
            yield Bicluster(rows, self._by_rows[rows])

    def __len__(self):
        return len(self._by_rows)

    def __contains__(self, bic: Bicluster) -> bool:
        return self._by_rows.get(bic.rows) == bic.cols

    def as_set(self) -> frozenset:
        return frozenset((r, c) for r, c in self._by_rows.items())

    def __eq__(self, other):
        if not isinstance(other, BiclusterSolution):
            return NotImplemented
        return self._by_rows == other._by_rows

    def __repr__(self):
        return f"BiclusterSolution({len(self)} biclusters)"


def _check_rows(mat: NumericMatrix, rows) -> np.ndarray:
    idx = np.asarray(list(rows), dtype=np.intp)
    if idx.size and (idx.min() < 0 or idx.max() >= mat.n_rows):
        raise IndexError(f"row index out of range for {mat.n_rows} rows")
    return idx


def _check_col(mat: NumericMatrix, j: int) -> int:
    if not 0 <= j < mat.n_cols:
        raise IndexError(f"column index {j} out of range for {mat.n_cols} columns")
    return int(j)


def column_residue(mat: NumericMatrix, rows: Iterable[int], j: int) -> float | None:
    """max - min of column ``j`` over ``rows``; ``None`` if any cell is missing."""
    idx = _check_rows(mat, rows)
    j = _check_col(mat, j)
    if idx.size == 0:
        raise ValueError("row set must be nonempty")
    if mat.missing[idx, j].any():
        return None
    col = mat.values[idx, j]
    return float(col.max() - col.min())


def _eps_array(mat: NumericMatrix, eps) -> np.ndarray:
    if np.ndim(eps) == 0:
        return np.full(mat.n_cols, float(eps))
    arr = np.asarray(eps, dtype=float)
    if arr.shape != (mat.n_cols,):
        raise ConfigError(f"eps has {arr.size} entries for {mat.n_cols} columns")
    return arr


def admissible_columns(mat: NumericMatrix, rows: Iterable[int], eps) -> np.ndarray:
    """Boolean mask of the columns on which ``rows`` form a correct CVC block."""
    idx = _check_rows(mat, rows)
    eps = _eps_array(mat, eps)
    sub = mat.values[idx]
    ok = (sub.max(axis=0) - sub.min(axis=0)) <= eps
    return ok & ~mat.missing[idx].any(axis=0)


def is_correct(mat: NumericMatrix, bic: Bicluster, eps) -> bool:
    return first_incorrect_column(mat, bic, eps) is None


def first_incorrect_column(mat: NumericMatrix, bic: Bicluster, eps) -> int | None:
    for j in bic.cols:
        _check_col(mat, j)
    ok = admissible_columns(mat, bic.rows, eps)
    for j in bic.cols:
        if not ok[j]:
            return j
    return None


def maximality_violation(mat: NumericMatrix, bic: Bicluster, eps) -> tuple[str, int] | None:
    """Why ``bic`` is not a maximal correct bicluster, or ``None`` if it is.

    Returns ``("incorrect", col)``, ``("row", x)`` for an addable row or
    ``("col", y)`` for an addable column; the smallest index is reported.
    """
    bad = first_incorrect_column(mat, bic, eps)
    if bad is not None:
        return ("incorrect", bad)
    eps = _eps_array(mat, eps)
    cols = np.asarray(bic.cols)
    rows = np.asarray(bic.rows)
    sub = mat.values[np.ix_(rows, cols)]
    lo, hi = sub.min(axis=0), sub.max(axis=0)
    vals = mat.values[:, cols]
    fits = (np.maximum(hi, vals) - np.minimum(lo, vals) <= eps[cols]) & ~mat.missing[:, cols]
    fits = fits.all(axis=1)
    fits[rows] = False
    if fits.any():
        return ("row", int(np.flatnonzero(fits)[0]))
    ok = admissible_columns(mat, bic.rows, eps)
    ok[cols] = False
    if ok.any():
        return ("col", int(np.flatnonzero(ok)[0]))
    return None


def is_maximal(mat: NumericMatrix, bic: Bicluster, eps) -> bool:
    return maximality_violation(mat, bic, eps) is None


def coverage(sol: Iterable[Bicluster]) -> int:
    """Number of distinct cells covered by the union of the biclusters."""
    cells = set()
    for b in sol:
        cells.update((i, j) for i in b.rows for j in b.cols)
    return len(cells)
