"""Matrix transformations: binning, partitioning, itemization, synthetic data.

Binning is equal-width. A fitted column is described by an origin, a width
and a bin count; bin b (1-based) covers ``[origin + (b-1)w, origin + bw)`` and
the last bin is closed on the right. Categorical columns are binned with
width 1 and origin 0, so code c lands in bin c + 1.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import Bicluster, ColumnKind, ConfigError, DataError, NumericMatrix

DATA_RULES = ("scott", "fd", "sturges", "sqrt")


class BinningWarning(UserWarning):
    pass


@dataclass(frozen=True)
class BinRule:
    """A binning rule: one of the data-driven rules, or a fixed width / count."""

    name: str
    value: float | None = None

    def __post_init__(self):
        if self.name in DATA_RULES:
            if self.value is not None:
                raise ConfigError(f"rule {self.name!r} takes no argument")
        elif self.name == "fixed_width":
            if self.value is None or not self.value > 0:
                raise ConfigError("fixed_width needs a width > 0")
        elif self.name == "fixed_count":
            if self.value is None or self.value < 1 or self.value != int(self.value):
                raise ConfigError("fixed_count needs an integer count >= 1")
        else:
            raise ConfigError(f"unknown binning rule {self.name!r}")

    @classmethod
    def parse(cls, text: "str | BinRule") -> "BinRule":
        """Parse ``"fd"``, ``"fixed_width:5"`` or ``"fixed_count:4"``."""
        if isinstance(text, BinRule):
            return text
        name, _, arg = str(text).strip().lower().partition(":")
        return cls(name, float(arg) if arg else None)

    def __str__(self):
        if self.value is None:
            return self.name
        v = int(self.value) if float(self.value).is_integer() else self.value
        return f"{self.name}:{v}"


@dataclass(frozen=True)
class ColumnBins:
    origin: float
    width: float
    n_bins: int

    def __post_init__(self):
        if not self.width > 0 or self.n_bins < 1:
            raise ConfigError("bin width must be > 0 and bin count >= 1")

    @property
    def edges(self) -> np.ndarray:
        return self.origin + self.width * np.arange(self.n_bins + 1)

    def bin_of(self, values) -> np.ndarray:
        """1-based bin index of each value; out-of-range values are clamped."""
        idx = np.searchsorted(self.edges, np.asarray(values, dtype=float), side="right")
        return np.clip(idx, 1, self.n_bins)

    def bounds(self, b: int) -> tuple[float, float]:
        return self.origin + (b - 1) * self.width, self.origin + b * self.width


@dataclass(frozen=True)
class BinningSpec:
    rule: BinRule
    columns: tuple[ColumnBins, ...]

    @property
    def widths(self) -> np.ndarray:
        return np.array([c.width for c in self.columns])

    @property
    def n_bins(self) -> tuple[int, ...]:
        return tuple(c.n_bins for c in self.columns)


def _nice_width(raw: float) -> float:
    p = 10.0 ** math.floor(math.log10(raw))
    rel = raw / p
    if rel < 1.5:
        step = 1
    elif rel < 2.5:
        step = 2
    elif rel < 4:
        step = 3
    elif rel < 7.5:
        step = 5
    else:
        step = 10
    return step * p


def _raw_width(vals: np.ndarray, rule: BinRule) -> float:
    n = vals.size
    lo, hi = float(vals.min()), float(vals.max())
    if rule.name == "fixed_width":
        return float(rule.value)
    if rule.name == "fixed_count":
        return (hi - lo) / int(rule.value)
    if rule.name == "sturges":
        return (hi - lo) / (math.ceil(math.log2(n)) + 1)
    if rule.name == "sqrt":
        return (hi - lo) / math.ceil(math.sqrt(n))
    if rule.name == "scott":
        return 3.5 * float(np.std(vals, ddof=1)) * n ** (-1 / 3)
    # fd
    q75, q25 = np.percentile(vals, [75, 25])
    iqr = float(q75 - q25)
    if iqr == 0:
        return _raw_width(vals, BinRule("sturges"))
    return 2 * iqr * n ** (-1 / 3)


def fit_binning(values, rule, origin: float | None = None, nice: bool = False, missing=None) -> ColumnBins:
    """Fit an equal-width binning to one column.

    ``origin`` anchors the first edge (default: the column minimum). With
    ``nice=True`` the width is rounded to 1, 2, 3, 5 or 10 times a power of
    ten and the first edge snapped to a multiple of it, the way common
    histogram tools pick bins.
    """
    rule = BinRule.parse(rule)
    vals = np.asarray(values, dtype=float).ravel()
    if missing is not None:
        vals = vals[~np.asarray(missing, dtype=bool).ravel()]
    vals = vals[~np.isnan(vals)]
    if vals.size == 0:
        warnings.warn("column has no values; using a single bin", BinningWarning, stacklevel=2)
        return ColumnBins(0.0 if origin is None else float(origin), 1.0, 1)
    lo, hi = float(vals.min()), float(vals.max())
    if hi == lo and rule.name != "fixed_width":
        warnings.warn("column has zero spread; using a single bin", BinningWarning, stacklevel=2)
        return ColumnBins(lo if origin is None else float(origin), 1.0, 1)

    width = _raw_width(vals, rule)
    if nice:
        width = _nice_width(width)
        left = min(width * math.floor(lo / width), lo)
    else:
        left = lo
    if origin is not None:
        left = float(origin)
        if left > lo:
            raise ConfigError(f"origin {left} is above the column minimum {lo}")
    n_bins = max(1, math.ceil((hi - left) / width))
    # guard against (hi - left) / width landing a hair above an integer
    if n_bins > 1 and left + (n_bins - 1) * width >= hi:
        n_bins -= 1
    return ColumnBins(left, width, n_bins)


def fit_matrix_binning(mat: NumericMatrix, rule, origin: float | None = None, nice: bool = False) -> BinningSpec:
    """Fit every numeric column with ``rule``; categorical columns get one bin per code."""
    rule = BinRule.parse(rule)
    cols = []
    for j, kind in enumerate(mat.col_kinds):
        if kind.is_numeric:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", BinningWarning)
                cb = fit_binning(mat.values[:, j], rule, origin, nice, mat.missing[:, j])
        else:
            n_codes = len(mat.levels.get(j, ())) or int(mat.values[~mat.missing[:, j], j].max(initial=0)) + 1
            cb = ColumnBins(0.0, 1.0, n_codes)
        cols.append(cb)
    return BinningSpec(rule, tuple(cols))


def partition(mat: NumericMatrix, spec: BinningSpec) -> NumericMatrix:
    """Replace each value by its 1-based bin index; missing cells stay missing."""
    if len(spec.columns) != mat.n_cols:
        raise ConfigError(f"binning has {len(spec.columns)} columns, matrix has {mat.n_cols}")
    out = np.zeros(mat.shape)
    clamped = 0
    for j, cb in enumerate(spec.columns):
        col = mat.values[:, j]
        present = ~mat.missing[:, j]
        edges = cb.edges
        clamped += int(((col < edges[0]) | (col > edges[-1]))[present].sum())
        out[:, j] = cb.bin_of(col)
    if clamped:
        warnings.warn(f"{clamped} values outside the fitted edges were clamped", BinningWarning, stacklevel=2)
    return NumericMatrix(
        out,
        mat.missing,
        col_kinds=[ColumnKind.DISCRETE] * mat.n_cols,
        col_names=mat.col_names,
    )


def _bin_counts(mat: NumericMatrix, spec: BinningSpec | None) -> list[int]:
    if spec is not None:
        return list(spec.n_bins)
    return [int(mat.values[~mat.missing[:, j], j].max(initial=1)) for j in range(mat.n_cols)]


def _item_names(mat: NumericMatrix, counts: Sequence[int]) -> list[str]:
    return [f"{mat.col_names[j]}:{b}" for j, k in enumerate(counts) for b in range(1, k + 1)]


def itemize(mat: NumericMatrix, spec: BinningSpec | None = None) -> NumericMatrix:
    """One 0/1 item column per (column, bin); a missing cell sets no item."""
    counts = _bin_counts(mat, spec)
    offsets = np.concatenate([[0], np.cumsum(counts)])
    out = np.zeros((mat.n_rows, int(offsets[-1])))
    for j in range(mat.n_cols):
        present = np.flatnonzero(~mat.missing[:, j])
        b = mat.values[present, j].astype(int)
        out[present, offsets[j] + b - 1] = 1
    return NumericMatrix(out, col_kinds=[ColumnKind.DISCRETE] * out.shape[1], col_names=_item_names(mat, counts))


def default_delta(width: float) -> float:
    return math.floor((width - 1) / 2)


def itemize_multi(
    binned: NumericMatrix,
    original: NumericMatrix,
    spec: BinningSpec,
    delta: float | Sequence[float] | None = None,
    step: float | Sequence[float] | None = None,
) -> NumericMatrix:
    """Like :func:`itemize`, plus items of adjacent bins for values near a boundary.

    A value in bin b also sets the item of bin b-1 or b+1 when its distance
    to the nearest value that bin can hold is at most ``delta``. The largest
    value a lower bin can hold is its right edge minus ``step``; ``step``
    defaults to 1 for integer-valued columns and 0 otherwise.
    """
    if binned.shape != original.shape:
        raise ConfigError("binned and original matrices differ in shape")
    m = original.n_cols
    if delta is None:
        deltas = [default_delta(c.width) for c in spec.columns]
    else:
        deltas = list(np.broadcast_to(np.asarray(delta, dtype=float), (m,)))
    if step is None:
        steps = []
        for j in range(m):
            col = original.values[~original.missing[:, j], j]
            steps.append(1.0 if np.all(col == np.round(col)) else 0.0)
    else:
        steps = list(np.broadcast_to(np.asarray(step, dtype=float), (m,)))

    base = itemize(binned, spec)
    out = np.array(base.values)
    counts = list(spec.n_bins)
    offsets = np.concatenate([[0], np.cumsum(counts)])
    for j, cb in enumerate(spec.columns):
        present = ~original.missing[:, j]
        v = original.values[:, j]
        b = binned.values[:, j].astype(int)
        lo = cb.origin + (b - 1) * cb.width
        hi = cb.origin + b * cb.width
        down = present & (b > 1) & (v - (lo - steps[j]) <= deltas[j])
        up = present & (b < cb.n_bins) & (hi - v <= deltas[j])
        rows = np.flatnonzero(down)
        out[rows, offsets[j] + b[rows] - 2] = 1
        rows = np.flatnonzero(up)
        out[rows, offsets[j] + b[rows]] = 1
    return base.replace(values=out)


def binary_mode(mat: NumericMatrix) -> NumericMatrix:
    """Treat zeros as missing, so perfect biclusters become formal concepts."""
    return mat.replace(missing=mat.missing | (mat.values == 0))


# -- synthetic data ------------------------------------------------------------


@dataclass(frozen=True)
class SyntheticConfig:
    n: int = 10_000
    m: int = 100
    num_biclusters: int = 30
    bic_rows: int = 50
    bic_cols: int = 8
    overlap: float = 0.2
    missing_pct: float = 0.0
    noise_sigma: float = 0.05
    seed: int = 0
    value_range: tuple[float, float] = (0.0, 1.0)
    noise_clip: float | None = None  # in units of sigma

    def blocks(self) -> list[tuple[range, list[int]]]:
        """Row range and column list of each planted block, before shuffling."""
        self.validate()
        shift = self.bic_rows - round(self.overlap * self.bic_rows)
        out = []
        for b in range(self.num_biclusters):
            rows = range(b * shift, b * shift + self.bic_rows)
            cols = [(b * self.bic_cols + c) % self.m for c in range(self.bic_cols)]
            out.append((rows, cols))
        return out

    def validate(self) -> None:
        if self.n < 1 or self.m < 1:
            raise ConfigError("n and m must be >= 1")
        if not 0 <= self.overlap < 1:
            raise ConfigError("overlap must be in [0, 1)")
        if not 0 <= self.missing_pct <= 1:
            raise ConfigError("missing_pct must be in [0, 1]")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be >= 0")
        if self.value_range[1] <= self.value_range[0]:
            raise ConfigError("value_range must be increasing")
        if self.num_biclusters < 0:
            raise ConfigError("num_biclusters must be >= 0")
        if self.num_biclusters == 0:
            return
        if not (1 <= self.bic_rows <= self.n and 1 <= self.bic_cols <= self.m):
            raise ConfigError("planted bicluster shape does not fit the matrix")
        shift = self.bic_rows - round(self.overlap * self.bic_rows)
        if (self.num_biclusters - 1) * shift + self.bic_rows > self.n:
            raise ConfigError(
                f"{self.num_biclusters} blocks of {self.bic_rows} rows with overlap "
                f"{self.overlap} need more than {self.n} rows"
            )
        for a in range(self.num_biclusters):
            for b in range(a + 1, self.num_biclusters):
                if (b - a) * shift >= self.bic_rows:
                    break
                ca = {(a * self.bic_cols + c) % self.m for c in range(self.bic_cols)}
                cb = {(b * self.bic_cols + c) % self.m for c in range(self.bic_cols)}
                if ca & cb:
                    raise ConfigError(f"planted blocks {a} and {b} share rows and columns")


@dataclass(frozen=True)
class PlantedGroundTruth:
    biclusters: tuple[Bicluster, ...]
    row_perm: np.ndarray = field(repr=False)  # new position -> original row
    col_perm: np.ndarray = field(repr=False)


def generate_synthetic(cfg: SyntheticConfig) -> tuple[NumericMatrix, PlantedGroundTruth]:
    """Matrix with planted CVC blocks, Gaussian noise, missing cells and shuffling."""
    blocks = cfg.blocks()
    rng = np.random.default_rng(cfg.seed)
    lo, hi = cfg.value_range
    A = rng.uniform(lo, hi, size=(cfg.n, cfg.m))
    planted = np.zeros((cfg.n, cfg.m), dtype=bool)
    for rows, cols in blocks:
        base = rng.uniform(lo, hi, size=len(cols))
        A[rows.start : rows.stop, cols] = base
        planted[rows.start : rows.stop, cols] = True
    if cfg.noise_sigma > 0:
        noise = rng.normal(0.0, cfg.noise_sigma, size=A.shape)
        if cfg.noise_clip is not None:
            c = cfg.noise_clip * cfg.noise_sigma
            noise = np.clip(noise, -c, c)
        A = A + noise
    missing = (rng.random(A.shape) < cfg.missing_pct) & ~planted

    row_perm = rng.permutation(cfg.n)
    col_perm = rng.permutation(cfg.m)
    A = A[row_perm][:, col_perm]
    missing = missing[row_perm][:, col_perm]
    row_pos = np.argsort(row_perm)
    col_pos = np.argsort(col_perm)
    truth = tuple(
        Bicluster(tuple(int(row_pos[r]) for r in rows), tuple(int(col_pos[c]) for c in cols))
        for rows, cols in blocks
    )
    return NumericMatrix(A, missing), PlantedGroundTruth(truth, row_perm, col_perm)


# -- scaling ------------------------------------------------------------------------


def integerize(mat: NumericMatrix, factor: float = 1000) -> NumericMatrix:
    """Multiply by ``factor`` and round to integers (exact spread comparisons)."""
    return mat.replace(values=np.round(mat.values * factor))


def preprocess_log_scale(
    mat: NumericMatrix, shift: float = 0.0, decimals: int = 3, nonpositive: str = "error"
) -> NumericMatrix:
    """Per column: log, min-max scale to [0, 1], round, scale to integers.

    With ``decimals=3`` the result holds integers in [0, 1000]. Constant
    columns map to 0. Values that are still <= 0 after ``shift`` raise
    unless ``nonpositive="missing"``.
    """
    if nonpositive not in ("error", "missing"):
        raise ConfigError("nonpositive must be 'error' or 'missing'")
    v = mat.values + shift
    present = ~mat.missing
    if nonpositive == "missing":
        present = present & (v > 0)
        mat = mat.replace(missing=~present)
    if np.any(v[present] <= 0):
        i, j = np.argwhere((v <= 0) & present)[0]
        raise DataError(f"nonpositive value {mat.values[i, j]} at row {i}, column {j}; pass a shift")
    logged = np.log(np.where(present, v, 1.0))
    out = np.zeros(mat.shape)
    constant = []
    for j in range(mat.n_cols):
        col = logged[present[:, j], j]
        if col.size == 0:
            continue
        lo, hi = col.min(), col.max()
        if hi == lo:
            constant.append(j)
            continue
        out[:, j] = (logged[:, j] - lo) / (hi - lo)
    if constant:
        warnings.warn(f"constant columns {constant} mapped to 0", BinningWarning, stacklevel=2)
    scale = 10**decimals
    out = np.round(np.round(out, decimals) * scale)
    return NumericMatrix(
        out,
        mat.missing,
        col_kinds=[ColumnKind.DISCRETE] * mat.n_cols,
        col_names=mat.col_names,
    )


def transpose(mat: NumericMatrix, col_kinds=None) -> NumericMatrix:
    """Rows become columns; mining the result finds constant-values-on-rows biclusters."""
    return NumericMatrix(mat.values.T, mat.missing.T, col_kinds=col_kinds)
