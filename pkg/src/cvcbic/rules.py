"""Quantitative class association rules built from biclusters."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import Bicluster, CVCError, ColumnKind, DataError, NumericMatrix


class UndefinedRuleError(CVCError, ValueError):
    """A rule metric is undefined (no matching rows, or an empty class)."""


@dataclass(frozen=True)
class QuantItem:
    """One column and its domain: a closed interval, or a set of category codes."""

    col: int
    name: str
    kind: ColumnKind
    lo: float
    hi: float
    values: tuple[float, ...] = ()  # codes, for nominal columns only
    labels: tuple[str, ...] = ()  # display labels for categorical domains

    def __post_init__(self):
        if self.kind is ColumnKind.NOMINAL:
            if not self.values:
                raise ValueError("nominal item needs a nonempty value set")
        elif self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    def matches(self, col: np.ndarray) -> np.ndarray:
        if self.kind is ColumnKind.NOMINAL:
            return np.isin(col, self.values)
        return (col >= self.lo) & (col <= self.hi)

    def format(self, digits: int = 2) -> str:
        if self.labels:
            return f"{self.name}{{{','.join(self.labels)}}}"
        if self.kind is ColumnKind.NOMINAL:
            return f"{self.name}{{{','.join(_num(v, digits) for v in self.values)}}}"
        return f"{self.name}[{self.lo:.{digits}f},{self.hi:.{digits}f}]"

    def __str__(self):
        return self.format()


def _num(v: float, digits: int) -> str:
    return str(int(v)) if float(v).is_integer() else f"{v:.{digits}f}"


@dataclass(frozen=True)
class QuantItemset:
    items: tuple[QuantItem, ...]

    def __post_init__(self):
        cols = [it.col for it in self.items]
        if len(set(cols)) != len(cols):
            raise ValueError("itemset columns must be distinct")

    @property
    def key(self) -> tuple:
        return tuple((it.col, it.lo, it.hi, it.values) for it in self.items)

    def format(self, digits: int = 2) -> str:
        return ", ".join(it.format(digits) for it in self.items)

    def __str__(self):
        return self.format()

    def __len__(self):
        return len(self.items)


@dataclass(frozen=True)
class LabeledDataset:
    """Feature matrix plus one class label per row; labels are not part of the matrix."""

    matrix: NumericMatrix
    labels: np.ndarray
    label_name: str = "class"

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.shape != (self.matrix.n_rows,):
            raise DataError(f"{labels.size} labels for {self.matrix.n_rows} rows")
        object.__setattr__(self, "labels", labels)

    @property
    def classes(self) -> list:
        return sorted(set(self.labels.tolist()), key=str)

    @property
    def n_rows(self) -> int:
        return self.matrix.n_rows


@dataclass(frozen=True)
class QuantRule:
    antecedent: QuantItemset
    label: object
    support: float
    confidence: float
    lift: float
    leverage: float
    completeness: float
    matched_rows: tuple[int, ...]
    bicluster_rows: int = 0

    def format(self, digits: int = 2) -> str:
        return f"{self.antecedent.format(digits)} => {self.label}"

    def as_record(self) -> dict:
        return {
            "items": [it.format() for it in self.antecedent.items],
            "label": _plain(self.label),
            "support": self.support,
            "confidence": self.confidence,
            "lift": self.lift,
            "leverage": self.leverage,
            "completeness": self.completeness,
            "matched_rows": len(self.matched_rows),
            "bicluster_rows": self.bicluster_rows,
        }


def _plain(v):
    return v.item() if isinstance(v, np.generic) else v


def bicluster_to_itemset(mat: NumericMatrix, bic: Bicluster) -> QuantItemset:
    """Describe the bicluster's columns by the value ranges its rows span.

    Numeric columns give an interval, ordinal columns an interval of codes
    (shown as the level labels inside it), nominal columns the observed codes.
    """
    rows = np.asarray(bic.rows)
    items = []
    for j in bic.cols:
        kind = mat.col_kinds[j]
        col = mat.values[rows, j]
        lo, hi = float(col.min()), float(col.max())
        levels = mat.levels.get(j)
        if kind is ColumnKind.NOMINAL:
            vals = tuple(float(v) for v in np.unique(col))
            labels = tuple(levels[int(v)] for v in vals) if levels else ()
            items.append(QuantItem(j, mat.col_names[j], kind, lo, hi, vals, labels))
        elif kind is ColumnKind.ORDINAL:
            labels = tuple(levels[c] for c in range(int(lo), int(hi) + 1)) if levels else ()
            items.append(QuantItem(j, mat.col_names[j], kind, lo, hi, (), labels))
        else:
            items.append(QuantItem(j, mat.col_names[j], kind, lo, hi))
    return QuantItemset(tuple(items))


def itemset_support_rows(mat_or_ds, itemset: QuantItemset) -> np.ndarray:
    """Rows whose value in every itemset column lies in that column's domain."""
    mat = mat_or_ds.matrix if isinstance(mat_or_ds, LabeledDataset) else mat_or_ds
    ok = np.ones(mat.n_rows, dtype=bool)
    for it in itemset.items:
        ok &= it.matches(mat.values[:, it.col]) & ~mat.missing[:, it.col]
    return np.flatnonzero(ok)


@dataclass(frozen=True)
class RuleMetrics:
    support: float
    confidence: float
    lift: float
    leverage: float
    completeness: float


def rule_metrics(n: int, n_matched: int, n_class: int, n_both: int) -> RuleMetrics:
    """Metrics from counts: rows, antecedent matches, class size, and both."""
    if n_matched == 0:
        raise UndefinedRuleError("no row matches the antecedent")
    if n_class == 0:
        raise UndefinedRuleError("the class has no rows")
    support = n_both / n
    confidence = n_both / n_matched
    class_freq = n_class / n
    return RuleMetrics(
        support=support,
        confidence=confidence,
        lift=confidence / class_freq,
        leverage=support - (n_matched / n) * class_freq,
        completeness=n_both / n_class,
    )


def score_rule(ds: LabeledDataset, itemset: QuantItemset, label) -> RuleMetrics:
    rows = itemset_support_rows(ds, itemset)
    in_class = ds.labels == label
    return rule_metrics(ds.n_rows, rows.size, int(in_class.sum()), int(in_class[rows].sum()))


_TOL = 1e-12


def mine_qcars(
    ds: LabeledDataset,
    sol: Iterable[Bicluster],
    conf_min: float = 0.95,
    lift_dist_min: float = 0.2,
) -> list[QuantRule]:
    """Turn each bicluster into one candidate rule per class and keep the interesting ones.

    A rule is kept when its confidence is at least ``conf_min`` and its lift
    is at least ``lift_dist_min`` away from 1. Metrics are computed on the
    rows the itemset matches, which may be more than the bicluster's rows.
    """
    n = ds.n_rows
    class_masks = [(c, ds.labels == c) for c in ds.classes]
    seen = set()
    out = []
    for bic in sol:
        itemset = bicluster_to_itemset(ds.matrix, bic)
        key = itemset.key
        if key in seen:
            continue
        seen.add(key)
        rows = itemset_support_rows(ds, itemset)
        if rows.size == 0:
            continue
        for c, mask in class_masks:
            n_class = int(mask.sum())
            m = rule_metrics(n, rows.size, n_class, int(mask[rows].sum()))
            if m.confidence + _TOL < conf_min or abs(m.lift - 1) + _TOL < lift_dist_min:
                continue
            out.append(
                QuantRule(
                    itemset, c, m.support, m.confidence, m.lift, m.leverage, m.completeness,
                    tuple(int(r) for r in rows), len(bic.rows),
                )
            )
    out.sort(key=lambda r: (str(r.label), -r.confidence, -r.support, r.antecedent.key))
    return out


def row_coverage(ds_or_n, rules: Sequence[QuantRule]) -> float:
    """Percentage of rows matched by at least one rule's antecedent."""
    n = ds_or_n.n_rows if isinstance(ds_or_n, LabeledDataset) else int(ds_or_n)
    covered = set()
    for r in rules:
        covered.update(r.matched_rows)
    return 100.0 * len(covered) / n if n else 0.0
