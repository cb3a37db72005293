"""Binning-first versus online enumeration, and a small memory benchmark."""
from __future__ import annotations

import time
import tracemalloc
from dataclasses import dataclass

import numpy as np

from .core import BiclusterSolution, EnumParams, NumericMatrix, coverage
from .enumerator import EnumStats, enumerate_cvc3, enumerate_cvc_legacy, enumerate_cvcp
from .preprocess import BinningSpec, fit_matrix_binning, partition


@dataclass
class CompareReport:
    binning: BinningSpec
    eps: tuple[float, ...]
    apriori: BiclusterSolution
    online: BiclusterSolution
    contained: int  # a-priori biclusters inside some online bicluster
    already_maximal: int  # a-priori biclusters that are themselves online biclusters
    missed: int  # online biclusters containing no a-priori bicluster
    n_cells: int

    @property
    def n_apriori(self) -> int:
        return len(self.apriori)

    @property
    def n_online(self) -> int:
        return len(self.online)

    @property
    def truncated(self) -> int:
        return self.contained - self.already_maximal

    def coverage_pct(self, which: str) -> float:
        sol = self.apriori if which == "apriori" else self.online
        return 100.0 * coverage(sol) / self.n_cells

    def summary(self) -> str:
        rows = [
            ("binning", str(self.binning.rule)),
            ("eps", ", ".join(f"{e:g}" for e in self.eps)),
            ("a-priori biclusters", self.n_apriori),
            ("online biclusters", self.n_online),
            ("a-priori coverage %", f"{self.coverage_pct('apriori'):.2f}"),
            ("online coverage %", f"{self.coverage_pct('online'):.2f}"),
            ("contained", f"{self.contained}/{self.n_apriori}"),
            ("already maximal", self.already_maximal),
            ("truncated", self.truncated),
            ("missed", self.missed),
        ]
        w = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{w}}  {v}" for k, v in rows)


def _containment(apriori: BiclusterSolution, online: BiclusterSolution, n: int, m: int):
    # row and column incidence matrices make the subset tests a pair of matmuls
    def incidence(sol, size, attr):
        out = np.zeros((len(sol), size), dtype=np.int32)
        for k, b in enumerate(sol):
            out[k, list(getattr(b, attr))] = 1
        return out

    a = list(apriori)
    b = list(online)
    if not a or not b:
        return 0, 0, len(b)
    ar, ac = incidence(a, n, "rows"), incidence(a, m, "cols")
    br, bc = incidence(b, n, "rows"), incidence(b, m, "cols")
    rows_in = (ar @ br.T) == ar.sum(axis=1)[:, None]
    cols_in = (ac @ bc.T) == ac.sum(axis=1)[:, None]
    inside = rows_in & cols_in  # inside[i, k]: a-priori i is within online k
    contained = int(inside.any(axis=1).sum())
    already = sum(1 for x in a if x in online)
    missed = int((~inside.any(axis=0)).sum())
    return contained, already, missed


def run_compare(
    mat: NumericMatrix,
    rule,
    min_row: int = 1,
    min_col: int = 1,
    origin: float | None = None,
    nice: bool = False,
) -> CompareReport:
    """Enumerate perfect biclusters of the binned matrix and CVC biclusters of the raw one.

    The online run uses each numeric column's bin width as its eps and 0
    for categorical columns, so both runs group values at the same scale.
    """
    spec = fit_matrix_binning(mat, rule, origin=origin, nice=nice)
    binned = partition(mat, spec)
    a_sol, _ = enumerate_cvcp(binned, EnumParams(min_row=min_row, min_col=min_col, variant="cvcp"))
    eps = tuple(
        float(cb.width) if kind.is_numeric else 0.0 for cb, kind in zip(spec.columns, mat.col_kinds)
    )
    b_sol, _ = enumerate_cvc3(mat, EnumParams(min_row=min_row, min_col=min_col, eps=eps))
    contained, already, missed = _containment(a_sol, b_sol, mat.n_rows, mat.n_cols)
    return CompareReport(spec, eps, a_sol, b_sol, contained, already, missed, mat.n_rows * mat.n_cols)


@dataclass
class BenchRow:
    variant: str
    seconds: float
    peak_bytes: int
    n_biclusters: int
    stats: EnumStats


def bench(mat: NumericMatrix, params: EnumParams, variants=("cvc3", "cvc_legacy")) -> list[BenchRow]:
    """Runtime and traced peak memory of each variant on the same input."""
    runners = {"cvc3": enumerate_cvc3, "cvc_legacy": enumerate_cvc_legacy, "cvcp": enumerate_cvcp}
    out = []
    for v in variants:
        tracemalloc.start()
        t0 = time.perf_counter()
        sol, stats = runners[v](mat, params)
        secs = time.perf_counter() - t0
        _, peak = tracemalloc.get_traced_memory()
        tracemalloc.stop()
        out.append(BenchRow(v, secs, peak, len(sol), stats))
    return out


def format_bench(rows: list[BenchRow]) -> str:
    lines = [f"{'variant':<12} {'seconds':>9} {'peak MiB':>9} {'biclusters':>11} {'nodes':>9}"]
    for r in rows:
        lines.append(
            f"{r.variant:<12} {r.seconds:>9.3f} {r.peak_bytes / 2**20:>9.2f} "
            f"{r.n_biclusters:>11} {r.stats.recursive_calls:>9}"
        )
    return "\n".join(lines)
