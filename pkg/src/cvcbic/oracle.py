"""Reference enumeration by exhaustive row-subset search, and solution checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .core import (
    Bicluster,
    BiclusterSolution,
    CVCError,
    EnumParams,
    NumericMatrix,
    maximality_violation,
)

MAX_ORACLE_ROWS = 16


class SizeLimit(CVCError):
    """The input is too large for exhaustive search."""


def brute_force(mat: NumericMatrix, params: EnumParams, max_rows: int = MAX_ORACLE_ROWS) -> BiclusterSolution:
    """Every maximal CVC bicluster, found by trying all row subsets.

    Shares no code with the enumerators beyond the matrix type. For each row
    subset I the admissible column set J(I) is computed; (I, J(I)) is kept
    when J(I) is nonempty, large enough, and no outside row extends it.
    Variant ``cvcp`` is treated as eps = 0.
    """
    n, m = mat.shape
    if n > max_rows:
        raise SizeLimit(f"{n} rows exceeds the exhaustive-search cap of {max_rows}")
    eps = np.zeros(m) if params.variant == "cvcp" else params.eps_vector(mat)
    A = mat.values.tolist()
    M = mat.missing.tolist()
    sol = BiclusterSolution(params)
    for size in range(max(params.min_row, 1), n + 1):
        for rows in combinations(range(n), size):
            cols = []
            for j in range(m):
                if any(M[r][j] for r in rows):
                    continue
                col = [A[r][j] for r in rows]
                if max(col) - min(col) <= eps[j]:
                    cols.append(j)
            if not cols or len(cols) < params.min_col:
                continue
            if _row_extensible(A, M, rows, cols, eps, n):
                continue
            sol.add(Bicluster(rows, cols))
    return sol


def _row_extensible(A, M, rows, cols, eps, n) -> bool:
    inside = set(rows)
    for x in range(n):
        if x in inside:
            continue
        for j in cols:
            if M[x][j]:
                break
            col = [A[r][j] for r in rows] + [A[x][j]]
            if max(col) - min(col) > eps[j]:
                break
        else:
            return True
    return False


@dataclass
class VerificationReport:
    n_biclusters: int
    correct: int = 0
    maximal: int = 0
    failures: list = field(default_factory=list)  # (bicluster, reason)
    duplicate_row_sets: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures and self.duplicate_row_sets == 0

    def summary(self) -> str:
        lines = [
            f"biclusters:       {self.n_biclusters}",
            f"correct:          {self.correct}",
            f"maximal:          {self.maximal}",
            f"shared row-sets:  {self.duplicate_row_sets}",
        ]
        for bic, reason in self.failures[:20]:
            lines.append(f"  FAIL {bic}: {reason[0]} {reason[1]}")
        if len(self.failures) > 20:
            lines.append(f"  ... {len(self.failures) - 20} more")
        lines.append("OK" if self.ok else "FAILED")
        return "\n".join(lines)


def verify(mat: NumericMatrix, biclusters, eps) -> VerificationReport:
    """Check that every bicluster is correct and maximal, and row-sets are distinct."""
    bics = list(biclusters)
    rep = VerificationReport(len(bics))
    if isinstance(biclusters, BiclusterSolution):
        rep.duplicate_row_sets = biclusters.collisions
    else:
        rep.duplicate_row_sets = len(bics) - len({b.rows for b in bics})
    for b in bics:
        why = maximality_violation(mat, b, eps)
        if why is None:
            rep.correct += 1
            rep.maximal += 1
            continue
        if why[0] != "incorrect":
            rep.correct += 1
        rep.failures.append((b, why))
    return rep
