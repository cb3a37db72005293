"""Enumeration of all maximal CVC biclusters.

Three engines share one closure loop:

* ``enumerate_cvc3``: lexicographic row-canonicity instead of a symbol table,
  inherited skip columns (PN) and missing-value support.
* ``enumerate_cvcp``: perfect biclusters (eps = 0), candidates are groups of
  equal values and never overlap, so no row bookkeeping is needed.
* ``enumerate_cvc_legacy``: symbol table of emitted row-sets plus a
  row-maximality test; kept for differential testing and memory comparison.

Each node is closed column by column from its start column ``y``; children
are queued FIFO and explored depth-first after the parent is closed, with an
explicit stack so deep trees do not hit the recursion limit.
"""
from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field, asdict
from typing import Iterable

import numpy as np

from .core import Bicluster, BiclusterSolution, ConfigError, EnumParams, NumericMatrix, _eps_array


@dataclass
class EnumStats:
    bicluster_count: int = 0
    recursive_calls: int = 0
    canonicity_tests: int = 0
    canonicity_failures: int = 0
    row_canonicity_failures: int = 0
    peak_queue_depth: int = 0
    elapsed_s: float = field(default=0.0, compare=False)

    def as_dict(self, timing: bool = True) -> dict:
        d = asdict(self)
        if not timing:
            d.pop("elapsed_s")
        return d


# -- primitives -------------------------------------------------------------


def _windows(sorted_vals: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Maximal index windows [s, e] of a sorted vector with v[e] - v[s] <= eps."""
    L = sorted_vals.size
    if L == 0:
        return np.empty(0, dtype=np.intp), np.empty(0, dtype=np.intp)
    end = np.searchsorted(sorted_vals, sorted_vals + eps, side="right") - 1
    # v + eps may round; settle the boundary on the subtraction itself
    while True:
        over = sorted_vals[end] - sorted_vals > eps
        if not over.any():
            break
        end[over] -= 1
    while True:
        nxt = np.minimum(end + 1, L - 1)
        grow = (end + 1 < L) & (sorted_vals[nxt] - sorted_vals <= eps)
        if not grow.any():
            break
        end[grow] += 1
    keep = np.ones(L, dtype=bool)
    keep[1:] = end[1:] > end[:-1]
    starts = np.flatnonzero(keep)
    return starts, end[starts]


def candidate_row_sets(mat: NumericMatrix, rows: Iterable[int], j: int, eps_j: float) -> list[tuple[int, ...]]:
    """Maximal subsets of ``rows`` whose column-``j`` spread is at most ``eps_j``.

    Rows missing in column ``j`` are dropped first. Equal values are ordered
    by row index, so the output order is deterministic.
    """
    I = np.asarray(sorted(rows), dtype=np.intp)
    if I.size == 0:
        raise ValueError("row set must be nonempty")
    return [tuple(int(r) for r in G) for G in _candidates(mat.values[I, j], mat.missing[I, j], I, eps_j)]


def _candidates(col: np.ndarray, miss: np.ndarray, I: np.ndarray, eps: float, min_size: int = 1) -> list[np.ndarray]:
    """Candidate row sets with at least ``min_size`` rows, smallest values first."""
    if miss.any():
        col = col[~miss]
        I = I[~miss]
    order = np.lexsort((I, col))
    vals = col[order]
    starts, ends = _windows(vals, eps)
    big = ends - starts + 1 >= min_size
    if not big.any():
        return []
    rows = I[order]
    return [np.sort(rows[s : e + 1]) for s, e in zip(starts[big].tolist(), ends[big].tolist())]


def _groups(col: np.ndarray, miss: np.ndarray, I: np.ndarray) -> list[np.ndarray]:
    present = ~miss
    vals = col[present]
    rows = I[present]
    if vals.size == 0:
        return []
    _, inverse = np.unique(vals, return_inverse=True)
    order = np.argsort(inverse, kind="stable")
    bounds = np.flatnonzero(np.diff(inverse[order])) + 1
    return np.split(rows[order], bounds)


def column_canonicity(mat: NumericMatrix, G: Iterable[int], J: Iterable[int], j: int, eps) -> int | None:
    """Smallest column k < j outside ``J`` that ``G`` could also take, else ``None``."""
    G = np.asarray(sorted(G), dtype=np.intp)
    if G.size == 0:
        raise ValueError("candidate row set must be nonempty")
    eps = _eps_array(mat, eps)
    return _first_noncanonical(mat.values, mat.missing, G, set(J), j, eps)


def _first_noncanonical(A, M, G, J: set, j: int, eps) -> int | None:
    if j == 0:
        return None
    sub = A[G, :j]
    ok = (sub.max(axis=0) - sub.min(axis=0) <= eps[:j]) & ~M[G, :j].any(axis=0)
    for k in np.flatnonzero(ok):
        if int(k) not in J:
            return int(k)
    return None


@dataclass(frozen=True)
class RowCanonicity:
    """Outcome of the row-canonicity test; ``part`` is 0 when the candidate passes."""

    part: int = 0
    row: int | None = None

    @property
    def ok(self) -> bool:
        return self.part == 0


def row_canonicity(mat: NumericMatrix, G, gamma, I, J, j: int, eps) -> RowCanonicity:
    """Row-canonicity of candidate ``G`` created at column ``j`` of node ``(I, J)``.

    Part 1 rejects when a tracked row extends ``(G, J<j + {j})``; part 2
    rejects when a tracked row g gives a correct ``(I<g + {g} + G, J<j)``,
    i.e. a parent earlier in lexicographic row order exists.
    """
    eps = _eps_array(mat, eps)
    return _row_canonical(
        mat.values,
        mat.missing,
        np.asarray(sorted(G), dtype=np.intp),
        np.asarray(sorted(gamma), dtype=np.intp),
        np.asarray(sorted(I), dtype=np.intp),
        sorted(J),
        j,
        eps,
    )


def _row_canonical(A, M, G, gamma, I, J_sorted, j, eps) -> RowCanonicity:
    if gamma.size == 0:
        return RowCanonicity()
    j_lt = [c for c in J_sorted if c < j]
    H = j_lt + [j]
    sg = A[np.ix_(G, H)]
    gmin, gmax = sg.min(axis=0), sg.max(axis=0)
    X = A[np.ix_(gamma, H)]
    XM = M[np.ix_(gamma, H)]
    fit = ((np.maximum(gmax, X) - np.minimum(gmin, X) <= eps[H]) & ~XM).all(axis=1)
    if fit.any():
        return RowCanonicity(1, int(gamma[np.flatnonzero(fit)[0]]))

    if not j_lt:
        return RowCanonicity(2, int(gamma[0]))
    nl = len(j_lt)
    P = A[np.ix_(I, j_lt)]
    pmin = np.vstack([np.full(nl, np.inf), np.minimum.accumulate(P, axis=0)])
    pmax = np.vstack([np.full(nl, -np.inf), np.maximum.accumulate(P, axis=0)])
    before = np.searchsorted(I, gamma)  # |I<g| for each tracked row g
    Xl = X[:, :nl]
    lo = np.minimum(np.minimum(gmin[:nl], pmin[before]), Xl)
    hi = np.maximum(np.maximum(gmax[:nl], pmax[before]), Xl)
    fit = ((hi - lo <= eps[j_lt]) & ~XM[:, :nl]).all(axis=1)
    if fit.any():
        return RowCanonicity(2, int(gamma[np.flatnonzero(fit)[0]]))
    return RowCanonicity()


def compute_gamma(mat: NumericMatrix, G, j: int, parent_gamma, I, min_row: int, eps_j: float) -> tuple[int, ...]:
    """Rows to track for the row tests of the child created from ``G`` at column ``j``."""
    out = _compute_gamma(
        mat.values,
        mat.missing,
        np.asarray(sorted(G), dtype=np.intp),
        j,
        np.asarray(sorted(parent_gamma), dtype=np.intp),
        np.asarray(sorted(I), dtype=np.intp),
        min_row,
        float(eps_j),
    )
    return tuple(int(g) for g in out)


def _compute_gamma(A, M, G, j, parent_gamma, I, min_row, eps_j) -> np.ndarray:
    gv = np.sort(A[G, j])
    k = min(min_row, gv.size)
    p1 = gv[k - 1]
    p2 = gv[-k]
    rest = np.setdiff1d(I, G, assume_unique=True)
    if rest.size == 0:
        return parent_gamma
    v = A[rest, j]
    # a row outside [p1 - eps, p2 + eps] cannot share a min_row-row window with G
    near = (p1 - v <= eps_j) & (v - p2 <= eps_j) & ~M[rest, j]
    new = rest[near]
    if new.size == 0:
        return parent_gamma
    return np.union1d(parent_gamma, new)


# -- engine -----------------------------------------------------------------


@dataclass
class _Node:
    rows: np.ndarray
    intent: frozenset
    start: int
    gamma: np.ndarray
    pn: frozenset


class _Engine:
    def __init__(self, mat: NumericMatrix, params: EnumParams, mode: str):
        self.A = mat.values
        self.M = mat.missing
        self.n, self.m = mat.shape
        self.mode = mode
        if mode == "cvcp":
            self.eps = np.zeros(self.m)
        else:
            self.eps = params.eps_vector(mat)
        self.min_row = params.min_row
        self.min_col = params.min_col
        self.pn_on = params.pn_inheritance and mode != "cvc_legacy"
        self.prune = params.min_col_pruning
        self.stats = EnumStats()
        self.out: list[Bicluster] = []
        self.table: set = set()

    def run(self) -> list[Bicluster]:
        if self.min_row > self.n:
            return self.out
        root = _Node(np.arange(self.n), frozenset(), 0, np.empty(0, dtype=np.intp), frozenset())
        stack = [deque([root])]
        depth = 0
        while stack:
            q = stack[-1]
            if not q:
                stack.pop()
                continue
            node = q.popleft()
            children = self._close(node)
            if children:
                stack.append(children)
                depth = sum(len(d) for d in stack)
                if depth > self.stats.peak_queue_depth:
                    self.stats.peak_queue_depth = depth
        return self.out

    def _close(self, node: _Node) -> deque:
        st = self.stats
        st.recursive_calls += 1
        A, M, eps, m = self.A, self.M, self.eps, self.m
        I = node.rows
        J = set(node.intent)
        pn = set(node.pn)
        y = node.start
        sub = A[I]
        subm = M[I]
        absorbable = (sub.max(axis=0) - sub.min(axis=0) <= eps) & ~subm.any(axis=0)
        queue: list = []
        pruned = False

        for j in range(y, m):
            if self.prune and len(J.union(range(j, m))) < self.min_col:
                pruned = True
                break
            if j in J or j in pn:
                continue
            if absorbable[j]:
                J.add(j)
                continue
            if self.mode == "cvcp":
                cands = [G for G in _groups(sub[:, j], subm[:, j], I) if G.size >= self.min_row]
            else:
                cands = _candidates(sub[:, j], subm[:, j], I, eps[j], self.min_row)
            if self.mode == "cvc_legacy":
                self._legacy_candidates(cands, node, J, j, queue)
                continue

            no_size = True
            all_fail_early = True  # a2: no canonical candidate, no failure at k >= y
            some_fail_early = False  # a3
            for G in cands:
                no_size = False
                st.canonicity_tests += 1
                k = _first_noncanonical(A, M, G, J, j, eps)
                if k is None:
                    all_fail_early = False
                    if self.mode == "cvcp":
                        queue.append((G, j, node.gamma))
                        continue
                    rc = _row_canonical(A, M, G, node.gamma, I, sorted(J), j, eps)
                    if rc.ok:
                        gam = _compute_gamma(A, M, G, j, node.gamma, I, self.min_row, eps[j])
                        queue.append((G, j, gam))
                    else:
                        st.row_canonicity_failures += 1
                else:
                    st.canonicity_failures += 1
                    if k >= y:
                        all_fail_early = False
                    else:
                        some_fail_early = True
            if self.pn_on and (no_size or (all_fail_early and some_fail_early)):
                pn.add(j)

        if not pruned and J and len(J) >= self.min_col:
            self.out.append(Bicluster(tuple(I.tolist()), tuple(sorted(J))))
            st.bicluster_count += 1

        pn_frozen = frozenset(pn)
        return deque(
            _Node(G, frozenset(J | {jc}), jc + 1, gam, pn_frozen) for G, jc, gam in queue
        )

    def _legacy_candidates(self, cands, node: _Node, J: set, j: int, queue: list) -> None:
        A, M, eps, st = self.A, self.M, self.eps, self.stats
        I = node.rows
        H = sorted(J | {j})
        for G in cands:
            key = G.tobytes()
            if key in self.table:
                continue
            st.canonicity_tests += 1
            if _first_noncanonical(A, M, G, J, j, eps) is not None:
                st.canonicity_failures += 1
                continue
            if not _row_maximal(A, M, G, node.gamma, H, eps):
                st.row_canonicity_failures += 1
                continue
            self.table.add(key)
            gam = _compute_gamma(A, M, G, j, node.gamma, I, self.min_row, eps[j])
            queue.append((G, j, gam))


def _row_maximal(A, M, G, gamma, H, eps) -> bool:
    if gamma.size == 0:
        return True
    sg = A[np.ix_(G, H)]
    X = A[np.ix_(gamma, H)]
    fit = (np.maximum(sg.max(axis=0), X) - np.minimum(sg.min(axis=0), X) <= eps[H]) & ~M[np.ix_(gamma, H)]
    return not fit.all(axis=1).any()


def _run(mat: NumericMatrix, params: EnumParams, mode: str) -> tuple[BiclusterSolution, EnumStats]:
    if not isinstance(mat, NumericMatrix):
        raise ConfigError("expected a NumericMatrix")
    t0 = time.perf_counter()
    eng = _Engine(mat, params, mode)
    found = eng.run()
    eng.stats.elapsed_s = time.perf_counter() - t0
    return BiclusterSolution.from_iter(found, params), eng.stats


def enumerate_cvc3(mat: NumericMatrix, params: EnumParams) -> tuple[BiclusterSolution, EnumStats]:
    """All maximal CVC biclusters with at least min_row rows and min_col columns."""
    return _run(mat, params, "cvc3")


def enumerate_cvcp(mat: NumericMatrix, params: EnumParams) -> tuple[BiclusterSolution, EnumStats]:
    """All maximal perfect CVC biclusters; ``params.eps`` is ignored.

    On a 0/1 matrix passed through :func:`cvcbic.preprocess.binary_mode` the
    output is the set of formal concepts with at least min_row objects.
    """
    return _run(mat, params, "cvcp")


def enumerate_cvc_legacy(mat: NumericMatrix, params: EnumParams) -> tuple[BiclusterSolution, EnumStats]:
    """Same output as :func:`enumerate_cvc3`, via a symbol table of row-sets."""
    return _run(mat, params, "cvc_legacy")


def enumerate_biclusters(mat: NumericMatrix, params: EnumParams) -> tuple[BiclusterSolution, EnumStats]:
    """Dispatch on ``params.variant``."""
    return _run(mat, params, params.variant)
