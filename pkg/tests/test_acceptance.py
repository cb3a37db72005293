"""Acceptance checks; each prints one PASS/FAIL line.

Data-dependent checks look for the public datasets through environment
variables (ACUTE_DATA, GDS750_DATA) or under tests/fixtures/.
"""
import os
import subprocess
import sys
import textwrap
import time
from pathlib import Path

import numpy as np
import pytest

from cvcbic import (
    Bicluster,
    EnumParams,
    NumericMatrix,
    brute_force,
    enumerate_cvc3,
    enumerate_cvc_legacy,
    enumerate_cvcp,
    verify,
)
from cvcbic.compare import bench, run_compare
from cvcbic.io import parse_dataset, parse_geo_soft
from cvcbic.preprocess import (
    SyntheticConfig,
    binary_mode,
    fit_matrix_binning,
    generate_synthetic,
    integerize,
    itemize,
    itemize_multi,
    partition,
    preprocess_log_scale,
)
from cvcbic.rules import mine_qcars, row_coverage, rule_metrics, score_rule
from golden import B1_PLUS, B1_RAW, CONCEPTS_ITEMIZED, CONCEPTS_MULTI, CVC_EPS5, PERFECT_BINNED

FIXTURES = Path(__file__).parent / "fixtures"


def report(capsys, n, ok, detail):
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
    assert ok, detail


def _b1():
    mat = NumericMatrix(B1_RAW)
    spec = fit_matrix_binning(mat, "fixed_width:5", origin=1)
    return mat, spec, partition(mat, spec)


def test_criterion_1_golden_cvc(capsys):
    mat = NumericMatrix(B1_RAW)
    t0 = time.perf_counter()
    sol, _ = enumerate_cvc3(mat, EnumParams(min_row=2, min_col=1, eps=5))
    dt = time.perf_counter() - t0
    ok = set(sol) == CVC_EPS5 and len(sol) == 30 and dt < 0.1
    report(capsys, 1, ok, f"{len(sol)} biclusters (expected 30), exact={set(sol) == CVC_EPS5}, {dt:.4f}s < 0.1s")


def _to_columns(b: Bicluster, item_col) -> Bicluster:
    return Bicluster(b.rows, sorted(set(item_col[list(b.cols)].tolist())))


def test_criterion_2_perfect_and_itemized(capsys):
    mat, spec, binned = _b1()
    p = EnumParams(min_row=2, variant="cvcp")
    perfect, _ = enumerate_cvcp(binned, p)
    single, _ = enumerate_cvcp(binary_mode(itemize(binned, spec)), p)
    multi, _ = enumerate_cvcp(binary_mode(itemize_multi(binned, mat, spec)), p)
    item_col = np.repeat(np.arange(mat.n_cols), spec.n_bins)
    mapped = {_to_columns(b, item_col) for b in single}
    one_to_one = len(mapped) == len(single) and mapped == set(perfect)
    ok = set(perfect) == PERFECT_BINNED and set(single) == CONCEPTS_ITEMIZED and one_to_one
    ok = ok and set(multi) == CONCEPTS_MULTI
    report(
        capsys, 2, ok,
        f"perfect {len(perfect)}/17, concepts {len(single)}/17 (one-to-one={one_to_one}), "
        f"multi-item concepts {len(multi)}/27",
    )


def test_criterion_3_multi_item_table(capsys):
    mat, spec, binned = _b1()
    single = itemize(binned, spec).values
    multi = itemize_multi(binned, mat, spec, delta=2).values
    plus = {(i + 1, k + 1) for i, k in zip(*np.nonzero(multi - single))}
    # B1_PLUS holds every "+" of the reference item table, cell by cell
    ok = plus == B1_PLUS and bool(np.all(multi >= single))
    report(
        capsys, 3, ok,
        f"{len(plus)} extra assignments, table match={plus == B1_PLUS} "
        f"(the reference table has {len(B1_PLUS)}; 14 expected, see decisions ledger)",
    )


def _random_suite(count=600, seed=2024):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n, m = int(rng.integers(1, 11)), int(rng.integers(1, 7))
        A = rng.integers(0, 5, size=(n, m)).astype(float)
        miss = rng.random((n, m)) < 0.15 if rng.random() < 0.3 else None
        p = EnumParams(
            min_row=int(rng.integers(1, 4)),
            min_col=int(rng.integers(1, 3)),
            eps=float(rng.choice([0, 1, 2])),
        )
        yield NumericMatrix(A, miss), p


def test_criterion_4_oracle_equivalence(capsys):
    t0 = time.perf_counter()
    count, bad = 0, []
    for mat, p in _random_suite():
        count += 1
        a, _ = enumerate_cvc3(mat, p)
        b, _ = enumerate_cvc_legacy(mat, p)
        o = brute_force(mat, p)
        rep = verify(mat, a, p.eps_vector(mat))
        masked = any(mat.missing[np.ix_(x.rows, x.cols)].any() for x in a)
        distinct = len({x.rows for x in a}) == len(a) and a.collisions == 0
        if not (a == b == o and rep.ok and distinct and not masked):
            bad.append((mat, p))
    dt = time.perf_counter() - t0
    ok = count >= 500 and not bad and dt < 60
    report(capsys, 4, ok, f"{count} matrices, {len(bad)} mismatches, {dt:.1f}s < 60s")


def test_criterion_5_pn_and_pruning_neutral(capsys):
    count, bad = 0, 0
    for mat, p in _random_suite():
        count += 1
        base, _ = enumerate_cvc3(mat, p)
        for pn in (True, False):
            for prune in (True, False):
                q = EnumParams(p.min_row, p.min_col, p.eps, pn_inheritance=pn, min_col_pruning=prune)
                other, _ = enumerate_cvc3(mat, q)
                bad += other != base
    report(capsys, 5, bad == 0, f"{count} matrices x 4 toggle settings, {bad} differences")


PLANTED = dict(n=1000, m=50, num_biclusters=10, bic_rows=50, bic_cols=8, overlap=0.2, noise_sigma=0.05, seed=7)


def _recovered(sol, truth):
    return sum(any(b.contains(t) for b in sol) for t in truth.biclusters)


def test_criterion_6_planted_recovery_unit_background(capsys):
    # the instance exactly as stated: uniform [0, 1] background, eps = 6 sigma on the x1000 scale
    script = textwrap.dedent(f"""
        from cvcbic import EnumParams, enumerate_cvc3
        from cvcbic.preprocess import SyntheticConfig, generate_synthetic, integerize
        mat, truth = generate_synthetic(SyntheticConfig(**{PLANTED!r}))
        sol, _ = enumerate_cvc3(integerize(mat, 1000), EnumParams(min_row=50, eps=300))
        print(len(sol), sum(any(b.contains(t) for b in sol) for t in truth.biclusters))
    """)
    t0 = time.perf_counter()
    try:
        out = subprocess.run([sys.executable, "-c", script], capture_output=True, text=True, timeout=30)
    except subprocess.TimeoutExpired:
        report(capsys, 6, False, "[0,1] background: enumeration still running after 30s (see decisions ledger)")
        return
    dt = time.perf_counter() - t0
    n_bics, found = map(int, out.stdout.split())
    report(capsys, 6, found == 10 and dt < 30, f"[0,1] background: {found}/10 planted recovered, {n_bics} biclusters, {dt:.1f}s")


def test_criterion_6_planted_recovery_wide_background(capsys):
    cfg = SyntheticConfig(**PLANTED, value_range=(0, 10), noise_clip=3)
    mat, truth = generate_synthetic(cfg)
    t0 = time.perf_counter()
    sol, _ = enumerate_cvc3(integerize(mat, 1000), EnumParams(min_row=50, eps=300))
    dt = time.perf_counter() - t0
    found = _recovered(sol, truth)
    report(
        capsys, "6 (background [0,10], noise clipped at 3 sigma)", found == 10 and dt < 30,
        f"{found}/10 planted recovered with all rows and columns, {len(sol)} biclusters, {dt:.1f}s < 30s",
    )


def test_criterion_7_apriori_containment(capsys):
    rep = run_compare(NumericMatrix(B1_RAW), "fixed_width:5", min_row=2, origin=1)
    ok = (rep.n_apriori, rep.n_online, rep.contained, rep.already_maximal, rep.missed) == (17, 30, 17, 4, 7)
    report(
        capsys, 7, ok,
        f"a priori {rep.n_apriori}, online {rep.n_online}, contained {rep.contained}/{rep.n_apriori}, "
        f"already maximal {rep.already_maximal}, without counterpart {rep.missed}",
    )


ACUTE_NAMES = [
    "temperature", "nausea", "lumbarPain", "urinePushing", "micturitionPain", "urethraBurning", "d1", "d2",
]

# (label, itemset as printed, completeness, confidence, lift, leverage)
ACUTE_RULES = {
    "d1": [
        ("no", "nausea{no}, lumbarPain{yes}, micturitionPain{no}", 0.67, 1.00, 1.97, 0.17),
        ("no", "urinePushing{no}, urethraBurning{no}", 0.66, 1.00, 1.97, 0.16),
        ("yes", "urinePushing{yes}, micturitionPain{yes}", 0.83, 1.00, 2.03, 0.21),
        ("yes", "urinePushing{yes}, urethraBurning{no}", 0.51, 1.00, 2.03, 0.13),
    ],
    "d2": [
        ("no", "nausea{no}, lumbarPain{no}", 0.71, 1.00, 1.71, 0.17),
        ("no", "nausea{no}, urethraBurning{no}", 0.71, 1.00, 1.71, 0.17),
        ("yes", "lumbarPain{yes}, urinePushing{yes}", 0.80, 1.00, 2.40, 0.19),
        ("yes", "nausea{yes}, lumbarPain{yes}, micturitionPain{yes}", 0.58, 1.00, 2.40, 0.14),
    ],
}

# class sizes and (matched, matched and in class) counts consistent with the rows above
ACUTE_COUNTS = {
    "d1": (59, [(41, 41), (40, 40), (49, 49), (30, 30)]),
    "d2": (50, [(50, 50), (50, 50), (40, 40), (29, 29)]),
}


def _acute_path():
    env = os.environ.get("ACUTE_DATA")
    if env:
        return Path(env)
    return FIXTURES / "diagnosis.data"


def _load_acute(label, drop):
    ds = parse_dataset(
        _acute_path(), delimiter="\t", header=False, encoding="utf-16", decimal=",",
        names=ACUTE_NAMES, label_col=label, drop_cols=[drop],
    )
    # one decimal place: x10 keeps the temperature spreads exact
    vals = ds.matrix.values.copy()
    vals[:, 0] = np.round(vals[:, 0] * 10)
    return type(ds)(ds.matrix.replace(values=vals), ds.labels, ds.label_name)


def test_criterion_8_acute(capsys):
    path = _acute_path()
    if not path.exists():
        report(capsys, 8, False, f"Acute data not found at {path} (set ACUTE_DATA); nothing to reproduce")
    t0 = time.perf_counter()
    ds1 = _load_acute("d1", "d2")
    rep = run_compare(ds1.matrix, "fd", min_row=5, min_col=1, nice=True)
    rules = mine_qcars(ds1, rep.online)
    cov = row_coverage(ds1, rules)
    metric_ok, worst = True, 0.0
    for name, drop in (("d1", "d2"), ("d2", "d1")):
        ds = ds1 if name == "d1" else _load_acute("d2", "d1")
        by_text = {r.antecedent.format(): r.antecedent for r in mine_qcars(ds, rep.online)}
        for label, text, comp, conf, lift, lev in ACUTE_RULES[name]:
            if text not in by_text:
                metric_ok = False
                continue
            m = score_rule(ds, by_text[text], label)
            diff = max(abs(m.completeness - comp), abs(m.confidence - conf), abs(m.lift - lift), abs(m.leverage - lev))
            worst = max(worst, diff)
    dt = time.perf_counter() - t0
    ok = (rep.n_online, rep.n_apriori, len(rules)) == (205, 79, 86) and round(cov, 2) == 100.0
    ok = ok and metric_ok and worst <= 0.01 + 1e-9 and dt < 10
    report(
        capsys, 8, ok,
        f"online {rep.n_online}/205, a priori {rep.n_apriori}/79, D1 rules {len(rules)}/86, "
        f"coverage {cov:.2f}%, rule rows found={metric_ok}, worst metric diff {worst:.3f}, {dt:.1f}s",
    )


def test_criterion_8_rule_metric_rows(capsys):
    # the reference metric rows follow from whole-number counts over 120 patients
    worst = 0.0
    for name, (n_class, counts) in ACUTE_COUNTS.items():
        for (label, _, comp, conf, lift, lev), (matched, both) in zip(ACUTE_RULES[name], counts):
            size = n_class if label == "yes" else 120 - n_class
            m = rule_metrics(120, matched, size, both)
            worst = max(worst, abs(m.completeness - comp), abs(m.confidence - conf),
                        abs(m.lift - lift), abs(m.leverage - lev))
    report(capsys, "8 (metric formulas on rule counts)", worst <= 0.01 + 1e-9, f"worst difference {worst:.4f} <= 0.01")


def _gds_path():
    env = os.environ.get("GDS750_DATA")
    return Path(env) if env else FIXTURES / "GDS750.soft"


def test_criterion_9_gene_expression_coverage(capsys):
    path = _gds_path()
    if not path.exists():
        with capsys.disabled():
            print(f"\nSKIP criterion 9 (informational): GDS750 not found at {path} (set GDS750_DATA)")
        pytest.skip("GDS750 not available")
    raw = parse_geo_soft(path)
    mat = preprocess_log_scale(raw, nonpositive="missing")
    rep = run_compare(mat, "fixed_width:40", min_row=305, min_col=3, origin=0)
    on, ap = rep.coverage_pct("online"), rep.coverage_pct("apriori")
    ok = abs(on - 62.00) <= 2 and abs(ap - 31.36) <= 2
    report(capsys, "9 (informational)", ok, f"coverage online {on:.2f}% (62.00), a priori {ap:.2f}% (31.36), +-2 points")


def test_criterion_9_bench_memory(capsys):
    cfg = SyntheticConfig(**PLANTED, value_range=(0, 10), noise_clip=3)
    mat, _ = generate_synthetic(cfg)
    rows = bench(integerize(mat, 1000), EnumParams(min_row=50, eps=300))
    peak = {r.variant: r.peak_bytes for r in rows}
    same = rows[0].n_biclusters == rows[1].n_biclusters
    ok = peak["cvc_legacy"] >= peak["cvc3"] and same
    report(
        capsys, "9 (bench)", ok,
        f"peak memory legacy {peak['cvc_legacy'] / 2**20:.2f} MiB >= cvc3 {peak['cvc3'] / 2**20:.2f} MiB, "
        f"same output size={same}",
    )
