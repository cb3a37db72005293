"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 verification failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from .core import ConfigError, DataError, EnumParams, NumericMatrix, VARIANTS
from .enumerator import enumerate_biclusters
from .io import Schema, parse_dataset, read_solution, write_matrix, write_solution
from .oracle import SizeLimit, brute_force, verify
from .preprocess import (
    BinRule,
    SyntheticConfig,
    fit_matrix_binning,
    generate_synthetic,
    integerize,
    itemize,
    itemize_multi,
    partition,
    preprocess_log_scale,
    transpose,
)
from .rules import LabeledDataset, mine_qcars, row_coverage

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _data_args(p):
    p.add_argument("input", help="delimited text file")
    p.add_argument("--delimiter", help="field separator (default: tab for .tsv/.data, else comma)")
    p.add_argument("--no-header", action="store_true", help="first line is data")
    p.add_argument("--missing", default="NA", help="missing-value sentinel (default: NA)")
    p.add_argument("--schema", help="JSON sidecar with column kinds, levels and eps")
    p.add_argument("--drop-col", action="append", default=[], help="column to ignore (repeatable)")
    p.add_argument("--encoding", default="utf-8")
    p.add_argument("--decimal", default=".", help="decimal mark of numeric cells")
    p.add_argument("--names", help="comma-separated column names (replaces the header)")


def _enum_args(p, eps=True):
    if eps:
        p.add_argument("--eps", type=float, help="eps for every numeric column")
        p.add_argument("--eps-list", help="comma-separated eps per column")
    p.add_argument("--min-row", type=int, default=1)
    p.add_argument("--min-col", type=int, default=1)


def _load(args, label=False):
    schema = Schema.load(args.schema) if args.schema else None
    label_col = getattr(args, "label_col", None)
    if label_col is not None and label_col.isdigit():
        label_col = int(label_col)
    data = parse_dataset(
        args.input,
        delimiter=args.delimiter,
        header=not args.no_header,
        missing=args.missing,
        schema=schema,
        label_col=label_col if label else None,
        drop_cols=args.drop_col,
        encoding=args.encoding,
        decimal=args.decimal,
        names=args.names.split(",") if getattr(args, "names", None) else None,
    )
    return data, schema or Schema()


def _eps(args, mat: NumericMatrix, schema: Schema):
    if args.eps_list:
        if args.eps is not None:
            raise UsageError("give --eps or --eps-list, not both")
        vals = tuple(float(v) for v in args.eps_list.split(","))
        if len(vals) != mat.n_cols:
            raise UsageError(f"--eps-list has {len(vals)} values for {mat.n_cols} columns")
        return vals
    return schema.eps_vector(mat, default=args.eps if args.eps is not None else 0.0)


def _out(path):
    return open(path, "w", encoding="utf-8") if path and path != "-" else sys.stdout


def cmd_enumerate(args) -> int:
    mat, schema = _load(args)
    params = EnumParams(
        min_row=args.min_row,
        min_col=args.min_col,
        eps=_eps(args, mat, schema),
        pn_inheritance=not args.no_pn,
        min_col_pruning=not args.no_prune,
        variant=args.variant,
    )
    sol, stats = enumerate_biclusters(mat, params)
    fh = _out(args.output)
    try:
        write_solution(sol, fh, mat, stats, fmt=args.format, include_runtime=args.runtime)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_verify(args) -> int:
    mat, schema = _load(args)
    sol = read_solution(args.solution)
    rep = verify(mat, sol, np.array(_eps(args, mat, schema)))
    print(rep.summary())
    return EXIT_OK if rep.ok else EXIT_VERIFY


def cmd_oracle(args) -> int:
    mat, schema = _load(args)
    params = EnumParams(min_row=args.min_row, min_col=args.min_col, eps=_eps(args, mat, schema))
    ref = brute_force(mat, params)
    if args.against:
        got = read_solution(args.against)
        missing = ref.as_set() - got.as_set()
        extra = got.as_set() - ref.as_set()
        print(f"oracle: {len(ref)}  solution: {len(got)}  missing: {len(missing)}  extra: {len(extra)}")
        return EXIT_OK if not missing and not extra else EXIT_VERIFY
    write_solution(ref, sys.stdout, mat, fmt=args.format)
    return EXIT_OK


def cmd_generate(args) -> int:
    cfg = SyntheticConfig(
        n=args.n,
        m=args.m,
        num_biclusters=args.num_biclusters,
        bic_rows=args.bic_rows,
        bic_cols=args.bic_cols,
        overlap=args.overlap,
        missing_pct=args.missing_pct,
        noise_sigma=args.sigma,
        seed=args.seed,
        value_range=tuple(args.value_range),
        noise_clip=args.noise_clip,
    )
    mat, truth = generate_synthetic(cfg)
    if args.scale:
        mat = integerize(mat, args.scale)
    write_matrix(mat, args.output)
    if args.truth:
        with open(args.truth, "w", encoding="utf-8") as fh:
            for b in truth.biclusters:
                fh.write(json.dumps({"rows": list(b.rows), "cols": list(b.cols)}) + "\n")
    return EXIT_OK


def cmd_bin(args) -> int:
    mat, _ = _load(args)
    spec = fit_matrix_binning(mat, BinRule.parse(args.rule), origin=args.origin, nice=args.nice)
    for name, cb in zip(mat.col_names, spec.columns):
        print(f"{name}\twidth={cb.width:g}\torigin={cb.origin:g}\tbins={cb.n_bins}", file=sys.stderr)
    if args.output:
        write_matrix(partition(mat, spec), args.output)
    return EXIT_OK


def cmd_itemize(args) -> int:
    mat, _ = _load(args)
    spec = fit_matrix_binning(mat, BinRule.parse(args.rule), origin=args.origin, nice=args.nice)
    binned = partition(mat, spec)
    items = itemize_multi(binned, mat, spec, delta=args.delta) if args.multi else itemize(binned, spec)
    write_matrix(items, args.output)
    return EXIT_OK


def cmd_prep(args) -> int:
    mat, _ = _load(args)
    steps = [args.log, args.integerize is not None, args.transpose]
    if sum(steps) != 1:
        raise UsageError("choose exactly one of --log, --integerize, --transpose")
    if args.log:
        out = preprocess_log_scale(mat, shift=args.shift, decimals=args.decimals)
    elif args.transpose:
        out = transpose(mat)
    else:
        out = integerize(mat, args.integerize)
    write_matrix(out, args.output)
    return EXIT_OK


def cmd_rules(args) -> int:
    ds, schema = _load(args, label=True)
    if not isinstance(ds, LabeledDataset):
        raise UsageError("--label-col is required")
    mat = ds.matrix
    if args.rule and (args.eps is not None or args.eps_list):
        raise UsageError("give a binning rule or explicit eps, not both")
    if args.rule:
        spec = fit_matrix_binning(mat, BinRule.parse(args.rule), origin=args.origin, nice=args.nice)
        eps = tuple(cb.width if k.is_numeric else 0.0 for cb, k in zip(spec.columns, mat.col_kinds))
    else:
        eps = _eps(args, mat, schema)
    sol, _ = enumerate_biclusters(mat, EnumParams(min_row=args.min_row, min_col=args.min_col, eps=eps))
    rules = mine_qcars(ds, sol, conf_min=args.conf_min, lift_dist_min=args.lift_dist)
    fh = _out(args.output)
    try:
        for r in rules:
            fh.write(json.dumps(r.as_record()) + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    print(
        f"biclusters: {len(sol)}  rules: {len(rules)}  row coverage: {row_coverage(ds, rules):.2f}%",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_compare(args) -> int:
    from .compare import run_compare

    mat, _ = _load(args)
    rep = run_compare(mat, BinRule.parse(args.rule), args.min_row, args.min_col, origin=args.origin, nice=args.nice)
    print(rep.summary())
    return EXIT_OK


def cmd_bench(args) -> int:
    from .compare import bench, format_bench

    if args.input:
        mat, schema = _load(args)
        eps = _eps(args, mat, schema)
    else:
        cfg = SyntheticConfig(
            n=1000, m=50, num_biclusters=10, bic_rows=50, bic_cols=8,
            seed=args.seed, value_range=(0.0, 10.0), noise_clip=3.0,
        )
        mat = integerize(generate_synthetic(cfg)[0], 1000)
        eps = args.eps if args.eps is not None else 300.0
    rows = bench(mat, EnumParams(min_row=args.min_row, min_col=args.min_col, eps=eps))
    print(format_bench(rows))
    peak = {r.variant: r.peak_bytes for r in rows}
    ok = peak["cvc_legacy"] >= peak["cvc3"]
    print(f"legacy peak >= cvc3 peak: {'yes' if ok else 'no'}")
    return EXIT_OK if ok else EXIT_VERIFY


def _origin_args(p):
    p.add_argument("--origin", type=float, help="first bin edge (default: column minimum)")
    p.add_argument("--nice", action="store_true", help="round widths to 1/2/3/5/10 x 10^k")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cvcbic", description="Maximal constant-values-on-columns biclusters.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("enumerate", help="enumerate maximal CVC biclusters")
    _data_args(p)
    _enum_args(p)
    p.add_argument("--variant", choices=VARIANTS, default="cvc3")
    p.add_argument("--no-pn", action="store_true", help="disable skip-column inheritance")
    p.add_argument("--no-prune", action="store_true", help="disable min-col pruning")
    p.add_argument("--format", choices=("jsonl", "table"), default="jsonl")
    p.add_argument("--runtime", action="store_true", help="include elapsed time in the footer")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", help="check a solution for correctness and maximality")
    _data_args(p)
    p.add_argument("solution")
    p.add_argument("--eps", type=float)
    p.add_argument("--eps-list")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exhaustive reference enumeration (small inputs)")
    _data_args(p)
    _enum_args(p)
    p.add_argument("--against", help="solution file to compare with")
    p.add_argument("--format", choices=("jsonl", "table"), default="jsonl")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("generate", help="synthetic matrix with planted biclusters")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--truth", help="write planted biclusters here")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--m", type=int, default=50)
    p.add_argument("--num-biclusters", type=int, default=10)
    p.add_argument("--bic-rows", type=int, default=50)
    p.add_argument("--bic-cols", type=int, default=8)
    p.add_argument("--overlap", type=float, default=0.2)
    p.add_argument("--missing-pct", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--value-range", type=float, nargs=2, default=(0.0, 1.0))
    p.add_argument("--noise-clip", type=float, help="clip noise at this many sigmas")
    p.add_argument("--scale", type=float, help="multiply by this and round to integers")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bin", help="fit equal-width bins and write bin indices")
    _data_args(p)
    p.add_argument("--rule", default="fd", help="scott, fd, sturges, sqrt, fixed_width:W, fixed_count:K")
    _origin_args(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bin)

    p = sub.add_parser("itemize", help="binary item matrix from binned values")
    _data_args(p)
    p.add_argument("--rule", default="fd")
    _origin_args(p)
    p.add_argument("--multi", action="store_true", help="also set items of nearby bins")
    p.add_argument("--delta", type=float, help="distance for --multi (default: floor((width-1)/2))")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_itemize)

    p = sub.add_parser("prep", help="log-scale, integerize or transpose a matrix")
    _data_args(p)
    p.add_argument("--log", action="store_true", help="log, min-max scale, integers in [0, 10^decimals]")
    p.add_argument("--shift", type=float, default=0.0)
    p.add_argument("--decimals", type=int, default=3)
    p.add_argument("--integerize", type=float, metavar="FACTOR")
    p.add_argument("--transpose", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_prep)

    p = sub.add_parser("rules", help="mine class association rules from biclusters")
    _data_args(p)
    _enum_args(p)
    p.add_argument("--label-col", required=True)
    p.add_argument("--rule", help="binning rule giving eps per numeric column")
    _origin_args(p)
    p.add_argument("--conf-min", type=float, default=0.95)
    p.add_argument("--lift-dist", type=float, default=0.2)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_rules)

    p = sub.add_parser("compare", help="binning-first versus online enumeration")
    _data_args(p)
    _enum_args(p, eps=False)
    p.add_argument("--rule", default="fd")
    _origin_args(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="runtime and peak memory of cvc3 vs the legacy variant")
    p.add_argument("input", nargs="?", help="matrix file (default: planted synthetic instance)")
    p.add_argument("--delimiter")
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--missing", default="NA")
    p.add_argument("--schema")
    p.add_argument("--drop-col", action="append", default=[])
    p.add_argument("--encoding", default="utf-8")
    p.add_argument("--decimal", default=".")
    p.add_argument("--eps", type=float)
    p.add_argument("--eps-list")
    p.add_argument("--min-row", type=int, default=50)
    p.add_argument("--min-col", type=int, default=1)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except (UsageError, ConfigError, SizeLimit) as e:
        print(f"cvcbic: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FileNotFoundError, IsADirectoryError, UnicodeDecodeError) as e:
        print(f"cvcbic: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
