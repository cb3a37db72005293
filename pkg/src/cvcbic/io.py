"""Reading delimited datasets and writing matrices and solutions."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Mapping

import numpy as np

from .core import Bicluster, BiclusterSolution, ColumnKind, DataError, EnumParams, NumericMatrix, coverage
from .enumerator import EnumStats
from .rules import LabeledDataset


@dataclass
class ColumnSchema:
    kind: ColumnKind | None = None
    levels: tuple[str, ...] | None = None
    eps: float | None = None


@dataclass
class Schema:
    """Optional per-column overrides loaded from a JSON sidecar.

    Format: ``{"columns": {"Height": {"kind": "continuous", "eps": 0.08},
    "SocialClass": {"kind": "ordinal", "levels": ["A", "B", "C"]}}}``.
    """

    columns: dict[str, ColumnSchema] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: Mapping) -> "Schema":
        cols = raw.get("columns", raw)
        out = {}
        for name, spec in cols.items():
            try:
                kind = ColumnKind(spec["kind"]) if "kind" in spec else None
            except ValueError:
                raise DataError(f"schema: unknown kind {spec['kind']!r} for column {name!r}") from None
            levels = tuple(str(v) for v in spec["levels"]) if "levels" in spec else None
            eps = float(spec["eps"]) if "eps" in spec else None
            out[str(name)] = ColumnSchema(kind, levels, eps)
        return cls(out)

    @classmethod
    def load(cls, path) -> "Schema":
        with open(path, encoding="utf-8") as fh:
            try:
                return cls.from_dict(json.load(fh))
            except json.JSONDecodeError as e:
                raise DataError(f"schema {path}: {e}") from None

    def to_dict(self) -> dict:
        cols = {}
        for name, c in self.columns.items():
            d = {}
            if c.kind is not None:
                d["kind"] = c.kind.value
            if c.levels is not None:
                d["levels"] = list(c.levels)
            if c.eps is not None:
                d["eps"] = c.eps
            cols[name] = d
        return {"columns": cols}

    def eps_vector(self, mat: NumericMatrix, default: float | None = None) -> tuple[float, ...]:
        """Per-column eps: schema value, else ``default``, else 0 for categorical columns."""
        out = []
        for j, name in enumerate(mat.col_names):
            c = self.columns.get(name)
            if c is not None and c.eps is not None:
                out.append(c.eps)
            elif not mat.col_kinds[j].is_numeric:
                out.append(0.0)
            elif default is not None:
                out.append(float(default))
            else:
                raise DataError(f"no eps for column {name!r}")
        return tuple(out)


def _to_float(cell: str, decimal: str) -> float:
    if decimal != ".":
        cell = cell.replace(decimal, ".")
    return float(cell)


def _delimiter_for(path: Path, delimiter: str | None) -> str:
    if delimiter is not None:
        return delimiter
    return "\t" if path.suffix.lower() in (".tsv", ".tab", ".data") else ","


def parse_dataset(
    path,
    delimiter: str | None = None,
    header: bool = True,
    missing: str = "NA",
    schema: Schema | Mapping | str | Path | None = None,
    label_col: str | int | None = None,
    drop_cols: Iterable[str | int] = (),
    encoding: str = "utf-8",
    decimal: str = ".",
    names: list[str] | None = None,
) -> NumericMatrix | LabeledDataset:
    """Load a delimited text file.

    Columns whose non-missing cells all parse as numbers become discrete
    (all integers) or continuous; anything else is nominal with codes given
    by the sorted distinct values. ``schema`` overrides kinds and level
    order; ``names`` overrides the header. With ``label_col`` the result
    is a :class:`LabeledDataset`.
    """
    path = Path(path)
    delim = _delimiter_for(path, delimiter)
    if isinstance(schema, (str, Path)):
        schema = Schema.load(schema)
    elif isinstance(schema, Mapping):
        schema = Schema.from_dict(schema)
    schema = schema or Schema()

    with open(path, encoding=encoding, newline="") as fh:
        rows = [r for r in csv.reader(fh, delimiter=delim)]
    rows = [[c.strip() for c in r] for r in rows if any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"{path}: no data")
    if header:
        header_names, rows = rows[0], rows[1:]
    else:
        header_names = [f"y{j + 1}" for j in range(len(rows[0]))]
    if names is not None:
        if len(names) != len(header_names):
            raise DataError(f"{path}: {len(names)} names given for {len(header_names)} fields")
        header_names = list(names)
    names = header_names
    width = len(names)
    first_line = 2 if header else 1
    for i, r in enumerate(rows):
        if len(r) != width:
            raise DataError(f"{path}: line {i + first_line} has {len(r)} fields, expected {width}")
    if not rows:
        raise DataError(f"{path}: header only, no data rows")

    def col_index(c) -> int:
        if isinstance(c, int):
            if not 0 <= c < width:
                raise DataError(f"column index {c} out of range")
            return c
        if c not in names:
            raise DataError(f"{path}: no column named {c!r}")
        return names.index(c)

    label_idx = None if label_col is None else col_index(label_col)
    dropped = {col_index(c) for c in drop_cols}
    keep = [j for j in range(width) if j != label_idx and j not in dropped]

    n = len(rows)
    values = np.zeros((n, len(keep)))
    miss = np.zeros((n, len(keep)), dtype=bool)
    kinds, levels = [], {}
    for out_j, j in enumerate(keep):
        name = names[j]
        cells = [r[j] for r in rows]
        m_col = np.array([c == missing or c == "" for c in cells])
        miss[:, out_j] = m_col
        override = schema.columns.get(name, ColumnSchema())
        present = [c for c, m in zip(cells, m_col) if not m]
        kind = override.kind
        numeric = None
        if kind is None or kind.is_numeric:
            try:
                numeric = [_to_float(c, decimal) for c in present]
            except ValueError:
                if kind is not None:
                    bad = next(i for i, c in enumerate(cells) if not m_col[i] and not _parses(c, decimal))
                    raise DataError(
                        f"{path}: line {bad + first_line}, column {name!r}: cannot parse {cells[bad]!r}"
                    ) from None
        if numeric is not None and any(math.isnan(v) for v in numeric):
            bad = next(i for i, c in enumerate(cells) if not m_col[i] and math.isnan(_to_float(c, decimal)))
            raise DataError(f"{path}: line {bad + first_line}, column {name!r}: NaN cell; use {missing!r}")
        if numeric is not None:
            if kind is None:
                kind = ColumnKind.DISCRETE if all(v.is_integer() for v in numeric) else ColumnKind.CONTINUOUS
            values[~m_col, out_j] = numeric
        else:
            kind = kind or ColumnKind.NOMINAL
            labs = override.levels or tuple(sorted(set(present)))
            code = {lab: k for k, lab in enumerate(labs)}
            try:
                values[~m_col, out_j] = [code[c] for c in present]
            except KeyError as e:
                raise DataError(f"{path}: column {name!r}: value {e.args[0]!r} not among schema levels") from None
            levels[out_j] = labs
        kinds.append(kind)

    mat = NumericMatrix(values, miss, col_kinds=kinds, col_names=[names[j] for j in keep], levels=levels)
    if label_idx is None:
        return mat
    labels = [r[label_idx] for r in rows]
    return LabeledDataset(mat, np.array(labels, dtype=object), names[label_idx])


def parse_geo_soft(path, value_cols_from: int = 2, missing: str = "null") -> NumericMatrix:
    """Expression table of a GEO dataset SOFT file (between the table markers).

    The first ``value_cols_from`` columns (probe id, gene symbol) are skipped.
    """
    names, rows, inside = None, [], False
    opener = _open_maybe_gz(path)
    with opener as fh:
        for line in fh:
            line = line.rstrip("\r\n")
            if line.startswith("!dataset_table_begin"):
                inside = True
                continue
            if line.startswith("!dataset_table_end"):
                break
            if not inside:
                continue
            cells = line.split("\t")
            if names is None:
                names = cells[value_cols_from:]
                continue
            rows.append(cells[value_cols_from:])
    if names is None:
        raise DataError(f"{path}: no dataset table found")
    values = np.zeros((len(rows), len(names)))
    miss = np.zeros(values.shape, dtype=bool)
    for i, r in enumerate(rows):
        if len(r) != len(names):
            raise DataError(f"{path}: table row {i + 1} has {len(r)} values, expected {len(names)}")
        for j, c in enumerate(r):
            if c in (missing, ""):
                miss[i, j] = True
            else:
                try:
                    values[i, j] = float(c)
                except ValueError:
                    raise DataError(f"{path}: table row {i + 1}, column {names[j]!r}: cannot parse {c!r}") from None
    return NumericMatrix(values, miss, col_names=names)


def _open_maybe_gz(path):
    path = Path(path)
    if path.suffix == ".gz":
        import gzip

        return gzip.open(path, "rt", encoding="utf-8", errors="replace")
    return open(path, encoding="utf-8", errors="replace")


def _parses(cell: str, decimal: str) -> bool:
    try:
        _to_float(cell, decimal)
        return True
    except ValueError:
        return False


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() and abs(v) < 2**53 else repr(float(v))


def write_matrix(mat: NumericMatrix, path, delimiter: str = ",", missing: str = "NA", schema_path=None) -> None:
    """Write ``mat`` as delimited text; categorical cells are written as labels.

    With ``schema_path`` a sidecar recording column kinds and level order is
    written too, so that :func:`parse_dataset` restores the matrix exactly.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        w.writerow(mat.col_names)
        for i in range(mat.n_rows):
            row = []
            for j in range(mat.n_cols):
                if mat.missing[i, j]:
                    row.append(missing)
                elif j in mat.levels:
                    row.append(mat.levels[j][int(mat.values[i, j])])
                else:
                    row.append(_fmt(mat.values[i, j]))
            w.writerow(row)
    if schema_path is not None:
        cols = {}
        for j, name in enumerate(mat.col_names):
            cols[name] = ColumnSchema(mat.col_kinds[j], mat.levels.get(j))
        with open(schema_path, "w", encoding="utf-8") as fh:
            json.dump(Schema(cols).to_dict(), fh, indent=2)
            fh.write("\n")


# -- solutions ---------------------------------------------------------------


def bicluster_record(mat: NumericMatrix | None, bic: Bicluster) -> dict:
    rec = {"rows": list(bic.rows), "cols": list(bic.cols)}
    if mat is not None:
        sub = mat.values[np.ix_(bic.rows, bic.cols)]
        rec["ranges"] = [[_num(lo), _num(hi)] for lo, hi in zip(sub.min(axis=0), sub.max(axis=0))]
    return rec


def _num(v):
    v = float(v)
    return int(v) if v.is_integer() and abs(v) < 2**53 else v


def _params_dict(params: EnumParams | None) -> dict | None:
    if params is None:
        return None
    d = {
        "min_row": params.min_row,
        "min_col": params.min_col,
        "eps": list(params.eps) if isinstance(params.eps, tuple) else params.eps,
        "variant": params.variant,
        "pn_inheritance": params.pn_inheritance,
        "min_col_pruning": params.min_col_pruning,
    }
    return d


def write_solution(
    sol: BiclusterSolution,
    out: IO[str] | str | Path,
    mat: NumericMatrix | None = None,
    stats: EnumStats | None = None,
    fmt: str = "jsonl",
    include_runtime: bool = False,
) -> None:
    """Write one record per bicluster in row-set order, between a header and a footer.

    ``jsonl`` writes one JSON object per line; ``table`` writes aligned text.
    Runtime is left out unless ``include_runtime`` so reruns are byte-identical.
    """
    if fmt not in ("jsonl", "table"):
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8") as fh:
            return write_solution(sol, fh, mat, stats, fmt, include_runtime)

    bics = list(sol)
    footer = {"count": len(bics), "coverage": coverage(bics)}
    if stats is not None:
        footer.update(stats.as_dict(timing=include_runtime))
    if fmt == "jsonl":
        head = {"type": "header", "n_biclusters": len(bics), "params": _params_dict(sol.params)}
        if mat is not None:
            head["shape"] = list(mat.shape)
        out.write(json.dumps(head, sort_keys=True) + "\n")
        for b in bics:
            out.write(json.dumps(bicluster_record(mat, b)) + "\n")
        out.write(json.dumps({"type": "footer", **footer}, sort_keys=True) + "\n")
        return
    out.write(f"# {len(bics)} biclusters\n")
    for k, b in enumerate(bics, 1):
        line = f"{k:>6}  rows={_span(b.rows)}  cols={_span(b.cols)}"
        if mat is not None:
            rec = bicluster_record(mat, b)
            line += "  ranges=" + " ".join(f"[{lo},{hi}]" for lo, hi in rec["ranges"])
        out.write(line + "\n")
    for k in sorted(footer):
        out.write(f"# {k}: {footer[k]}\n")


def _span(idx) -> str:
    return "{" + ",".join(str(i) for i in idx) + "}"


def read_solution(src: IO[str] | str | Path) -> BiclusterSolution:
    """Read biclusters back from a ``jsonl`` solution file."""
    if isinstance(src, (str, Path)):
        with open(src, encoding="utf-8") as fh:
            return read_solution(fh)
    sol = BiclusterSolution()
    for lineno, line in enumerate(src, 1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise DataError(f"line {lineno}: {e}") from None
        if "type" in rec:
            if rec["type"] == "header" and rec.get("params"):
                p = dict(rec["params"])
                if isinstance(p.get("eps"), list):
                    p["eps"] = tuple(p["eps"])
                sol.params = EnumParams(**p)
            continue
        sol.add(Bicluster(rec["rows"], rec["cols"]))
    return sol
