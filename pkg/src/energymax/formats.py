"""CSV and JSON input/output for point sets, measures and run records.

Point-set CSV: header row ``x1,...,xn[,weight]``, one point per row, UTF-8,
``.`` as the decimal separator.  The weight column is optional; when present
the file describes a signed atomic measure.
"""

from __future__ import annotations

import csv
import json
import sys

import numpy as np


def read_points_csv(path):
    """Read a point-set CSV; returns (points, weights) with weights possibly None."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise ValueError(f"{path}: empty file, expected a header x1,...,xn[,weight]")
        header = [h.strip() for h in header]
        has_weight = header[-1] == "weight"
        coord_names = header[:-1] if has_weight else header
        expected = [f"x{i + 1}" for i in range(len(coord_names))]
        if coord_names != expected:
            raise ValueError(
                f"{path}: header must be x1,...,xn[,weight], got {header}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}"
                )
            rows.append([float(v) for v in row])
    if not rows:
        raise ValueError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=np.float64)
    if has_weight:
        return data[:, :-1], data[:, -1]
    return data, None


def write_points_csv(path, points, weights=None):
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    header = [f"x{i + 1}" for i in range(points.shape[1])]
    if weights is not None:
        header.append("weight")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i, row in enumerate(points):
            out = [repr(float(v)) for v in row]
            if weights is not None:
                out.append(repr(float(weights[i])))
            writer.writerow(out)


def to_jsonable(obj):
    """Recursively convert numpy scalars/arrays so json.dumps accepts them."""
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def dump_json(record: dict, path: str | None) -> None:
    """Write the record as canonical JSON (sorted keys) to path or stdout."""
    text = json.dumps(to_jsonable(record), indent=2, sort_keys=True)
    if path in (None, "-"):
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def dump_csv(rows: list[dict], path: str | None) -> None:
    """Write a flat table (list of dicts with shared keys) as CSV."""
    if not rows:
        raise ValueError("no rows to write")
    fields = list(rows[0].keys())
    out = sys.stdout if path in (None, "-") else open(path, "w", newline="", encoding="utf-8")
    try:
        writer = csv.DictWriter(out, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: to_jsonable(v) for k, v in row.items()})
    finally:
        if out is not sys.stdout:
            out.close()
