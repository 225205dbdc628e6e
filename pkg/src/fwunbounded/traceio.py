"""Trace and summary CSV files.

Floats are written with ``repr`` (shortest round-trip form), so reading a
file back gives bit-identical values.
"""
from __future__ import annotations

import csv

from .solver import SolveTrace

TRACE_HEADER = ("k", "f", "gap", "lambda", "dist_px", "grad_norm")


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def write_trace_csv(trace: SolveTrace, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for r in trace.records:
            w.writerow([r.k, fmt(r.f_value), fmt(r.gap), fmt(r.lam), fmt(r.dist_px), fmt(r.grad_norm)])


def read_trace_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TRACE_HEADER:
            raise ValueError(f"unexpected trace header {reader.fieldnames}")
        return [{k: (int(v) if k == "k" else float(v)) for k, v in row.items()} for row in reader]


def write_rows(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])
