"""Bound-table CSV emission and parsing.

Values are written with 12 significant digits using directed rounding that
only weakens the claim: alpha rounds down, lambda_lo rounds up and
lambda_hi rounds down, so each printed row is implied by the computed one.
"""

from __future__ import annotations

import csv
import io
from decimal import ROUND_CEILING, ROUND_FLOOR, ROUND_HALF_EVEN, Context, Decimal
from typing import IO, Iterable

from .scheme import BoundRow, BoundTable

HEADER = ("lambda_lo", "lambda_hi", "alpha", "status", "iterations", "cells")
PARTIAL_MARKER = "# partial"
DIGITS = 12


def format_decimal(x: float, rounding: str = ROUND_HALF_EVEN) -> str:
    d = Context(prec=DIGITS, rounding=rounding).plus(Decimal(x))
    if d == 0:
        return "0"
    return format(d.normalize(), "f")


def format_row(row: BoundRow) -> list[str]:
    lo = format_decimal(row.lambda_lo, ROUND_CEILING)
    hi = format_decimal(row.lambda_hi, ROUND_FLOOR)
    if Decimal(lo) > Decimal(hi):
        # degenerate box: no shrinking possible, use nearest
        lo = hi = format_decimal(row.lambda_lo)
    return [lo, hi, format_decimal(row.alpha, ROUND_FLOOR), row.status, str(row.iterations), str(row.cells)]


class TableWriter:
    """Streams rows; ``close(partial=True)`` appends the trailer for interrupted runs.

    The header goes out with the first row or on close, so a run that fails
    validation leaves no output.
    """

    def __init__(self, stream: IO[str]):
        self.stream = stream
        self.writer = csv.writer(stream, lineterminator="\n")
        self.count = 0
        self._started = False

    def _start(self) -> None:
        if not self._started:
            self.writer.writerow(HEADER)
            self._started = True

    def write(self, row: BoundRow) -> None:
        self._start()
        self.writer.writerow(format_row(row))
        self.count += 1
        self.stream.flush()

    def close(self, partial: bool = False, note: str = "") -> None:
        self._start()
        if partial:
            self.stream.write(f"{PARTIAL_MARKER}: {note or 'interrupted'}\n")
        self.stream.flush()


def table_to_csv(rows: Iterable[BoundRow]) -> str:
    buf = io.StringIO()
    w = TableWriter(buf)
    for r in rows:
        w.write(r)
    return buf.getvalue()


def parse_csv(text: str) -> tuple[BoundTable, bool]:
    """Parse a bound-table CSV; returns (table, partial flag)."""
    lines = text.splitlines()
    partial = any(line.startswith(PARTIAL_MARKER) for line in lines)
    body = [line for line in lines if line and not line.startswith("#")]
    reader = csv.reader(body)
    header = next(reader, None)
    if header is None or tuple(header) != HEADER:
        raise ValueError(f"unexpected header {header!r}")
    rows = []
    for rec in reader:
        lo, hi, alpha, status, its, cells = rec
        rows.append(BoundRow(float(lo), float(hi), float(alpha), status, int(its), int(cells)))
    return BoundTable(tuple(rows)), partial
