"""CSV emitters.  Floats are written with ``repr`` so a re-parse is exact."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, Sequence


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return "nan" if math.isnan(x) else repr(x)
    if hasattr(x, "item"):  # numpy scalar
        return _fmt(x.item())
    return str(x)


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    Path(path).write_text(to_csv(header, list(rows)))


def parse_value(s: str):
    try:
        return int(s)
    except ValueError:
        return float(s)


def read_csv(path: str | Path) -> tuple[list[str], list[list]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[parse_value(x) for x in r] for r in rows[1:]]
