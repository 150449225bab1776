"""CSV and JSON writers for curves, zero sets and match reports.

Numbers are written with a fixed number of significant digits so repeated
runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .critical import CurveSegment
from .zeros import MatchReport, ZeroSet

CSV_DIGITS = 15
CURVE_COLUMNS = ["eps", "r", "im_h", "kind"]
ZERO_COLUMNS = ["re", "im", "residual", "source", "n"]


def _cell(v, digits=CSV_DIGITS):
    if isinstance(v, float):
        return f"{v:.{digits}e}"
    return str(v)


def _write_rows(path, columns, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(row[c]) for c in columns])
    return path


def _write_json(path, doc):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def curve_to_csv(curve: CurveSegment, path):
    return _write_rows(path, CURVE_COLUMNS, curve.rows())


def curve_to_json(curve: CurveSegment, path):
    return _write_json(path, {"kind": curve.kind, "points": curve.rows(), "failures": curve.failures})


def zeros_to_csv(zs: ZeroSet, path):
    return _write_rows(path, ZERO_COLUMNS, zs.rows())


def zeros_to_json(zs: ZeroSet, path):
    return _write_json(path, {
        "n": zs.n,
        "source": zs.source,
        "region": {"delta": zs.region.delta, "c_max": zs.region.c_max},
        "zeros": zs.rows(),
        "unresolved": zs.unresolved,
        "log": zs.log,
    })


def match_to_json(report: MatchReport, path):
    return _write_json(path, report.to_dict())


def read_csv(path):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"missing input file: {path}")
    with path.open(newline="") as fh:
        return list(csv.DictReader(fh))
