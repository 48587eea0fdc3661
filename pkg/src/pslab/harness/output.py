"""CSV persistence of experiment results."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .scenarios import ExperimentResult


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def emit_csv(result: ExperimentResult, path) -> Path:
    """Write ``result`` as CSV plus a ``<name>.meta.json`` provenance sidecar.

    The first line is the column header; data rows use ``repr`` for floats so
    identical runs give byte-identical files.
    """
    records = result.records()
    if not records:
        raise ValueError("result has no rows")
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(result.columns)
            for rec in records:
                w.writerow([_fmt(rec[c]) for c in result.columns])
        meta = path.with_name(path.name + ".meta.json")
        meta.write_text(json.dumps(result.provenance, indent=2, sort_keys=True, default=str) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc.strerror or exc}") from exc
    return path


def write_rows(rows: list[dict], path_or_file, columns=None) -> None:
    """Write a list of dicts as CSV to a path or an open text file."""
    columns = columns or list(rows[0])
    if hasattr(path_or_file, "write"):
        _write(rows, path_or_file, columns)
        return
    with open(path_or_file, "w", newline="") as fh:
        _write(rows, fh, columns)


def _write(rows, fh, columns):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
