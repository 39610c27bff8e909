"""Deterministic CSV/JSON writers.

Numbers are written with 9 significant digits and LF line endings; every
file is written to a temporary sibling and renamed into place.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

FLOAT_FMT = "%.9g"


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return FLOAT_FMT % v
    return str(v)


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _csv_text(header, rows, comment: str | None = None) -> str:
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows, comment: str | None = None) -> Path:
    return atomic_write_text(path, _csv_text(header, rows, comment))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        # JSON has no inf/nan
        return v if math.isfinite(v) else str(v)
    if hasattr(obj, "as_tuple"):
        return list(obj.as_tuple())
    if hasattr(obj, "value"):
        return obj.value
    return obj


def write_json(path, obj) -> Path:
    return atomic_write_text(path, json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


# -- trajectories -----------------------------------------------------------------

TRAJECTORY_COLUMNS = ("t", "x_I", "y_I", "x_D", "y_D", "phase", "phi", "psi", "running_min_gap")


def trajectory_rows(tr):
    for t, s, ph, phi, psi, g in zip(tr.times, tr.states, tr.phases, tr.intruder_headings,
                                     tr.defender_headings, tr.running_min_gap):
        yield (t, *s.as_tuple(), ph.value, phi, psi, g)


def write_trajectory(path, tr) -> Path:
    return write_csv(path, TRAJECTORY_COLUMNS, trajectory_rows(tr))


def write_min_gap(path, tr) -> Path:
    return write_csv(path, ("t", "min_gap"), zip(tr.times, tr.running_min_gap))


def read_trajectory(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


# -- grids and polylines ----------------------------------------------------------

def grid_comment(bounds, resolution) -> str:
    return "bounds=" + ",".join(fmt(float(b)) for b in bounds) + " resolution=%dx%d" % tuple(resolution)


def write_matrix(path, M, bounds, resolution) -> Path:
    """Matrix CSV: first column ``y`` (ascending), header row holds the ``x`` values."""
    M = np.asarray(M)
    x0, y0, x1, y1 = bounds
    xs = np.linspace(x0, x1, M.shape[1])
    ys = np.linspace(y0, y1, M.shape[0])
    header = ["y"] + [fmt(float(x)) for x in xs]
    rows = ([float(y)] + row for y, row in zip(ys, M.tolist()))
    return write_csv(path, header, rows, grid_comment(bounds, resolution))


def read_matrix(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(xs, ys, M)`` from a matrix CSV."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if not ln.startswith("#")]
    xs = np.array([float(v) for v in lines[0].split(",")[1:]])
    body = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]]).reshape(-1, xs.size + 1)
    return xs, body[:, 0], body[:, 1:]


def write_polylines(path, polylines) -> Path:
    rows = ((k, x, y) for k, line in enumerate(polylines) for x, y in np.asarray(line))
    return write_csv(path, ("polyline_id", "x", "y"), rows)


def read_polylines(path) -> list[np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    out: dict[int, list] = {}
    for r in rows:
        out.setdefault(int(r["polyline_id"]), []).append((float(r["x"]), float(r["y"])))
    return [np.array(out[k]) for k in sorted(out)]
