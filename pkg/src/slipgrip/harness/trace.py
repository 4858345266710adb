"""Recorded simulation signals, event log and their CSV/JSON serialization."""

import csv
import json
import math
from pathlib import Path

import numpy as np

#: Recorded channels, in export order. ``mode`` is an index into MODE_CODES.
COLUMNS = (
    "t",
    # commands and inner loop
    "f_d", "f_c", "v_t", "f_n",
    # drive train
    "x1", "v1", "x2", "v2",
    # true object motion relative to the gripper
    "px", "py", "theta", "vx", "vy", "omega", "stuck",
    # arm pose
    "arm_z", "psi",
    # averaged sensing in the middle frame
    "fbar_x", "fbar_y", "fbar_tau", "fbar_n", "vbar_x", "vbar_y", "vbar_omega",
    # integrated sensed slip and outer controller internals
    "p_est", "theta_est", "f_nc", "mode",
    # true per-finger friction and support reaction
    "fric0_x", "fric0_y", "fric0_tau", "fric1_x", "fric1_y", "fric1_tau", "f_support",
)

MODE_CODES = ("idle", "force", "avoidance", "linear", "rotational", "hinge", "explore")


class Trace:
    """Column store of uniformly sampled signals plus an event log."""

    def __init__(self, columns=None, events=None, metadata=None):
        if columns is None:
            columns = {c: np.empty(0) for c in COLUMNS}
        self.columns = {c: np.asarray(columns[c], dtype=float) for c in COLUMNS if c in columns}
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError("trace columns differ in length")
        self.events = list(events or [])
        self.metadata = dict(metadata or {})

    @classmethod
    def from_columns(cls, **columns):
        """Build a trace from a subset of channels (others filled with zeros)."""
        n = len(columns["t"])
        full = {c: np.asarray(columns.get(c, np.zeros(n)), dtype=float) for c in COLUMNS}
        return cls(full)

    def __len__(self):
        return len(self.columns["t"])

    def __getitem__(self, name):
        return self.columns[name]

    def events_of(self, kind):
        return [e for e in self.events if e["kind"] == kind]

    def rows(self, decimation=1):
        if decimation < 1:
            raise ValueError("decimation must be >= 1")
        cols = [self.columns[c][::decimation] for c in COLUMNS]
        return zip(*cols)

    def decimated(self, decimation):
        return Trace({c: v[::decimation] for c, v in self.columns.items()},
                     self.events, dict(self.metadata, decimation=decimation))


def _fmt(x):
    return repr(float(x))


def export_trace(trace, fmt, path, decimation=1):
    """Write ``trace`` as ``csv`` or ``json``; returns the path."""
    path = Path(path)
    try:
        if fmt == "csv":
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(COLUMNS)
                for row in trace.rows(decimation):
                    w.writerow([_fmt(x) for x in row])
        elif fmt == "json":
            tr = trace if decimation == 1 else trace.decimated(decimation)
            doc = {
                "metadata": tr.metadata,
                "columns": list(COLUMNS),
                "data": {c: [float(x) for x in tr.columns[c]] for c in COLUMNS},
                "events": tr.events,
            }
            with open(path, "w") as fh:
                json.dump(doc, fh, allow_nan=True)
        else:
            raise ValueError(f"unknown format {fmt!r}; use csv or json")
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc
    return path


def import_trace(path, fmt=None):
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".").lower()
    try:
        if fmt == "csv":
            with open(path, newline="") as fh:
                reader = csv.reader(fh)
                header = next(reader, None)
                if header is None or tuple(header) != COLUMNS:
                    raise ValueError(f"{path}: unexpected trace header")
                data = [[float(x) for x in row] for row in reader if row]
            arr = np.array(data, dtype=float).reshape(-1, len(COLUMNS))
            return Trace({c: arr[:, i] for i, c in enumerate(COLUMNS)})
        if fmt == "json":
            with open(path) as fh:
                doc = json.load(fh)
            return Trace(doc["data"], doc.get("events"), doc.get("metadata"))
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc
    raise ValueError(f"unknown format {fmt!r}; use csv or json")


def expected_rows(n, decimation):
    return math.ceil(n / decimation)
