"""Snapshot stream writers and readers.

CSV: header ``t, x_0, ..., x_{n-1}``, one row per snapshot.

Binary: a 32-byte header (8-byte magic ``b"PMKDVSNP"``, ``n`` as
little-endian uint64, ``l`` and ``dt`` as little-endian float64) followed
by records of ``n + 1`` little-endian float64 values ``(t, u_0, ..., u_{n-1})``.
"""
from __future__ import annotations

import csv
import struct

import numpy as np

MAGIC = b"PMKDVSNP"
_HEADER = struct.Struct("<8sQdd")
assert _HEADER.size == 32


def _fmt(v) -> str:
    return repr(float(v))


class CSVSnapshotWriter:
    """Snapshot sink writing one CSV row per call."""

    def __init__(self, path, grid):
        self.grid = grid
        self._fh = open(path, "w", newline="")
        self._w = csv.writer(self._fh)
        self._w.writerow(["t", *(f"x_{j}" for j in range(grid.n))])

    def __call__(self, t, u):
        self._w.writerow([_fmt(t), *map(_fmt, u)])

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class BinarySnapshotWriter:
    """Snapshot sink writing the compact binary format."""

    def __init__(self, path, grid, dt: float):
        self.grid = grid
        self._fh = open(path, "wb")
        self._fh.write(_HEADER.pack(MAGIC, grid.n, grid.half_length, float(dt)))

    def __call__(self, t, u):
        rec = np.empty(self.grid.n + 1, dtype="<f8")
        rec[0] = t
        rec[1:] = u
        self._fh.write(rec.tobytes())

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_binary_snapshots(path):
    """Return ``(header, times, fields)`` from a binary snapshot file."""
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, n, ell, dt = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    body = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if body.size % (n + 1):
        raise ValueError(f"{path}: truncated record")
    body = body.reshape(-1, n + 1)
    return {"n": n, "half_length": ell, "dt": dt}, body[:, 0].copy(), body[:, 1:].copy()


def read_csv_snapshots(path):
    """Return ``(times, fields)`` from a CSV snapshot file."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1:]


def write_rows(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
