"""Time series of soliton parameters with attached diagnostic columns."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    a: float
    c: float
    extra: dict = field(default_factory=dict)


class Trajectory:
    """Columnar ``(t, a, c)`` record plus named extra columns.

    ``failure`` holds the time at which the producing computation stopped
    early (``None`` for a complete trajectory).
    """

    def __init__(self, t=(), a=(), c=(), columns=None, failure=None, meta=None):
        self.t = np.asarray(t, dtype=float)
        self.a = np.asarray(a, dtype=float)
        self.c = np.asarray(c, dtype=float)
        if not (self.t.shape == self.a.shape == self.c.shape):
            raise ValueError("t, a, c must have equal length")
        self.columns = {k: np.asarray(v) for k, v in (columns or {}).items()}
        for k, v in self.columns.items():
            if v.shape[0] != self.t.shape[0]:
                raise ValueError(f"column {k!r} has wrong length")
        self.failure = failure
        self.meta = dict(meta or {})

    def __len__(self):
        return self.t.shape[0]

    def __getitem__(self, i) -> TrajectorySample:
        extra = {k: v[i].item() for k, v in self.columns.items()}
        return TrajectorySample(float(self.t[i]), float(self.a[i]), float(self.c[i]), extra)

    def __iter__(self) -> Iterator[TrajectorySample]:
        return (self[i] for i in range(len(self)))

    @property
    def complete(self) -> bool:
        return self.failure is None

    def column_names(self):
        return ["t", "a", "c", *self.columns]

    def to_rows(self):
        cols = [self.t, self.a, self.c, *self.columns.values()]
        return [list(r) for r in zip(*cols)]

    def to_csv(self, path, names=None) -> None:
        """Write a CSV; ``names`` optionally renames the header entries."""
        header = list(names) if names is not None else self.column_names()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in self.to_rows():
                w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                            for v in row])
