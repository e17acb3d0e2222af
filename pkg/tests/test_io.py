import numpy as np
import pytest

from pmkdv.io import (BinarySnapshotWriter, CSVSnapshotWriter, read_binary_snapshots,
                      read_csv_snapshots)
from pmkdv.spectral import Grid


def _fields():
    rng = np.random.default_rng(3)
    return [0.0, 0.5, 1.0], rng.standard_normal((3, 16))


def test_binary_round_trip(tmp_path):
    g = Grid(16, 2.0)
    t, U = _fields()
    with BinarySnapshotWriter(tmp_path / "s.bin", g, 1e-3) as w:
        for ti, u in zip(t, U):
            w(ti, u)
    raw = (tmp_path / "s.bin").read_bytes()
    assert raw[:8] == b"PMKDVSNP" and len(raw) == 32 + 3 * 17 * 8
    head, tt, UU = read_binary_snapshots(tmp_path / "s.bin")
    assert head == {"n": 16, "half_length": 2.0, "dt": 1e-3}
    assert np.array_equal(tt, t) and np.array_equal(UU, U)


def test_binary_rejects_bad_magic(tmp_path):
    (tmp_path / "x.bin").write_bytes(b"NOTMAGIC" + bytes(24))
    with pytest.raises(ValueError):
        read_binary_snapshots(tmp_path / "x.bin")


def test_csv_round_trip_is_exact(tmp_path):
    g = Grid(16, 2.0)
    t, U = _fields()
    with CSVSnapshotWriter(tmp_path / "s.csv", g) as w:
        for ti, u in zip(t, U):
            w(ti, u)
    header = (tmp_path / "s.csv").read_text().splitlines()[0]
    assert header.split(",")[:2] == ["t", "x_0"]
    tt, UU = read_csv_snapshots(tmp_path / "s.csv")
    assert np.array_equal(tt, t) and np.array_equal(UU, U)
