"""EPF1 snapshot format: layout, round-trips, corruption handling, golden file."""

import struct
from pathlib import Path

import numpy as np
import pytest

from epalpha.grid import TorusGrid, VelocityField
from epalpha.snapshot import (
    HEADER_SIZE,
    SnapshotError,
    read_snapshot,
    write_snapshot,
)

from conftest import random_field

GOLDEN = Path(__file__).parent / "golden" / "ramp_d2_n8.epf1"


def golden_field():
    """Deterministic dyadic-rational field: exactly representable samples."""
    g = TorusGrid(2, 8)
    data = np.zeros((2, 8, 8))
    for c in range(2):
        for i in range(8):
            for j in range(8):
                data[c, i, j] = (c + 1) * (i * 8 + j) / 1024.0 - 0.5
    return VelocityField(g, data)


class TestRoundTrip:
    def test_bit_exact(self, tmp_path, g2):
        u = random_field(g2, 1)
        path = tmp_path / "f.epf1"
        write_snapshot(u, 0.125, 0.5, path)
        back, t, alpha = read_snapshot(path)
        assert np.array_equal(back.data, u.data)
        assert t == 0.125 and alpha == 0.5
        assert back.grid == g2

    def test_file_size(self, tmp_path, g2):
        u = random_field(g2, 2)
        path = tmp_path / "f.epf1"
        write_snapshot(u, 0.0, 0.0, path)
        assert path.stat().st_size == HEADER_SIZE + 8 * 2 * g2.n ** 2

    def test_d1_roundtrip(self, tmp_path, g1):
        u = random_field(g1, 3)
        path = tmp_path / "f.epf1"
        write_snapshot(u, 1.0, 1.0, path)
        back, _, _ = read_snapshot(path)
        assert np.array_equal(back.data, u.data)


class TestCorruption:
    def _write(self, tmp_path, name="f.epf1"):
        u = golden_field()
        path = tmp_path / name
        write_snapshot(u, 0.25, 0.5, path)
        return path

    def test_truncated_file(self, tmp_path):
        path = self._write(tmp_path)
        raw = path.read_bytes()
        path.write_bytes(raw[:-8])
        with pytest.raises(SnapshotError, match="size mismatch"):
            read_snapshot(path)

    def test_truncated_header(self, tmp_path):
        path = self._write(tmp_path)
        path.write_bytes(path.read_bytes()[:10])
        with pytest.raises(SnapshotError, match="truncated header"):
            read_snapshot(path)

    def test_bad_magic_leaves_file_untouched(self, tmp_path):
        path = self._write(tmp_path)
        raw = bytearray(path.read_bytes())
        raw[:4] = b"NOPE"
        path.write_bytes(raw)
        before = path.read_bytes()
        with pytest.raises(SnapshotError, match="bad magic"):
            read_snapshot(path)
        assert path.read_bytes() == before

    def test_bad_version(self, tmp_path):
        path = self._write(tmp_path)
        raw = bytearray(path.read_bytes())
        struct.pack_into("<I", raw, 4, 9)
        path.write_bytes(raw)
        with pytest.raises(SnapshotError, match="version"):
            read_snapshot(path)

    def test_bad_n(self, tmp_path):
        path = self._write(tmp_path)
        raw = bytearray(path.read_bytes())
        struct.pack_into("<I", raw, 12, 7)
        path.write_bytes(raw)
        with pytest.raises(SnapshotError, match="invalid points-per-axis"):
            read_snapshot(path)


class TestGoldenFile:
    def test_write_matches_committed_vector(self, tmp_path):
        # the committed golden file pins the byte layout across platforms;
        # samples are dyadic rationals so no libm variation enters
        path = tmp_path / "g.epf1"
        write_snapshot(golden_field(), 0.25, 0.5, path)
        assert path.read_bytes() == GOLDEN.read_bytes()

    def test_read_golden(self):
        u, t, alpha = read_snapshot(GOLDEN)
        assert t == 0.25 and alpha == 0.5
        assert np.array_equal(u.data, golden_field().data)

    def test_golden_header_fields(self):
        raw = GOLDEN.read_bytes()
        assert raw[:4] == b"EPF1"
        version, d, n = struct.unpack_from("<3I", raw, 4)
        assert (version, d, n) == (1, 2, 8)
        assert len(raw) == HEADER_SIZE + 8 * 2 * 8 ** 2
