"""Binary field snapshot format EPF1.

Layout (little-endian): magic "EPF1", version u32 = 1, d u32, n u32,
length f64, time f64, alpha f64, then d component blocks of n^d f64
samples each, row-major with the last axis fastest.  Total size is
exactly 40 + 8 * d * n^d bytes, and write-then-read is bit-exact.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .grid import TorusGrid, VelocityField

MAGIC = b"EPF1"
VERSION = 1
_HEADER = struct.Struct("<4s3I3d")
HEADER_SIZE = _HEADER.size  # 40


class SnapshotError(ValueError):
    """Raised on a malformed snapshot file, naming the violated invariant."""


def write_snapshot(u: VelocityField, t: float, alpha: float, path):
    g = u.grid
    header = _HEADER.pack(MAGIC, VERSION, g.d, g.n, g.length, float(t), float(alpha))
    body = np.ascontiguousarray(u.data, dtype="<f8").tobytes()
    Path(path).write_bytes(header + body)


def read_header(raw: bytes):
    if len(raw) < HEADER_SIZE:
        raise SnapshotError(f"truncated header: {len(raw)} bytes, need {HEADER_SIZE}")
    magic, version, d, n, length, t, alpha = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise SnapshotError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise SnapshotError(f"unsupported version {version}, expected {VERSION}")
    if d < 1:
        raise SnapshotError(f"invalid dimension d={d}")
    if n < 8 or n % 2 != 0:
        raise SnapshotError(f"invalid points-per-axis n={n} (must be even and >= 8)")
    if not length > 0:
        raise SnapshotError(f"invalid box length {length}")
    return d, n, length, t, alpha


def read_snapshot(path):
    """Read a snapshot; returns (VelocityField, time, alpha)."""
    raw = Path(path).read_bytes()
    d, n, length, t, alpha = read_header(raw)
    expected = HEADER_SIZE + 8 * d * n ** d
    if len(raw) != expected:
        raise SnapshotError(f"size mismatch: expected {expected} bytes, got {len(raw)}")
    data = np.frombuffer(raw, dtype="<f8", offset=HEADER_SIZE).reshape((d,) + (n,) * d)
    grid = TorusGrid(d, n, length)
    return VelocityField(grid, data.copy()), t, alpha
