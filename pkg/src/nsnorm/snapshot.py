"""Binary snapshot format for velocity fields.

Layout, all little-endian:

    bytes 0..3    magic  b"NSNL"
    bytes 4..7    u32    format version (currently 1)
    bytes 8..11   u32    grid size n
    bytes 12..19  f64    domain length
    bytes 20..27  f64    sample time
    bytes 28..35  f64    viscosity
    bytes 36..    f64    3 * n^3 velocity samples, component-major,
                         x index fastest within each component

Loading re-projects onto divergence-free fields, so a snapshot round-trip
tolerates the tiny compressible dust the sample quantization introduces.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import SnapshotFormatError
from .fields import Grid, SpectralField, from_physical, to_physical, leray_project

MAGIC = b"NSNL"
VERSION = 1
_HEADER = struct.Struct("<4sII3d")


def save_snapshot(path: str | Path, field: SpectralField, nu: float) -> None:
    """Write a field and its viscosity to `path` in the snapshot format."""
    grid = field.grid
    samples = to_physical(field)
    header = _HEADER.pack(MAGIC, VERSION, grid.n, grid.length, field.time, float(nu))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(samples.astype("<f8").tobytes())


def load_snapshot(path: str | Path) -> tuple[SpectralField, float]:
    """Read a snapshot, returning the projected field and its viscosity."""
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise SnapshotFormatError(f"{path}: file shorter than the {_HEADER.size}-byte header")
    magic, version, n, length, time, nu = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise SnapshotFormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotFormatError(f"{path}: unsupported format version {version}")
    expected = _HEADER.size + 3 * n**3 * 8
    if len(blob) != expected:
        raise SnapshotFormatError(
            f"{path}: size {len(blob)} does not match header (expected {expected})"
        )
    samples = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size).reshape(3, n**3)
    grid = Grid(n=n, length=length)
    return leray_project(from_physical(samples, grid, time)), nu
