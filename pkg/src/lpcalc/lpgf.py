"""Binary grid-function files and CSV export.

Layout of an LPGF file: the four magic bytes ``LPGF``, then little-endian
u32 version (currently 1), u32 dimension, u32 points per axis, f64 period,
followed by the row-major samples as interleaved little-endian f64
(real, imaginary) pairs.  Round trips are bit-exact.
"""

from __future__ import annotations

import struct

import numpy as np

from .grid import Grid, GridFunction

__all__ = ["LpgfError", "read_lpgf", "write_lpgf", "write_csv"]

MAGIC = b"LPGF"
VERSION = 1
_HEADER = struct.Struct("<4sIIId")


class LpgfError(ValueError):
    """A grid-function file is malformed or unsupported."""


def write_lpgf(f: GridFunction, path) -> None:
    grid = f.grid
    flat = np.ascontiguousarray(f.values).reshape(-1)
    payload = np.empty(2 * flat.size, dtype="<f8")
    payload[0::2] = flat.real
    payload[1::2] = flat.imag
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, grid.n, grid.points, grid.length))
        fh.write(payload.tobytes())


def read_lpgf(path) -> GridFunction:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise LpgfError(f"file too short for a header ({len(raw)} bytes)")
    magic, version, n, points, length = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise LpgfError(f"bad magic {magic!r} at offset 0; expected {MAGIC!r}")
    if version != VERSION:
        raise LpgfError(f"unsupported version {version}; this reader handles version {VERSION}")
    if n not in (1, 2):
        raise LpgfError(f"unsupported dimension {n}")
    grid = Grid(n, points, length)
    expected = 2 * grid.size * 8
    body = raw[_HEADER.size :]
    if len(body) != expected:
        raise LpgfError(f"truncated payload: have {len(body)} bytes, expected {expected}")
    pairs = np.frombuffer(body, dtype="<f8")
    values = pairs[0::2] + 1j * pairs[1::2]
    return GridFunction(grid, values.reshape(grid.shape))


def write_csv(f: GridFunction, path) -> None:
    """One row per sample: coordinate columns, then real and imaginary parts."""
    grid = f.grid
    mesh = grid.point_mesh()
    cols = [m.reshape(-1) for m in mesh] + [f.values.reshape(-1).real, f.values.reshape(-1).imag]
    header = ",".join([f"x{i+1}" for i in range(grid.n)] + ["re", "im"])
    data = np.stack(cols, axis=1)
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")
