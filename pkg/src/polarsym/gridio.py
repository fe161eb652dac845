"""Binary Cartesian grid files.

Layout (little endian): 8-byte magic ``PSYMGRID``, uint32 N, N x uint32
dims, float64 spacing, N x float64 origin, then prod(dims) float64 values in
row-major (C) order.
"""
import struct

import numpy as np

from .errors import FormatError

MAGIC = b"PSYMGRID"


def write_grid(path, values, spacing, origin):
    values = np.ascontiguousarray(values, dtype="<f8")
    origin = np.asarray(origin, dtype="<f8")
    if origin.shape != (values.ndim,):
        raise FormatError(f"origin must have {values.ndim} entries")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", values.ndim))
        fh.write(struct.pack(f"<{values.ndim}I", *values.shape))
        fh.write(struct.pack("<d", float(spacing)))
        fh.write(origin.tobytes())
        fh.write(values.tobytes())


def read_grid(path):
    """(values, spacing, origin) from a grid file."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:8] != MAGIC:
        raise FormatError(f"{path}: bad magic {data[:8]!r}, expected {MAGIC!r}")
    pos = 8
    try:
        (N,) = struct.unpack_from("<I", data, pos)
        pos += 4
        if not 1 <= N <= 8:
            raise FormatError(f"{path}: implausible dimension {N}")
        dims = struct.unpack_from(f"<{N}I", data, pos)
        pos += 4 * N
        (spacing,) = struct.unpack_from("<d", data, pos)
        pos += 8
        origin = np.frombuffer(data, dtype="<f8", count=N, offset=pos)
        pos += 8 * N
    except struct.error as exc:
        raise FormatError(f"{path}: truncated header") from exc
    count = int(np.prod(dims))
    if len(data) - pos != 8 * count:
        raise FormatError(f"{path}: expected {count} values after the header, found {(len(data) - pos) / 8:g}")
    if not spacing > 0:
        raise FormatError(f"{path}: spacing must be positive")
    values = np.frombuffer(data, dtype="<f8", count=count, offset=pos).reshape(dims).astype(float)
    return values, float(spacing), origin.astype(float)
