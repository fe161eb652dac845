"""Dispatch between the numba and numpy kernel implementations.

The choice is fixed at import time by ``POLARSYM_BACKEND``; both modules stay
importable so tests and the benchmark can compare them side by side.
"""
import numpy as np

from . import _kernels_np
from ._backend import USE_NUMBA, HAVE_NUMBA

if HAVE_NUMBA:
    from . import _kernels_nb
else:  # pragma: no cover
    _kernels_nb = None

_impl = _kernels_nb if USE_NUMBA else _kernels_np


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def green_matrix(points, sing_cap, R, exponent, near_cap=True):
    return _impl.green_matrix(_f64(points), _f64(sing_cap), float(R), int(exponent), bool(near_cap))


def circle_first_violation(values, tol):
    return int(_impl.circle_first_violation(_f64(values), float(tol)))


def circle_severities(values, tol):
    return _impl.circle_severities(_f64(values), float(tol))


def sphere_interp(grid, colat, lon):
    colat = _f64(colat)
    shape = colat.shape
    out = _impl.sphere_interp(_f64(grid), colat.ravel(), _f64(lon).ravel())
    return out.reshape(shape)


def cubic_interp3(vol, origin, h, pts):
    pts = _f64(pts)
    shape = pts.shape[:-1]
    out = _impl.cubic_interp3(_f64(vol), _f64(origin), float(h), pts.reshape(-1, 3))
    return out.reshape(shape)
