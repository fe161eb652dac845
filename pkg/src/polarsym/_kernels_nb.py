"""numba implementations of the hot kernels; signatures mirror _kernels_np."""
import math

import numpy as np

from ._backend import njit, prange


@njit(cache=True, parallel=True)
def green_matrix(points, sing_cap, R, exponent, near_cap):
    n, dim = points.shape
    K = np.empty((n, n))
    for i in prange(n):
        xi2 = 0.0
        for d in range(dim):
            xi2 += points[i, d] * points[i, d]
        rx = math.sqrt(xi2)
        scale = R * R / xi2 if xi2 > 0.0 else 0.0
        # upper triangle from row i's image point, mirrored: exactly symmetric
        for j in range(i, n):
            a2 = 0.0
            b2 = 0.0
            for d in range(dim):
                t = points[j, d] - points[i, d]
                a2 += t * t
                u = points[j, d] - scale * points[i, d]
                b2 += u * u
            if xi2 > 0.0:
                b = rx / R * math.sqrt(b2)
            else:
                b = R
            img = 1.0 / b ** exponent
            if i == j:
                K[i, j] = max(sing_cap[i] - img, 0.0)
            else:
                g = 1.0 / math.sqrt(a2) ** exponent - img
                if near_cap:
                    c = min(sing_cap[i], sing_cap[j])
                    if g > c:
                        g = c
                K[i, j] = max(g, 0.0)
                K[j, i] = K[i, j]
    return K


@njit(cache=True)
def circle_first_violation(values, tol):
    n = values.shape[0]
    for k in range(n):
        pos = False
        neg = False
        for j in range(n):
            m = (2 * j - k) % (2 * n)
            if m <= 0 or m >= n:
                continue
            d = values[(k - j) % n] - values[j]
            if d > tol:
                pos = True
            elif d < -tol:
                neg = True
            if pos and neg:
                return k
    return -1


@njit(cache=True)
def circle_severities(values, tol):
    n = values.shape[0]
    out = np.zeros(2 * n)
    for k in range(2 * n):
        pmax = 0.0
        nmax = 0.0
        for j in range(n):
            m = (2 * j - k) % (2 * n)
            if m <= 0 or m >= n:
                continue
            d = values[(k - j) % n] - values[j]
            if d > pmax:
                pmax = d
            if -d > nmax:
                nmax = -d
        if pmax > tol and nmax > tol:
            out[k] = min(pmax, nmax)
    return out


@njit(cache=True)
def sphere_interp(grid, colat, lon):
    n_lat, n_lon = grid.shape
    dt = np.pi / (n_lat - 1)
    dp = 2.0 * np.pi / n_lon
    out = np.empty(colat.shape[0])
    for q in range(colat.shape[0]):
        gt = colat[q] / dt
        if gt < 0.0:
            gt = 0.0
        elif gt > n_lat - 1.0:
            gt = n_lat - 1.0
        i0 = int(math.floor(gt))
        if i0 > n_lat - 2:
            i0 = n_lat - 2
        t = gt - i0
        ph = lon[q] % (2.0 * np.pi)
        gp = ph / dp
        k0 = int(math.floor(gp))
        s = gp - k0
        k0 = k0 % n_lon
        k1 = (k0 + 1) % n_lon
        out[q] = ((1 - t) * ((1 - s) * grid[i0, k0] + s * grid[i0, k1])
                  + t * ((1 - s) * grid[i0 + 1, k0] + s * grid[i0 + 1, k1]))
    return out


@njit(cache=True)
def _lagrange4(t, w):
    w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0
    w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0
    w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0
    w[3] = (t + 1.0) * t * (t - 1.0) / 6.0


@njit(cache=True)
def cubic_interp3(vol, origin, h, pts):
    nx, ny, nz = vol.shape
    out = np.zeros(pts.shape[0])
    wx = np.empty(4)
    wy = np.empty(4)
    wz = np.empty(4)
    for q in range(pts.shape[0]):
        gx = (pts[q, 0] - origin[0]) / h
        gy = (pts[q, 1] - origin[1]) / h
        gz = (pts[q, 2] - origin[2]) / h
        bx = int(math.floor(gx))
        by = int(math.floor(gy))
        bz = int(math.floor(gz))
        _lagrange4(gx - bx, wx)
        _lagrange4(gy - by, wy)
        _lagrange4(gz - bz, wz)
        acc = 0.0
        for a in range(4):
            ia = bx - 1 + a
            if ia < 0 or ia >= nx:
                continue
            for b in range(4):
                ib = by - 1 + b
                if ib < 0 or ib >= ny:
                    continue
                for c in range(4):
                    ic = bz - 1 + c
                    if ic < 0 or ic >= nz:
                        continue
                    acc += wx[a] * wy[b] * wz[c] * vol[ia, ib, ic]
        out[q] = acc
    return out
