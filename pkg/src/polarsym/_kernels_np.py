"""Pure-numpy implementations of the hot kernels (reference/fallback path)."""
import numpy as np


def green_matrix(points, sing_cap, R, exponent, near_cap):
    """Dense regularised Green matrix on a node set.

    Row i, column j holds G(x_i, x_j); the diagonal holds sing_cap[i] minus
    the image term, and with ``near_cap`` off-diagonal entries are clipped at
    min(sing_cap[i], sing_cap[j]). Entries are floored at 0, the sign of the
    continuous kernel, which matters for diagonal cells near the sphere.
    """
    n = points.shape[0]
    K = np.empty((n, n))
    r2 = np.einsum("ij,ij->i", points, points)
    rr = np.sqrt(r2)
    with np.errstate(divide="ignore", invalid="ignore"):
        duals = np.where(r2[:, None] > 0.0, points * (R * R / np.where(r2 > 0, r2, 1.0))[:, None], 0.0)
    chunk = max(1, int(2_000_000 // max(n, 1)))
    for s in range(0, n, chunk):
        e = min(n, s + chunk)
        X = points[s:e]
        diff = points[None, :, :] - X[:, None, :]
        a = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        dd = points[None, :, :] - duals[s:e, None, :]
        b = (rr[s:e, None] / R) * np.sqrt(np.einsum("ijk,ijk->ij", dd, dd))
        zero = r2[s:e] == 0.0
        if np.any(zero):
            b[zero, :] = R
        with np.errstate(divide="ignore"):
            sing = 1.0 / a ** exponent
            img = 1.0 / b ** exponent
        G = sing - img
        rows = np.arange(s, e)
        if near_cap:
            cap = np.minimum(sing_cap[s:e, None], sing_cap[None, :])
            G = np.minimum(G, cap)
        G[rows - s, rows] = sing_cap[rows] - img[rows - s, rows]
        K[s:e] = np.maximum(G, 0.0)
    # keep the upper triangle (row i's image point), mirrored: exactly symmetric
    for s in range(0, n, chunk):
        e = min(n, s + chunk)
        K[s:e, :s] = K[:s, s:e].T
        blk = K[s:e, s:e]
        K[s:e, s:e] = np.triu(blk) + np.triu(blk, 1).T
    return K


def _half_circle_diffs(values, ks):
    n = values.shape[0]
    j = np.arange(n)
    m = (2 * j[None, :] - ks[:, None]) % (2 * n)
    inside = (m > 0) & (m < n)
    mirror = (ks[:, None] - j[None, :]) % n
    diffs = values[mirror] - values[j][None, :]
    return diffs, inside


def circle_first_violation(values, tol):
    """Smallest k in [0, n) whose grid reflection breaks both branches, else -1."""
    n = values.shape[0]
    diffs, inside = _half_circle_diffs(values, np.arange(n))
    pos = np.any((diffs > tol) & inside, axis=1)
    neg = np.any((diffs < -tol) & inside, axis=1)
    bad = np.flatnonzero(pos & neg)
    return int(bad[0]) if bad.size else -1


def circle_severities(values, tol):
    """Two-sided violation size for each of the 2n grid reflections."""
    n = values.shape[0]
    diffs, inside = _half_circle_diffs(values, np.arange(2 * n))
    d = np.where(inside, diffs, 0.0)
    pmax = d.max(axis=1)
    nmax = (-d).max(axis=1)
    sev = np.minimum(pmax, nmax)
    sev[~((pmax > tol) & (nmax > tol))] = 0.0
    return sev


def sphere_interp(grid, colat, lon):
    """Bilinear interpolation in (colatitude, longitude) on a pole-inclusive grid."""
    n_lat, n_lon = grid.shape
    dt = np.pi / (n_lat - 1)
    dp = 2.0 * np.pi / n_lon
    gt = np.clip(colat / dt, 0.0, n_lat - 1.0)
    i0 = np.minimum(np.floor(gt).astype(np.int64), n_lat - 2)
    t = gt - i0
    gp = np.mod(lon, 2.0 * np.pi) / dp
    k0 = np.floor(gp).astype(np.int64)
    s = gp - k0
    k0 = k0 % n_lon
    k1 = (k0 + 1) % n_lon
    v00 = grid[i0, k0]
    v01 = grid[i0, k1]
    v10 = grid[i0 + 1, k0]
    v11 = grid[i0 + 1, k1]
    return (1 - t) * ((1 - s) * v00 + s * v01) + t * ((1 - s) * v10 + s * v11)


def _lagrange4(t):
    return np.stack([
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ], axis=-1)


def cubic_interp3(vol, origin, h, pts):
    """Local tricubic Lagrange interpolation; samples outside the array count as 0."""
    shape = np.array(vol.shape)
    g = (pts - origin) / h
    base = np.floor(g).astype(np.int64)
    t = g - base
    w = [_lagrange4(t[:, d]) for d in range(3)]
    out = np.zeros(pts.shape[0])
    for a in range(4):
        ia = base[:, 0] - 1 + a
        oka = (ia >= 0) & (ia < shape[0])
        for b in range(4):
            ib = base[:, 1] - 1 + b
            okb = oka & (ib >= 0) & (ib < shape[1])
            for c in range(4):
                ic = base[:, 2] - 1 + c
                ok = okb & (ic >= 0) & (ic < shape[2])
                vals = np.zeros(pts.shape[0])
                vals[ok] = vol[ia[ok], ib[ok], ic[ok]]
                out += w[0][:, a] * w[1][:, b] * w[2][:, c] * vals
    return out
