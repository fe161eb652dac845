"""Half-spaces, reflections, dual points, caps and hull membership."""
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.optimize import nnls

from .errors import DimensionError, DualOfCenter, GeometryError

NORMAL_TOL = 1e-9
HULL_TOL = 1e-9


def _vec(x, name="x"):
    a = np.asarray(x, dtype=float)
    if a.ndim != 1:
        raise DimensionError(f"{name} must be a 1-D vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise GeometryError(f"{name} has non-finite entries")
    return a


def unit(v):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise GeometryError("cannot normalise the zero vector")
    return v / n


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """The open half-space ``{x : normal . x > offset}``.

    The normal must already be unit length to within 1e-9; it is then
    renormalised to machine precision.
    """

    normal: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        n = _vec(self.normal, "normal")
        norm = np.linalg.norm(n)
        if abs(norm - 1.0) > NORMAL_TOL:
            raise GeometryError(f"half-space normal has length {norm!r}, expected 1")
        n = n / norm
        n.setflags(write=False)
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_direction(cls, v, offset=0.0):
        return cls(unit(v), offset)

    @property
    def dim(self):
        return self.normal.shape[0]

    @property
    def through_origin(self):
        return self.offset == 0.0

    def signed_distance(self, x):
        return np.asarray(x, dtype=float) @ self.normal - self.offset

    def contains(self, x, tol=0.0):
        """Strict membership ``n.x - c > tol`` (vectorised over rows)."""
        return self.signed_distance(x) > tol

    def reflect(self, x):
        """Mirror image across the boundary hyperplane; accepts (..., N)."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise DimensionError(f"point dimension {x.shape[-1]} != half-space dimension {self.dim}")
        s = x @ self.normal - self.offset
        return x - 2.0 * s[..., None] * self.normal

    def opposite(self):
        return HalfSpace(-self.normal, -self.offset)

    def __repr__(self):
        return f"HalfSpace(normal={np.round(self.normal, 12).tolist()}, offset={self.offset!r})"


def reflect(h, x):
    return h.reflect(x)


def dual_point(x, R):
    """Inversion ``R^2 x / |x|^2`` across the sphere of radius R."""
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1)
    if np.any(r2 == 0.0):
        raise DualOfCenter("the centre of the ball has no dual point")
    return (R * R / r2)[..., None] * x if x.ndim > 1 else (R * R / r2) * x


@dataclass(frozen=True, eq=False)
class Cap:
    """Spherical cap ``{x in S^{N-1} : x . axis >= height}``."""

    axis: np.ndarray
    height: float

    def __post_init__(self):
        a = _vec(self.axis, "axis")
        if abs(np.linalg.norm(a) - 1.0) > NORMAL_TOL:
            raise GeometryError("cap axis must be a unit vector")
        if not -1.0 - 1e-12 <= self.height <= 1.0 + 1e-12:
            raise GeometryError(f"cap height {self.height} outside [-1, 1]")
        object.__setattr__(self, "axis", a / np.linalg.norm(a))
        object.__setattr__(self, "height", float(np.clip(self.height, -1.0, 1.0)))

    @property
    def half_angle(self):
        return float(np.arccos(self.height))

    @property
    def is_point(self):
        return self.height >= 1.0

    @property
    def is_sphere(self):
        return self.height <= -1.0

    def contains(self, x, tol=0.0):
        return np.asarray(x, dtype=float) @ self.axis >= self.height - tol

    def to_dict(self):
        return {"axis": self.axis.tolist(), "height": self.height}


@dataclass(frozen=True, eq=False)
class AxisLine:
    base: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "base", _vec(self.base, "base"))
        d = _vec(self.direction, "direction")
        object.__setattr__(self, "direction", unit(d))

    def angle_to(self, other):
        """Angle in radians between the two lines' directions (sign-free)."""
        c = abs(float(self.direction @ other.direction))
        return float(np.arccos(min(1.0, c)))

    def distance(self, x):
        v = np.asarray(x, dtype=float) - self.base
        return float(np.linalg.norm(v - (v @ self.direction) * self.direction))


def _check_points(points, q):
    P = np.atleast_2d(np.asarray(points, dtype=float))
    q = np.asarray(q, dtype=float)
    if P.size == 0:
        raise DimensionError("point set is empty")
    if q.ndim != 1 or P.shape[1] != q.shape[0]:
        raise DimensionError(f"dimension mismatch: points {P.shape}, query {q.shape}")
    return P, q


def caratheodory_reduce(P, lam, tol=1e-13):
    """Reduce a convex combination to at most N+1 points with the same value.

    Repeatedly moves along an affine dependence of the support until one
    weight hits zero.
    """
    lam = np.array(lam, dtype=float)
    N = P.shape[1]
    while True:
        support = np.flatnonzero(lam > tol)
        lam[lam <= tol] = 0.0
        if support.size <= N + 1:
            return lam / lam.sum()
        M = np.vstack([P[support].T, np.ones(support.size)])
        mu = np.linalg.svd(M)[2][-1]
        if not np.any(mu > 0):
            mu = -mu
        pos = mu > 0
        t = np.min(lam[support][pos] / mu[pos])
        lam[support] -= t * mu
        lam[lam < tol] = 0.0


def hull_combination(points, q, kind="convex", tol=HULL_TOL):
    """Coefficients expressing q over at most N+1 of the points, or None."""
    P, q = _check_points(points, q)
    N = P.shape[1]
    scale = 1.0 + np.max(np.abs(P)) + np.max(np.abs(q))
    if kind == "affine":
        base = P[0]
        D = (P[1:] - base).T
        if D.size == 0:
            ok = np.linalg.norm(q - base) <= tol * scale
            return np.array([1.0]) if ok else None
        coef, *_ = np.linalg.lstsq(D, q - base, rcond=None)
        if np.linalg.norm(D @ coef - (q - base)) > tol * scale:
            return None
        # basis of at most N difference vectors via pivoted QR
        from scipy.linalg import qr

        _, R_, piv = qr(D, pivoting=True, mode="economic")
        diag = np.abs(np.diag(R_))
        rank = int(np.sum(diag > 1e-12 * max(1.0, diag.max() if diag.size else 1.0)))
        cols = piv[:rank]
        c, *_ = np.linalg.lstsq(D[:, cols], q - base, rcond=None)
        lam = np.zeros(P.shape[0])
        lam[cols + 1] = c
        lam[0] = 1.0 - c.sum()
        return lam
    if kind != "convex":
        raise ValueError(f"kind must be 'affine' or 'convex', got {kind!r}")
    rho = 1e3 * scale
    A = np.vstack([P.T, rho * np.ones(P.shape[0])])
    b = np.concatenate([q, [rho]])
    lam, _ = nnls(A, b, maxiter=50 * P.shape[0] + 100)
    s = lam.sum()
    if s <= 0:
        return None
    lam = lam / s
    if np.linalg.norm(P.T @ lam - q) > tol * scale:
        return None
    lam = caratheodory_reduce(P, lam)
    if np.count_nonzero(lam) > N + 1 or np.linalg.norm(P.T @ lam - q) > tol * scale:
        return None
    return lam


def hull_membership(points, q, kind="convex", tol=HULL_TOL):
    """Decide ``q in aff(points)`` or ``q in co(points)``."""
    return hull_combination(points, q, kind=kind, tol=tol) is not None


def convex_membership_bruteforce(points, q, tol=HULL_TOL):
    """Exhaustive check over every subset of at most N+1 points.

    Each subset's barycentric system is solved in least squares; a hit needs a
    nonnegative solution reproducing q. Exponential, meant for tiny inputs.
    """
    P, q = _check_points(points, q)
    N = P.shape[1]
    scale = 1.0 + np.max(np.abs(P)) + np.max(np.abs(q))
    for k in range(1, min(N + 1, P.shape[0]) + 1):
        for idx in combinations(range(P.shape[0]), k):
            S = P[list(idx)]
            A = np.vstack([S.T, np.ones(k)])
            b = np.concatenate([q, [1.0]])
            lam, *_ = np.linalg.lstsq(A, b, rcond=None)
            if np.all(lam >= -tol) and np.linalg.norm(A @ lam - b) <= tol * scale:
                return True
    return False


def random_unit_vectors(rng, n, dim):
    v = rng.standard_normal((n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def orthonormal_complement(n):
    """Two (or N-1) unit vectors completing n to an orthonormal frame."""
    n = unit(n)
    q, _ = np.linalg.qr(np.column_stack([n, np.eye(n.size)]))
    frame = q[:, 1:n.size]
    return frame.T


def rotation_matrix(axis, angle):
    """Rodrigues rotation about a 3-D axis."""
    k = unit(axis)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * K @ K


def angle_between(a, b):
    a, b = unit(a), unit(b)
    return float(np.arccos(np.clip(a @ b, -1.0, 1.0)))
