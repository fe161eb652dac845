"""Polarization on grids paired by a reflection, and the split of D(u^H) - D(u).

With a = u(x)^p, b = u(sx)^p, c = u(y)^p, d = u(sy)^p for x, y on the H
side, the pair block of the double sum is

    K(x,y) ac + K(x,sy) ad + K(sx,y) bc + K(sx,sy) bd

(times the node weights). Polarization swaps (a, b) exactly on B_u, so the
difference splits by where x and y fall: I1 on A x A, I2 on A x B, I3 on
B x A, I4 on B x B.
"""
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import gamma

from .errors import UnpairedGrid
from .geometry import HalfSpace, random_unit_vectors

TIE_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class PairedGrid:
    """Nodes closed under sigma_H, stored with the partner index of each node."""

    points: np.ndarray
    weights: np.ndarray
    partner: np.ndarray
    h: HalfSpace

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        n = pts.shape[0]
        w = np.broadcast_to(np.asarray(self.weights, dtype=float), (n,)).copy()
        q = np.asarray(self.partner, dtype=np.int64)
        if q.shape != (n,) or np.any(q < 0) or np.any(q >= n):
            raise UnpairedGrid("partner must index the node set")
        if np.any(q[q] != np.arange(n)):
            raise UnpairedGrid("pairing is not an involution")
        if np.any(w != w[q]):
            raise UnpairedGrid("paired nodes must carry equal weights")
        scale = 1.0 + np.abs(pts).max()
        if np.max(np.abs(self.h.reflect(pts) - pts[q]), initial=0.0) > 1e-9 * scale:
            raise UnpairedGrid("partner is not the mirror image under sigma_H")
        sd = self.h.signed_distance(pts)
        fixed = q == np.arange(n)
        if np.any(np.abs(sd[fixed]) > 1e-9 * scale):
            raise UnpairedGrid("a self-paired node lies off the mirror plane")
        side = ~fixed & (sd > 0)
        for name, v in (("points", pts), ("weights", w), ("partner", q)):
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        object.__setattr__(self, "side", np.flatnonzero(side))
        object.__setattr__(self, "fixed", np.flatnonzero(fixed))

    @property
    def n_nodes(self):
        return self.points.shape[0]

    @property
    def mirror(self):
        """Partner indices of the H-side nodes (aligned with ``side``)."""
        return self.partner[self.side]

    @classmethod
    def mirrored(cls, h_points, h: HalfSpace, weights=1.0, fixed_points=None, fixed_weights=1.0):
        """Grid made of the given H-side points, their mirrors and optional fixed points."""
        hp = np.atleast_2d(np.asarray(h_points, dtype=float))
        if np.any(h.signed_distance(hp) <= 0):
            raise UnpairedGrid("mirrored grids need strictly H-side generators")
        k = hp.shape[0]
        wh = np.broadcast_to(np.asarray(weights, dtype=float), (k,))
        pts = [hp, h.reflect(hp)]
        ws = [wh, wh]
        partner = [np.arange(k, 2 * k), np.arange(k)]
        if fixed_points is not None:
            fp = np.atleast_2d(np.asarray(fixed_points, dtype=float))
            f = fp.shape[0]
            pts.append(fp)
            ws.append(np.broadcast_to(np.asarray(fixed_weights, dtype=float), (f,)))
            partner.append(np.arange(2 * k, 2 * k + f))
        return cls(np.vstack(pts), np.concatenate(ws), np.concatenate(partner), h)

    @classmethod
    def random_in_ball(cls, h: HalfSpace, n_pairs, rng, R=1.0, weight=None):
        """n_pairs random H-side points of B_R and their mirrors, equal weights."""
        N = h.dim
        pts = np.empty((0, N))
        while pts.shape[0] < n_pairs:
            d = random_unit_vectors(rng, 2 * n_pairs, N)
            r = R * rng.random(2 * n_pairs) ** (1.0 / N)
            x = d * r[:, None]
            sd = h.signed_distance(x)
            x = np.where((sd < 0)[:, None], h.reflect(x), x)
            x = x[np.abs(h.signed_distance(x)) > 1e-9]
            pts = np.vstack([pts, x])
        pts = pts[:n_pairs]
        w = (R ** N) * np.pi ** (N / 2) / gamma(N / 2 + 1) / (2 * n_pairs) if weight is None else weight
        return cls.mirrored(pts, h, w)

    @classmethod
    def from_points(cls, points, weights, h: HalfSpace, rtol=1e-9):
        """Pair an existing node set (e.g. a symmetric Cartesian mesh) by nearest mirror."""
        pts = np.asarray(points, dtype=float)
        tree = cKDTree(pts)
        dist, idx = tree.query(h.reflect(pts))
        scale = 1.0 + np.abs(pts).max()
        if np.any(dist > rtol * scale):
            bad = int(np.argmax(dist))
            raise UnpairedGrid(f"node {bad} at {pts[bad].tolist()} has no mirror partner")
        sd = h.signed_distance(pts)
        idx = np.where(np.abs(sd) <= rtol * scale, np.arange(pts.shape[0]), idx)
        return cls(pts, weights, idx, h)


def _check(u, grid, h=None):
    u = np.asarray(u, dtype=float)
    if u.shape != (grid.n_nodes,):
        raise UnpairedGrid(f"values have shape {u.shape}, grid has {grid.n_nodes} nodes")
    if h is not None and not (np.allclose(h.normal, grid.h.normal, atol=1e-12) and h.offset == grid.h.offset):
        raise UnpairedGrid("grid is paired for a different half-space")
    return u


def polarize(u, grid: PairedGrid, h=None):
    """Larger value of each pair onto the H side, smaller onto its mirror."""
    u = _check(u, grid, h)
    s, m = grid.side, grid.mirror
    out = u.copy()
    out[s] = np.maximum(u[s], u[m])
    out[m] = np.minimum(u[s], u[m])
    return out


def partition(u, grid: PairedGrid, tie=TIE_EPS):
    """(A_u, B_u) as node indices; ties within ``tie`` go to A_u."""
    u = _check(u, grid)
    s, m = grid.side, grid.mirror
    in_a = u[s] >= u[m] - tie
    return s[in_a], s[~in_a]


def D_sum(u, K, weights, p):
    """sum_ij w_i w_j K_ij u_i^p u_j^p (positive u)."""
    v = np.asarray(weights, dtype=float) * np.abs(np.asarray(u, dtype=float)) ** p
    return float(v @ (K @ v))


@dataclass
class Decomposition:
    I1: float
    I2: float
    I3: float
    I4: float
    fixed: float
    D_u: float
    D_uH: float

    @property
    def total(self):
        return self.I1 + self.I2 + self.I3 + self.I4 + self.fixed

    @property
    def difference(self):
        return self.D_uH - self.D_u

    def to_dict(self):
        return {"I1": self.I1, "I2": self.I2, "I3": self.I3, "I4": self.I4, "fixed": self.fixed,
                "D_u": self.D_u, "D_uH": self.D_uH, "sum": self.total}


def _pair_blocks(K, s, m):
    return K[np.ix_(s, s)], K[np.ix_(s, m)], K[np.ix_(m, s)], K[np.ix_(m, m)]


def _block_sums(blocks, a, b):
    """Matrix over H-side (x, y) of the four-term pair block."""
    Kss, Ksm, Kms, Kmm = blocks
    return Kss * np.outer(a, a) + Ksm * np.outer(a, b) + Kms * np.outer(b, a) + Kmm * np.outer(b, b)


def decompose_D_difference(u, grid: PairedGrid, K, p, tie=TIE_EPS):
    """I1..I4 of D(u^H) - D(u) on a paired grid with kernel matrix K.

    Each I_k is the literal change of the pair blocks over its region, so
    I1 and I4 vanish only through the kernel's reflection identities. The
    ``fixed`` term collects rows and columns through mirror-plane nodes.
    """
    u = _check(u, grid)
    K = np.asarray(K, dtype=float)
    uh = polarize(u, grid)
    w = grid.weights
    P, PH = np.abs(u) ** p, np.abs(uh) ** p
    s, m = grid.side, grid.mirror
    blocks = _pair_blocks(K, s, m)
    delta = (_block_sums(blocks, w[s] * PH[s], w[m] * PH[m])
             - _block_sums(blocks, w[s] * P[s], w[m] * P[m]))
    in_a = u[s] >= u[m] - tie
    ia, ib = np.flatnonzero(in_a), np.flatnonzero(~in_a)
    I1 = float(delta[np.ix_(ia, ia)].sum())
    I2 = float(delta[np.ix_(ia, ib)].sum())
    I3 = float(delta[np.ix_(ib, ia)].sum())
    I4 = float(delta[np.ix_(ib, ib)].sum())
    f = grid.fixed
    fixed = 0.0
    if f.size:
        v, vh = w * P, w * PH
        # values on the mirror plane do not change; rows and columns count once each
        fixed = float(2.0 * (v[f] @ (K[f] @ (vh - v))))
    return Decomposition(I1, I2, I3, I4, fixed, D_sum(u, K, w, p), D_sum(uh, K, w, p))
