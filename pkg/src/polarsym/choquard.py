"""Discrete Choquard energy on a Cartesian ball mesh and a ground-state solver.

Mesh nodes are the points h*(i, j, k) with |x| < R, h = 2R/n. With zero
extension outside the ball,

    ||u||^2 = h^3 u^T A u,   A = (6 I - Adj)/h^2 + I
    D(u)    = h^6 sum_ij K_ij u_i^p u_j^p

where K is the regularised Green matrix. The solver minimises the scale-free
quotient Q(u) = ||u||^2 / D(u)^{1/p} by projected descent preconditioned with
A^{-1}; a unit step is the normalised fixed-point map u <- A^{-1} F(u),
F(u) = h^3 (K u^p) u^{p-1}.
"""
from dataclasses import dataclass, field
import json
import logging

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from . import kernels
from .ball import BallFn, ball_axis, is_separable_ball
from .errors import CapFitError, CollapseToZero, DegenerateD, GridError, NonConvergence, ZeroFunction
from .geometry import HalfSpace, random_unit_vectors
from .green import green_matrix
from .reports import SCHEMA_VERSION, AxisReport

log = logging.getLogger(__name__)

ZERO_NORM = 1e-14
# Mesh anisotropy of the n=24 ground state stays below 1e-3 relative only
# inside about 0.45 R (staircase boundary, O(h^2) stencil error); the
# certificate is issued on this fixed sub-ball.
CERT_RADIUS_FRACTION = 0.4


@dataclass(eq=False)
class ChoquardProblem:
    R: float = 1.0
    p: float = 2.0
    n: int = 24
    N: int = 3

    def __post_init__(self):
        if self.N != 3:
            raise ValueError("the reference mesh is three-dimensional")
        lo, hi = (self.N + 2) / self.N, (self.N + 2) / (self.N - 2)
        if not lo < self.p < hi:
            raise ValueError(f"p must lie in ({lo:.4g}, {hi:.4g}), got {self.p}")
        if self.n < 2 or self.n % 2:
            raise GridError("n must be an even number of cells across the diameter")
        if not self.R > 0:
            raise ValueError("R must be positive")
        half = self.n // 2
        r = np.arange(-half, half + 1)
        I, J, L = np.meshgrid(r, r, r, indexing="ij")
        idx = np.column_stack([I.ravel(), J.ravel(), L.ravel()])
        pts = self.h * idx
        inside = np.linalg.norm(pts, axis=1) < self.R * (1 - 1e-12)
        self.index = idx[inside]
        self.points = pts[inside]
        if self.points.shape[0] == 0:
            raise GridError("mesh has no interior nodes")
        self._lookup = {tuple(t): i for i, t in enumerate(self.index)}
        self.A = self._stiffness()
        self._K = None
        self._lu = None

    @property
    def h(self):
        return 2.0 * self.R / self.n

    @property
    def n_nodes(self):
        return self.points.shape[0]

    @property
    def weight(self):
        return self.h ** self.N

    def _stiffness(self):
        n = self.n_nodes
        rows, cols = [], []
        for d in range(3):
            for s in (-1, 1):
                off = np.zeros(3, dtype=int)
                off[d] = s
                for i, t in enumerate(self.index):
                    j = self._lookup.get(tuple(t + off))
                    if j is not None:
                        rows.append(i)
                        cols.append(j)
        adj = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
        return ((6.0 * sp.identity(n) - adj) / self.h ** 2 + sp.identity(n)).tocsc()

    @property
    def K(self):
        if self._K is None:
            self._K = green_matrix(self.points, self.weight, self.R, self.N, near_cap=True)
        return self._K

    @property
    def lu(self):
        if self._lu is None:
            self._lu = splu(self.A)
        return self._lu

    def node_of(self, ijk):
        return self._lookup.get(tuple(int(v) for v in ijk))

    def volume(self, values):
        """Values on the full (n+1)^3 index box, zero outside the ball."""
        half = self.n // 2
        vol = np.zeros((self.n + 1,) * 3)
        t = self.index + half
        vol[t[:, 0], t[:, 1], t[:, 2]] = values
        return vol

    def interpolate(self, values, pts):
        """Tricubic Lagrange interpolation of mesh values (zero beyond the mesh)."""
        origin = np.full(3, -self.R)
        return kernels.cubic_interp3(self.volume(values), origin, self.h, np.asarray(pts, dtype=float))

    def rotate90(self, values, axis=2, turns=1):
        """Values of u o M^{-1} for M a quarter turn about a coordinate axis."""
        a, b = [d for d in range(3) if d != axis]
        out = np.empty_like(values)
        src = self.index.copy()
        for _ in range(turns % 4):
            nxt = src.copy()
            nxt[:, a], nxt[:, b] = -src[:, b], src[:, a]
            src = nxt
        for i, t in enumerate(src):
            out[self._lookup[tuple(t)]] = values[i]
        return out

    def default_init(self):
        return np.maximum(1.0 - np.sum(self.points ** 2, axis=1) / self.R ** 2, 0.0)

    def random_init(self, seed):
        """Positive bump times a smooth random modulation (asymmetric)."""
        rng = np.random.default_rng(seed)
        c = 0.3 * self.R * random_unit_vectors(rng, 1, 3)[0]
        base = self.default_init()
        mod = np.exp(-np.sum((self.points - c) ** 2, axis=1) / (0.5 * self.R) ** 2)
        return base * (0.5 + mod)

    def to_dict(self):
        return {"R": self.R, "p": self.p, "n": self.n, "N": self.N, "h": self.h, "n_nodes": self.n_nodes}


# -- energy terms -----------------------------------------------------------------

def dirichlet_norm_sq(prob: ChoquardProblem, u):
    u = np.asarray(u, dtype=float)
    return float(prob.weight * (u @ (prob.A @ u)))


def nonlocal_D(prob: ChoquardProblem, u, K=None):
    K = prob.K if K is None else K
    v = prob.weight * np.abs(np.asarray(u, dtype=float)) ** prob.p
    return float(v @ (K @ v))


def nehari_scale_from(norm_sq, D, p):
    if norm_sq <= 0:
        raise ZeroFunction("||u|| = 0 has no Nehari multiple")
    if not D > 0:
        raise DegenerateD("D(u) must be positive")
    return (norm_sq / D) ** (1.0 / (2 * p - 2))


def nehari_scale(prob, u):
    return nehari_scale_from(dirichlet_norm_sq(prob, u), nonlocal_D(prob, u), prob.p)


def energy_I(prob, u):
    return 0.5 * dirichlet_norm_sq(prob, u) - nonlocal_D(prob, u) / (2 * prob.p)


def nehari_energy(norm_sq, D, p):
    """sup_t I(t u) = (1/2 - 1/(2p)) (||u||^2 / D^{1/p})^{p/(p-1)}."""
    return (0.5 - 0.5 / p) * (norm_sq / D ** (1.0 / p)) ** (p / (p - 1))


def quotient_Q(prob, u):
    return dirichlet_norm_sq(prob, u) / nonlocal_D(prob, u) ** (1.0 / prob.p)


def quotient_grad(prob, u, K=None):
    """(Q, grad Q) in the Euclidean inner product on node values."""
    K = prob.K if K is None else K
    p, w = prob.p, prob.weight
    u = np.asarray(u, dtype=float)
    Au = prob.A @ u
    n2 = w * (u @ Au)
    up = np.abs(u) ** p
    Kv = K @ (w * up)
    D = float((w * up) @ Kv)
    Dp = D ** (1.0 / p)
    grad_n2 = 2.0 * w * Au
    grad_D = 2.0 * p * w * Kv * np.abs(u) ** (p - 1) * np.sign(u)
    return n2 / Dp, grad_n2 / Dp - (n2 / p) * D ** (-1.0 / p - 1.0) * grad_D


# -- solver ------------------------------------------------------------------------

@dataclass
class GroundState:
    problem: ChoquardProblem
    values: np.ndarray
    energy: float
    nehari_residual: float
    el_residual: float
    Q: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list)

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "mesh": self.problem.to_dict(),
            "values": self.values.tolist(),
            "c": self.energy,
            "Q": self.Q,
            "nehari_residual": self.nehari_residual,
            "el_residual": self.el_residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "Q_history": self.history,
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @classmethod
    def load(cls, path, problem=None):
        with open(path) as fh:
            d = json.load(fh)
        m = d["mesh"]
        prob = problem or ChoquardProblem(R=m["R"], p=m["p"], n=m["n"], N=m["N"])
        return cls(prob, np.array(d["values"]), d["c"], d["nehari_residual"], d["el_residual"],
                   d["Q"], d["iterations"], d["converged"], d.get("Q_history", []))


def _project(prob, u):
    u = np.maximum(u, 0.0)
    n2 = dirichlet_norm_sq(prob, u)
    if n2 < ZERO_NORM ** 2:
        raise CollapseToZero("iterate collapsed to zero")
    return nehari_scale_from(n2, nonlocal_D(prob, u), prob.p) * u


def el_residual(prob, u):
    """max |A u - h^3 (K u^p) u^{p-1}| relative to max |A u|."""
    Au = prob.A @ u
    F = prob.weight * (prob.K @ (np.abs(u) ** prob.p)) * np.abs(u) ** (prob.p - 1)
    return float(np.max(np.abs(Au - F)) / np.max(np.abs(Au)))


def solve_ground_state(prob: ChoquardProblem, init=None, step=1.0, max_iters=5000, tol=1e-8,
                       armijo=1e-4, raise_on_fail=False):
    """Projected, A^{-1}-preconditioned descent on Q with Nehari renormalisation."""
    u = prob.default_init() if init is None else np.array(init, dtype=float)
    if np.any(u < 0):
        raise ValueError("init must be nonnegative")
    K = prob.K
    w = prob.weight
    u = _project(prob, u)
    Q, g = quotient_grad(prob, u, K)
    history = [Q]
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        D = nonlocal_D(prob, u, K)
        direction = -prob.lu.solve(g) * D ** (1.0 / prob.p) / (2.0 * w)
        s = step
        while True:
            trial = np.maximum(u + s * direction, 0.0)
            n2 = dirichlet_norm_sq(prob, trial)
            if n2 < ZERO_NORM ** 2:
                raise CollapseToZero("iterate collapsed to zero")
            Dt = nonlocal_D(prob, trial, K)
            Qt = n2 / Dt ** (1.0 / prob.p)
            if Qt <= Q + armijo * float(g @ (trial - u)) or s < 1e-12:
                break
            s *= 0.5
        if Qt > Q:
            # no decrease available at machine precision: stationary
            converged = True
            break
        u = nehari_scale_from(n2, Dt, prob.p) * trial
        Q_old = Q
        Q, g = quotient_grad(prob, u, K)
        history.append(Q)
        if abs(Q_old - Q) <= tol * Q:
            converged = True
            break
    n2 = dirichlet_norm_sq(prob, u)
    D = nonlocal_D(prob, u, K)
    gs = GroundState(prob, u, 0.5 * n2 - D / (2 * prob.p), abs(n2 - D) / n2, el_residual(prob, u),
                     Q, it, converged, history)
    log.info("choquard: %d iterations, Q=%.12g, converged=%s", it, Q, converged)
    if not converged and raise_on_fail:
        raise NonConvergence(f"no convergence in {max_iters} iterations", gs)
    return gs


# -- symmetry certification ----------------------------------------------------------

def to_ballfn(gs: GroundState, R_c=None, m=12, n_lat=33, n_lon=64):
    """Tricubic interpolation of the mesh solution onto shells of B_{R_c}."""
    prob = gs.problem
    R_c = CERT_RADIUS_FRACTION * prob.R if R_c is None else R_c

    def f(x):
        x = np.asarray(x, dtype=float)
        return prob.interpolate(gs.values, x.reshape(-1, 3)).reshape(x.shape[:-1])

    return BallFn.from_function(f, R_c, m, n_lat, n_lon)


def anisotropy_profile(gs: GroundState, fractions=(0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9),
                       n_lat=33, n_lon=64):
    """Relative spread (max - min)/max of the interpolated solution on spheres r = f R."""
    from .sphere import SphereGrid

    prob = gs.problem
    pts = SphereGrid(n_lat, n_lon).points.reshape(-1, 3)
    out = {}
    for f in fractions:
        v = prob.interpolate(gs.values, f * prob.R * pts)
        out[f"{f:g}"] = float(np.ptp(v) / v.max())
    return out


def polarization_fixed_point(gs: GroundState, n_halfspaces=16, seed=0, eps=1e-3, R_c=None):
    """For random origin-through H: min(||u^H - u||, ||u^H - u o s||) / ||u|| per H.

    Mirror values come from tricubic interpolation; norms are discrete L^2
    over mesh nodes with |x| < R_c (the whole mesh when R_c is None).
    """
    prob = gs.problem
    sel = np.linalg.norm(prob.points, axis=1) < (prob.R if R_c is None else R_c)
    x = prob.points[sel]
    u = gs.values[sel]
    rng = np.random.default_rng(seed)
    out = []
    for nrm in random_unit_vectors(rng, n_halfspaces, 3):
        h = HalfSpace(nrm)
        us = prob.interpolate(gs.values, h.reflect(x))
        uh = np.where(h.signed_distance(x) > 0, np.maximum(u, us), np.minimum(u, us))
        out.append(min(np.linalg.norm(uh - u), np.linalg.norm(uh - us)) / np.linalg.norm(u))
    out = np.array(out)
    return {"ratios": out, "max_ratio": float(out.max()), "passes": bool(out.max() <= eps)}


def certify_theorem41(gs: GroundState, eps_cert=1e-3, R_c=None, m=12, n_lat=33, n_lon=64,
                      n_halfspaces=256, seed=0):
    """Separability and Radial/Axial classification of an interpolated ground state."""
    ball = to_ballfn(gs, R_c, m, n_lat, n_lon)
    sep = is_separable_ball(ball, n_halfspaces, eps_cert, seed)
    if not sep.separable:
        return AxisReport("not_separable", separability=sep,
                          notes=["ground state failed the separability test"],
                          checks={"separable": False})
    try:
        rep = ball_axis(ball, eps_cert, check=False)
    except CapFitError as exc:
        # separable at eps_cert but the extremal sets are not caps: no axis to report
        return AxisReport("inconsistent", separability=sep, notes=[str(exc)],
                          checks={"separable": True, "caps": False})
    rep.separability = sep
    fp = polarization_fixed_point(gs, 16, seed, eps_cert, R_c=ball.R)
    rep.checks["separable"] = True
    rep.checks["polarization_fixed_point"] = fp["passes"]
    rep.residuals["polarization_max_ratio"] = fp["max_ratio"]
    rep.residuals["certification_radius"] = ball.R
    rep.residuals["anisotropy_by_radius"] = anisotropy_profile(gs, n_lat=n_lat, n_lon=n_lon)
    rep.notes.append(f"interpolated onto {m} shells of radius <= {ball.R:g}")
    return rep
