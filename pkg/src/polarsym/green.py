"""Dirichlet Green's function of the ball via the image (dual) point.

    G(x, y) = |y - x|^{2-N} - ((|x|/R) |y - x~|)^{2-N},   x~ = R^2 x / |x|^2

At x = 0 the image factor (|x|/R)|y - x~| tends to R. Coincident nodes of a
quadrature grid receive the average of |x - y|^{2-N} over the ball with the
node's volume (N / (2 a^{N-2}), i.e. 3/(2a) in three dimensions).
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma

from . import kernels
from .errors import OutsideBall, PointsNotInH
from .geometry import HalfSpace, random_unit_vectors

BALL_TOL = 1e-12


def cell_radius(weight, N=3):
    """Radius of the N-ball whose volume equals ``weight``."""
    w = np.asarray(weight, dtype=float)
    return (w * gamma(N / 2 + 1) / np.pi ** (N / 2)) ** (1.0 / N)


def singular_average(radius, N=3):
    """Mean of |z|^{2-N} over the ball of the given radius."""
    return N / (2.0 * np.asarray(radius, dtype=float) ** (N - 2))


@dataclass(frozen=True)
class GreenKernel:
    R: float = 1.0
    N: int = 3
    diag_radius: float = 0.05

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("R must be positive")
        if self.N < 3:
            raise ValueError("the Green kernel needs N >= 3")
        if not self.diag_radius > 0:
            raise ValueError("diag_radius must be positive")

    def __call__(self, x, y):
        return green_eval(self, x, y)

    def image_factor(self, x, y):
        return image_factor(x, y, self.R)

    def matrix(self, points, weights, near_cap=True):
        return green_matrix(points, weights, self.R, self.N, near_cap=near_cap)


def image_factor(x, y, R):
    """(|x|/R) |y - x~|, continuous through x = 0 where it equals R."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r2 = np.sum(x * x, axis=-1)
    safe = np.where(r2 > 0, r2, 1.0)
    xt = (R * R / safe)[..., None] * x
    b = np.sqrt(r2) / R * np.linalg.norm(y - xt, axis=-1)
    return np.where(r2 > 0, b, R)


def _check_inside(p, R, name):
    r = np.linalg.norm(np.asarray(p, dtype=float), axis=-1)
    if np.any(r > R * (1.0 + BALL_TOL)):
        raise OutsideBall(f"{name} lies outside the closed ball of radius {R}")


def green(x, y, R=1.0, N=3, diag_radius=None):
    """Vectorised G over broadcast rows of x and y.

    Coincident pairs return the regularised diagonal when ``diag_radius`` is
    given, otherwise ``inf``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = np.linalg.norm(y - x, axis=-1)
    b = image_factor(x, y, R)
    e = N - 2
    with np.errstate(divide="ignore"):
        sing = 1.0 / a ** e
    if diag_radius is not None:
        sing = np.where(a == 0.0, singular_average(diag_radius, N), sing)
    out = sing - 1.0 / b ** e
    return out if out.ndim else float(out)


def green_eval(k, x, y):
    _check_inside(x, k.R, "x")
    _check_inside(y, k.R, "y")
    return green(x, y, k.R, k.N, diag_radius=k.diag_radius)


def green_matrix(points, weights, R=1.0, N=3, near_cap=True):
    """Dense kernel on quadrature nodes with cell-average diagonal.

    Off-diagonal entries are clipped at the smaller of the two nodes' cell
    averages when ``near_cap`` is set. Clipping by a value that is invariant
    under mirror pairing keeps every reflection identity and inequality of the
    continuous kernel intact.
    """
    points = np.asarray(points, dtype=float)
    _check_inside(points, R, "node")
    weights = np.broadcast_to(np.asarray(weights, dtype=float), (points.shape[0],))
    caps = singular_average(cell_radius(weights, N), N)
    return kernels.green_matrix(points, caps, R, N - 2, near_cap)


# -- reflection identities and the monotonicity inequality -------------------

def lemma42_equalities(k, x, y, h: HalfSpace):
    """|G(x,y) - G(sx,sy)| and |G(x,sy) - G(sx,y)| for a half-space through 0."""
    if not h.through_origin:
        raise ValueError("the half-space must pass through the origin")
    sx, sy = h.reflect(x), h.reflect(y)
    g = green(x, y, k.R, k.N)
    e1 = np.abs(g - green(sx, sy, k.R, k.N))
    e2 = np.abs(green(x, sy, k.R, k.N) - green(sx, y, k.R, k.N))
    return e1, e2


def _in_h(h, p):
    return h.signed_distance(p) > 0


def lemma42_monotonicity(k, x, y, h: HalfSpace, check=True):
    """G(x,y) - G(sigma x, y) for x, y on the H side."""
    if check and not (np.all(_in_h(h, x)) and np.all(_in_h(h, y))):
        raise PointsNotInH("x and y must lie in the open half-space")
    sx = h.reflect(x)
    return green(x, y, k.R, k.N) - green(sx, y, k.R, k.N)


def step_quantities(k, x, y, h: HalfSpace):
    """(a, a~, b, b~) of the monotonicity argument.

    a = |x - y|, a~ = |y - sx|, b = (|x|/R)|y - x~|, b~ = (|sx|/R)|y - (sx)~|.
    """
    sx = h.reflect(x)
    a = np.linalg.norm(x - y, axis=-1)
    at = np.linalg.norm(y - sx, axis=-1)
    b = image_factor(x, y, k.R)
    bt = image_factor(sx, y, k.R)
    return a, at, b, bt


def step1_direct(k, x, y, h):
    a, at, b, bt = step_quantities(k, x, y, h)
    return at ** 2 * b ** 2 - a ** 2 * bt ** 2, at ** 2 * b ** 2 + a ** 2 * bt ** 2


def step1_closed_form(k, x, y, h):
    """(2|x|^2/R^2)(R^2/|x|^2 - 1)(R^2 - |y|^2)[(y,x) - (y,sx)]."""
    R = k.R
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sx = h.reflect(x)
    x2 = np.sum(x * x, axis=-1)
    y2 = np.sum(y * y, axis=-1)
    inner = np.sum(y * x, axis=-1) - np.sum(y * sx, axis=-1)
    return 2.0 * (R * R - x2) / (R * R) * (R * R - y2) * inner


def step2_margins(k, x, y, h):
    """Margins of b~ >= b and of the ratio bound, cleared of denominators.

    The ratio bound (b~^e - a~^e)/(b^e - a^e) <= a~^e/a^e is multiplied through
    by a^e (b^e - a^e) >= 0, so pairs with b = a need no special case.
    """
    e = k.N - 2
    a, at, b, bt = step_quantities(k, x, y, h)
    m_b = (bt ** e - b ** e) / np.maximum(bt ** e, 1e-300)
    lhs = at ** e * (b ** e - a ** e) - a ** e * (bt ** e - at ** e)
    scale = at ** e * b ** e + a ** e * bt ** e
    return m_b, lhs / scale


def sample_ball(rng, n, R=1.0, N=3):
    d = random_unit_vectors(rng, n, N)
    r = R * rng.random(n) ** (1.0 / N)
    return d * r[:, None]


def audit(draws=100_000, seed=0, R=1.0, N=3):
    """Randomised audit of the kernel's symmetry, reflection and monotonicity facts."""
    rng = np.random.default_rng(seed)
    k = GreenKernel(R=R, N=N)
    x = sample_ball(rng, draws, R, N)
    y = sample_ball(rng, draws, R, N)
    normals = random_unit_vectors(rng, draws, N)

    g = green(x, y, R, N)
    sym = np.abs(g - green(y, x, R, N)) / (1.0 + np.abs(g))

    sx = x - 2.0 * np.sum(x * normals, axis=1)[:, None] * normals
    sy = y - 2.0 * np.sum(y * normals, axis=1)[:, None] * normals
    e1 = np.abs(g - green(sx, sy, R, N)) / (1.0 + np.abs(g))
    g_xsy = green(x, sy, R, N)
    e2 = np.abs(g_xsy - green(sx, y, R, N)) / (1.0 + np.abs(g_xsy))

    # fold both points onto the H side for the monotonicity statement
    xs = np.where((np.sum(x * normals, axis=1) > 0)[:, None], x, sx)
    ys = np.where((np.sum(y * normals, axis=1) > 0)[:, None], y, sy)
    sxs = xs - 2.0 * np.sum(xs * normals, axis=1)[:, None] * normals
    g_in = green(xs, ys, R, N)
    mono = (g_in - green(sxs, ys, R, N)) / (1.0 + np.abs(g_in))

    a = np.linalg.norm(xs - ys, axis=1)
    at = np.linalg.norm(ys - sxs, axis=1)
    b = image_factor(xs, ys, R)
    bt = image_factor(sxs, ys, R)
    direct = at ** 2 * b ** 2 - a ** 2 * bt ** 2
    x2 = np.sum(xs * xs, axis=1)
    y2 = np.sum(ys * ys, axis=1)
    closed = 2.0 * (R * R - x2) / (R * R) * (R * R - y2) * (np.sum(ys * xs, axis=1) - np.sum(ys * sxs, axis=1))
    step1_scale = at ** 2 * b ** 2 + a ** 2 * bt ** 2
    step1_res = np.abs(direct - closed) / step1_scale

    e = N - 2
    step2_b = (bt ** e - b ** e) / bt ** e
    step2_ratio = (at ** e * (b ** e - a ** e) - a ** e * (bt ** e - at ** e)) / (at ** e * b ** e + a ** e * bt ** e)

    return {
        "draws": int(draws),
        "seed": int(seed),
        "R": float(R),
        "N": int(N),
        "max_symmetry_residual": float(sym.max()),
        "max_equality_residual_i": float(e1.max()),
        "max_equality_residual_ii": float(e2.max()),
        "min_monotonicity_margin": float(mono.min()),
        "min_step1_margin": float((direct / step1_scale).min()),
        "max_step1_identity_residual": float(step1_res.max()),
        "min_step2_b_margin": float(step2_b.min()),
        "min_step2_ratio_margin": float(step2_ratio.min()),
        "min_green_value": float(g.min()),
    }


def audit_passes(report, eq_tol=1e-12, mono_tol=1e-12, step1_tol=1e-10):
    return (
        report["max_equality_residual_i"] <= eq_tol
        and report["max_equality_residual_ii"] <= eq_tol
        and report["min_monotonicity_margin"] >= -mono_tol
        and report["max_step1_identity_residual"] <= step1_tol
        and report["min_step1_margin"] >= -step1_tol
        and report["min_step2_b_margin"] >= -mono_tol
        and report["min_step2_ratio_margin"] >= -mono_tol
        and report["max_symmetry_residual"] <= eq_tol
    )
