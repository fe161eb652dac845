"""Separability of fields on R^N, symmetry axes through points, radial centres.

Everything is truncated to the analysis ball B_{R_max}; whether u decays at
infinity is an input flag (``decay_hint``), never inferred from samples.
"""
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import HypothesisNotMet, NotEven, NotRadial, PositivityError, RadialProbe
from .geometry import AxisLine, HalfSpace, random_unit_vectors
from .reports import AxisReport, SeparabilityReport
from .sphere import SphereFn, SphereGrid, _scan, sphere_caps_and_axis

PROBE_LADDER = (0.5, 1.0, 2.0, 4.0)


@dataclass(eq=False)
class FieldFn:
    """A positive field on R^N given by a vectorised callable on (..., N) points."""

    evaluator: object
    R_max: float = 8.0
    decay_hint: bool = False
    N: int = 3
    # sampled fields exist only inside their box; mirror points must stay in B_{R_max}
    bounded: bool = False
    interp_bound: float = 0.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        v = np.asarray(self.evaluator(x), dtype=float)
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise PositivityError("field evaluated to a non-positive or non-finite value")
        return v

    @classmethod
    def from_grid(cls, values, spacing, origin, R_max=None, decay_hint=False):
        """Trilinear (N-linear) interpolation of a Cartesian sample."""
        values = np.asarray(values, dtype=float)
        origin = np.asarray(origin, dtype=float)
        axes = [origin[d] + spacing * np.arange(values.shape[d]) for d in range(values.ndim)]
        interp = RegularGridInterpolator(axes, values, method="linear", bounds_error=True)
        if R_max is None:
            lo = origin
            hi = origin + spacing * (np.array(values.shape) - 1)
            R_max = float(np.min(np.minimum(-lo, hi)))

        def ev(x):
            x = np.asarray(x, dtype=float)
            return interp(x.reshape(-1, values.ndim)).reshape(x.shape[:-1])

        # N-linear error <= sum_d h^2/8 max|f_dd|, with h^2 f_dd read from second
        # differences and doubled for curvature between nodes
        bound = 0.0
        for d in range(values.ndim):
            sl = np.diff(values, n=2, axis=d)
            bound += float(np.abs(sl).max()) if sl.size else 0.0
        f = cls(ev, R_max, decay_hint, values.ndim, bounded=True, interp_bound=2.0 * bound / 8.0)
        f.grid_spacing = float(spacing)
        return f


def _ball_samples(rng, n, R, N):
    d = random_unit_vectors(rng, n, N)
    return d * (R * rng.random(n) ** (1.0 / N))[:, None]


def is_separable_field(u: FieldFn, n_halfspaces=256, n_samples=2000, eps=1e-9, seed=0):
    """Random general half-spaces {n.x > c}, |c| <= R_max, sampled in H cap B_{R_max}."""
    rng = np.random.default_rng(seed)
    normals = random_unit_vectors(rng, n_halfspaces, u.N)
    offsets = u.R_max * (2 * rng.random(n_halfspaces) - 1)
    cases = []
    vmax = 0.0
    for nrm, c in zip(normals, offsets):
        h = HalfSpace(nrm, c)
        x = np.empty((0, u.N))
        for _ in range(50):
            y = _ball_samples(rng, 4 * n_samples, u.R_max, u.N)
            keep = h.signed_distance(y) > 0
            if u.bounded:
                keep &= np.linalg.norm(h.reflect(y), axis=1) <= u.R_max
            x = np.vstack([x, y[keep]])
            if x.shape[0] >= n_samples:
                break
        x = x[:n_samples]
        if x.shape[0] == 0:
            continue
        ux, us = u(x), u(h.reflect(x))
        vmax = max(vmax, ux.max(), us.max())
        cases.append((h, x, us - ux))
    tol = eps * vmax + u.interp_bound
    return _scan(((h, x, d, tol) for h, x, d in cases), tol)


def probe_sphere(u: FieldFn, x, radius, n_lat=33, n_lon=64):
    g = SphereGrid(n_lat, n_lon)
    return SphereFn(g.sample(lambda p: u(np.asarray(x, dtype=float) + radius * p)))


def axis_through_point(u: FieldFn, x, probe_radius=None, eps=1e-9, n_lat=33, n_lon=64):
    """Symmetry axis through x read off the sphere of radius probe_radius around x.

    Without a radius the ladder 0.5, 1, 2, 4 is tried in order.
    """
    return axis_probe(u, x, probe_radius, eps, n_lat, n_lon)[0]


def axis_probe(u: FieldFn, x, probe_radius=None, eps=1e-9, n_lat=33, n_lon=64):
    """(AxisLine, probe radius used, sphere AxisReport) for axis_through_point."""
    x = np.asarray(x, dtype=float)
    radii = PROBE_LADDER if probe_radius is None else (probe_radius,)
    for r in radii:
        s = probe_sphere(u, x, r, n_lat, n_lon)
        if s.vmax - s.vmin <= eps * s.vmax:
            continue
        rep = sphere_caps_and_axis(s, eps=eps, check=False)
        return AxisLine(x, rep.direction), r, rep
    raise RadialProbe(f"u is constant on every probe sphere around {x.tolist()} (radii {list(radii)})")


# -- even 1-D functions ---------------------------------------------------------------

def even_monotone_check(f, X=None, eps=1e-9, decay_hint=False):
    """I/J/K labels of reflection points alpha >= 0 for an even sample on [-X, X].

    ``f`` is either a uniform sample with an odd number of points (symmetric
    about 0) or a callable, sampled at 2001 points on [-X, X]. Reflection
    points are the nodes and midpoints alpha >= 0; for each, y runs over
    nodes with alpha < y <= X whose mirror 2 alpha - y stays in the sample.
    """
    if callable(f):
        if X is None:
            raise ValueError("X is required when f is a callable")
        x = np.linspace(-X, X, 2001)
        v = np.asarray(f(x), dtype=float)
    else:
        v = np.asarray(f, dtype=float)
        X = 1.0 if X is None else X
        x = np.linspace(-X, X, v.size)
    if v.size % 2 == 0:
        raise ValueError("the sample must have an odd number of points, symmetric about 0")
    tol = eps * np.abs(v).max()
    even_err = float(np.abs(v - v[::-1]).max())
    if even_err > tol:
        raise NotEven(f"f(x) - f(-x) reaches {even_err:.3g} > {tol:.3g}")
    n = v.size
    mid = n - 1  # twice the index of x = 0
    labels = []
    alphas = []
    i = np.arange(n)
    for a2 in range(mid, 2 * (n - 1) + 1):
        y = i[(2 * i > a2) & (a2 - i >= 0)]
        if y.size == 0:
            continue
        d = v[y] - v[a2 - y]
        pos, neg = bool(np.any(d > tol)), bool(np.any(d < -tol))
        labels.append("IJ" if pos and neg else "I" if pos else "J" if neg else "K")
        alphas.append(-X + (a2 / 2.0) * (2 * X / (n - 1)))
    labels = np.array(labels)
    alphas = np.array(alphas)
    eq8 = not np.any(labels == "IJ")
    half = v[mid // 2:]
    rise = float(max(0.0, np.diff(half).max()))
    monotone = rise <= tol
    k_nonzero = bool(np.any((labels == "K") & (alphas > 1e-12)))
    if monotone and eq8:
        verdict = "pass"
    elif not decay_hint and k_nonzero:
        verdict = "periodic-type"
    elif decay_hint and eq8:
        verdict = "inconsistent"
    else:
        verdict = "hypothesis-fails"
    notes = []
    if verdict == "periodic-type":
        notes.append("reflection symmetry about some alpha > 0; the decay hypothesis liminf u = 0 is not met")
    return {
        "alphas": alphas,
        "labels": labels.tolist(),
        "eq8_holds": eq8,
        "k_nonzero": k_nonzero,
        "nonincreasing": monotone,
        "max_rise": rise,
        "decay_hint": bool(decay_hint),
        "verdict": verdict,
        "notes": notes,
    }


# -- radial centre ------------------------------------------------------------------------

def _quadratic_peak(f0, fm, fp, step):
    den = fm - 2 * f0 + fp
    if den >= 0:
        return 0.0
    return float(np.clip(0.5 * step * (fm - fp) / den, -step, step))


def refine_max(u: FieldFn, x0, step, iters=60, min_step=1e-9):
    """Coordinate-wise 3-point quadratic fits around x0 with step halving."""
    x = np.array(x0, dtype=float)
    f0 = float(u(x))
    for _ in range(iters):
        moved = False
        for d in range(x.size):
            e = np.zeros(x.size)
            e[d] = step
            fm, fp = float(u(x - e)), float(u(x + e))
            t = _quadratic_peak(f0, fm, fp, step)
            cand = x.copy()
            cand[d] += t
            fc = float(u(cand))
            if fc > f0:
                x, f0, moved = cand, fc, True
        if not moved:
            step *= 0.5
            if step < min_step:
                break
    return x


def radial_center_and_profile(u: FieldFn, eps=1e-6, spacing=0.25, n_radii=24, n_lat=17, n_lon=32):
    """Centre x* and profile v(r) of a separable field with decay.

    x* starts at the argmax of a Cartesian sample with the given spacing and
    is refined by quadratic fits on the evaluator.
    """
    if not u.decay_hint:
        raise HypothesisNotMet("radial recovery needs decay_hint (liminf u = 0 at infinity)")
    spacing = getattr(u, "grid_spacing", spacing)
    m = int(np.floor(u.R_max / spacing))
    ax = spacing * np.arange(-m, m + 1)
    G = np.stack(np.meshgrid(*([ax] * u.N), indexing="ij"), axis=-1)
    vals = u(G)
    inside = np.linalg.norm(G, axis=-1) <= u.R_max
    vals = np.where(inside, vals, -np.inf)
    idx = np.unravel_index(np.argmax(vals), vals.shape)
    x0 = G[idx]
    xs = refine_max(u, x0, spacing)
    reach = u.R_max - np.linalg.norm(xs)
    if reach <= 0:
        raise NotRadial("the maximiser lies on the analysis boundary", 0.0)
    radii = reach * np.arange(1, n_radii + 1) / (n_radii + 1)
    pts = SphereGrid(n_lat, n_lon).points.reshape(-1, u.N)
    vmax = float(u(xs))
    limit = eps + u.interp_bound / vmax
    prof = [vmax]
    spreads = []
    for r in radii:
        s = u(xs + r * pts)
        spread = float(np.ptp(s) / s.max())
        spreads.append(spread)
        if spread > limit:
            raise NotRadial(f"relative spread {spread:.3g} on the sphere of radius {r:.4g} exceeds {limit:g}", float(r))
        prof.append(float(s.mean()))
    prof = np.array(prof)
    rise = float(max(0.0, np.diff(prof).max()))
    return xs, {
        "r": np.concatenate([[0.0], radii]),
        "value": prof,
        "max_spread": max(spreads),
        "nonincreasing": rise <= limit * vmax,
        "grid_argmax": x0,
        "spacing": spacing,
    }


def classify_field(u: FieldFn, eps=1e-6, seed=0, n_points=6):
    """Radial / axial-field / inconsistent classification of a separable field."""
    if u.decay_hint:
        try:
            xs, prof = radial_center_and_profile(u, eps)
        except NotRadial as exc:
            return AxisReport("inconsistent", notes=[f"decay_hint set but field is not radial: {exc}"],
                              checks={"radial": False})
        return AxisReport("radial", center=xs, profile={"r": prof["r"], "value": prof["value"]},
                          checks={"radial": True, "profile_nonincreasing": prof["nonincreasing"]},
                          residuals={"max_spread": prof["max_spread"]})
    rng = np.random.default_rng(seed)
    base = _ball_samples(rng, n_points, 0.5 * u.R_max, u.N)
    lines = [axis_through_point(u, b, eps=eps) for b in base]
    d0 = lines[0].direction
    worst = max(lines[0].angle_to(L) for L in lines)
    return AxisReport("axial", direction=d0, residuals={"max_axis_angle": worst},
                      checks={"axes_parallel": worst <= np.radians(2.0)})


# -- named fixtures -----------------------------------------------------------------------

def tanh_field(x):
    return 2.0 + np.tanh(-np.asarray(x)[..., 2])


def gaussian_sum(x, center=(0.0, 0.0, 0.0)):
    x = np.asarray(x, dtype=float)
    return np.exp(-np.sum((x - np.asarray(center)) ** 2, axis=-1)) + 0.01 * np.exp(-np.sum(x * x, axis=-1) / 100.0)


def two_bumps(x):
    x = np.asarray(x, dtype=float)
    c = np.array([4.0, 0.0, 0.0])
    return 1.0 / (1.0 + np.sum(x * x, axis=-1)) + 0.5 / (1.0 + np.sum((x - c) ** 2, axis=-1))


def lorentzian(center, a=1.0, k=1.0):
    c = np.asarray(center, dtype=float)

    def f(x):
        return a / (1.0 + np.sum((np.asarray(x, dtype=float) - c) ** 2, axis=-1)) ** k

    return f


def exp_decay(x):
    return np.exp(-np.linalg.norm(np.asarray(x, dtype=float), axis=-1))
