"""Separability, extremal arcs and axis recovery for sampled functions on S^1.

Nodes sit at ``phase + 2 pi j / n``. Reflection across the line through the
origin at angle ``phase + pi k / n`` maps node j to node (k - j) mod n, so the
2n lines with k = 0 .. 2n-1 are exactly the grid-preserving reflections (each
line appears twice, once per choice of open half-circle).
"""
from dataclasses import dataclass
import csv

import numpy as np

from . import kernels
from .errors import ConstantFunction, FormatError, GridError, NotSeparable, PositivityError
from .geometry import HalfSpace
from .reports import AxisReport, SeparabilityReport, Witness

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class CircleFn:
    values: np.ndarray
    phase: float = 0.0

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1:
            raise GridError("circle values must be one-dimensional")
        n = v.size
        if n < 8 or n % 2:
            raise GridError(f"n_nodes must be even and >= 8, got {n}")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise PositivityError("circle function values must be finite and positive")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, f, n_nodes, phase=0.0):
        return cls(f(phase + TWO_PI * np.arange(n_nodes) / n_nodes), phase)

    @property
    def n_nodes(self):
        return self.values.size

    @property
    def step(self):
        return TWO_PI / self.n_nodes

    @property
    def angles(self):
        return self.phase + self.step * np.arange(self.n_nodes)

    @property
    def points(self):
        t = self.angles
        return np.column_stack([np.cos(t), np.sin(t)])

    def __call__(self, theta):
        """Periodic linear interpolation in angle."""
        g = np.mod(np.asarray(theta, dtype=float) - self.phase, TWO_PI) / self.step
        j = np.floor(g).astype(int) % self.n_nodes
        t = g - np.floor(g)
        v = self.values
        return (1 - t) * v[j] + t * v[(j + 1) % self.n_nodes]

    def scaled_tol(self, eps):
        return eps * float(self.values.max())


@dataclass
class ExtremalArcs:
    alpha0: float
    theta1: float
    theta2: float
    alpha_min: float
    max_run: tuple
    min_run: tuple

    @property
    def antipodal_error(self):
        d = np.mod(self.alpha_min - self.alpha0 + np.pi, TWO_PI) - np.pi
        return float(np.pi - abs(d))


def line_angle(k, n_nodes, phase=0.0):
    return phase + np.pi * k / n_nodes


def line_halfspace(alpha):
    """Half-space whose trace on S^1 is the open arc (alpha, alpha + pi)."""
    return HalfSpace(np.array([-np.sin(alpha), np.cos(alpha)]), 0.0)


def circle_reflections(n_nodes, phase=0.0):
    """The 2n grid-preserving origin-through half-spaces, ordered by angle."""
    if n_nodes % 2 or n_nodes < 2:
        raise GridError(f"n_nodes must be even, got {n_nodes}")
    return [line_halfspace(line_angle(k, n_nodes, phase)) for k in range(2 * n_nodes)]


def half_circle(k, n):
    """(nodes in the open half-circle of line k, their mirror nodes)."""
    j = np.arange(n)
    m = (2 * j - k) % (2 * n)
    inside = (m > 0) & (m < n)
    jj = j[inside]
    return jj, (k - jj) % n


def _witness(v, k, tol):
    n = v.n_nodes
    jj, mm = half_circle(k, n)
    d = v.values[mm] - v.values[jj]
    ip, im = int(np.argmax(d)), int(np.argmin(d))
    alpha = float(np.mod(line_angle(k, n, v.phase), TWO_PI))
    h = line_halfspace(alpha)
    pts = v.points
    return Witness(
        normal=h.normal.copy(), offset=0.0,
        x_plus=pts[jj[ip]], x_minus=pts[jj[im]],
        severity=float(min(d[ip], -d[im])), alpha=alpha, index=int(k),
    )


def _pick_witness(v, tol):
    """Strongest two-sided violation; ties resolved towards the smallest angle."""
    sev = kernels.circle_severities(v.values, tol)
    top = sev.max()
    k = int(np.flatnonzero(sev >= top * (1.0 - 1e-9))[0])
    return _witness(v, k, tol)


def _interp_separable(v, alphas, tol):
    # arbitrary lines: reflected values come from periodic linear interpolation
    theta = v.angles
    bad = None
    for idx, a in enumerate(np.asarray(alphas, dtype=float)):
        rel = np.mod(theta - a, TWO_PI)
        inside = (rel > 1e-12) & (rel < np.pi - 1e-12)
        d = v(2 * a - theta[inside]) - v.values[inside]
        if np.any(d > tol) and np.any(d < -tol):
            sev = float(min(d.max(), -d.min()))
            if bad is None or sev > bad[0] * (1 + 1e-9):
                pts = v.points[inside]
                h = line_halfspace(a)
                bad = (sev, Witness(h.normal.copy(), 0.0, pts[np.argmax(d)], pts[np.argmin(d)],
                                    sev, alpha=float(np.mod(a, TWO_PI)), index=idx))
    return bad


def is_separable_circle(v: CircleFn, eps=1e-9, alphas=None, interp_bound=0.0):
    """Decide separability over grid reflections (default) or given line angles.

    Differences within ``eps * max(v)`` (+ ``interp_bound`` in interpolation
    mode) count as equal and satisfy both branches.
    """
    tol = v.scaled_tol(eps)
    if alphas is not None:
        tol += interp_bound
        bad = _interp_separable(v, alphas, tol)
        n_tested = len(np.atleast_1d(alphas))
        if bad is None:
            return SeparabilityReport(True, n_tested, tol)
        return SeparabilityReport(False, n_tested, tol, bad[1])
    n_tested = 2 * v.n_nodes
    if kernels.circle_first_violation(v.values, tol) < 0:
        return SeparabilityReport(True, n_tested, tol)
    return SeparabilityReport(False, n_tested, tol, _pick_witness(v, tol))


def _runs(mask):
    """Maximal cyclic runs of True as (start, length)."""
    n = mask.size
    if mask.all():
        return [(0, n)]
    if not mask.any():
        return []
    start = int(np.flatnonzero(~mask)[0]) + 1
    runs = []
    length = 0
    for off in range(n):
        i = (start + off) % n
        if mask[i]:
            if length == 0:
                s = i
            length += 1
        elif length:
            runs.append((s, length))
            length = 0
    if length:
        runs.append((s, length))
    return runs


def extremal_arcs(v: CircleFn, eps=1e-9):
    vals = v.values
    tol = v.scaled_tol(eps)
    vmax, vmin = vals.max(), vals.min()
    if vmax - vmin <= tol:
        raise ConstantFunction("function is constant within tolerance")
    top = _runs(vals >= vmax - tol)
    bottom = _runs(vals <= vmin + tol)
    if len(top) != 1 or len(bottom) != 1:
        raise NotSeparable(f"extremal sets are not arcs ({len(top)} max runs, {len(bottom)} min runs)")
    (s1, l1), (s2, l2) = top[0], bottom[0]
    step = v.step
    alpha0 = float(np.mod(v.phase + step * (s1 + (l1 - 1) / 2.0), TWO_PI))
    alpha_min = float(np.mod(v.phase + step * (s2 + (l2 - 1) / 2.0), TWO_PI))
    return ExtremalArcs(alpha0, step * (l1 - 1) / 2.0, step * (l2 - 1) / 2.0, alpha_min, top[0], bottom[0])


def circle_axis_and_profile(v: CircleFn, eps=1e-9, check=True):
    """Constant, or axial with the max-arc centre as axis and its monotone profile."""
    tol = v.scaled_tol(eps)
    sep = is_separable_circle(v, eps) if check else None
    if sep is not None and not sep.separable:
        raise NotSeparable("function is not separable on S^1", sep)
    vals = v.values
    n = v.n_nodes
    spread = float(vals.max() - vals.min())
    if spread <= tol:
        return AxisReport("constant", residuals={"spread": spread}, separability=sep)
    antipodal = float(np.max(np.abs(vals - np.roll(vals, -n // 2))))
    if antipodal <= tol:
        # separable and v(a) = v(a + pi) everywhere forces a constant
        return AxisReport("constant", residuals={"spread": spread, "antipodal": antipodal},
                          notes=["antipodally symmetric separable function"], separability=sep)
    arcs = extremal_arcs(v, eps)
    s1, l1 = arcs.max_run
    twice_center = 2 * s1 + (l1 - 1)  # axis angle = phase + pi * twice_center / n
    j = np.arange(n)
    mirror = (twice_center - j) % n
    mirror_res = float(np.max(np.abs(vals[mirror] - vals)))
    # walk counterclockwise from the axis to its antipode (offsets in half-steps)
    off = (2 * j - twice_center) % (2 * n)
    sel = np.flatnonzero(off <= n)
    order = np.argsort(off[sel])
    nodes = sel[order]
    prof = vals[nodes]
    prof_theta = off[nodes] * np.pi / n
    rises = np.diff(prof)
    mono_violation = float(max(0.0, rises.max() if rises.size else 0.0))
    step = v.step
    direction = np.array([np.cos(arcs.alpha0), np.sin(arcs.alpha0)])
    checks = {
        "mirror_symmetric": mirror_res <= tol,
        "profile_nonincreasing": mono_violation <= tol,
        "antipodal_centres": arcs.antipodal_error <= step + 1e-12,
        "arc_angles_sum_below_pi": arcs.theta1 + arcs.theta2 < np.pi,
    }
    return AxisReport(
        "axial",
        direction=direction,
        profile={"theta": prof_theta, "value": prof},
        caps={"alpha0": arcs.alpha0, "theta1": arcs.theta1, "theta2": arcs.theta2, "alpha_min": arcs.alpha_min},
        residuals={"mirror": mirror_res, "monotone_violation": mono_violation,
                   "antipodal_error": arcs.antipodal_error, "spread": spread},
        checks=checks,
        separability=sep,
    )


def from_half_profile(profile, alpha0, n_nodes):
    """Circle function with axis alpha0 and a nonincreasing profile on [0, pi].

    ``profile`` is a callable on [0, pi]; the value at alpha0 + t and alpha0 - t
    is profile(|t|).
    """
    theta = TWO_PI * np.arange(n_nodes) / n_nodes
    t = np.abs(np.mod(theta - alpha0 + np.pi, TWO_PI) - np.pi)
    return CircleFn(profile(t))


def read_csv(path):
    """Read ``theta,value`` rows; spacing must be uniform and close the circle."""
    thetas, vals = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, 1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if row[0].strip() == "theta":
                continue
            try:
                thetas.append(float(row[0]))
                vals.append(float(row[1]))
            except (ValueError, IndexError) as exc:
                raise FormatError(f"{path}:{lineno}: expected 'theta,value', got {row!r}") from exc
    th = np.array(thetas)
    if th.size < 8:
        raise FormatError(f"{path}: need at least 8 nodes, got {th.size}")
    d = np.diff(th)
    if np.any(d <= 0):
        raise FormatError(f"{path}: theta must be strictly increasing")
    step = TWO_PI / th.size
    if np.max(np.abs(d - step)) > 1e-9 * step:
        raise FormatError(f"{path}: theta spacing is not uniform 2*pi/n to 1e-9 relative")
    try:
        return CircleFn(np.array(vals), phase=float(th[0]))
    except (GridError, PositivityError) as exc:
        raise FormatError(f"{path}: {exc}") from exc


def write_csv(v: CircleFn, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta", "value"])
        for t, x in zip(v.angles, v.values):
            w.writerow([repr(float(t)), repr(float(x))])
