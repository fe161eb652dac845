"""Separability in B_R on a shell-tensor grid and the shared symmetry axis.

A BallFn holds m concentric shells r_j = j R / m, each sampled on one
latitude-longitude grid, plus the value at the centre. Every origin-through
reflection maps each shell to itself, so comparisons never mix radii.
"""
from dataclasses import dataclass
import csv

import numpy as np

from .errors import AxisMismatch, FormatError, GridError, MonotonicityError, NotSeparable, PositivityError
from .geometry import angle_between, unit
from .reports import AxisReport
from .sphere import (DEFAULT_HALFSPACES, SphereFn, SphereGrid, _parse_header, _scan, exact_reflections,
                     grid_map_for, sample_halfspaces, sphere_caps_and_axis, to_colat_lon)
from . import kernels

MIN_COLLINEAR_DEG = 2.0


@dataclass(frozen=True, eq=False)
class BallFn:
    R: float
    shells: np.ndarray  # (m, n_lat, n_lon)
    center_value: float

    def __post_init__(self):
        if not self.R > 0:
            raise GridError("ball radius must be positive")
        s = np.array(self.shells, dtype=float)
        if s.ndim != 3 or s.shape[0] < 1:
            raise GridError("shells must be an (m, n_lat, n_lon) array")
        grid = SphereGrid(s.shape[1], s.shape[2])
        if not np.all(np.isfinite(s)) or np.any(s <= 0) or not self.center_value > 0:
            raise PositivityError("ball function values must be finite and positive")
        s[:, 0, :] = s[:, 0, :1]
        s[:, -1, :] = s[:, -1, :1]
        s.setflags(write=False)
        object.__setattr__(self, "shells", s)
        object.__setattr__(self, "R", float(self.R))
        object.__setattr__(self, "center_value", float(self.center_value))
        object.__setattr__(self, "grid", grid)

    @classmethod
    def from_function(cls, f, R=1.0, m=12, n_lat=33, n_lon=64):
        """Sample a vectorised f(points[..., 3]) on the shell grid."""
        grid = SphereGrid(n_lat, n_lon)
        radii = R * np.arange(1, m + 1) / m
        pts = radii[:, None, None, None] * grid.points[None]
        vals = np.array(f(pts), dtype=float)
        vals[:, 0, :] = vals[:, 0, :1]
        vals[:, -1, :] = vals[:, -1, :1]
        return cls(R, vals, float(f(np.zeros(3))))

    @property
    def m(self):
        return self.shells.shape[0]

    @property
    def radii(self):
        return self.R * np.arange(1, self.m + 1) / self.m

    @property
    def vmax(self):
        return float(max(self.shells.max(), self.center_value))

    def shell(self, j):
        """SphereFn of shell j (0-based, radius radii[j])."""
        return SphereFn(self.shells[j])

    def scaled(self, lam):
        return BallFn(self.R, lam * self.shells, lam * self.center_value)

    def interp_bound(self):
        return max(SphereFn(s).interp_bound() for s in self.shells)

    def __call__(self, x):
        """Bilinear on each shell, linear in radius (centre value at r = 0)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        r = np.linalg.norm(x, axis=-1)
        colat, lon = to_colat_lon(x)
        g = np.clip(r / self.R * self.m, 0.0, self.m)
        j0 = np.minimum(np.floor(g).astype(int), self.m - 1)
        t = g - j0
        out = np.empty(r.shape)
        lower = np.empty(r.shape)
        for j in range(self.m):
            sel = j0 == j
            if np.any(sel):
                out[sel] = kernels.sphere_interp(self.shells[j], colat[sel], lon[sel])
                if j == 0:
                    lower[sel] = self.center_value
                else:
                    lower[sel] = kernels.sphere_interp(self.shells[j - 1], colat[sel], lon[sel])
        return (1 - t) * lower + t * out


def is_separable_ball(u: BallFn, n_halfspaces=DEFAULT_HALFSPACES, eps=1e-9, seed=0):
    """One global branch per half-space across all shells simultaneously."""
    tol = eps * u.vmax
    bound = u.interp_bound()
    grid = u.grid
    pts = grid.points
    radii = u.radii

    def gen():
        for h, side, rmap, cmap in exact_reflections(grid):
            d = u.shells[:, rmap[side], cmap[side]] - u.shells[:, side]
            x = (radii[:, None, None] * pts[side][None]).reshape(-1, 3)
            yield h, x, d.ravel(), tol
        for h in sample_halfspaces(n_halfspaces, seed):
            found = grid_map_for(grid, h)
            if found is not None:
                side, rmap, cmap = found
                d = u.shells[:, rmap[side], cmap[side]] - u.shells[:, side]
                t = tol
            else:
                side = grid.node_mask & (pts @ h.normal > 1e-12)
                colat, lon = to_colat_lon(h.reflect(pts[side]))
                d = np.stack([kernels.sphere_interp(s, colat, lon) - s[side] for s in u.shells])
                t = tol + bound
            x = (radii[:, None, None] * pts[side][None]).reshape(-1, 3)
            yield h, x, d.ravel(), t

    return _scan(gen(), tol)


def ball_axis(u: BallFn, eps=1e-9, check=True, n_halfspaces=DEFAULT_HALFSPACES, seed=0):
    """Per-shell axis analysis aggregated into Radial or Axial.

    Nonconstant shells must point their max caps the same way within
    max(2 deg, 3 angular grid steps).
    """
    sep = is_separable_ball(u, n_halfspaces, eps, seed) if check else None
    if sep is not None and not sep.separable:
        raise NotSeparable("function is not separable in the ball", sep)
    tol_angle = max(np.radians(MIN_COLLINEAR_DEG), 3 * u.grid.resolution)
    shell_reports = []
    axial = []
    for j in range(u.m):
        s = u.shell(j)
        # the constant threshold uses this shell's own max
        rep = sphere_caps_and_axis(s, eps=eps, check=False)
        shell_reports.append(rep)
        if rep.kind == "axial":
            axial.append(j)
    if not axial:
        return AxisReport("radial", center=np.zeros(3),
                          profile={"r": np.concatenate([[0.0], u.radii]),
                                   "value": np.concatenate([[u.center_value], u.shells[:, 0, 0]])},
                          checks={"profile_recorded": True},
                          notes=["every shell is constant"], separability=sep)
    dirs = np.array([shell_reports[j].direction for j in axial])
    worst, pair = 0.0, None
    for a in range(len(axial)):
        for b in range(a + 1, len(axial)):
            ang = angle_between(dirs[a], dirs[b])
            if ang > worst:
                worst, pair = ang, (axial[a], axial[b])
    if worst > tol_angle:
        raise AxisMismatch(f"shell axes differ by {np.degrees(worst):.3f} deg (shells {pair})", pair)
    # spread weighting: shells with more variation pin the axis better
    wts = np.array([shell_reports[j].residuals["spread"] for j in axial])
    d = unit(np.einsum("ij,i->j", dirs, wts))
    checks = {
        "axes_collinear": worst <= tol_angle,
        "profiles_nonincreasing": all(shell_reports[j].checks["profile_nonincreasing"] for j in axial),
        "caps_ordered": all(shell_reports[j].checks["caps_ordered"] for j in axial),
    }
    return AxisReport(
        "axial", direction=d, center=np.zeros(3),
        profile={"shells": {int(j): {"angle": shell_reports[j].profile["angle"],
                                     "value": shell_reports[j].profile["value"]} for j in axial}},
        residuals={"max_pairwise_angle": worst, "collinear_tolerance": tol_angle},
        checks=checks,
        notes=[f"{u.m - len(axial)} constant shells"],
        separability=sep,
    )


def make_separable_ball(g, h, R=1.0, m=12, n_lat=33, n_lon=64, n_profile=1025):
    """Sampled product g(x_3) h(|x|) on the shell grid.

    ``g`` and ``h`` are samples on uniform grids over [-R, R] and [0, R]
    (read by linear interpolation) or callables, which are sampled at
    ``n_profile`` points first.
    """
    tg = np.linspace(-R, R, n_profile)
    th = np.linspace(0.0, R, n_profile)
    gs = np.asarray(g(tg) if callable(g) else g, dtype=float)
    hs = np.asarray(h(th) if callable(h) else h, dtype=float)
    tg = np.linspace(-R, R, gs.size)
    th = np.linspace(0.0, R, hs.size)
    if np.any(np.diff(gs) > 1e-12):
        i = int(np.argmax(np.diff(gs)))
        raise MonotonicityError(f"g increases between t={tg[i]:.6g} and t={tg[i + 1]:.6g}")
    if np.any(gs <= 0):
        raise PositivityError("g must be positive")

    def f(x):
        r = np.linalg.norm(x, axis=-1)
        return np.interp(x[..., 2], tg, gs) * np.interp(r, th, hs)

    return BallFn.from_function(f, R, m, n_lat, n_lon)


def example21(R=1.0, m=12, n_lat=33, n_lon=64):
    """g(t) = 2 - tanh(t), h(r) = 1 - (r/R)^2 + 0.1."""
    def f(x):
        r = np.linalg.norm(x, axis=-1)
        return (2.0 - np.tanh(x[..., 2])) * (1.0 - (r / R) ** 2 + 0.1)

    return BallFn.from_function(f, R, m, n_lat, n_lon)


def read_csv(path):
    """Rows ``shell_index,lat_index,lon_index,value``; shell 0 is the centre."""
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise FormatError(f"{path}:1: missing '# R=..,m=..,n_lat=..,n_lon=..' header")
    hdr = _parse_header(lines[0], path)
    try:
        R = float(hdr["R"])
        m, n_lat, n_lon = int(hdr["m"]), int(hdr["n_lat"]), int(hdr["n_lon"])
    except (KeyError, ValueError) as exc:
        raise FormatError(f"{path}:1: header needs R, m, n_lat, n_lon") from exc
    vals = np.full((m, n_lat, n_lon), np.nan)
    center = None
    for lineno, row in enumerate(csv.reader(lines[1:]), 2):
        if not row or row[0].strip() in ("shell_index", "") or row[0].startswith("#"):
            continue
        try:
            s, i, k, x = int(row[0]), int(row[1]), int(row[2]), float(row[3])
        except (ValueError, IndexError) as exc:
            raise FormatError(f"{path}:{lineno}: expected 'shell_index,lat_index,lon_index,value'") from exc
        if s == 0:
            center = x
            continue
        if not (1 <= s <= m and 0 <= i < n_lat and 0 <= k < n_lon):
            raise FormatError(f"{path}:{lineno}: index ({s},{i},{k}) outside the grid")
        if i in (0, n_lat - 1):
            vals[s - 1, i, :] = x
        else:
            vals[s - 1, i, k] = x
    if center is None or np.isnan(vals).any():
        raise FormatError(f"{path}: grid has missing nodes")
    try:
        return BallFn(R, vals, center)
    except (GridError, PositivityError) as exc:
        raise FormatError(f"{path}: {exc}") from exc


def write_csv(u: BallFn, path):
    with open(path, "w", newline="") as fh:
        fh.write(f"# R={u.R!r},m={u.m},n_lat={u.grid.n_lat},n_lon={u.grid.n_lon}\n")
        w = csv.writer(fh)
        w.writerow(["shell_index", "lat_index", "lon_index", "value"])
        w.writerow([0, 0, 0, repr(u.center_value)])
        for j in range(u.m):
            for i in range(u.grid.n_lat):
                cols = [0] if i in (0, u.grid.n_lat - 1) else range(u.grid.n_lon)
                for k in cols:
                    w.writerow([j + 1, i, k, repr(float(u.shells[j, i, k]))])
