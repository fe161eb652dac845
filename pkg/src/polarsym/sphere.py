"""Separability and cap/axis structure of sampled functions on S^2.

The grid is latitude-longitude: colatitudes ``pi i/(n_lat-1)`` including both
poles, longitudes ``2 pi k/n_lon``. Values are stored as an (n_lat, n_lon)
array whose pole rows are constant; node-level reductions use ``node_mask``
so each pole counts once.
"""
from dataclasses import dataclass
from functools import cached_property
import csv

import numpy as np

from . import kernels
from .circle import CircleFn
from .errors import (CapFitError, FormatError, GridError, NotSeparable, PositivityError,
                     TangentOrEmpty)
from .geometry import Cap, HalfSpace, angle_between, orthonormal_complement, random_unit_vectors, unit
from .reports import AxisReport, SeparabilityReport, Witness

DEFAULT_HALFSPACES = 256
ALIGN_TOL = 1e-9


def to_colat_lon(x):
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    colat = np.arccos(np.clip(x[..., 2] / np.where(r > 0, r, 1.0), -1.0, 1.0))
    lon = np.mod(np.arctan2(x[..., 1], x[..., 0]), 2 * np.pi)
    return colat, lon


def from_colat_lon(colat, lon):
    s = np.sin(colat)
    return np.stack([s * np.cos(lon), s * np.sin(lon), np.cos(colat)], axis=-1)


@dataclass(frozen=True, eq=False)
class SphereGrid:
    n_lat: int
    n_lon: int

    def __post_init__(self):
        if self.n_lat < 3:
            raise GridError(f"n_lat must be >= 3, got {self.n_lat}")
        if self.n_lon < 4 or self.n_lon % 2:
            raise GridError(f"n_lon must be even and >= 4, got {self.n_lon}")

    @property
    def dtheta(self):
        return np.pi / (self.n_lat - 1)

    @property
    def dphi(self):
        return 2 * np.pi / self.n_lon

    @property
    def resolution(self):
        """Largest angular step of the grid (radians)."""
        return max(self.dtheta, self.dphi)

    @property
    def colat(self):
        return self.dtheta * np.arange(self.n_lat)

    @property
    def lon(self):
        return self.dphi * np.arange(self.n_lon)

    @cached_property
    def points(self):
        c, l = np.meshgrid(self.colat, self.lon, indexing="ij")
        pts = from_colat_lon(c, l)
        pts.flags.writeable = False
        return pts

    @property
    def node_mask(self):
        m = np.ones((self.n_lat, self.n_lon), dtype=bool)
        m[0, 1:] = False
        m[-1, 1:] = False
        return m

    @cached_property
    def weights(self):
        """Solid angle per node (zero on duplicated pole entries); sums to 4 pi."""
        th = self.colat
        half = self.dtheta / 2
        w = np.empty((self.n_lat, self.n_lon))
        w[1:-1] = (self.dphi * (np.cos(th[1:-1] - half) - np.cos(th[1:-1] + half)))[:, None]
        w[0] = 0.0
        w[-1] = 0.0
        pole = 2 * np.pi * (1 - np.cos(half))
        w[0, 0] = pole
        w[-1, 0] = pole
        w.flags.writeable = False
        return w

    def sample(self, f):
        """Evaluate a vectorised f(points[..., 3]) on the grid with exact pole rows."""
        v = np.array(f(self.points), dtype=float)
        v[0, :] = v[0, 0]
        v[-1, :] = v[-1, 0]
        return v


@dataclass(frozen=True, eq=False)
class SphereFn:
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2:
            raise GridError("sphere values must be an (n_lat, n_lon) array")
        grid = SphereGrid(*v.shape)
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise PositivityError("sphere function values must be finite and positive")
        for row in (0, -1):
            if np.ptp(v[row]) > 1e-12 * abs(v[row, 0]):
                raise GridError("pole rows must hold a single value")
            v[row, :] = v[row, 0]
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "grid", grid)

    @classmethod
    def from_function(cls, f, n_lat, n_lon):
        return cls(SphereGrid(n_lat, n_lon).sample(f))

    @property
    def n_lat(self):
        return self.grid.n_lat

    @property
    def n_lon(self):
        return self.grid.n_lon

    def node_values(self):
        return self.values[self.grid.node_mask]

    @property
    def vmax(self):
        return float(self.values.max())

    @property
    def vmin(self):
        return float(self.values.min())

    def __call__(self, x):
        """Bilinear interpolation at unit vectors x (..., 3)."""
        colat, lon = to_colat_lon(x)
        return kernels.sphere_interp(self.values, colat, lon)

    def interp_bound(self):
        """Conservative bilinear interpolation error estimate from second differences.

        In each coordinate the error is at most h^2/8 max|f''|; h^2 f'' is
        replaced by the largest second difference (across the poles for the
        colatitude direction) and doubled to cover curvature between nodes.
        """
        v = self.values
        half = self.n_lon // 2
        ext = np.vstack([np.roll(v[1], half)[None, :], v, np.roll(v[-2], half)[None, :]])
        d_lat = np.abs(ext[2:] - 2 * ext[1:-1] + ext[:-2]).max()
        d_lon = np.abs(np.roll(v, -1, axis=1) - 2 * v + np.roll(v, 1, axis=1)).max()
        return 2.0 * (d_lat + d_lon) / 8.0

    def rotate_longitude(self, steps):
        """u o M^{-1} for M the rotation by ``steps`` longitude steps about e3."""
        return SphereFn(np.roll(self.values, steps, axis=1))


# -- reflections ---------------------------------------------------------------

def _meridian_map(grid: SphereGrid, m):
    n_lon = grid.n_lon
    cols = np.arange(n_lon)
    r = (2 * cols - m) % (2 * n_lon)
    side = np.zeros((grid.n_lat, n_lon), dtype=bool)
    side[1:-1] = ((r > 0) & (r < n_lon))[None, :]
    rows = np.broadcast_to(np.arange(grid.n_lat)[:, None], side.shape)
    return side, rows, np.broadcast_to(((m - cols) % n_lon)[None, :], side.shape)


def _equator_map(grid: SphereGrid):
    side = grid.node_mask & (grid.colat < np.pi / 2 - 1e-12)[:, None]
    rows = np.broadcast_to((grid.n_lat - 1 - np.arange(grid.n_lat))[:, None], side.shape)
    return side, rows, np.broadcast_to(np.arange(grid.n_lon)[None, :], side.shape)


def meridian_halfspace(m, n_lon):
    beta = np.pi * m / n_lon
    return HalfSpace(np.array([-np.sin(beta), np.cos(beta), 0.0]))


def exact_reflections(grid: SphereGrid):
    """Grid-preserving origin-through half-spaces with their index maps.

    Yields (HalfSpace, h_side_mask, row_map, col_map) for the meridian planes at
    longitudes pi m / n_lon (sigma maps lon index k to m - k) and the
    equatorial plane (lat index i to n_lat - 1 - i).
    """
    for m in range(grid.n_lon):
        yield (meridian_halfspace(m, grid.n_lon),) + _meridian_map(grid, m)
    yield (HalfSpace(np.array([0.0, 0.0, 1.0])),) + _equator_map(grid)


def grid_map_for(grid: SphereGrid, h: HalfSpace, atol=1e-12):
    """(H-side mask, row map, col map) if sigma_H preserves the grid, else None."""
    n = h.normal
    if abs(abs(n[2]) - 1.0) <= atol:
        side, rows, cols = _equator_map(grid)
        if n[2] < 0:
            side = grid.node_mask & (grid.colat > np.pi / 2 + 1e-12)[:, None]
        return side, rows, cols
    if abs(n[2]) > atol:
        return None
    beta = np.arctan2(-n[0], n[1])  # normal = (-sin b, cos b, 0)
    x = np.mod(beta, 2 * np.pi) * grid.n_lon / np.pi
    m = int(round(x))
    if abs(x - m) > atol * grid.n_lon:
        return None
    m %= 2 * grid.n_lon
    # m in [n_lon, 2 n_lon) is the opposite orientation of line m - n_lon
    side, rows, cols = _meridian_map(grid, m % grid.n_lon)
    if m >= grid.n_lon:
        side = grid.node_mask & ~side
        side[0] = False
        side[-1] = False
        on_line = ((2 * np.arange(grid.n_lon) - m) % grid.n_lon) == 0
        side &= ~on_line[None, :]
    return side, rows, cols


def reflected_values(u: SphereFn, h: HalfSpace):
    """(H-side node points, u there, u at the mirror points, exact?)."""
    if not h.through_origin:
        raise ValueError("sphere reflections must pass through the origin")
    grid = u.grid
    pts = grid.points
    found = grid_map_for(grid, h)
    if found is not None:
        side, rmap, cmap = found
        return pts[side], u.values[side], u.values[rmap[side], cmap[side]], True
    side = grid.node_mask & (pts @ h.normal > 1e-12)
    x = pts[side]
    return x, u.values[side], u(h.reflect(x)), False


def _scan(halfspaces_diffs, tol):
    """Aggregate per-half-space differences into a report.

    ``halfspaces_diffs`` yields (HalfSpace, points, diff) with
    diff = u(sigma x) - u(x) and each entry its own tolerance array or scalar.
    """
    branches = []
    worst = None
    n = 0
    for idx, (h, x, d, t) in enumerate(halfspaces_diffs):
        n += 1
        pos = d > t
        neg = d < -t
        if pos.any() and neg.any():
            sev = float(min(d[pos].max(), -d[neg].min()))
            if worst is None or sev > worst.severity * (1 + 1e-9):
                worst = Witness(h.normal.copy(), h.offset, x[np.argmax(d)], x[np.argmin(d)], sev, index=idx)
            branches.append(2)
        elif pos.any():
            branches.append(-1)  # u <= u o sigma on H
        elif neg.any():
            branches.append(1)
        else:
            branches.append(0)
    return SeparabilityReport(worst is None, n, tol, worst, np.array(branches))


def sample_halfspaces(n, seed, dim=3):
    rng = np.random.default_rng(seed)
    return [HalfSpace(v) for v in random_unit_vectors(rng, n, dim)]


def is_separable_sphere(u: SphereFn, n_halfspaces=DEFAULT_HALFSPACES, eps=1e-9, seed=0):
    """Exact grid reflections plus seeded random origin-through half-spaces.

    Random half-spaces read reflected values by bilinear interpolation and
    widen the tolerance by ``u.interp_bound()``.
    """
    tol = eps * u.vmax
    bound = u.interp_bound()

    def gen():
        for h, side, rmap, cmap in exact_reflections(u.grid):
            x = u.grid.points[side]
            yield h, x, u.values[rmap[side], cmap[side]] - u.values[side], tol
        for h in sample_halfspaces(n_halfspaces, seed):
            x, ux, us, exact = reflected_values(u, h)
            yield h, x, us - ux, tol if exact else tol + bound

    return _scan(gen(), tol)


# -- restriction to circles ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Plane:
    """Affine 2-plane ``{x : normal . x = offset}`` in R^3."""

    normal: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "normal", unit(self.normal))
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def through(cls, point, v1, v2):
        n = np.cross(v1, v2)
        return cls(unit(n), float(unit(n) @ np.asarray(point, dtype=float)))


def max_direction(u: SphereFn):
    pts = u.grid.points
    i = np.unravel_index(np.argmax(u.values), u.values.shape)
    return pts[i]


def restrict_to_circle(u: SphereFn, plane: Plane, n_circle=128, origin="max"):
    """Sample u on the circle ``plane  cap  S^2`` as a CircleFn.

    The angular origin is the in-plane projection of ``origin`` ("max" means
    the direction of u's largest node), falling back to the first frame vector
    when that projection vanishes.
    """
    d = abs(plane.offset)
    if d >= 1.0 - 1e-12:
        raise TangentOrEmpty(f"plane at distance {d} meets the unit sphere in at most one point")
    center = plane.offset * plane.normal
    radius = np.sqrt(1.0 - plane.offset ** 2)
    e1, e2 = orthonormal_complement(plane.normal)
    ref = max_direction(u) if isinstance(origin, str) and origin == "max" else np.asarray(origin, dtype=float)
    proj = ref - (ref @ plane.normal) * plane.normal
    if np.linalg.norm(proj) > 1e-9:
        e1 = unit(proj)
        e2 = np.cross(plane.normal, e1)
    t = 2 * np.pi * np.arange(n_circle) / n_circle
    pts = center + radius * (np.cos(t)[:, None] * e1 + np.sin(t)[:, None] * e2)
    circ = CircleFn(u(pts))
    return circ, {"center": center, "radius": radius, "e1": e1, "e2": e2}


# -- caps and axis --------------------------------------------------------------------

def first_moment_axis(pts, w, vals):
    m = np.einsum("ij,i->j", pts, w * (vals - vals.min()))
    n = np.linalg.norm(m)
    return m / n if n > 0 else None


def _aligned_pole(a):
    if abs(a[2]) >= 1.0 - ALIGN_TOL:
        return 1 if a[2] > 0 else -1
    return 0


def sphere_caps_and_axis(u: SphereFn, eps=1e-9, check=True, n_halfspaces=DEFAULT_HALFSPACES, seed=0):
    """Axis, extremal caps, ring constancy and meridian profile of a separable u.

    The coarse axis is the area-weighted centroid of the near-max node set;
    it is refined to the first moment of (u - min u), which points along the
    axis of any axially symmetric function with a nonincreasing profile and
    does not depend on how many nodes the max cap contains.
    """
    sep = is_separable_sphere(u, n_halfspaces, eps, seed) if check else None
    if sep is not None and not sep.separable:
        raise NotSeparable("function is not separable on the sphere", sep)
    grid = u.grid
    mask = grid.node_mask
    pts = grid.points[mask]
    w = grid.weights[mask]
    vals = u.values[mask]
    vmax, vmin = vals.max(), vals.min()
    tol = eps * vmax
    spread = float(vmax - vmin)
    if spread <= tol:
        return AxisReport("constant", residuals={"spread": spread}, separability=sep)

    top = vals >= vmax - tol
    bottom = vals <= vmin + tol
    coarse = unit(np.einsum("ij,i->j", pts[top], w[top]))
    wide = vals >= vmax - 10 * tol
    coarse = unit(np.einsum("ij,i->j", pts[wide], w[wide])) if np.linalg.norm(np.einsum("ij,i->j", pts[wide], w[wide])) > 0 else coarse
    axis = first_moment_axis(pts, w, vals)
    if axis is None:
        axis = coarse
    pole = _aligned_pole(axis)
    if pole:
        axis = np.array([0.0, 0.0, float(pole)])
    bottom_c = np.einsum("ij,i->j", pts[bottom], w[bottom])
    min_axis = unit(bottom_c) if np.linalg.norm(bottom_c) > 1e-14 else -axis

    res = grid.resolution
    t = pts @ axis
    h1 = float(t[top].min())
    h2 = float(t[bottom].max())
    slack = res + angle_between(coarse, axis)
    ang = np.arccos(np.clip(t, -1, 1))
    inside_max = ang < np.arccos(np.clip(h1, -1, 1)) - slack
    if np.any(inside_max & ~top):
        raise CapFitError("near-max set is not a cap around the detected axis")
    inside_min = (np.pi - ang) < np.arccos(np.clip(-h2, -1, 1)) - slack
    if np.any(inside_min & ~bottom):
        raise CapFitError("near-min set is not a cap around the detected axis")

    bound = u.interp_bound()
    ring_spread, ring_tol, profile = _rings_and_profile(u, axis, pole, tol, bound)
    prof_rise = float(max(0.0, np.diff(profile["value"]).max()))
    prof_tol = tol if pole else tol + bound
    antipodal = angle_between(axis, -min_axis)
    checks = {
        "caps_ordered": h1 > h2,
        "latitude_constant": ring_spread <= ring_tol,
        "profile_nonincreasing": prof_rise <= prof_tol,
        "min_cap_antipodal": antipodal <= 2 * res,
    }
    return AxisReport(
        "axial",
        direction=axis,
        profile=profile,
        caps={"max": Cap(axis, min(h1, 1.0)).to_dict(), "min": Cap(-axis, min(-h2, 1.0)).to_dict(),
              "h1": h1, "h2": h2, "max_axis_coarse": coarse, "min_axis": min_axis},
        residuals={"spread": spread, "ring_spread": ring_spread, "ring_tolerance": ring_tol,
                   "profile_rise": prof_rise, "antipodal_angle": antipodal,
                   "coarse_refined_angle": angle_between(coarse, axis), "interp_bound": bound},
        checks=checks,
        separability=sep,
    )


def _rings_and_profile(u, axis, pole, tol, bound):
    grid = u.grid
    if pole:
        v = u.values if pole > 0 else u.values[::-1]
        spread = float(np.max(np.ptp(v[1:-1], axis=1))) if grid.n_lat > 2 else 0.0
        prof = {"angle": grid.colat, "value": v[:, 0].copy()}
        return spread, tol, prof
    # tilted axis: rings and the meridian are read by interpolation
    e1, e2 = orthonormal_complement(axis)
    s = grid.colat
    phi = grid.lon
    ring_pts = (np.cos(s)[:, None, None] * axis
                + np.sin(s)[:, None, None] * (np.cos(phi)[None, :, None] * e1 + np.sin(phi)[None, :, None] * e2))
    ring_vals = u(ring_pts)
    spread = float(np.max(np.ptp(ring_vals[1:-1], axis=1)))
    prof = {"angle": s, "value": ring_vals[:, 0].copy()}
    return spread, tol + 2 * bound, prof


def corollary_direction_check(u: SphereFn, axis_max, h: HalfSpace, eps=1e-9, on_boundary_tol=1e-9):
    """Direction of the reflection inequality predicted by the max-cap axis.

    axis in H: u >= u o sigma on H; axis outside cl(H): u <= u o sigma;
    axis on the boundary: equality, all within eps * max (plus the
    interpolation bound when H does not preserve the grid).
    """
    x, ux, us, exact = reflected_values(u, h)
    t = eps * u.vmax + (0.0 if exact else u.interp_bound())
    s = float(np.asarray(axis_max) @ h.normal - h.offset)
    d = ux - us
    if s > on_boundary_tol:
        return bool(np.all(d >= -t))
    if s < -on_boundary_tol:
        return bool(np.all(d <= t))
    return bool(np.all(np.abs(d) <= t))


# -- io ---------------------------------------------------------------------------------

def _parse_header(line, path):
    out = {}
    body = line.lstrip("#").strip()
    for part in body.replace(";", ",").split(","):
        if not part.strip():
            continue
        if "=" not in part:
            raise FormatError(f"{path}:1: malformed header entry {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def read_csv(path):
    """Rows ``lat_index,lon_index,value`` after a ``# n_lat=..,n_lon=..`` header."""
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise FormatError(f"{path}:1: missing '# n_lat=..,n_lon=..' header")
    hdr = _parse_header(lines[0], path)
    try:
        n_lat, n_lon = int(hdr["n_lat"]), int(hdr["n_lon"])
    except (KeyError, ValueError) as exc:
        raise FormatError(f"{path}:1: header needs integer n_lat and n_lon") from exc
    vals = np.full((n_lat, n_lon), np.nan)
    for lineno, row in enumerate(csv.reader(lines[1:]), 2):
        if not row or row[0].strip() in ("lat_index", "") or row[0].startswith("#"):
            continue
        try:
            i, k, x = int(row[0]), int(row[1]), float(row[2])
        except (ValueError, IndexError) as exc:
            raise FormatError(f"{path}:{lineno}: expected 'lat_index,lon_index,value'") from exc
        if not (0 <= i < n_lat and 0 <= k < n_lon):
            raise FormatError(f"{path}:{lineno}: index ({i},{k}) outside {n_lat}x{n_lon} grid")
        if i in (0, n_lat - 1):
            vals[i, :] = x
        else:
            vals[i, k] = x
    if np.isnan(vals).any():
        raise FormatError(f"{path}: grid has missing nodes")
    try:
        return SphereFn(vals)
    except (GridError, PositivityError) as exc:
        raise FormatError(f"{path}: {exc}") from exc


def write_csv(u: SphereFn, path):
    with open(path, "w", newline="") as fh:
        fh.write(f"# n_lat={u.n_lat},n_lon={u.n_lon}\n")
        w = csv.writer(fh)
        w.writerow(["lat_index", "lon_index", "value"])
        for i in range(u.n_lat):
            cols = [0] if i in (0, u.n_lat - 1) else range(u.n_lon)
            for k in cols:
                w.writerow([i, k, repr(float(u.values[i, k]))])
