import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarsym.circle import is_separable_circle
from polarsym.errors import CapFitError, GridError, NotSeparable, TangentOrEmpty
from polarsym.fixtures import sphere_linear, sphere_plateau, sphere_x1x2
from polarsym.geometry import HalfSpace, angle_between, random_unit_vectors
from polarsym.sphere import (Plane, SphereFn, SphereGrid, exact_reflections, grid_map_for,
                             corollary_direction_check, is_separable_sphere, read_csv, restrict_to_circle,
                             sample_halfspaces, sphere_caps_and_axis, write_csv)

E1, E2, E3 = np.eye(3)


def profile_fixture(a, n_lat=64, n_lon=128, f=lambda t: 2.0 - np.tanh(2 * t)):
    """f(x . a) with f nonincreasing, so the max cap sits at -a."""
    return SphereFn.from_function(lambda x: f(x @ a), n_lat, n_lon)


def test_grid_weights_cover_the_sphere():
    g = SphereGrid(17, 32)
    assert g.weights[g.node_mask].sum() == pytest.approx(4 * np.pi, rel=1e-12)
    with pytest.raises(GridError):
        SphereGrid(17, 31)


def test_exact_reflections_map_nodes_to_nodes():
    g = SphereGrid(9, 16)
    pts = g.points
    for h, side, rows, cols in exact_reflections(g):
        s2, r2, c2 = grid_map_for(g, h)
        assert np.array_equal(side, s2)
        assert np.array_equal(rows[side], r2[side]) and np.array_equal(cols[side], c2[side])
        assert np.allclose(h.reflect(pts[side]), pts[rows[side], cols[side]], atol=1e-12)
        assert np.all(h.signed_distance(pts[side]) > 0)


def test_restriction_examples():
    u = sphere_linear()
    c, info = restrict_to_circle(u, Plane(E3, 0.0))
    assert np.allclose(c.values, 2.0, atol=1e-12)
    c, info = restrict_to_circle(u, Plane(E3, 0.5))
    assert info["radius"] == pytest.approx(np.sqrt(0.75))
    assert np.allclose(info["center"], [0, 0, 0.5])
    assert np.allclose(c.values, 2.5, atol=1e-12)
    # max origin: the angle is measured from the max direction e3
    c, info = restrict_to_circle(u, Plane(E2, 0.0))
    assert np.allclose(info["e1"], E3)
    assert np.allclose(c.values, 2 + np.cos(c.angles), atol=1e-3)
    # with the angular origin at e1 the slice reads 2 + sin
    c, info = restrict_to_circle(u, Plane(-E2, 0.0), origin=E1)
    assert np.allclose(c.values, 2 + np.sin(c.angles), atol=1e-3)
    with pytest.raises(TangentOrEmpty):
        restrict_to_circle(u, Plane(E3, 1.0))


def test_separability_examples():
    assert is_separable_sphere(sphere_linear()).separable
    assert is_separable_sphere(SphereFn(np.full((9, 16), 4.0))).separable
    rep = is_separable_sphere(sphere_x1x2())
    assert not rep.separable
    n = rep.witness.normal
    # strongest violation sits on a coordinate half-space such as {x1 > 0}
    assert min(angle_between(n, v) for v in (E1, -E1, E2, -E2)) < 1e-9


def test_caps_examples():
    rep = sphere_caps_and_axis(sphere_linear())
    assert rep.kind == "axial" and rep.ok
    assert np.allclose(rep.direction, E3)
    assert rep.caps["h1"] == pytest.approx(1.0) and rep.caps["h2"] == pytest.approx(-1.0)
    assert np.allclose(rep.profile["value"], 2 + np.cos(rep.profile["angle"]), atol=1e-12)
    p = sphere_caps_and_axis(sphere_plateau())
    res = np.pi / 63
    assert abs(p.caps["h1"] - 0.5) < res and abs(p.caps["h2"] + 0.5) < res
    assert sphere_caps_and_axis(SphereFn(np.full((9, 16), 2.0))).kind == "constant"
    with pytest.raises(NotSeparable):
        sphere_caps_and_axis(sphere_x1x2())


def test_cap_fit_rejects_non_caps():
    # two separate maxima on the equator: the near-max set is not a cap
    u = SphereFn.from_function(lambda x: 2 + x[..., 0] ** 8, 33, 64)
    with pytest.raises(CapFitError):
        sphere_caps_and_axis(u, check=False)


def test_corollary_examples():
    u = sphere_linear()
    assert corollary_direction_check(u, E3, HalfSpace(E3))
    assert corollary_direction_check(u, E3, HalfSpace(E1))
    assert corollary_direction_check(u, E3, HalfSpace(-E3))
    # a deliberately wrong axis claim is caught
    assert not corollary_direction_check(u, -E3, HalfSpace(E3))


def test_csv_round_trip(tmp_path):
    u = sphere_plateau(9, 16)
    p = tmp_path / "s.csv"
    write_csv(u, p)
    assert np.array_equal(read_csv(p).values, u.values)


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_profile_fixtures_recover_axis(seed):
    a = random_unit_vectors(np.random.default_rng(seed), 1, 3)[0]
    u = profile_fixture(a)
    rep = sphere_caps_and_axis(u)
    assert rep.kind == "axial" and rep.ok, rep.checks
    assert np.degrees(angle_between(rep.direction, -a)) < 2.0
    assert np.degrees(abs(np.pi - angle_between(rep.direction, rep.caps["min_axis"]))) <= 2 * np.degrees(u.grid.resolution)


@settings(max_examples=6, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_restriction_through_axis_is_separable(seed):
    rng = np.random.default_rng(seed)
    a = random_unit_vectors(rng, 1, 3)[0]
    u = profile_fixture(a)
    rep = sphere_caps_and_axis(u)
    w = random_unit_vectors(rng, 1, 3)[0]
    plane = Plane.through(np.zeros(3), rep.direction, w)
    c, _ = restrict_to_circle(u, plane)
    assert is_separable_circle(c, 1e-9 + u.interp_bound() / c.values.max()).separable


@settings(max_examples=8, deadline=None)
@given(st.integers(1, 127))
def test_longitude_shift_equivariance(steps):
    a = np.array([np.sin(1.0), 0.0, np.cos(1.0)])
    u = profile_fixture(a)
    base = sphere_caps_and_axis(u, check=False).direction
    rot = sphere_caps_and_axis(u.rotate_longitude(steps), check=False).direction
    phi = 2 * np.pi * steps / 128
    M = np.array([[np.cos(phi), -np.sin(phi), 0], [np.sin(phi), np.cos(phi), 0], [0, 0, 1]])
    assert angle_between(rot, M @ base) <= u.grid.resolution


def test_latitude_constancy_pole_aligned():
    for f in (lambda t: 2 - t, lambda t: 3 - np.tanh(3 * t), lambda t: np.exp(-t)):
        rep = sphere_caps_and_axis(profile_fixture(E3, f=f))
        assert rep.residuals["ring_spread"] <= 1e-9 * 3
        assert rep.checks["latitude_constant"]


def test_corollary_on_random_halfspaces():
    a = np.array([0.3, -0.4, 0.5])
    a /= np.linalg.norm(a)
    u = profile_fixture(a)
    axis = sphere_caps_and_axis(u).direction
    for h in sample_halfspaces(32, seed=5):
        assert corollary_direction_check(u, axis, h)
