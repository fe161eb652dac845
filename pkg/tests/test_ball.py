import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarsym.ball import (BallFn, ball_axis, example21, is_separable_ball, make_separable_ball, read_csv,
                           write_csv)
from polarsym.errors import MonotonicityError, NotSeparable, PositivityError
from polarsym.fixtures import ball_radial, ball_x1x2
from polarsym.geometry import angle_between, rotation_matrix
from polarsym.sphere import exact_reflections

E1, E2, E3 = np.eye(3)
SMALL = dict(m=6, n_lat=17, n_lon=32)


def test_separability_examples():
    assert is_separable_ball(example21()).separable
    rep = is_separable_ball(ball_x1x2())
    assert not rep.separable
    assert min(angle_between(rep.witness.normal, v) for v in (E1, -E1, E2, -E2)) < 1e-9
    assert is_separable_ball(ball_radial()).separable


def test_axis_examples():
    rep = ball_axis(example21())
    assert rep.kind == "axial" and rep.ok
    assert np.degrees(angle_between(rep.direction, -E3)) < 2.0
    assert ball_axis(ball_radial()).kind == "radial"
    M = rotation_matrix([1.0, 2.0, 0.5], 0.7)
    u = BallFn.from_function(
        lambda x: (2 - np.tanh((x @ M.T)[..., 2])) * (1.1 - np.sum(x * x, axis=-1)), 1.0, 12, 33, 64)
    rep = ball_axis(u)
    assert np.degrees(angle_between(rep.direction, -M.T @ E3)) < 2.0
    with pytest.raises(NotSeparable):
        ball_axis(ball_x1x2())


def test_constructor_examples():
    u = make_separable_ball(lambda t: np.ones_like(t), lambda r: 3 - r, **SMALL)
    assert ball_axis(u).kind == "radial"
    v = make_separable_ball(lambda t: 2 - t, lambda r: np.ones_like(r), **SMALL)
    x = v.radii[2] * v.grid.points
    assert np.allclose(v.shells[2], 2 - x[..., 2], atol=1e-12)
    assert is_separable_ball(v).separable
    with pytest.raises(MonotonicityError):
        make_separable_ball(lambda t: 2 + t, lambda r: np.ones_like(r), **SMALL)
    with pytest.raises(PositivityError):
        make_separable_ball(lambda t: 2 - t, lambda r: 1 - r, **SMALL)


def test_interpolation_matches_nodes():
    u = example21(m=6, n_lat=17, n_lon=32)
    pts = u.radii[3] * u.grid.points[5]
    assert np.allclose(u(pts), u.shells[3, 5], atol=1e-12)
    assert u(np.zeros(3))[0] == pytest.approx(u.center_value)


def test_csv_round_trip(tmp_path):
    u = example21(**SMALL)
    p = tmp_path / "b.csv"
    write_csv(u, p)
    w = read_csv(p)
    assert np.array_equal(w.shells, u.shells) and w.center_value == u.center_value and w.R == u.R


@st.composite
def profiles(draw):
    rng = np.random.default_rng(draw(st.integers(0, 2 ** 32 - 1)))
    gk = 2 + np.cumsum(rng.random(8))[::-1]
    hk = 0.2 + rng.random(5)
    return (lambda t: np.interp(t, np.linspace(-1, 1, 8), gk)), (lambda r: np.interp(r, np.linspace(0, 1, 5), hk))


@settings(max_examples=8, deadline=None)
@given(profiles())
def test_constructor_round_trip(gh):
    g, h = gh
    u = make_separable_ball(g, h)
    rep = ball_axis(u, eps=1e-9 + u.interp_bound() / u.vmax)
    assert rep.kind == "axial"
    assert np.degrees(angle_between(rep.direction, -E3)) < 2.0


@settings(max_examples=8, deadline=None)
@given(profiles())
def test_perturbation_breaks_separability(gh):
    g, h = gh
    u = make_separable_ball(g, h)
    x = u.radii[:, None, None, None] * u.grid.points[None]
    pert = BallFn(u.R, u.shells + 0.05 * u.shells.min() * x[..., 0] * x[..., 1], u.center_value)
    rep = is_separable_ball(pert)
    assert not rep.separable and rep.witness is not None


@settings(max_examples=8, deadline=None)
@given(st.floats(0.01, 100.0))
def test_scaling_invariance(lam):
    u = example21(**SMALL)
    assert is_separable_ball(u.scaled(lam)).separable
    a = ball_axis(u).direction
    b = ball_axis(u.scaled(lam)).direction
    assert angle_between(a, b) < 1e-9
    assert not is_separable_ball(ball_x1x2(**SMALL).scaled(lam)).separable


def test_one_branch_per_halfspace():
    u = example21()
    rep = is_separable_ball(u)
    assert rep.separable
    assert rep.branches.shape == (rep.n_tested,)
    assert 2 not in rep.branches
    # per-shell directions agree on every grid-preserving half-space
    tol = 1e-9 * u.vmax
    for h, side, rows, cols in exact_reflections(u.grid):
        signs = set()
        for s in u.shells:
            d = s[rows[side], cols[side]] - s[side]
            if np.any(d > tol):
                signs.add(1)
            if np.any(d < -tol):
                signs.add(-1)
        assert len(signs) <= 1
