import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import central_gradient, forward_difference_norm_sq
from polarsym.choquard import (ChoquardProblem, GroundState, certify_theorem41, dirichlet_norm_sq, energy_I,
                               nehari_energy, nehari_scale, nehari_scale_from, nonlocal_D, quotient_Q,
                               quotient_grad, solve_ground_state)
from polarsym.errors import CollapseToZero, DegenerateD, GridError, NonConvergence, ZeroFunction
from polarsym.geometry import HalfSpace
from polarsym.polarization import PairedGrid, polarize


@pytest.fixture(scope="module")
def small():
    return ChoquardProblem(n=10)


def positive(prob, seed):
    return 0.1 + np.random.default_rng(seed).random(prob.n_nodes)


def test_problem_validation():
    with pytest.raises(ValueError):
        ChoquardProblem(p=5.0)
    with pytest.raises(ValueError):
        ChoquardProblem(p=5 / 3)
    with pytest.raises(GridError):
        ChoquardProblem(n=7)
    prob = ChoquardProblem(n=24)
    assert prob.h == pytest.approx(1 / 12)
    assert prob.n_nodes == 7123


def test_dirichlet_examples():
    prob = ChoquardProblem(n=4)
    assert prob.h == 0.5
    assert dirichlet_norm_sq(prob, np.zeros(prob.n_nodes)) == 0.0
    u = np.zeros(prob.n_nodes)
    u[prob.node_of((0, 0, 0))] = 1.0
    # six unit jumps of size 1/h plus the mass term: 0.5^3 (6 / 0.25 + 1)
    assert dirichlet_norm_sq(prob, u) == pytest.approx(3.125, rel=1e-14)
    assert dirichlet_norm_sq(prob, u) == pytest.approx(forward_difference_norm_sq(prob.volume(u), prob.h), rel=1e-14)


def test_dirichlet_matches_stencil_oracle(small):
    u = positive(small, 0)
    assert dirichlet_norm_sq(small, u) == pytest.approx(forward_difference_norm_sq(small.volume(u), small.h),
                                                        rel=1e-12)


def test_nonlocal_examples(small):
    assert nonlocal_D(small, np.zeros(small.n_nodes)) == 0.0
    i, j = small.node_of((0, 0, 0)), small.node_of((1, 2, 0))
    u = np.zeros(small.n_nodes)
    u[i], u[j] = 0.7, 1.3
    K, h, p = small.K, small.h, small.p
    want = h ** 6 * (K[i, i] * 0.7 ** (2 * p) + 2 * K[i, j] * 0.7 ** p * 1.3 ** p + K[j, j] * 1.3 ** (2 * p))
    assert nonlocal_D(small, u) == pytest.approx(want, rel=1e-14)
    assert nonlocal_D(small, positive(small, 1)) > 0


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 10.0), st.integers(0, 1000))
def test_homogeneity(lam, seed):
    prob = ChoquardProblem(n=8, p=2.5)
    u = positive(prob, seed)
    assert dirichlet_norm_sq(prob, lam * u) == pytest.approx(lam ** 2 * dirichlet_norm_sq(prob, u), rel=1e-12)
    assert nonlocal_D(prob, lam * u) == pytest.approx(lam ** (2 * prob.p) * nonlocal_D(prob, u), rel=1e-12)
    assert nehari_scale(prob, lam * u) == pytest.approx(nehari_scale(prob, u) / lam, rel=1e-12)


def test_nehari_examples(small):
    assert nehari_scale_from(1.0, 1.0, 2.0) == 1.0
    assert nehari_scale_from(4.0, 1.0, 2.0) == pytest.approx(2.0)
    with pytest.raises(ZeroFunction):
        nehari_scale(small, np.zeros(small.n_nodes))
    with pytest.raises(DegenerateD):
        nehari_scale_from(1.0, 0.0, 2.0)
    u = positive(small, 2)
    v = nehari_scale(small, u) * u
    n2 = dirichlet_norm_sq(small, v)
    assert abs(n2 - nonlocal_D(small, v)) <= 1e-10 * n2


def test_energy_examples(small):
    assert energy_I(small, np.zeros(small.n_nodes)) == 0.0
    u = positive(small, 3)
    n2, D, p = dirichlet_norm_sq(small, u), nonlocal_D(small, u), small.p
    t = nehari_scale(small, u)
    assert energy_I(small, t * u) == pytest.approx(nehari_energy(n2, D, p), rel=1e-10)
    assert energy_I(small, t * u) == pytest.approx((0.5 - 0.5 / p) * dirichlet_norm_sq(small, t * u), rel=1e-10)
    ts = np.linspace(0.1, 3.0, 2901) * t
    vals = [energy_I(small, s * u) for s in ts]
    assert abs(ts[int(np.argmax(vals))] - t) <= ts[1] - ts[0]


def test_energy_is_a_two_term_polynomial(small):
    u = positive(small, 4)
    p = small.p
    ts = np.linspace(0.2, 2.0, 9)
    y = np.array([energy_I(small, s * u) for s in ts])
    M = np.column_stack([ts ** 2 / 2, -ts ** (2 * p) / (2 * p)])
    coef, *_ = np.linalg.lstsq(M, y, rcond=None)
    assert coef[0] == pytest.approx(dirichlet_norm_sq(small, u), rel=1e-10)
    assert coef[1] == pytest.approx(nonlocal_D(small, u), rel=1e-10)


def test_gradient_matches_differences(small):
    rng = np.random.default_rng(5)
    u = positive(small, 5)
    _, g = quotient_grad(small, u)
    f = lambda v: quotient_Q(small, v)
    for _ in range(10):
        d = rng.standard_normal(small.n_nodes)
        d /= np.linalg.norm(d)
        fd = central_gradient(f, u, d, 1e-5)
        assert abs(fd - g @ d) <= 1e-6 * max(abs(fd), np.linalg.norm(g) * 1e-3)


def test_solver_contract(small):
    gs = solve_ground_state(small, init=small.random_init(0))
    assert gs.converged and gs.energy > 0
    assert np.all(gs.values >= 0)
    assert gs.nehari_residual <= 1e-10
    h = np.array(gs.history)
    assert np.all(np.diff(h) <= 1e-12 * h[:-1])
    assert gs.energy == pytest.approx(nehari_energy(dirichlet_norm_sq(small, gs.values),
                                                    nonlocal_D(small, gs.values), small.p), rel=1e-9)


def test_solver_errors(small):
    with pytest.raises(CollapseToZero):
        solve_ground_state(small, init=np.zeros(small.n_nodes))
    with pytest.raises(ValueError):
        solve_ground_state(small, init=-np.ones(small.n_nodes))
    with pytest.raises(NonConvergence) as exc:
        solve_ground_state(small, init=small.random_init(1), max_iters=1, raise_on_fail=True)
    assert exc.value.state.iterations == 1


def test_rotated_init_gives_same_energy():
    prob = ChoquardProblem(n=16)
    init = prob.random_init(3)
    a = solve_ground_state(prob, init=init)
    b = solve_ground_state(prob, init=prob.rotate90(init, axis=0))
    assert abs(a.energy - b.energy) <= 1e-6 * a.energy


def test_polarization_along_the_solve(small):
    init = small.random_init(2)
    grids = [PairedGrid.from_points(small.points, small.weight, HalfSpace(n)) for n in np.vstack([np.eye(3), -np.eye(3)])]
    for iters in (1, 2, 4):
        u = solve_ground_state(small, init=init, max_iters=iters).values
        D = nonlocal_D(small, u)
        for g in grids:
            assert nonlocal_D(small, polarize(u, g)) >= D * (1 - 1e-12)


def test_save_and_load(tmp_path, small):
    gs = solve_ground_state(small, max_iters=3)
    p = tmp_path / "gs.json"
    gs.save(p)
    back = GroundState.load(p)
    assert np.array_equal(back.values, gs.values)
    assert back.energy == gs.energy and back.problem.n == small.n


def test_certificate(ground_state):
    rep = certify_theorem41(ground_state)
    assert rep.kind in ("radial", "axial")
    assert rep.checks["separable"] and rep.checks["polarization_fixed_point"]
    assert rep.ok
    assert rep.residuals["polarization_max_ratio"] <= 1e-3
