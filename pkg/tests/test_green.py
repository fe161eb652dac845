import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import green_scalar
from polarsym.errors import OutsideBall, PointsNotInH
from polarsym.geometry import HalfSpace, random_unit_vectors
from polarsym.green import (GreenKernel, audit, audit_passes, cell_radius, green, green_eval, green_matrix,
                            lemma42_equalities, lemma42_monotonicity, sample_ball, singular_average,
                            step1_closed_form, step1_direct, step2_margins)

K = GreenKernel(R=1.0)


def test_eval_examples():
    assert green_eval(K, np.zeros(3), [0.5, 0, 0]) == pytest.approx(1.0, rel=1e-14)
    g = green_eval(K, [0.5, 0, 0], [0, 0.5, 0])
    assert g == pytest.approx(1 / np.sqrt(0.5) - 1 / (0.5 * np.sqrt(4.25)), rel=1e-14)
    assert g == pytest.approx(0.44407, abs=1e-5)
    rng = np.random.default_rng(1)
    x = random_unit_vectors(rng, 50, 3)
    y = 0.9 * sample_ball(rng, 50)
    assert np.max(np.abs(green(x, y))) < 1e-13


def test_matches_scalar_oracle():
    rng = np.random.default_rng(2)
    x, y = sample_ball(rng, 200), sample_ball(rng, 200)
    got = green(x, y)
    want = [green_scalar(a, b) for a, b in zip(x, y)]
    assert np.allclose(got, want, rtol=1e-12)


def test_diagonal_and_domain():
    k = GreenKernel(R=1.0, diag_radius=0.1)
    x = np.array([0.2, 0.1, 0.0])
    reg = 1.0 / (1.0 - 0.05)  # image factor (|x|/R)|x - x~| = R^2 - |x|^2
    assert green_eval(k, x, x) == pytest.approx(3 / (2 * 0.1) - reg)
    with pytest.raises(OutsideBall):
        green_eval(K, [1.5, 0, 0], [0, 0, 0])
    with pytest.raises(ValueError):
        GreenKernel(N=2)


def test_cell_average():
    # 3/(2a) is the mean of 1/r over the ball of radius a
    a = cell_radius(4 * np.pi / 3 * 0.1 ** 3)
    assert a == pytest.approx(0.1)
    assert singular_average(a) == pytest.approx(15.0)


def test_equalities_examples():
    e3 = np.array([0, 0, 1.0])
    h = HalfSpace(e3)
    x, y = np.array([0.3, 0.1, 0.0]), np.array([-0.2, 0.4, 0.0])
    e1, e2 = lemma42_equalities(K, x, y, h)
    assert e1 == 0.0 and e2 == 0.0
    x, y = np.array([0.3, 0.1, 0.2]), np.array([-0.2, 0.4, -0.5])
    g = green_scalar(x, y)
    assert g == pytest.approx(green_scalar(x * [1, 1, -1], y * [1, 1, -1]), rel=1e-14)
    assert green_scalar(x, y * [1, 1, -1]) == pytest.approx(green_scalar(x * [1, 1, -1], y), rel=1e-14)
    assert max(lemma42_equalities(K, x, y, h)) <= 1e-12 * (1 + g)


def test_monotonicity_examples():
    h = HalfSpace(np.array([0, 0, 1.0]))
    x = np.array([0.1, 0.2, 0.3])
    # y on the mirror plane: only the a vs a~ swap matters
    y = np.array([0.4, -0.1, 1e-15])
    assert lemma42_monotonicity(K, x, y, h) >= 0
    near = np.array([0.1, 0.2, 1e-9])
    assert abs(lemma42_monotonicity(K, near, np.array([0.3, 0.3, 0.3]), h)) < 1e-7
    with pytest.raises(PointsNotInH):
        lemma42_monotonicity(K, -x, y, h)


def test_audit_small():
    rep = audit(20_000, seed=3)
    assert audit_passes(rep), rep
    assert rep["min_green_value"] > 0


def test_matrix_properties():
    rng = np.random.default_rng(4)
    pts = sample_ball(rng, 300, 0.95)
    G = green_matrix(pts, 1e-3)
    assert np.array_equal(G, G.T)
    assert np.all(G >= 0)
    caps = singular_average(cell_radius(1e-3))
    assert np.all(np.diag(G) <= caps)


@st.composite
def pair_and_plane(draw):
    rng = np.random.default_rng(draw(st.integers(0, 2 ** 32 - 1)))
    x, y = sample_ball(rng, 2)
    return x, y, HalfSpace(random_unit_vectors(rng, 1, 3)[0])


@settings(max_examples=200)
@given(pair_and_plane())
def test_symmetric_and_positive(case):
    x, y, _ = case
    g = green(x, y)
    assert g > 0
    assert abs(g - green(y, x)) <= 1e-12 * (1 + g)


@settings(max_examples=200)
@given(pair_and_plane())
def test_step_identities(case):
    x, y, h = case
    if h.signed_distance(x) < 0:
        x = h.reflect(x)
    if h.signed_distance(y) < 0:
        y = h.reflect(y)
    direct, scale = step1_direct(K, x, y, h)
    assert abs(direct - step1_closed_form(K, x, y, h)) <= 1e-10 * scale
    mb, mr = step2_margins(K, x, y, h)
    assert mb >= -1e-12 and mr >= -1e-12
    assert lemma42_monotonicity(K, x, y, h, check=False) >= -1e-12 * (1 + green(x, y))


def test_harmonic_away_from_pole():
    y = np.array([0.1, -0.2, 0.15])
    x0 = np.array([-0.3, 0.3, -0.2])
    errs = []
    for hstep in (0.04, 0.02, 0.01):
        lap = -6 * green(x0, y)
        for d in np.eye(3):
            lap += green(x0 + hstep * d, y) + green(x0 - hstep * d, y)
        errs.append(abs(lap / hstep ** 2))
    # O(h^2): halving h divides the residual by about 4
    assert errs[1] < errs[0] / 3 and errs[2] < errs[1] / 3
