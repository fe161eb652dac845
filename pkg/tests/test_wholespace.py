import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarsym.errors import HypothesisNotMet, NotEven, NotRadial, PositivityError, RadialProbe
from polarsym.fixtures import sample_field
from polarsym.geometry import AxisLine, angle_between
from polarsym.wholespace import (FieldFn, axis_through_point, classify_field, even_monotone_check,
                                 exp_decay, gaussian_sum, is_separable_field, lorentzian,
                                 radial_center_and_profile, tanh_field, two_bumps)

E3 = np.array([0.0, 0.0, 1.0])


def test_separability_examples():
    assert is_separable_field(FieldFn(gaussian_sum, decay_hint=True), 64, 500).separable
    assert is_separable_field(FieldFn(tanh_field), 64, 500).separable
    rep = is_separable_field(FieldFn(two_bumps, decay_hint=True), 128, 1000)
    assert not rep.separable
    # the witness plane lies between the bumps, off their common midplane
    w = rep.witness
    assert w.severity > 0
    f = two_bumps
    sx = lambda x: x - 2 * (x @ w.normal - w.offset) * w.normal
    assert f(sx(w.x_plus)) > f(w.x_plus) and f(sx(w.x_minus)) < f(w.x_minus)


def test_general_offsets_are_tested():
    # radial about a point other than the origin: origin-through planes alone would miss it
    u = FieldFn(lorentzian((2.0, 0.0, 0.0)), decay_hint=True)
    rep = is_separable_field(u, 64, 500)
    assert rep.separable


def test_positivity_enforced():
    with pytest.raises(PositivityError):
        FieldFn(lambda x: np.asarray(x)[..., 0])(np.array([-1.0, 0, 0]))


def test_axis_examples():
    u = FieldFn(tanh_field)
    L = axis_through_point(u, [1.0, 2.0, 0.0], 1.0)
    assert np.allclose(L.base, [1, 2, 0])
    assert L.angle_to(AxisLine(np.zeros(3), E3)) < np.radians(2)
    L2 = axis_through_point(u, [0.0, 0.0, 5.0], 1.0)
    assert L.angle_to(L2) < np.radians(2)
    r = FieldFn(lorentzian((0, 0, 0)), decay_hint=True)
    x = np.array([1.0, 2.0, 2.0])
    L3 = axis_through_point(r, x, 1.0)
    assert L3.angle_to(AxisLine(x, x)) < np.radians(2)


def test_radial_probe_exhausts_ladder():
    with pytest.raises(RadialProbe):
        axis_through_point(FieldFn(lambda x: np.full(np.shape(x)[:-1], 2.0)), np.zeros(3))


def test_even_monotone_examples():
    g = even_monotone_check(lambda x: np.exp(-x ** 2), X=4.0, decay_hint=True)
    assert g["verdict"] == "pass" and g["eq8_holds"] and g["nonincreasing"]
    c = even_monotone_check(lambda x: 2 + np.cos(x), X=4 * np.pi, decay_hint=False)
    assert c["k_nonzero"] and not c["nonincreasing"]
    assert c["verdict"] == "periodic-type"
    assert "liminf" in c["notes"][0]
    lo = even_monotone_check(lambda x: 1 / (1 + x ** 2), X=10.0, decay_hint=True)
    assert lo["verdict"] == "pass"
    with pytest.raises(NotEven):
        even_monotone_check(lambda x: np.exp(-(x - 0.5) ** 2), X=3.0)


def test_labels_on_a_hand_sample():
    # f = (1, 3, 5, 3, 1) at x = -2..2; alpha = 2 has no y beyond it
    r = even_monotone_check(np.array([1.0, 3.0, 5.0, 3.0, 1.0]), X=2.0)
    assert np.allclose(r["alphas"], [0, 0.5, 1, 1.5])
    assert r["labels"] == ["K", "J", "J", "J"]
    assert r["verdict"] == "pass"


def test_radial_examples():
    u = FieldFn(lorentzian((1.0, 2.0, 0.0)), decay_hint=True)
    xs, prof = radial_center_and_profile(u)
    assert np.linalg.norm(xs - [1, 2, 0]) < 0.25
    assert prof["nonincreasing"]
    assert np.allclose(prof["value"][1:], 1 / (1 + prof["r"][1:] ** 2), rtol=1e-6)
    xs, prof = radial_center_and_profile(FieldFn(exp_decay, decay_hint=True))
    assert np.linalg.norm(xs) < 0.25
    assert np.allclose(prof["value"][1:], np.exp(-prof["r"][1:]), rtol=1e-6)
    with pytest.raises(HypothesisNotMet):
        radial_center_and_profile(FieldFn(tanh_field))


def test_nonradial_field_with_decay_is_inconsistent():
    f = lambda x: np.exp(-np.sum((np.asarray(x) * [1.0, 1.0, 2.0]) ** 2, axis=-1))
    u = FieldFn(f, decay_hint=True)
    with pytest.raises(NotRadial):
        radial_center_and_profile(u)
    assert classify_field(u).kind == "inconsistent"


def test_sampled_grid_field():
    vals, h, origin = sample_field("lorentzian")
    u = FieldFn.from_grid(vals, h, origin, decay_hint=True)
    assert u.bounded and u.interp_bound > 0
    assert is_separable_field(u, 64, 500).separable
    rep = classify_field(u)
    assert rep.kind == "radial"
    assert np.linalg.norm(rep.center - [1, 2, 0]) < h
    bumps = FieldFn.from_grid(*sample_field("two_bumps"), decay_hint=True)
    assert not is_separable_field(bumps, 128, 1000).separable


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_random_centre_recovery(seed):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(3)
    c *= 5 * rng.random() ** (1 / 3) / np.linalg.norm(c)
    u = FieldFn(lorentzian(c, a=rng.uniform(0.5, 2), k=rng.uniform(0.5, 2)), decay_hint=True)
    xs, prof = radial_center_and_profile(u)
    assert np.linalg.norm(xs - c) < 0.25
    assert prof["nonincreasing"]


@settings(max_examples=5, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_axis_field_parallel(seed):
    rng = np.random.default_rng(seed)
    u = FieldFn(tanh_field)
    lines = [axis_through_point(u, x, 1.0) for x in rng.uniform(-3, 3, (4, 3))]
    for L in lines:
        assert L.angle_to(lines[0]) < np.radians(2)


def test_decay_and_separability_give_radial():
    for f in (gaussian_sum, exp_decay, lorentzian((0.5, -1, 2))):
        assert classify_field(FieldFn(f, decay_hint=True)).kind == "radial"
    assert classify_field(FieldFn(tanh_field)).kind == "axial"
