"""Moser fields, flow integration and the fibre-translation cocycle."""

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from csymplectic.errors import FlowError, FormError
from csymplectic.fields import FormField, fubini_study_form
from csymplectic.moser import (
    TwoChartModel,
    build_cocycle,
    commutation_check,
    constant_path,
    corrupted_path,
    fs_primitive,
    fubini_study_path,
    integrate_flow,
    inverse_check,
    make_path,
    moser_field,
    moser_fields,
    preserves_omega,
    pullback_check,
    reduce_fibre,
    verify_verticality,
)
from csymplectic.semiflat import build_model, sample_points


@pytest.fixture(scope="module")
def model():
    return build_model(1, 1.0, [[0, 1]], "fubini_study")


@pytest.fixture(scope="module")
def fs_path(model):
    return fubini_study_path(model, 1)


# -- primitives ----------------------------------------------------------------------

def test_fs_primitive_values():
    alpha = fs_primitive(1, 1)
    assert abs(alpha.evaluate([1.0, 0.0])[(0,)] - (-0.5j)) < 1e-14
    assert abs(alpha.evaluate([1.0, 0.0])[(1,)] - (-0.5j) * 1j) < 1e-14
    assert alpha.evaluate([0.0, 0.0]).is_zero()


@pytest.mark.parametrize("t1", [1, 1j, 2 - 3j])
def test_fs_primitive_differential(t1):
    alpha = fs_primitive(1, t1)
    assert (alpha.d() - fubini_study_form(1).scale(sp.nsimplify(t1))).is_zero()


def test_fs_primitive_rejects_empty_base():
    with pytest.raises(FormError):
        fs_primitive(0, 1)


def test_make_path_rejects_01_component(model):
    with pytest.raises(FormError, match=r"\(0,1\)"):
        make_path(model, FormField.dzbar(0, 2))


def test_make_path_rejects_two_form(model):
    with pytest.raises(FormError):
        make_path(model, fubini_study_form(1))


# -- field ---------------------------------------------------------------------------------

def test_constant_field_is_vertical_translation(model):
    c = 0.3 - 0.7j
    path = constant_path(model, [c])
    v = moser_field(path, 0.5, [0.1, 0.2, 0.3, 0.4])
    comps = v.components
    assert np.allclose(comps[:2], 0, atol=1e-15)
    assert abs((comps[2] + 1j * comps[3]) - c) < 1e-14


def test_zero_alpha_gives_zero_field(model):
    path = constant_path(model, [0])
    v = moser_field(path, 0.3, [0.1, 0.2, 0.3, 0.4])
    assert np.all(v.components == 0)


def test_moser_equation_residual(fs_path, model):
    pts = sample_points(model, np.random.default_rng(1), 10)
    for s in (0.0, 0.5, 1.0):
        assert np.max(moser_fields(fs_path, s, pts).residual) <= 1e-12


def test_field_outside_domain_rejected(fs_path):
    with pytest.raises(FormError):
        moser_field(fs_path, 0.0, [2.0, 0.0, 0.0, 0.0])


@settings(max_examples=20)
@given(st.floats(0, 1), st.integers(0, 2 ** 32 - 1))
def test_field_is_vertical(fs_path, s, seed):
    pts = sample_points(fs_path.model, np.random.default_rng(seed), 3)
    vec = moser_fields(fs_path, s, pts).vectors
    assert np.max(np.abs(vec[:, :2])) <= 1e-10


# -- flow ------------------------------------------------------------------------------------

def test_constant_path_flow_is_exact(model):
    path = constant_path(model, [0.25 + 0.5j])
    pts = sample_points(model, np.random.default_rng(2), 5)
    res = integrate_flow(path, pts, 20)
    assert res.max_pullback_error <= 1e-14
    for smp in res.samples:
        shifted = smp.x0 + np.array([0, 0, 0.25, 0.5])
        assert np.allclose(smp.x_cover, shifted, atol=1e-14)
        assert np.allclose(smp.J, np.eye(4), atol=1e-15)


def test_fubini_study_pullback_short(fs_path, model):
    pts = sample_points(model, np.random.default_rng(3), 8)
    rep = pullback_check(fs_path, pts, 50)
    assert rep.passed
    assert rep.details["max_z_drift"] == 0


def test_reverse_flow_inverts_forward(fs_path, model):
    pts = sample_points(model, np.random.default_rng(4), 4)
    fwd = integrate_flow(fs_path, pts, 40)
    back = integrate_flow(fs_path, [smp.x_cover for smp in fwd.samples], 40, reverse=True)
    assert np.allclose([smp.x_cover for smp in back.samples], pts, atol=1e-12)


def test_flow_rejects_zero_steps(fs_path):
    with pytest.raises(FlowError):
        integrate_flow(fs_path, [[0.0, 0.0, 0.0, 0.0]], 0)


def test_reduce_fibre_lands_in_fundamental_domain(model):
    pts = np.array([[0.1, 0.1, 3.7, -2.2], [0.0, 0.0, -0.5, 5.5]])
    red = reduce_fibre(model, pts)
    assert np.all((red[:, 2:] >= 0) & (red[:, 2:] < 1))
    assert np.allclose((pts - red)[:, 2:], np.round(pts - red)[:, 2:])


# -- verticality ---------------------------------------------------------------------------

def test_verticality_grid(fs_path, model):
    pts = sample_points(model, np.random.default_rng(5), 20)
    rep = verify_verticality(fs_path, np.linspace(0, 1, 5), pts)
    assert rep.passed


def test_negative_control_fails(fs_path, model):
    pts = sample_points(model, np.random.default_rng(5), 20)
    rep = verify_verticality(corrupted_path(fs_path), np.linspace(0, 1, 5), pts)
    assert not rep.passed
    assert rep.measured > 1e-3


def test_dwbar_corruption_stays_vertical(fs_path, model):
    pts = sample_points(model, np.random.default_rng(5), 10)
    rep = verify_verticality(corrupted_path(fs_path, components="dwbar"), [0.0, 1.0], pts)
    assert rep.passed


# -- cocycle ---------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def p1():
    return TwoChartModel(1j, 0.5, 2.0)


def test_cocycle_shift_closed_form(p1):
    elem = build_cocycle(p1, 1)
    z = np.array([0.7 + 0.2j, -1.1 + 0.9j])
    assert np.allclose(elem.fiber_shift(z), -1j / z, atol=1e-12)
    assert elem.holomorphy_residual <= 1e-12


def test_cocycle_zero_parameter_is_identity(p1):
    elem = build_cocycle(p1, 0)
    pts = p1.overlap_samples(np.random.default_rng(0), 5)
    assert np.allclose(elem.apply(pts), pts, atol=0)


def test_cocycle_preserves_omega(p1):
    assert preserves_omega(build_cocycle(p1, 1)).passed


def test_cocycle_inverse(p1):
    assert inverse_check(p1, 1, samples=20).passed


def test_cocycle_elements_commute(p1):
    assert commutation_check(build_cocycle(p1, 1), build_cocycle(p1, 2 - 1j, 1, 0)).passed


def test_cocycle_rejects_points_off_overlap(p1):
    with pytest.raises(FormError):
        build_cocycle(p1, 1).apply([[0.1, 0.0, 0.0, 0.0]])


def test_empty_overlap_rejected():
    with pytest.raises(FormError):
        TwoChartModel(1j, 2.0, 1.0)
