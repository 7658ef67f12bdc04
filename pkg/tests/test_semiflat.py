"""Semi-flat torus fibrations and the degenerate twistorial family."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from csymplectic.errors import DomainError, FormError, ModelError
from csymplectic.exterior import (
    check_pointwise_csymplectic,
    contract,
    dz,
    dzbar,
    wedge,
)
from csymplectic.fields import FormField
from csymplectic.scalars import EXACT, GaussQ
from csymplectic.semiflat import (
    build_model,
    closedness_check,
    darboux_frame,
    eval_family_form,
    holomorphy_check,
    kernel_formula_check,
    model_from_json,
    predicted_kernel,
    rational_sample_points,
    sample_points,
    vanishing_lemma_check,
    volume_invariance_check,
)

# closed polynomial eta on C^2: dz_0 ^ dz_1 + i del dbar(|z_0|^2 |z_1|^2)
POLY_ETA = {"kind": "polynomial", "coeffs": [
    {"coef": "1", "dz": [0, 1]},
    {"coef": [0, 1], "z": [0, 1], "zbar": [0, 1], "dz": [0], "dzbar": [0]},
    {"coef": [0, 1], "z": [0, 1], "zbar": [1, 0], "dz": [0], "dzbar": [1]},
    {"coef": [0, 1], "z": [1, 0], "zbar": [0, 1], "dz": [1], "dzbar": [0]},
    {"coef": [0, 1], "z": [1, 0], "zbar": [1, 0], "dz": [1], "dzbar": [1]},
]}


@pytest.fixture(scope="module")
def fs1():
    return build_model(1, 1.0, [[0, 1]], "fubini_study")


@pytest.fixture(scope="module")
def fs2():
    return build_model(2, 1.0, np.eye(2) * 1j, "fubini_study")


@pytest.fixture(scope="module")
def poly2():
    return build_model(2, 1.0, np.eye(2) * 1j, POLY_ETA)


# -- construction ---------------------------------------------------------------------

def test_zero_model_is_standard():
    m = build_model(1, 1.0, [[0, 1]], "zero")
    om = eval_family_form(m, 3 + 1j, [0.1, 0.2, 0.3, 0.4])
    assert om.isclose(wedge(dz(0, 4), dz(1, 4)), 0.0)


def test_rejects_non_positive_imaginary_part():
    with pytest.raises(ModelError):
        build_model(1, 1.0, [[0, -1]], "zero")


def test_rejects_non_positive_radius():
    with pytest.raises(ModelError):
        build_model(1, 0.0)


def test_rejects_nonclosed_eta():
    spec = {"kind": "polynomial", "coeffs": [{"coef": 1, "z": [1, 0], "zbar": [0, 0], "dz": [1], "dzbar": [1]}]}
    with pytest.raises(ModelError, match="not closed"):
        build_model(2, 1.0, None, spec)


def test_rejects_02_component():
    spec = {"kind": "polynomial", "coeffs": [{"coef": 1, "dzbar": [0, 1]}]}
    with pytest.raises(ModelError, match=r"\(0,2\)"):
        build_model(2, 1.0, None, spec)


def test_model_from_json_rejects_unknown_key():
    with pytest.raises(ModelError, match="unknown"):
        model_from_json({"n": 1, "colour": "blue"})


def test_domain_enforced(fs1):
    with pytest.raises(DomainError):
        eval_family_form(fs1, 1, [1.5, 0.0, 0.0, 0.0])


# -- family form ------------------------------------------------------------------------

def test_family_at_origin(fs1):
    om = eval_family_form(fs1, 1, [0.0, 0.0, 0.2, 0.7])
    expected = wedge(dz(0, 4), dz(1, 4)) + wedge(dz(0, 4), dzbar(0, 4)).scale(1j)
    assert om.isclose(expected, 1e-14)


def test_family_at_zero_parameter(fs1):
    om = eval_family_form(fs1, 0, [0.3, 0.1, 0.2, 0.7])
    assert om.isclose(wedge(dz(0, 4), dz(1, 4)), 0.0)


def test_closedness(fs2, poly2):
    assert closedness_check(fs2).passed
    assert closedness_check(poly2).passed


@settings(max_examples=25)
@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2 ** 32 - 1))
def test_family_is_csymplectic(fs2, tr, ti, seed):
    x = sample_points(fs2, np.random.default_rng(seed), 1)[0]
    om = eval_family_form(fs2, complex(tr, ti), list(x))
    rep = check_pointwise_csymplectic(om, 2)
    assert rep.verdict
    assert rep.max_residual <= 1e-12


def test_exact_family_power_vanishes_exactly(poly2):
    pts = rational_sample_points(poly2, np.random.default_rng(3), 3)
    for t in (GaussQ(2, -3), GaussQ(0, 1)):
        for x in pts:
            om = eval_family_form(poly2, t, x, EXACT)
            assert om.backend == EXACT
            assert wedge(om.power(2), om).is_zero()


# -- vanishing lemma ------------------------------------------------------------------------

def test_vanishing_forced_for_holomorphic_one_form(fs1):
    rep = vanishing_lemma_check(fs1, 1, FormField.dz(0, 2), [0.1, 0.2, 0.3, 0.4])
    assert rep.passed and rep.details["forced"] and rep.measured == 0


def test_vanishing_not_forced_without_omega(fs1):
    rep = vanishing_lemma_check(fs1, 0, FormField.dz(0, 2), [0.1, 0.2, 0.3, 0.4])
    assert not rep.details["forced"]
    assert rep.measured > 0


def test_vanishing_for_11_form_on_surface_base(fs2):
    alpha = FormField.dz(0, 4).wedge(FormField.dzbar(0, 4))
    rep = vanishing_lemma_check(fs2, 2, alpha, [Fraction(1, 3), 0, 0, Fraction(1, 5), 0, 0, 0, 0])
    assert rep.passed and rep.details["forced"] and rep.details["p"] == 1


def test_vanishing_rejects_mixed_type(fs1):
    mixed = FormField.dz(0, 2) + FormField.dzbar(0, 2)
    with pytest.raises(FormError):
        vanishing_lemma_check(fs1, 1, mixed, [0.1, 0.2, 0.3, 0.4])


# -- volume invariance -------------------------------------------------------------------------

def test_volume_invariance_zero_parameter(fs1):
    assert volume_invariance_check(fs1, 0, [0.1, 0.2, 0.3, 0.4]).measured == 0


def test_volume_invariance_complex_parameter(fs1):
    for x in sample_points(fs1, np.random.default_rng(11), 10):
        assert volume_invariance_check(fs1, 2 - 3j, list(x)).measured <= 1e-10


def test_volume_invariance_exact(poly2):
    for x in rational_sample_points(poly2, np.random.default_rng(5), 3):
        rep = volume_invariance_check(poly2, GaussQ(2, -3), x, EXACT)
        assert rep.passed and rep.measured == 0


# -- Darboux frame and kernel ------------------------------------------------------------------------

def test_frame_for_zero_eta():
    m = build_model(1, 1.0, None, "zero")
    frame = darboux_frame(m, [0.1, 0.1, 0.0, 0.0])
    assert np.all(frame.a == 0) and np.all(frame.b == 0)


def test_frame_at_origin(fs1):
    frame = darboux_frame(fs1, [0.0, 0.0, 0.5, 0.5])
    assert abs(frame.a[0, 0]) < 1e-15
    assert abs(frame.b[0, 0] - 1j) < 1e-15


def test_frame_is_darboux_and_reconstructs(fs2):
    x = [0.1, -0.2, 0.3, 0.05, 0.4, 0.1, 0.2, 0.3]
    frame = darboux_frame(fs2, x)
    om = eval_family_form(fs2, 0, x)
    for j in range(2):
        for k in range(2):
            assert abs(om.evaluate(frame.e[j], frame.f[k]) - (j == k)) < 1e-15
            assert abs(om.evaluate(frame.e[j], frame.e[k])) < 1e-15
            assert abs(om.evaluate(frame.f[j], frame.f[k])) < 1e-15
    eta_x = eval_family_form(fs2, 1, x) - om
    assert frame.reconstruct().isclose(eta_x, 1e-13)


def test_predicted_kernel_at_origin(fs1):
    x = [0.0, 0.0, 0.1, 0.1]
    frame = darboux_frame(fs1, x)
    vecs = predicted_kernel(frame, 1)
    om = eval_family_form(fs1, 1, x)
    second = frame.f[0].conjugate() + frame.e[0] * 1j
    assert np.allclose(vecs[1].components, second.components)
    assert contract(second, om).norm() <= 1e-12


@pytest.mark.parametrize("t", [0, 1, 1j, 2 - 3j])
def test_kernel_formula_sweep(fs1, fs2, t):
    for model in (fs1, fs2):
        for x in sample_points(model, np.random.default_rng(17), 5):
            rep = kernel_formula_check(model, t, list(x))
            assert rep.passed, rep


def test_kernel_formula_exact(poly2):
    x = rational_sample_points(poly2, np.random.default_rng(2), 1)[0]
    rep = kernel_formula_check(poly2, GaussQ(1, 1), x, EXACT)
    assert rep.passed and rep.measured == 0


# -- holomorphy ---------------------------------------------------------------------------------------

def test_holomorphy_at_zero_parameter_is_exact(poly2):
    x = rational_sample_points(poly2, np.random.default_rng(4), 1)[0]
    rep = holomorphy_check(poly2, GaussQ(0), x, EXACT)
    assert rep.passed and rep.measured == 0


def test_holomorphy_fubini_study(fs1):
    for x in sample_points(fs1, np.random.default_rng(23), 10):
        rep = holomorphy_check(fs1, 1, list(x))
        assert rep.measured <= 1e-10
        assert rep.details["fibre_restriction"] == 0


def test_fibre_restriction_vanishes_for_any_parameter(fs2):
    x = [0.1, -0.2, 0.3, 0.05, 0.4, 0.1, 0.2, 0.3]
    frame = darboux_frame(fs2, x)
    for t in (0, 5 - 1j, 100j):
        om = eval_family_form(fs2, t, x)
        assert all(om.evaluate(u, v) == 0 for u in frame.e for v in frame.e)


def test_sample_points_deterministic(fs1):
    a = sample_points(fs1, np.random.default_rng(9), 4)
    b = sample_points(fs1, np.random.default_rng(9), 4)
    assert np.array_equal(a, b)
    assert all(fs1.in_domain(list(p)) for p in a)
