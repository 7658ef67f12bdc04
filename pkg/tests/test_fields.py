"""Symbolic form fields: exterior derivative, evaluation and pullbacks."""

from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from csymplectic.errors import FormError
from csymplectic.exterior import AltForm, dx, dz, dzbar, wedge
from csymplectic.fields import (
    FormField,
    coordinate_symbols,
    fubini_study_form,
    polynomial_form,
    zbarsym,
    zsym,
)
from csymplectic.scalars import EXACT, GaussQ


def test_fubini_study_at_origin():
    eta = fubini_study_form(1)
    val = eta.evaluate([0.0, 0.0])
    assert val.isclose(AltForm(2, 2, {(0, 1): 2.0}), 1e-14)
    assert val.isclose(wedge(dz(0, 2), dzbar(0, 2)).scale(1j), 1e-14)


@pytest.mark.parametrize("n", [1, 2])
def test_fubini_study_is_closed(n):
    assert fubini_study_form(n).d().is_zero()


def test_fubini_study_is_real():
    eta = fubini_study_form(2)
    val = eta.evaluate([0.1, -0.3, 0.25, 0.4])
    assert val.isclose(val.conjugate(), 1e-14)


def test_d_squared_vanishes():
    x0, y0, x1, y1 = coordinate_symbols(4)
    f = FormField.function(sp.sin(x0) * y1 ** 3 + x1 * y0 / (1 + x0 ** 2), 4)
    assert f.d().d().is_zero()


def test_nonclosed_form_detected():
    # z_1 dz_2 ^ dzbar_2 on C^2 is not closed
    eta = polynomial_form(2, [{"coef": 1, "z": [1, 0], "zbar": [0, 0], "dz": [1], "dzbar": [1]}])
    assert not eta.d().is_zero()


def test_every_two_form_on_a_curve_is_closed():
    eta = polynomial_form(1, [{"coef": 1, "z": [1], "zbar": [0], "dz": [0], "dzbar": [0]}])
    assert eta.d().is_zero()


def _central_difference_d(field, point, h=1e-5):
    """Finite-difference exterior derivative of a 2-form field at ``point``."""
    dim = field.dim
    out = {}
    for key in field.terms:
        for k in range(dim):
            if k in key:
                continue
            e = np.zeros(dim)
            e[k] = h
            plus = field.evaluate(list(np.asarray(point) + e))[key]
            minus = field.evaluate(list(np.asarray(point) - e))[key]
            deriv = (plus - minus) / (2 * h)
            full = AltForm(3, dim, {(k,) + key: deriv})
            for kk, v in full.items():
                out[kk] = out.get(kk, 0) + v
    return AltForm(3, dim, out)


def test_symbolic_derivative_matches_finite_differences():
    x0, y0, x1, y1 = coordinate_symbols(4)
    field = FormField(2, 4, {(0, 2): x0 ** 2 * y1, (1, 3): sp.log(1 + x0 ** 2 + y0 ** 2), (0, 1): x1 * y1})
    pt = [0.3, -0.2, 0.5, 0.1]
    exact = field.d().evaluate(pt)
    approx = _central_difference_d(field, pt)
    assert (exact - approx).norm() <= 1e-6 * max(1.0, exact.norm())


def test_exact_evaluation_of_polynomial_form():
    eta = polynomial_form(1, [{"coef": [0, 1], "z": [1], "zbar": [1], "dz": [0], "dzbar": [0]}])
    val = eta.evaluate([Fraction(1, 2), Fraction(1, 3)], EXACT)
    # i |z|^2 dz ^ dzbar = 2 |z|^2 dx ^ dy
    assert val == AltForm(2, 2, {(0, 1): GaussQ(2 * (Fraction(1, 4) + Fraction(1, 9)))}, EXACT)


def test_exact_evaluation_rejects_transcendental_values():
    eta = fubini_study_form(1)
    f = FormField.function(sp.log(1 + zsym(0) * zbarsym(0)), 2)
    with pytest.raises(FormError):
        f.evaluate([Fraction(1), Fraction(0)], EXACT)
    assert eta.evaluate([Fraction(0), Fraction(0)], EXACT) == AltForm(2, 2, {(0, 1): 2}, EXACT)


@given(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9))
def test_float_evaluation_agrees_with_closed_form(x, y):
    val = fubini_study_form(1).evaluate([x, y])
    expected = 2.0 / (1 + x * x + y * y) ** 2
    assert abs(val[(0, 1)] - expected) <= 1e-12 * expected


def test_translation_pullback_preserves_standard_form():
    x0, y0, x1, y1 = coordinate_symbols(4)
    om = FormField.dz(0, 4).wedge(FormField.dz(1, 4))
    shift = 1 / (x0 + sp.I * y0)
    image = [x0, y0, x1 + sp.re(shift), y1 + sp.im(shift)]
    assert (om.pullback_by(image) - om).is_zero()


def test_embed_pads_with_fibre_coordinates():
    eta = fubini_study_form(1).embed(4)
    assert eta.dim == 4
    val = eta.evaluate([0.0, 0.0, 0.7, 0.2])
    assert val.isclose(AltForm(2, 4, {(0, 1): 2.0}), 1e-14)


def test_constant_field_roundtrip():
    a = wedge(dz(0, 4, EXACT), dzbar(1, 4, EXACT))
    assert FormField.constant(a).evaluate([0, 0, 0, 0], EXACT) == a


def test_polynomial_form_rejects_bad_exponents():
    with pytest.raises(FormError):
        polynomial_form(2, [{"coef": 1, "z": [1], "dz": [0]}])
    with pytest.raises(FormError):
        polynomial_form(2, [])


def test_odd_dimension_rejected():
    with pytest.raises(FormError):
        FormField(1, 3, {(0,): 1})


def test_gradients_match_derivatives():
    x0, y0 = coordinate_symbols(2)
    f = FormField(1, 2, {(0,): x0 ** 2 * y0})
    g = f.gradient_arrays(np.array([[0.5, 2.0]]))[(0,)][0]
    assert np.allclose(g, [2 * 0.5 * 2.0, 0.25])
    assert dx(0, 2).degree == 1
