"""Pointwise exterior algebra: worked examples, an independent permutation-sum
oracle for the wedge product, and algebraic identities as properties."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from csymplectic.errors import FormError, NotCSymplecticError
from csymplectic.exterior import (
    AltForm,
    TangentVector,
    check_pointwise_csymplectic,
    contract,
    d_dx,
    d_dz,
    d_dzbar,
    dx,
    dz,
    dzbar,
    hodge_project,
    kernel,
    pullback,
    recover_complex_structure,
    standard_complex_structure,
    type_decomposition,
    vectors_rank,
    wedge,
)
from csymplectic.scalars import EXACT, FLOAT, GaussQ


# -- independent oracle -----------------------------------------------------------

def _perm_parity(p):
    p = list(p)
    sign = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def _value(form, idx):
    """Coefficient of ``form`` on an arbitrary ordered index tuple."""
    if len(set(idx)) != len(idx):
        return 0
    order = sorted(range(len(idx)), key=lambda k: idx[k])
    return _perm_parity(order) * form.coeffs.get(tuple(sorted(idx)), 0)


def oracle_wedge(a, b):
    """``(a ^ b)_I = 1/(k! l!) sum_sigma sgn(sigma) a(sigma I_<k) b(sigma I_>=k)``."""
    k, l = a.degree, b.degree
    out = {}
    for idx in itertools.combinations(range(a.dim), k + l):
        total = 0
        for perm in itertools.permutations(range(k + l)):
            s = _perm_parity(perm)
            seq = [idx[p] for p in perm]
            total += s * _value(a, seq[:k]) * _value(b, seq[k:])
        total = total / (math.factorial(k) * math.factorial(l)) if a.backend == FLOAT else \
            total * Fraction(1, math.factorial(k) * math.factorial(l))
        if total != 0:
            out[idx] = total
    return AltForm(k + l, a.dim, out, a.backend)


# -- strategies --------------------------------------------------------------------

small_rat = st.fractions(min_value=-5, max_value=5, max_denominator=6)
gauss = st.builds(GaussQ, small_rat, small_rat)


@st.composite
def exact_forms(draw, dim, degree=None, max_degree=4):
    k = draw(st.integers(0, min(max_degree, dim))) if degree is None else degree
    keys = list(itertools.combinations(range(dim), k))
    chosen = draw(st.lists(st.sampled_from(keys), max_size=min(len(keys), 5), unique=True)) if keys else []
    return AltForm(k, dim, {key: draw(gauss) for key in chosen}, EXACT)


@st.composite
def exact_vectors(draw, dim):
    return TangentVector(np.array([draw(gauss) for _ in range(dim)], dtype=object))


dims = st.sampled_from([2, 4, 6, 8])


# -- wedge --------------------------------------------------------------------------

def test_wedge_repeated_factor_vanishes():
    om = wedge(dz(0, 4), dz(1, 4))
    assert wedge(om, om).is_zero()


def test_wedge_with_conjugate_gives_real_volume():
    om = wedge(dz(0, 4, EXACT), dz(1, 4, EXACT))
    vol = wedge(om, om.conjugate())
    assert vol == AltForm(4, 4, {(0, 1, 2, 3): 4}, EXACT)


def test_wedge_anticommutes_on_one_forms():
    a, b = dx(0, 4), dx(3, 4)
    assert wedge(a, b) == -wedge(b, a)


def test_wedge_dimension_mismatch():
    with pytest.raises(FormError):
        wedge(dx(0, 4), dx(0, 6))


def test_wedge_above_top_degree_is_zero():
    top = AltForm(4, 4, {(0, 1, 2, 3): 1})
    assert wedge(top, dx(0, 4)).is_zero()


@given(dims.flatmap(lambda d: st.tuples(exact_forms(d, max_degree=2), exact_forms(d, max_degree=2))))
def test_wedge_matches_permutation_oracle(pair):
    a, b = pair
    assert wedge(a, b) == oracle_wedge(a, b)


@given(dims.flatmap(lambda d: st.tuples(exact_forms(d), exact_forms(d), exact_forms(d))))
def test_wedge_associative(triple):
    a, b, c = triple
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))


@given(dims.flatmap(lambda d: st.tuples(exact_forms(d), exact_forms(d))))
def test_wedge_graded_commutative(pair):
    a, b = pair
    sign = (-1) ** (a.degree * b.degree)
    assert wedge(a, b) == wedge(b, a).scale(sign)


@given(dims.flatmap(lambda d: st.tuples(exact_forms(d), exact_forms(d))))
def test_conjugate_commutes_with_wedge(pair):
    a, b = pair
    assert wedge(a, b).conjugate() == wedge(a.conjugate(), b.conjugate())


@given(dims.flatmap(lambda d: st.tuples(exact_forms(d, max_degree=3), exact_forms(d, max_degree=3))))
def test_float_and_exact_backends_agree(pair):
    a, b = pair
    exact = wedge(a, b)
    approx = wedge(a.to_backend(FLOAT), b.to_backend(FLOAT))
    assert approx.isclose(exact.to_backend(FLOAT), 1e-12)


# -- contraction -----------------------------------------------------------------------

def test_contract_dw_into_dz_dw():
    om = wedge(dz(0, 4, EXACT), dz(1, 4, EXACT))
    assert contract(d_dz(1, 4, EXACT), om) == -dz(0, 4, EXACT)


def test_contract_rejects_zero_form():
    with pytest.raises(FormError):
        contract(d_dx(0, 4), AltForm.scalar(1, 4))


@given(dims.flatmap(lambda d: st.tuples(exact_vectors(d), exact_forms(d))))
def test_double_contraction_vanishes(pair):
    v, a = pair
    if a.degree >= 2:
        assert contract(v, contract(v, a)).is_zero()


@given(dims.flatmap(lambda d: st.tuples(exact_vectors(d), exact_forms(d, max_degree=2),
                                        exact_forms(d, max_degree=2))))
def test_contraction_is_antiderivation(triple):
    v, a, b = triple
    if a.degree == 0 or b.degree == 0 or a.degree + b.degree > a.dim:
        return
    lhs = contract(v, wedge(a, b))
    rhs = wedge(contract(v, a), b) + wedge(a, contract(v, b)).scale((-1) ** a.degree)
    assert lhs == rhs


# -- kernels and the C-symplectic conditions ------------------------------------------------

def _span_equal(a, b):
    return vectors_rank(a) == vectors_rank(b) == vectors_rank(list(a) + list(b))


def test_kernel_of_holomorphic_form():
    om = wedge(dz(0, 4, EXACT), dz(1, 4, EXACT))
    ker = kernel(om)
    assert len(ker) == 2
    assert _span_equal(ker, [d_dzbar(0, 4, EXACT), d_dzbar(1, 4, EXACT)])


def test_kernel_of_real_symplectic_form_is_trivial():
    om = wedge(dx(0, 4), dx(1, 4)) + wedge(dx(2, 4), dx(3, 4))
    assert kernel(om) == []


def test_kernel_of_dz_dzbar_is_conjugation_invariant():
    om = wedge(dz(0, 4, EXACT), dzbar(0, 4, EXACT))
    ker = kernel(om)
    assert _span_equal(ker, [d_dz(1, 4, EXACT), d_dzbar(1, 4, EXACT)])
    rep = check_pointwise_csymplectic(om, 1)
    assert rep.kernel_rank == 2
    assert not rep.kernel_conjugate_complementary
    assert not rep.verdict


def test_standard_form_is_csymplectic():
    rep = check_pointwise_csymplectic(wedge(dz(0, 4), dz(1, 4)), 1)
    assert rep.verdict and rep.power_vanishes and rep.volume_nonzero and rep.kernel_rank == 2


def test_form_plus_conjugate_fails_power_condition():
    om = wedge(dz(0, 4, EXACT), dz(1, 4, EXACT))
    bad = om + om.conjugate()
    rep = check_pointwise_csymplectic(bad, 1)
    assert not rep.power_vanishes and not rep.verdict
    assert wedge(bad, bad) == wedge(om, om.conjugate()).scale(2)


def test_real_symplectic_form_fails_power_condition():
    om = wedge(dx(0, 4), dx(1, 4)) + wedge(dx(2, 4), dx(3, 4))
    rep = check_pointwise_csymplectic(om, 1)
    assert not rep.power_vanishes and not rep.verdict


def test_check_rejects_bad_dimension():
    with pytest.raises(FormError):
        check_pointwise_csymplectic(wedge(dx(0, 6), dx(1, 6)), 1)


# -- complex structure -------------------------------------------------------------------

def test_recover_standard_structure():
    j = recover_complex_structure(wedge(dz(0, 4), dz(1, 4)), 1)
    assert np.allclose(j.matrix, standard_complex_structure(2).matrix)


def test_recover_structure_with_antiholomorphic_coordinate():
    j = recover_complex_structure(wedge(dz(0, 4, EXACT), dzbar(1, 4, EXACT)), 1)
    assert j.exact
    assert j.apply(d_dx(0, 4, EXACT)) == d_dx(1, 4, EXACT)
    assert j.apply(d_dx(2, 4, EXACT)) == -d_dx(3, 4, EXACT)
    assert j.square_residual() == 0


def test_recover_rejects_non_csymplectic():
    om = wedge(dx(0, 4), dx(1, 4)) + wedge(dx(2, 4), dx(3, 4))
    with pytest.raises(NotCSymplecticError):
        recover_complex_structure(om, 1)


@st.composite
def csymplectic_forms(draw):
    """Pullbacks of the standard form by random real linear isomorphisms."""
    n = draw(st.sampled_from([1, 2]))
    dim = 4 * n
    entries = draw(st.lists(st.integers(-3, 3), min_size=dim * dim, max_size=dim * dim))
    a = np.array(entries, dtype=float).reshape(dim, dim) + 4 * np.eye(dim)
    if abs(np.linalg.det(a)) < 1e-3:
        a = np.eye(dim)
    std = AltForm.zero(2, dim)
    for j in range(n):
        std = std + wedge(dz(j, dim), dz(n + j, dim))
    return n, pullback(std, a)


@given(csymplectic_forms())
def test_recovered_structure_properties(case):
    n, om = case
    rep = check_pointwise_csymplectic(om, n)
    assert rep.verdict
    j = recover_complex_structure(om, n)
    assert j.square_residual() <= 1e-10 * max(1.0, np.max(np.abs(j.matrix)) ** 2)
    assert _float_span_equal(kernel(om), j.eigenspace(-1))
    dim = 4 * n
    scale = om.norm()
    for a in range(dim):
        for b in range(dim):
            u, v = d_dx(a, dim), d_dx(b, dim)
            lhs = om.evaluate(j.apply(u), v)
            assert abs(lhs - 1j * om.evaluate(u, v)) <= 1e-9 * scale * max(1.0, np.max(np.abs(j.matrix)))


def _float_span_equal(a, b):
    ra, rb = vectors_rank(a), vectors_rank(b)
    return ra == rb == vectors_rank(list(a) + list(b))


# -- Hodge types ---------------------------------------------------------------------------

def test_pure_11_form_has_no_20_part():
    js = standard_complex_structure(2, EXACT)
    a = wedge(dz(0, 4, EXACT), dzbar(1, 4, EXACT))
    assert hodge_project(a, js, 2, 0).is_zero()


def test_real_form_20_part():
    js = standard_complex_structure(2, EXACT)
    a = wedge(dx(0, 4, EXACT), dx(2, 4, EXACT))
    expected = wedge(dz(0, 4, EXACT), dz(1, 4, EXACT)).scale(Fraction(1, 4))
    assert hodge_project(a, js, 2, 0) == expected


def test_hodge_project_rejects_wrong_type():
    with pytest.raises(FormError):
        hodge_project(dx(0, 4), standard_complex_structure(2), 1, 1)


@given(st.sampled_from([2, 4, 6]).flatmap(lambda d: exact_forms(d, degree=2)))
def test_type_components_sum_to_form(a):
    js = standard_complex_structure(a.dim // 2, EXACT)
    parts = type_decomposition(a, js)
    total = AltForm.zero(2, a.dim, EXACT)
    for part in parts.values():
        total = total + part
    assert total == a


# -- serialization -------------------------------------------------------------------------

@given(dims.flatmap(lambda d: exact_forms(d)))
def test_json_roundtrip_exact(a):
    if a.is_zero():
        return
    assert AltForm.from_json(a.to_json()) == a


def test_unsorted_keys_normalised_with_sign():
    a = AltForm(2, 4, {(2, 0): 3})
    assert a.coeffs == {(0, 2): -3}
    assert a[(2, 0)] == 3
