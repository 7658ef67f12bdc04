"""Differential forms with closed-form (sympy) coefficients on a coordinate chart.

Coordinates follow :mod:`csymplectic.exterior`: real symbols ``x0, y0, x1, y1, ...``
with complex coordinates ``z_j = x_j + i y_j``.  A field of real dimension
``dim`` uses the first ``dim`` symbols, so the pullback along a coordinate
projection onto the leading coordinates is a change of ``dim`` only.
"""

from __future__ import annotations

import functools
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
import sympy as sp

from .errors import FormError
from .exterior import AltForm, _merge, _perm_sign
from .scalars import EXACT, FLOAT, GaussQ, parse_rational


@functools.lru_cache(maxsize=None)
def coordinate_symbols(dim: int) -> tuple:
    out = []
    for k in range(dim):
        j, r = divmod(k, 2)
        out.append(sp.Symbol(f"{'xy'[r]}{j}", real=True))
    return tuple(out)


def zsym(j: int) -> sp.Expr:
    x, y = coordinate_symbols(2 * j + 2)[2 * j: 2 * j + 2]
    return x + sp.I * y


def zbarsym(j: int) -> sp.Expr:
    x, y = coordinate_symbols(2 * j + 2)[2 * j: 2 * j + 2]
    return x - sp.I * y


def d_dz_expr(f: sp.Expr, j: int) -> sp.Expr:
    x, y = coordinate_symbols(2 * j + 2)[2 * j: 2 * j + 2]
    return (sp.diff(f, x) - sp.I * sp.diff(f, y)) / 2


def d_dzbar_expr(f: sp.Expr, j: int) -> sp.Expr:
    x, y = coordinate_symbols(2 * j + 2)[2 * j: 2 * j + 2]
    return (sp.diff(f, x) + sp.I * sp.diff(f, y)) / 2


_PROBE_POINTS = ((sp.Rational(3, 7), sp.Rational(-2, 9), sp.Rational(5, 11), sp.Rational(1, 13)),
                 (sp.Rational(-1, 5), sp.Rational(4, 17), sp.Rational(-3, 10), sp.Rational(2, 3)))


def _is_zero_expr(e: sp.Expr) -> bool:
    """Symbolic zero test: cheap exact probes, then rational simplification."""
    if e == 0:
        return True
    e = sp.sympify(e)
    syms = sorted(e.free_symbols, key=lambda s: s.name)
    for probe in _PROBE_POINTS:
        values = {s: probe[k % len(probe)] + k for k, s in enumerate(syms)}
        try:
            v = sp.N(e.xreplace(values), 30)
        except (TypeError, ValueError, ZeroDivisionError):
            continue
        if v.is_finite and abs(complex(v)) > 1e-20:
            return False
    num, _ = sp.fraction(sp.together(e))
    try:
        return sp.Poly(num, *syms).is_zero if syms else num == 0
    except sp.PolynomialError:
        return sp.simplify(num) == 0


class FormField:
    """A differential ``degree``-form on an open subset of ``R^dim``."""

    def __init__(self, degree: int, dim: int, terms: Mapping | None = None):
        if dim % 2:
            raise FormError("form fields live on even-dimensional (complex) charts")
        self.degree = degree
        self.dim = dim
        c: dict = {}
        for key, expr in (terms or {}).items():
            key = tuple(int(i) for i in key)
            if len(key) != degree or any(i < 0 or i >= dim for i in key):
                raise FormError(f"bad index {key} for a {degree}-form on R^{dim}")
            if len(set(key)) != len(key):
                continue
            skey = tuple(sorted(key))
            e = sp.sympify(expr)
            if skey != key and _perm_sign(key) < 0:
                e = -e
            c[skey] = c.get(skey, 0) + e
        self.terms = {k: v for k, v in c.items() if v != 0}

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, form: AltForm) -> "FormField":
        terms = {}
        for k, v in form.items():
            if form.backend == EXACT:
                terms[k] = sp.Rational(v.re.numerator, v.re.denominator) + sp.I * sp.Rational(
                    v.im.numerator, v.im.denominator)
            else:
                terms[k] = sp.sympify(complex(v))
        return cls(form.degree, form.dim, terms)

    @classmethod
    def function(cls, expr, dim: int) -> "FormField":
        return cls(0, dim, {(): expr})

    @classmethod
    def dz(cls, j: int, dim: int) -> "FormField":
        return cls(1, dim, {(2 * j,): 1, (2 * j + 1,): sp.I})

    @classmethod
    def dzbar(cls, j: int, dim: int) -> "FormField":
        return cls(1, dim, {(2 * j,): 1, (2 * j + 1,): -sp.I})

    @classmethod
    def zero(cls, degree: int, dim: int) -> "FormField":
        return cls(degree, dim, {})

    # -- algebra ------------------------------------------------------------
    @property
    def symbols(self) -> tuple:
        return coordinate_symbols(self.dim)

    def _like(self, other):
        if self.dim != other.dim or self.degree != other.degree:
            raise FormError("form fields differ in dimension or degree")

    def __add__(self, other):
        self._like(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0) + v
        return FormField(self.degree, self.dim, terms)

    def __neg__(self):
        return FormField(self.degree, self.dim, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "FormField":
        s = sp.sympify(s)
        return FormField(self.degree, self.dim, {k: s * v for k, v in self.terms.items()})

    def __mul__(self, s):
        return self.scale(s)

    __rmul__ = __mul__

    def wedge(self, other: "FormField") -> "FormField":
        if self.dim != other.dim:
            raise FormError("dimension mismatch")
        out: dict = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                m = _merge(ka, kb)
                if m is None:
                    continue
                sign, key = m
                out[key] = out.get(key, 0) + sign * va * vb
        return FormField(self.degree + other.degree, self.dim, out)

    __xor__ = wedge

    def conjugate(self) -> "FormField":
        return FormField(self.degree, self.dim, {k: sp.conjugate(v) for k, v in self.terms.items()})

    def simplified(self) -> "FormField":
        return FormField(self.degree, self.dim,
                         {k: sp.simplify(sp.together(v)) for k, v in self.terms.items()})

    def embed(self, dim: int) -> "FormField":
        """Pullback along the projection ``R^dim -> R^self.dim`` onto leading coordinates."""
        if dim < self.dim:
            raise FormError("can only embed into a larger coordinate space")
        return FormField(self.degree, dim, self.terms)

    # -- differential operators -------------------------------------------
    def d(self) -> "FormField":
        syms = self.symbols
        out: dict = {}
        for key, expr in self.terms.items():
            for k, s in enumerate(syms):
                de = sp.diff(expr, s)
                if de == 0 or k in key:
                    continue
                m = _merge((k,), key)
                sign, nk = m
                out[nk] = out.get(nk, 0) + sign * de
        return FormField(self.degree + 1, self.dim, out)

    def _complex_derivative(self, holomorphic: bool) -> "FormField":
        n = self.dim // 2
        out = FormField.zero(self.degree + 1, self.dim)
        for key, expr in self.terms.items():
            basis = FormField(self.degree, self.dim, {key: 1})
            for j in range(n):
                coef = d_dz_expr(expr, j) if holomorphic else d_dzbar_expr(expr, j)
                if coef == 0:
                    continue
                one = FormField.dz(j, self.dim) if holomorphic else FormField.dzbar(j, self.dim)
                out = out + one.scale(coef).wedge(basis)
        return out

    def partial(self) -> "FormField":
        """The ``d-bar``-free part ``del`` of the exterior derivative."""
        return self._complex_derivative(True)

    def dbar(self) -> "FormField":
        return self._complex_derivative(False)

    def is_zero(self) -> bool:
        """Symbolic test that every coefficient simplifies to zero."""
        return all(_is_zero_expr(v) for v in self.terms.values())

    def pullback_by(self, new_coords: Sequence) -> "FormField":
        """Pullback along a map given by coordinate expressions of the image.

        ``new_coords[k]`` is the ``k``-th real coordinate of the image point as
        an expression in this chart's coordinates.
        """
        syms = self.symbols
        if len(new_coords) != self.dim:
            raise FormError("need one image expression per coordinate")
        sub = dict(zip(syms, new_coords))
        one_forms = [FormField(1, self.dim, {(k,): sp.diff(sp.sympify(c), s)
                                             for k, s in enumerate(syms)})
                     for c in new_coords]
        out = FormField.zero(self.degree, self.dim)
        for key, expr in self.terms.items():
            term = FormField.function(sp.sympify(expr).xreplace(sub), self.dim)
            for i in key:
                term = term.wedge(one_forms[i])
            out = out + term
        return out

    # -- evaluation ---------------------------------------------------------
    @functools.cached_property
    def _compiled(self):
        syms = self.symbols
        return {k: sp.lambdify(syms, v, "numpy") for k, v in self.terms.items()}

    @functools.cached_property
    def _compiled_gradient(self):
        syms = self.symbols
        return {k: [sp.lambdify(syms, sp.diff(v, s), "numpy") for s in syms]
                for k, v in self.terms.items()}

    def coefficient_arrays(self, points: np.ndarray) -> dict:
        """Vectorized coefficients: ``{index: complex array of shape (N,)}``."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        cols = [pts[:, k] for k in range(self.dim)]
        out = {}
        for k, f in self._compiled.items():
            out[k] = np.broadcast_to(np.asarray(f(*cols), dtype=complex), (pts.shape[0],)).copy()
        return out

    def gradient_arrays(self, points: np.ndarray) -> dict:
        """``{index: complex array (N, dim)}`` of coordinate partial derivatives."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        cols = [pts[:, k] for k in range(self.dim)]
        out = {}
        for k, fs in self._compiled_gradient.items():
            g = np.empty((pts.shape[0], self.dim), dtype=complex)
            for c, f in enumerate(fs):
                g[:, c] = np.asarray(f(*cols), dtype=complex)
            out[k] = g
        return out

    def evaluate(self, point, backend: str = FLOAT) -> AltForm:
        """Value at ``point`` (length ``dim``) as an :class:`AltForm`."""
        if len(point) != self.dim:
            raise FormError(f"point has {len(point)} coordinates, expected {self.dim}")
        if backend == FLOAT:
            vals = self.coefficient_arrays(np.asarray(point, dtype=float)[None, :])
            return AltForm(self.degree, self.dim, {k: complex(v[0]) for k, v in vals.items()},
                           FLOAT)
        sub = {s: sp.Rational(Fraction(parse_rational(p)).numerator,
                              Fraction(parse_rational(p)).denominator)
               for s, p in zip(self.symbols, point)}
        coeffs = {}
        for k, expr in self.terms.items():
            val = sp.expand_complex(sp.sympify(expr).xreplace(sub))
            re, im = sp.re(val), sp.im(val)
            if not (re.is_Rational and im.is_Rational):
                raise FormError("coefficient is not Gaussian-rational at this point; "
                                "use the float backend")
            coeffs[k] = GaussQ(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))
        return AltForm(self.degree, self.dim, coeffs, EXACT)

    def __repr__(self):
        return f"FormField(deg={self.degree}, dim={self.dim}, {self.terms})"


def pulled_back_matrix_arrays(field: FormField, dim: int, points: np.ndarray) -> np.ndarray:
    """Coefficient matrices ``(N, dim, dim)`` of a 2-form field embedded in ``R^dim``."""
    if field.degree != 2:
        raise FormError("expected a 2-form field")
    pts = np.atleast_2d(points)
    out = np.zeros((pts.shape[0], dim, dim), dtype=complex)
    for (i, j), v in field.coefficient_arrays(pts[:, :field.dim]).items():
        out[:, i, j] = v
        out[:, j, i] = -v
    return out


def polynomial_form(n: int, terms: Sequence[Mapping]) -> FormField:
    """Base form ``sum coef * z^a zbar^b dz_J ^ dzbar_K`` on ``C^n``.

    Each term is a mapping with keys ``coef`` (number, ``"p/q"`` string or
    ``[re, im]``), ``z`` and ``zbar`` (exponent lists of length ``n``), and
    ``dz`` / ``dzbar`` (lists of 0-based complex coordinate indices).
    """
    dim = 2 * n
    out = None
    for t in terms:
        coef = t.get("coef", 1)
        if isinstance(coef, (list, tuple)):
            c = sp.Rational(str(parse_rational(coef[0]))) + sp.I * sp.Rational(str(parse_rational(coef[1])))
        else:
            c = sp.Rational(str(parse_rational(coef)))
        za = list(t.get("z", [0] * n))
        zb = list(t.get("zbar", [0] * n))
        if len(za) != n or len(zb) != n:
            raise FormError("exponent lists must have length n")
        mono = c
        for j in range(n):
            mono = mono * zsym(j) ** int(za[j]) * zbarsym(j) ** int(zb[j])
        form = FormField.function(sp.expand(mono), dim)
        for j in t.get("dz", []):
            form = form.wedge(FormField.dz(int(j), dim))
        for j in t.get("dzbar", []):
            form = form.wedge(FormField.dzbar(int(j), dim))
        out = form if out is None else out + form
    if out is None:
        raise FormError("polynomial form needs at least one term")
    return out


def fubini_study_potential(n: int) -> sp.Expr:
    return sp.log(1 + sum(zsym(j) * zbarsym(j) for j in range(n)))


def fubini_study_form(n: int) -> FormField:
    """``i del dbar log(1 + sum |z_j|^2)`` on ``C^n``."""
    f = FormField.function(sp.expand(fubini_study_potential(n)), 2 * n)
    return f.dbar().partial().scale(sp.I).simplified()
