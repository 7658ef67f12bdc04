"""Exact arithmetic in real number fields Q(theta).

A field is given by a monic integer minimal polynomial together with a rational
interval isolating one real root ``theta``.  Elements are polynomials in
``theta`` of degree below the field degree.  Signs are decided by Sturm
sequences and bisection of the isolating interval, so every comparison is
exact.

Polynomials are stored internally as lists of :class:`~fractions.Fraction`
coefficients, lowest degree first.  The public ``min_poly`` of a field is
given highest degree first, matching the usual way of writing polynomials.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import LatticeError
from ..scalars import format_rational, parse_rational


# --------------------------------------------------------------------------
# polynomial helpers (lowest degree first)
# --------------------------------------------------------------------------

def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_add(p, q):
    n = max(len(p), len(q))
    return _trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def poly_sub(p, q):
    return poly_add(p, [-c for c in q])


def poly_mul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _trim(out)


def poly_divmod(p, q):
    """Quotient and remainder of ``p`` by a nonzero ``q``."""
    q = _trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(c) for c in _trim(p)]
    if len(r) < len(q):
        return [], r
    quo = [Fraction(0)] * (len(r) - len(q) + 1)
    lead = Fraction(q[-1])
    while len(r) >= len(q) and r:
        shift = len(r) - len(q)
        f = r[-1] / lead
        quo[shift] = f
        for i, c in enumerate(q):
            r[i + shift] -= f * c
        r = _trim(r)
    return _trim(quo), r


def poly_gcd(p, q):
    """Monic greatest common divisor."""
    a, b = _trim(p), _trim(q)
    while b:
        a, b = b, poly_divmod(a, b)[1]
    if not a:
        return []
    lead = Fraction(a[-1])
    return [Fraction(c) / lead for c in a]


def poly_derivative(p):
    return _trim([i * c for i, c in enumerate(p)][1:])


def poly_eval(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def sturm_sequence(p):
    seq = [_trim([Fraction(c) for c in p])]
    seq.append(poly_derivative(seq[0]))
    while seq[-1]:
        r = poly_divmod(seq[-2], seq[-1])[1]
        seq.append([-c for c in r])
    return seq[:-1]


def _sign_changes(values):
    signs = [v for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def count_roots(p, lo, hi, seq=None) -> int:
    """Number of distinct real roots of ``p`` in the half-open interval ``(lo, hi]``."""
    seq = sturm_sequence(p) if seq is None else seq
    if not seq or not seq[0]:
        raise LatticeError("root count of the zero polynomial")
    lo, hi = Fraction(lo), Fraction(hi)
    return (_sign_changes([poly_eval(s, lo) for s in seq])
            - _sign_changes([poly_eval(s, hi) for s in seq]))


# --------------------------------------------------------------------------
# fields and elements
# --------------------------------------------------------------------------

class NumberField:
    """``Q(theta)`` for the unique root of ``min_poly`` in ``root_interval``.

    Parameters
    ----------
    min_poly : sequence of int
        Monic, square-free integer polynomial, highest degree first.
        ``[1, 0, -2]`` is ``x**2 - 2``.
    root_interval : pair of rationals
        ``(lo, hi]`` containing exactly one root of ``min_poly``.

    Examples
    --------
    >>> K = NumberField([1, 0, -2], ("1", "2"))
    >>> th = K.generator()
    >>> (th * th).coeffs
    (Fraction(2, 1), Fraction(0, 1))
    >>> (th - 1).sign()
    1
    """

    def __init__(self, min_poly, root_interval):
        coeffs = [int(c) for c in min_poly]
        if any(Fraction(c) != int(c) for c in min_poly):
            raise LatticeError("minimal polynomial must have integer coefficients")
        if not coeffs or coeffs[0] != 1:
            raise LatticeError("minimal polynomial must be monic")
        self.min_poly = tuple(coeffs)
        self._poly = [Fraction(c) for c in reversed(coeffs)]
        self.degree = len(coeffs) - 1
        if self.degree < 1:
            raise LatticeError("minimal polynomial must have degree at least 1")
        if len(poly_gcd(self._poly, poly_derivative(self._poly))) > 1:
            raise LatticeError("minimal polynomial must be square-free")
        lo, hi = (parse_rational(x) for x in root_interval)
        if not lo < hi:
            raise LatticeError("root interval must satisfy lo < hi")
        self._sturm = sturm_sequence(self._poly)
        if count_roots(self._poly, lo, hi, self._sturm) != 1:
            raise LatticeError("root interval must isolate exactly one root")
        self.root_interval = (lo, hi)
        self._interval = [lo, hi]

    @classmethod
    def rationals(cls) -> "NumberField":
        """``Q`` itself, as the root of ``x`` in ``(-1, 1]``."""
        return cls([1, 0], (-1, 1))

    def __eq__(self, other):
        return (isinstance(other, NumberField) and self.min_poly == other.min_poly
                and self.root_interval == other.root_interval)

    def __hash__(self):
        return hash((self.min_poly, self.root_interval))

    def __repr__(self):
        return f"NumberField({list(self.min_poly)}, {tuple(map(format_rational, self.root_interval))})"

    def element(self, coeffs) -> "NumberFieldElement":
        return NumberFieldElement(self, coeffs)

    def __call__(self, value) -> "NumberFieldElement":
        if isinstance(value, NumberFieldElement):
            if value.field == self:
                return value
            if value.is_rational:
                # Q embeds in every field
                return NumberFieldElement(self, [value.rational()])
            raise LatticeError("element belongs to a different field")
        if isinstance(value, (list, tuple)):
            return NumberFieldElement(self, [parse_rational(c) for c in value])
        return NumberFieldElement(self, [parse_rational(value)])

    def generator(self) -> "NumberFieldElement":
        return NumberFieldElement(self, [0, 1])

    def reduce(self, poly):
        return poly_divmod(poly, self._poly)[1]

    def root_bounds(self, width=Fraction(1, 10**6)):
        """Rational interval of width at most ``width`` containing ``theta``."""
        while self._interval[1] - self._interval[0] > width:
            self._bisect()
        return tuple(self._interval)

    def _bisect(self):
        lo, hi = self._interval
        mid = (lo + hi) / 2
        if count_roots(self._poly, lo, mid, self._sturm) == 1:
            self._interval = [lo, mid]
        else:
            self._interval = [mid, hi]

    def vanishes_at_root(self, poly) -> bool:
        """Whether a rational polynomial vanishes at ``theta``."""
        poly = _trim(poly)
        if not poly:
            return True
        g = poly_gcd(poly, self._poly)
        if len(g) <= 1:
            return False
        lo, hi = self.root_interval
        return count_roots(g, lo, hi) == 1

    def sign_at_root(self, poly) -> int:
        """Exact sign of a rational polynomial evaluated at ``theta``."""
        poly = _trim(poly)
        if self.vanishes_at_root(poly):
            return 0
        seq = sturm_sequence(poly)
        while True:
            lo, hi = self._interval
            if len(poly) == 1 or count_roots(poly, lo, hi, seq) == 0:
                # no root of poly in (lo, hi]; theta is interior or equals hi
                value = poly_eval(poly, hi)
                if value != 0:
                    return 1 if value > 0 else -1
            self._bisect()

    def approx(self, poly) -> float:
        lo, hi = self.root_bounds(Fraction(1, 2**60))
        return float(poly_eval(poly, (lo + hi) / 2))


class NumberFieldElement:
    """Element ``sum_k c_k theta**k`` of a :class:`NumberField`."""

    __slots__ = ("field", "_coeffs")

    def __init__(self, field: NumberField, coeffs):
        self.field = field
        poly = _trim([Fraction(c) for c in coeffs])
        if len(poly) > field.degree:
            poly = field.reduce(poly)
        self._coeffs = tuple(poly)

    @property
    def coeffs(self) -> tuple:
        """Coefficients in powers of ``theta``, padded to the field degree."""
        return self._coeffs + (Fraction(0),) * (self.field.degree - len(self._coeffs))

    def _lift(self, other):
        if isinstance(other, NumberFieldElement):
            if other.field != self.field:
                raise LatticeError("elements belong to different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return NumberFieldElement(self.field, [other])
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return NumberFieldElement(self.field, poly_add(self._coeffs, other._coeffs))

    __radd__ = __add__

    def __neg__(self):
        return NumberFieldElement(self.field, [-c for c in self._coeffs])

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return NumberFieldElement(self.field, poly_mul(self._coeffs, other._coeffs))

    __rmul__ = __mul__

    def inverse(self):
        """Inverse via the extended Euclidean algorithm modulo ``min_poly``."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a number field")
        r0, r1 = self.field._poly, list(self._coeffs)
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, poly_sub(s0, poly_mul(q, s1))
        if not r1:
            # self shares a factor with a reducible min_poly but is nonzero at theta
            raise LatticeError("element is a zero divisor modulo the minimal polynomial")
        return NumberFieldElement(self.field, [c / r1[0] for c in s1])

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def is_zero(self) -> bool:
        return self.field.vanishes_at_root(list(self._coeffs))

    def sign(self) -> int:
        return self.field.sign_at_root(list(self._coeffs))

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return False
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.field, self._coeffs))

    def __lt__(self, other):
        return (self - self._lift(other)).sign() < 0

    def __le__(self, other):
        return (self - self._lift(other)).sign() <= 0

    def __gt__(self, other):
        return (self - self._lift(other)).sign() > 0

    def __ge__(self, other):
        return (self - self._lift(other)).sign() >= 0

    def __float__(self):
        return self.field.approx(list(self._coeffs))

    @property
    def is_rational(self) -> bool:
        return len(self._coeffs) <= 1

    def rational(self) -> Fraction:
        if not self.is_rational:
            raise LatticeError("element is not rational")
        return self._coeffs[0] if self._coeffs else Fraction(0)

    def to_json(self):
        return [format_rational(c) for c in self.coeffs]

    def __repr__(self):
        terms = [f"{format_rational(c)}*th^{k}" for k, c in enumerate(self._coeffs) if c]
        return " + ".join(terms) if terms else "0"
