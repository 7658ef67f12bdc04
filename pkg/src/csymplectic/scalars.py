"""Scalar backends for exterior-algebra computations.

Two backends are supported:

* ``"float"``: Python ``complex`` (float64 real and imaginary parts).
* ``"exact"``: :class:`GaussQ`, a Gaussian rational ``p + q*i`` with ``p, q``
  arbitrary-precision :class:`fractions.Fraction`.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Complex, Rational
from typing import Union

FLOAT = "float"
EXACT = "exact"
BACKENDS = (FLOAT, EXACT)


class GaussQ:
    """Immutable Gaussian rational ``re + i*im``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussQ is immutable")

    @classmethod
    def coerce(cls, value) -> "GaussQ":
        if isinstance(value, GaussQ):
            return value
        if isinstance(value, (int, Fraction)) or isinstance(value, Rational):
            return cls(value, 0)
        if isinstance(value, str):
            return cls(Fraction(value), 0)
        if isinstance(value, tuple) and len(value) == 2:
            return cls(Fraction(value[0]), Fraction(value[1]))
        raise TypeError(f"cannot convert {value!r} to an exact Gaussian rational")

    def _other(self, other):
        if isinstance(other, GaussQ):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussQ(other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return GaussQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return GaussQ(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return GaussQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * o.conjugate()
        return GaussQ(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = GaussQ(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "GaussQ":
        return GaussQ(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return abs(complex(self))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussQ):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussQ({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        return f"({self.re})+({self.im})i"


Scalar = Union[complex, GaussQ]


def to_backend(value, backend: str) -> Scalar:
    """Convert ``value`` to a scalar of ``backend``."""
    if backend == FLOAT:
        return complex(value)
    if backend == EXACT:
        if isinstance(value, (float, complex)) and not isinstance(value, Rational):
            c = complex(value)
            return GaussQ(Fraction(c.real), Fraction(c.imag))
        return GaussQ.coerce(value)
    raise ValueError(f"unknown scalar backend {backend!r}")


def conj(value: Scalar) -> Scalar:
    return value.conjugate()


def is_exact_zero(value) -> bool:
    return value == 0


def backend_of(value) -> str:
    if isinstance(value, GaussQ):
        return EXACT
    if isinstance(value, Complex):
        return FLOAT
    raise TypeError(f"not a backend scalar: {value!r}")


def format_rational(q: Fraction) -> str:
    """``p/q`` string (``p`` when the denominator is one)."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text) -> Fraction:
    if isinstance(text, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if isinstance(text, str):
        return Fraction(text.strip())
    if isinstance(text, float):
        return Fraction(text)
    raise TypeError(f"cannot parse rational from {text!r}")
