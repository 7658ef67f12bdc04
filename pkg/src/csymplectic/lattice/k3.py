"""The K3 lattice, degenerate twistor lines and Néron–Severi computations.

Everything here is exact.  The K3 lattice is ``U^3 + E8(-1)^2`` with basis
order ``e1, f1, e2, f2, e3, f3`` followed by the two ``E8(-1)`` blocks, so
``e_k`` sits at index ``2(k-1)`` and ``f_k`` at ``2(k-1)+1``.  Period
coordinates live in a real number field ``K`` (see
:mod:`~csymplectic.lattice.numberfield`); the rational case is ``K = Q``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import LatticeError, NoSolutionError
from ..reports import CheckReport
from ..scalars import format_rational, parse_rational
from . import intmat
from .numberfield import NumberField, NumberFieldElement

K3_RANK = 22

#: Cartan matrix of E8 (Bourbaki numbering: 1-3-4-5-6-7-8 chain, 2 attached to 4).
E8_CARTAN = (
    (2, 0, -1, 0, 0, 0, 0, 0),
    (0, 2, 0, -1, 0, 0, 0, 0),
    (-1, 0, 2, -1, 0, 0, 0, 0),
    (0, -1, -1, 2, -1, 0, 0, 0),
    (0, 0, 0, -1, 2, -1, 0, 0),
    (0, 0, 0, 0, -1, 2, -1, 0),
    (0, 0, 0, 0, 0, -1, 2, -1),
    (0, 0, 0, 0, 0, 0, -1, 2),
)

U_GRAM = ((0, 1), (1, 0))


@dataclass(frozen=True)
class IntegralLattice:
    """A free Z-module with an integral symmetric bilinear form.

    ``basis`` optionally records the generators as coordinate rows in an
    ambient lattice (for sublattices such as Néron–Severi).
    """

    gram: tuple
    basis: tuple | None = None

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        if any(len(row) != len(g) for row in g):
            raise LatticeError("Gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(len(g)) for j in range(i)):
            raise LatticeError("Gram matrix must be symmetric")
        object.__setattr__(self, "gram", g)
        if self.basis is not None:
            object.__setattr__(self, "basis", tuple(tuple(int(x) for x in r) for r in self.basis))

    @property
    def rank(self) -> int:
        return len(self.gram)

    def det(self) -> int:
        return intmat.det(self.gram)

    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def signature(self) -> tuple:
        """``(positive, negative)`` index; raises if degenerate."""
        pos, neg, zero = intmat.inertia(self.gram)
        if zero:
            raise LatticeError(f"degenerate form: {zero}-dimensional radical")
        return pos, neg

    def inertia(self) -> tuple:
        return intmat.inertia(self.gram)

    def contains(self, v) -> bool:
        """Whether an ambient integer vector lies in the Z-span of ``basis``."""
        if self.basis is None:
            raise LatticeError("lattice has no ambient basis")
        return in_span(self.basis, v)


def block_diagonal(*blocks) -> tuple:
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[off + i][off + j] = x
        off += len(b)
    return tuple(tuple(r) for r in out)


def k3_gram() -> IntegralLattice:
    """``U + U + U + E8(-1) + E8(-1)``: even, unimodular, signature (3, 19)."""
    e8m = tuple(tuple(-x for x in row) for row in E8_CARTAN)
    return IntegralLattice(block_diagonal(U_GRAM, U_GRAM, U_GRAM, e8m, e8m))


def e(k: int) -> tuple:
    """Isotropic vector ``e_k`` of the ``k``-th hyperbolic block (``k`` = 1, 2, 3)."""
    return unit(2 * (k - 1))


def f(k: int) -> tuple:
    """Isotropic vector ``f_k`` dual to ``e_k``."""
    return unit(2 * (k - 1) + 1)


def unit(i: int, rank: int = K3_RANK) -> tuple:
    if not 0 <= i < rank:
        raise LatticeError(f"basis index {i} out of range")
    return tuple(1 if j == i else 0 for j in range(rank))


def vadd(*vectors) -> tuple:
    return tuple(sum(c) for c in zip(*vectors))


def vscale(c, v) -> tuple:
    return tuple(c * x for x in v)


def q_eval(L: IntegralLattice, u, v=None):
    """``u^T G v`` in the exact arithmetic of the entries (``q(u)`` if ``v`` is None)."""
    if v is None:
        v = u
    if len(u) != L.rank or len(v) != L.rank:
        raise LatticeError(f"vector length must be {L.rank}")
    acc = 0
    for i, ui in enumerate(u):
        if _is_zero_entry(ui):
            continue
        row = L.gram[i]
        s = 0
        for j, vj in enumerate(v):
            if row[j]:
                s = s + row[j] * vj
        acc = acc + ui * s
    return acc


def _is_zero_entry(x) -> bool:
    if isinstance(x, NumberFieldElement):
        return not x._coeffs
    return x == 0


# --------------------------------------------------------------------------
# sublattices
# --------------------------------------------------------------------------

def in_span(basis, v) -> bool:
    """Integer-span membership for a basis in row Hermite normal form."""
    basis = intmat.hermite_normal_form([list(r) for r in basis])
    rest = [Fraction(x) for x in v]
    for row in basis:
        p = next(i for i, x in enumerate(row) if x)
        c = rest[p] / row[p]
        if c.denominator != 1:
            return False
        if c:
            rest = [x - c * y for x, y in zip(rest, row)]
    return not any(rest)


@dataclass(frozen=True)
class SublatticeEmbedding:
    """Integer vectors of the K3 lattice spanning a sublattice, with its Gram matrix."""

    vectors: tuple
    gram_induced: tuple
    ambient: IntegralLattice = field(default_factory=k3_gram, compare=False, repr=False)

    @classmethod
    def from_vectors(cls, vectors, ambient: IntegralLattice | None = None):
        ambient = ambient or k3_gram()
        vectors = tuple(tuple(int(x) for x in v) for v in vectors)
        if any(len(v) != ambient.rank for v in vectors):
            raise LatticeError(f"vectors must have length {ambient.rank}")
        gram = tuple(tuple(q_eval(ambient, u, v) for v in vectors) for u in vectors)
        return cls(vectors, gram, ambient)

    @property
    def lattice(self) -> IntegralLattice:
        return IntegralLattice(self.gram_induced, self.vectors)

    def elementary_divisors(self) -> list:
        return intmat.smith_diagonal([list(v) for v in self.vectors])


def embed_hd(d: int) -> SublatticeEmbedding:
    """Primitive copy of ``H(d)`` spanned by ``v = e1`` and ``w = d f1 + e2``."""
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise LatticeError(f"d must be a positive integer, got {d!r}")
    d = int(d)
    return SublatticeEmbedding.from_vectors([e(1), vadd(vscale(d, f(1)), e(2))])


def primitivity_check(E: SublatticeEmbedding) -> bool:
    """True iff the ambient quotient by the span of ``E.vectors`` is torsion-free."""
    divisors = E.elementary_divisors()
    if len(divisors) != len(E.vectors):
        raise LatticeError("embedding vectors are linearly dependent")
    return all(x == 1 for x in divisors)


def discriminant(L: IntegralLattice) -> int:
    """Determinant of the Gram matrix; raises on a degenerate form."""
    value = L.det()
    if value == 0:
        raise LatticeError("degenerate Gram matrix has no discriminant")
    return value


# --------------------------------------------------------------------------
# periods and twistor lines
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodPoint:
    """``[Omega] = a + i b`` with coordinates in a real number field."""

    a: tuple
    b: tuple
    field: NumberField

    @classmethod
    def from_coordinates(cls, a, b, field: NumberField | None = None):
        field = field or NumberField.rationals()
        a = tuple(_to_field(field, x) for x in a)
        b = tuple(_to_field(field, x) for x in b)
        if len(a) != K3_RANK or len(b) != K3_RANK:
            raise LatticeError(f"period vectors must have length {K3_RANK}")
        return cls(a, b, field)


def _to_field(K: NumberField, x) -> NumberFieldElement:
    if isinstance(x, NumberFieldElement):
        return K(x)
    if isinstance(x, (list, tuple)):
        return K([parse_rational(c) for c in x])
    return K(parse_rational(x))


@dataclass(frozen=True)
class TwistorLine:
    """The affine line ``[Omega] + t ell`` for an isotropic integral ``ell``."""

    period: PeriodPoint
    ell: tuple
    lattice: IntegralLattice = field(default_factory=k3_gram, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "ell", tuple(int(x) for x in self.ell))
        if len(self.ell) != self.lattice.rank:
            raise LatticeError(f"ell must have length {self.lattice.rank}")

    @property
    def field(self) -> NumberField:
        return self.period.field

    def q(self, u, v=None):
        return q_eval(self.lattice, u, v)

    def point(self, t_r, t_i) -> tuple:
        """Real and imaginary parts ``(a + t_r ell, b + t_i ell)``."""
        K = self.field
        t_r, t_i = _to_field(K, t_r), _to_field(K, t_i)
        re = tuple(x + t_r * l for x, l in zip(self.period.a, self.ell))
        im = tuple(x + t_i * l for x, l in zip(self.period.b, self.ell))
        return re, im

    def to_json(self) -> dict:
        K = self.field
        return {
            "a": [x.to_json() for x in self.period.a],
            "b": [x.to_json() for x in self.period.b],
            "ell": list(self.ell),
            "field": {"min_poly": list(K.min_poly),
                      "root_interval": [format_rational(x) for x in K.root_interval]},
        }


def line_from_json(payload: dict) -> TwistorLine:
    """Parse ``{"a", "b", "ell", "field"?}``; entries are rationals or coefficient lists."""
    unknown = set(payload) - {"a", "b", "ell", "field"}
    if unknown:
        raise LatticeError(f"unknown key in line: {sorted(unknown)[0]!r}")
    for key in ("a", "b", "ell"):
        if key not in payload:
            raise LatticeError(f"missing key in line: {key!r}")
    spec = payload.get("field")
    if spec is None:
        K = NumberField.rationals()
    else:
        unknown = set(spec) - {"min_poly", "root_interval"}
        if unknown:
            raise LatticeError(f"unknown key in field: {sorted(unknown)[0]!r}")
        K = NumberField(spec["min_poly"], spec["root_interval"])
    period = PeriodPoint.from_coordinates(payload["a"], payload["b"], K)
    return TwistorLine(period, payload["ell"])


def documented_line() -> TwistorLine:
    """Rational line ``a = e2 + f2``, ``b = e3 + f3``, ``ell = e1``."""
    period = PeriodPoint.from_coordinates(vadd(e(2), f(2)), vadd(e(3), f(3)))
    return TwistorLine(period, e(1))


def _sign(x) -> int:
    if isinstance(x, NumberFieldElement):
        return x.sign()
    return (x > 0) - (x < 0)


def period_validate(p: PeriodPoint, ell, lattice: IntegralLattice | None = None) -> CheckReport:
    """Exact period-domain and line conditions, one verdict per condition."""
    L = lattice or k3_gram()
    a, b = p.a, p.b
    qa, qb, qab = q_eval(L, a), q_eval(L, b), q_eval(L, a, b)
    conditions = {
        "q(a)=q(b)": _sign(qa - qb) == 0,
        "q(a,b)=0": _sign(qab) == 0,
        "q(a)+q(b)>0": _sign(qa + qb) > 0,
        "q(ell)=0": q_eval(L, ell) == 0,
        "q(a,ell)=0": _sign(q_eval(L, a, ell)) == 0,
        "q(b,ell)=0": _sign(q_eval(L, b, ell)) == 0,
    }
    failures = sum(not ok for ok in conditions.values())
    return CheckReport("period_domain", "Cor 3.3 period domain", failures == 0,
                       float(failures), 0.0, {"conditions": conditions})


@dataclass(frozen=True)
class TwistorParameter:
    """A point ``t = t_r + i t_i`` of a twistor line, with components in ``K``."""

    t_r: NumberFieldElement
    t_i: NumberFieldElement

    def is_rational(self) -> bool:
        return self.t_r.is_rational and self.t_i.is_rational

    def to_json(self):
        if self.is_rational():
            return [format_rational(self.t_r.rational()), format_rational(self.t_i.rational())]
        return [self.t_r.to_json(), self.t_i.to_json()]


def solve_td(line: TwistorLine, E: SublatticeEmbedding) -> TwistorParameter:
    """The ``t`` with ``[Omega] + t ell`` orthogonal to every generator of ``E``.

    The generator ``w`` with ``q(ell, w) != 0`` fixes
    ``t = -q([Omega], w) / q(ell, w)``; the result is then verified exactly
    against every generator.
    """
    K = line.field
    ws = [w for w in E.vectors if line.q(line.ell, w) != 0]
    if not ws:
        raise NoSolutionError("q(ell, w) = 0 for every generator: no point of the line is orthogonal")
    w = ws[0]
    qlw = Fraction(line.q(line.ell, w))
    t = TwistorParameter(K(0) - line.q(line.period.a, w) / qlw,
                         K(0) - line.q(line.period.b, w) / qlw)
    re, im = line.point(t.t_r, t.t_i)
    for u in E.vectors:
        if _sign(line.q(re, u)) or _sign(line.q(im, u)):
            raise NoSolutionError("no single t on the line is orthogonal to all generators")
    return t


def _field_components(vector, degree: int) -> list:
    """Rational vectors ``c_k`` with ``vector = sum_k c_k theta^k``."""
    comps = [[Fraction(0)] * len(vector) for _ in range(degree)]
    for i, x in enumerate(vector):
        for k, c in enumerate(x.coeffs):
            comps[k][i] = c
    return comps


def neron_severi(line: TwistorLine, t) -> IntegralLattice:
    """Integral classes orthogonal to ``[Omega_t] = a + t_r ell + i (b + t_i ell)``.

    Each theta-power component of the real and imaginary parts gives one
    rational linear constraint; the result is the saturated integer kernel,
    in Hermite normal form, with its induced Gram matrix.
    """
    if not isinstance(t, TwistorParameter):
        t_r, t_i = t
        t = TwistorParameter(_to_field(line.field, t_r), _to_field(line.field, t_i))
    re, im = line.point(t.t_r, t.t_i)
    L = line.lattice
    rows = []
    for vec in (re, im):
        for comp in _field_components(vec, line.field.degree):
            if any(comp):
                g_comp = [sum(L.gram[i][j] * comp[j] for j in range(L.rank)) for i in range(L.rank)]
                rows.append(intmat.scale_to_integer(g_comp))
    basis = intmat.integer_kernel(rows, L.rank) if rows else [list(unit(i)) for i in range(L.rank)]
    gram = [[q_eval(L, u, v) for v in basis] for u in basis]
    return IntegralLattice(gram, basis)


# --------------------------------------------------------------------------
# projectivity
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectivityResult:
    """Outcome of :func:`projectivity_search`; ``found`` is False on failure."""

    found: bool
    x: tuple | None = None
    t: TwistorParameter | None = None
    q_x: int | None = None
    multiplier: int | None = None
    source: str = ""

    def to_json(self) -> dict:
        if not self.found:
            return {"found": False}
        return {"found": True, "x": list(self.x), "t": self.t.to_json(), "q_x": self.q_x,
                "multiplier": self.multiplier, "source": self.source}


def candidate_parameter(line: TwistorLine, x, epsilon):
    """``t = -q([Omega], x) / q(ell, x)`` if ``x`` qualifies, else None.

    ``x`` qualifies when ``q(x) > 0``, ``q(ell, x) != 0`` and ``|t| <= epsilon``.
    """
    if line.q(x) <= 0:
        return None
    qlx = line.q(line.ell, x)
    if qlx == 0:
        return None
    K = line.field
    t = TwistorParameter(K(0) - line.q(line.period.a, x) / Fraction(qlx),
                         K(0) - line.q(line.period.b, x) / Fraction(qlx))
    eps = parse_rational(epsilon)
    if _sign(t.t_r * t.t_r + t.t_i * t.t_i - eps * eps) > 0:
        return None
    return t


def projectivity_search(line: TwistorLine, epsilon, height_bound: int) -> ProjectivityResult:
    """Find an integral ``x`` of positive square making ``X_t`` projective with ``|t| <= epsilon``.

    First tries the family ``x = u + N f`` where ``f`` is the first basis
    vector with ``q(ell, f) != 0`` and ``u`` runs over ``e_k + f_k`` with
    ``q(u, ell) = q(u, f) = 0``, for ``N = 1..height_bound``.  Falls back to
    all vectors with hyperbolic-block coordinates in ``[-h, h]``,
    ``h = min(2, height_bound)``.
    """
    eps = parse_rational(epsilon)
    if eps <= 0:
        raise LatticeError("epsilon must be positive")
    rank = line.lattice.rank
    fvec = next((unit(i, rank) for i in range(rank) if line.q(line.ell, unit(i, rank)) != 0), None)
    if fvec is None:
        raise LatticeError("ell is zero")
    us = [vadd(e(k), f(k)) for k in (1, 2, 3)]
    us = [u for u in us if line.q(u) > 0 and line.q(u, line.ell) == 0 and line.q(u, fvec) == 0]
    for N in range(1, int(height_bound) + 1):
        for u in us:
            x = vadd(u, vscale(N, fvec))
            t = candidate_parameter(line, x, eps)
            if t is not None:
                return ProjectivityResult(True, x, t, line.q(x), N, "family")
    h = min(2, int(height_bound))
    for coords in itertools.product(range(-h, h + 1), repeat=6):
        x = tuple(coords) + (0,) * (rank - 6)
        t = candidate_parameter(line, x, eps)
        if t is not None:
            return ProjectivityResult(True, x, t, line.q(x), None, "enumeration")
    return ProjectivityResult(False)
