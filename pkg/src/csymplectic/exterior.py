"""Pointwise exterior algebra on complexified real tangent spaces.

Real coordinates on ``R^{2m}`` are ordered ``(x_0, y_0, x_1, y_1, ...)`` and the
complex coordinates are ``z_j = x_j + i y_j``, so that

    dz_j = dx_j + i dy_j,      d/dz_j = (d/dx_j - i d/dy_j) / 2.

With this convention ``dz ^ dzbar = -2i dx ^ dy`` and ``dx = (dz + dzbar) / 2``.
Index subsets are 0-based.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from . import _linalg
from .errors import FormError, NotCSymplecticError
from .scalars import EXACT, FLOAT, GaussQ, format_rational, parse_rational, to_backend

#: relative pivot threshold for float rank decisions
RANK_THRESHOLD = 1e-10


def _perm_sign(seq) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@functools.lru_cache(maxsize=None)
def _merge(a: tuple, b: tuple):
    if not a:
        return 1, b
    if not b:
        return 1, a
    if set(a).intersection(b):
        return None
    inversions = sum(1 for i in a for j in b if i > j)
    return (-1 if inversions & 1 else 1), tuple(sorted(a + b))


class AltForm:
    """A complex alternating ``degree``-form on ``R^dim``.

    ``coeffs`` maps strictly increasing index tuples to scalars of a single
    backend.  Unsorted keys are accepted at construction and normalized with
    the permutation sign; keys with a repeated index are dropped.
    """

    __slots__ = ("degree", "dim", "backend", "_c")

    def __init__(self, degree: int, dim: int, coeffs: Mapping | None = None,
                 backend: str = FLOAT):
        if degree < 0 or dim < 0:
            raise FormError("degree and dim must be non-negative")
        if backend not in (FLOAT, EXACT):
            raise FormError(f"unknown backend {backend!r}")
        self.degree = degree
        self.dim = dim
        self.backend = backend
        c = {}
        for key, value in (coeffs or {}).items():
            key = tuple(int(i) for i in key)
            if len(key) != degree:
                raise FormError(f"index {key} does not have length {degree}")
            if any(i < 0 or i >= dim for i in key):
                raise FormError(f"index {key} out of range for dim {dim}")
            if len(set(key)) != len(key):
                continue
            skey = tuple(sorted(key))
            v = to_backend(value, backend)
            if skey != key and _perm_sign(key) < 0:
                v = -v
            c[skey] = c[skey] + v if skey in c else v
        self._c = {k: v for k, v in c.items() if v != 0}

    @classmethod
    def _raw(cls, degree, dim, coeffs, backend):
        obj = cls.__new__(cls)
        obj.degree = degree
        obj.dim = dim
        obj.backend = backend
        obj._c = coeffs
        return obj

    # -- basic constructors -------------------------------------------------
    @classmethod
    def zero(cls, degree: int, dim: int, backend: str = FLOAT) -> "AltForm":
        return cls(degree, dim, {}, backend)

    @classmethod
    def scalar(cls, value, dim: int, backend: str = FLOAT) -> "AltForm":
        return cls(0, dim, {(): value}, backend)

    @classmethod
    def from_matrix(cls, m, backend: str = FLOAT) -> "AltForm":
        """2-form with antisymmetric coefficient matrix ``m`` (``w(u,v) = u^T m v``)."""
        n = len(m)
        return cls(2, n, {(i, j): m[i][j] for i in range(n) for j in range(i + 1, n)},
                   backend)

    # -- accessors ----------------------------------------------------------
    @property
    def coeffs(self) -> Mapping:
        return dict(self._c)

    def __getitem__(self, key) -> object:
        key = tuple(key)
        skey = tuple(sorted(key))
        if len(set(key)) != len(key):
            return to_backend(0, self.backend)
        v = self._c.get(skey, to_backend(0, self.backend))
        return -v if _perm_sign(key) < 0 else v

    def items(self):
        return self._c.items()

    def __len__(self):
        return len(self._c)

    def is_zero(self, tol: float = 0.0) -> bool:
        if self.backend == EXACT or tol == 0.0:
            return not self._c
        return self.norm() <= tol

    def norm(self) -> float:
        """Largest coefficient modulus."""
        return max((abs(complex(v)) for v in self._c.values()), default=0.0)

    def top_coefficient(self):
        if self.degree != self.dim:
            raise FormError("top coefficient requires degree == dim")
        return self._c.get(tuple(range(self.dim)), to_backend(0, self.backend))

    # -- arithmetic ---------------------------------------------------------
    def _check_same(self, other: "AltForm"):
        if not isinstance(other, AltForm):
            raise TypeError("expected an AltForm")
        if self.dim != other.dim:
            raise FormError(f"dimension mismatch: {self.dim} vs {other.dim}")
        if self.degree != other.degree:
            raise FormError(f"degree mismatch: {self.degree} vs {other.degree}")
        if self.backend != other.backend:
            raise FormError("cannot mix scalar backends within one form")

    def __add__(self, other):
        self._check_same(other)
        c = dict(self._c)
        for k, v in other._c.items():
            c[k] = c[k] + v if k in c else v
        return AltForm._raw(self.degree, self.dim, {k: v for k, v in c.items() if v != 0},
                            self.backend)

    def __neg__(self):
        return AltForm._raw(self.degree, self.dim, {k: -v for k, v in self._c.items()},
                            self.backend)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "AltForm":
        s = to_backend(s, self.backend)
        if s == 0:
            return AltForm.zero(self.degree, self.dim, self.backend)
        return AltForm._raw(self.degree, self.dim, {k: v * s for k, v in self._c.items()},
                            self.backend)

    def __mul__(self, s):
        if isinstance(s, AltForm):
            return NotImplemented
        return self.scale(s)

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        if not isinstance(other, AltForm):
            return NotImplemented
        return (self.degree == other.degree and self.dim == other.dim
                and self._c == other._c)

    def __hash__(self):
        return hash((self.degree, self.dim, frozenset(self._c.items())))

    def conjugate(self) -> "AltForm":
        return AltForm._raw(self.degree, self.dim,
                            {k: v.conjugate() for k, v in self._c.items()}, self.backend)

    def real_part(self) -> "AltForm":
        return (self + self.conjugate()).scale(Fraction(1, 2) if self.backend == EXACT else 0.5)

    def imag_part(self) -> "AltForm":
        half_i = GaussQ(0, Fraction(-1, 2)) if self.backend == EXACT else -0.5j
        return (self - self.conjugate()).scale(half_i)

    def power(self, k: int) -> "AltForm":
        out = AltForm.scalar(1, self.dim, self.backend)
        for _ in range(k):
            out = wedge(out, self)
            if not out._c:
                break
        return out

    def to_backend(self, backend: str) -> "AltForm":
        if backend == self.backend:
            return self
        if backend == FLOAT:
            return AltForm(self.degree, self.dim, {k: complex(v) for k, v in self._c.items()},
                           FLOAT)
        return AltForm(self.degree, self.dim, self._c, EXACT)

    def isclose(self, other: "AltForm", tol: float = 1e-12) -> bool:
        return (self.to_backend(FLOAT) - other.to_backend(FLOAT)).norm() <= tol

    # -- matrix view (degree 2) ---------------------------------------------
    def matrix(self) -> np.ndarray:
        """Antisymmetric coefficient matrix ``M`` with ``w(u, v) = u^T M v``."""
        if self.degree != 2:
            raise FormError("matrix view requires a 2-form")
        if self.backend == FLOAT:
            m = np.zeros((self.dim, self.dim), dtype=complex)
        else:
            m = np.full((self.dim, self.dim), GaussQ(0), dtype=object)
        for (i, j), v in self._c.items():
            m[i, j] = v
            m[j, i] = -v
        return m

    def evaluate(self, *vectors) -> object:
        """``a(v_1, ..., v_k)`` on tangent vectors (arrays or :class:`TangentVector`)."""
        if len(vectors) != self.degree:
            raise FormError(f"need {self.degree} vectors, got {len(vectors)}")
        cols = [_components(v) for v in vectors]
        total = to_backend(0, self.backend)
        for key, v in self._c.items():
            sub = [[cols[j][i] for j in range(self.degree)] for i in key]
            total = total + v * _det(sub, self.backend)
        return total

    # -- serialization --------------------------------------------------------
    def to_json(self) -> dict:
        terms = []
        for key in sorted(self._c):
            v = self._c[key]
            if self.backend == EXACT:
                re, im = format_rational(v.re), format_rational(v.im)
            else:
                re, im = float(v.real), float(v.imag)
            terms.append({"idx": list(key), "re": re, "im": im})
        return {"degree": self.degree, "dim": self.dim, "terms": terms}

    @classmethod
    def from_json(cls, data: Mapping, backend: str | None = None) -> "AltForm":
        terms = data.get("terms", [])
        if backend is None:
            exact = all(isinstance(t.get("re", 0), (str, int)) and isinstance(t.get("im", 0), (str, int))
                        for t in terms)
            backend = EXACT if exact and terms else FLOAT
        coeffs = {}
        for t in terms:
            idx = tuple(t["idx"])
            if backend == EXACT:
                val = GaussQ(parse_rational(t.get("re", 0)), parse_rational(t.get("im", 0)))
            else:
                val = complex(float(parse_rational(t.get("re", 0))),
                              float(parse_rational(t.get("im", 0))))
            coeffs[idx] = coeffs.get(idx, 0) + val
        return cls(int(data["degree"]), int(data["dim"]), coeffs, backend)

    def __repr__(self):
        body = " + ".join(f"({v})d{list(k)}" for k, v in sorted(self._c.items()))
        return f"AltForm(deg={self.degree}, dim={self.dim}, {body or '0'})"


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Complex tangent vector in the real coordinate basis ``d/dx_0, d/dy_0, ...``."""

    components: np.ndarray

    def __post_init__(self):
        comps = self.components
        if not isinstance(comps, np.ndarray):
            exact = any(isinstance(c, (GaussQ, Fraction, int)) and not isinstance(c, bool)
                        for c in comps) and not any(isinstance(c, (float, complex)) for c in comps)
            if exact:
                comps = np.array([GaussQ.coerce(c) for c in comps], dtype=object)
            else:
                comps = np.asarray(comps, dtype=complex)
            object.__setattr__(self, "components", comps)

    @property
    def dim(self) -> int:
        return len(self.components)

    @property
    def backend(self) -> str:
        return EXACT if self.components.dtype == object else FLOAT

    def conjugate(self) -> "TangentVector":
        if self.backend == EXACT:
            return TangentVector(np.array([c.conjugate() for c in self.components], dtype=object))
        return TangentVector(np.conj(self.components))

    def __add__(self, other):
        return TangentVector(self.components + _components(other))

    def __sub__(self, other):
        return TangentVector(self.components - _components(other))

    def __mul__(self, s):
        return TangentVector(self.components * s)

    __rmul__ = __mul__

    def __neg__(self):
        return TangentVector(-self.components)

    def __eq__(self, other):
        if not isinstance(other, TangentVector):
            return NotImplemented
        return self.dim == other.dim and all(a == b for a, b in zip(self.components, other.components))

    def __repr__(self):
        return f"TangentVector({list(self.components)})"


def _components(v):
    if isinstance(v, TangentVector):
        return v.components
    return np.asarray(v) if not isinstance(v, (list, tuple)) else v


def _det(sub, backend):
    k = len(sub)
    if k == 0:
        return to_backend(1, backend)
    if k == 1:
        return sub[0][0]
    if k == 2:
        return sub[0][0] * sub[1][1] - sub[0][1] * sub[1][0]
    if backend == FLOAT:
        return complex(np.linalg.det(np.array(sub, dtype=complex)))
    return _linalg.det(sub)


# -- coordinate helpers -------------------------------------------------------

def dx(k: int, dim: int, backend: str = FLOAT) -> AltForm:
    """Real coordinate 1-form ``dx_k`` for the real index ``k``."""
    return AltForm(1, dim, {(k,): 1}, backend)


def dz(j: int, dim: int, backend: str = FLOAT) -> AltForm:
    i = GaussQ(0, 1) if backend == EXACT else 1j
    return AltForm(1, dim, {(2 * j,): 1, (2 * j + 1,): i}, backend)


def dzbar(j: int, dim: int, backend: str = FLOAT) -> AltForm:
    return dz(j, dim, backend).conjugate()


def d_dx(k: int, dim: int, backend: str = FLOAT) -> TangentVector:
    v = _zero_vec(dim, backend)
    v[k] = to_backend(1, backend)
    return TangentVector(v)


def d_dz(j: int, dim: int, backend: str = FLOAT) -> TangentVector:
    v = _zero_vec(dim, backend)
    v[2 * j] = to_backend(Fraction(1, 2), backend)
    v[2 * j + 1] = to_backend(GaussQ(0, Fraction(-1, 2)), backend) if backend == EXACT else -0.5j
    return TangentVector(v)


def d_dzbar(j: int, dim: int, backend: str = FLOAT) -> TangentVector:
    return d_dz(j, dim, backend).conjugate()


def _zero_vec(dim, backend):
    if backend == EXACT:
        return np.array([GaussQ(0)] * dim, dtype=object)
    return np.zeros(dim, dtype=complex)


def standard_complex_structure(m: int, backend: str = FLOAT) -> "ComplexStructureMatrix":
    """``J d/dx_k = d/dy_k`` on ``R^{2m}``."""
    dim = 2 * m
    one = Fraction(1) if backend == EXACT else 1.0
    j = np.zeros((dim, dim), dtype=object if backend == EXACT else float)
    if backend == EXACT:
        j[:] = Fraction(0)
    for k in range(m):
        j[2 * k + 1, 2 * k] = one
        j[2 * k, 2 * k + 1] = -one
    return ComplexStructureMatrix(j)


# -- core operations ----------------------------------------------------------

def wedge(a: AltForm, b: AltForm) -> AltForm:
    """Exterior product ``a ^ b``."""
    if a.dim != b.dim:
        raise FormError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.backend != b.backend:
        raise FormError("cannot mix scalar backends within one form")
    degree = a.degree + b.degree
    if degree > a.dim:
        return AltForm.zero(degree, a.dim, a.backend)
    out = {}
    for ka, va in a._c.items():
        for kb, vb in b._c.items():
            m = _merge(ka, kb)
            if m is None:
                continue
            sign, key = m
            p = va * vb
            if sign < 0:
                p = -p
            out[key] = out[key] + p if key in out else p
    return AltForm._raw(degree, a.dim, {k: v for k, v in out.items() if v != 0}, a.backend)


def contract(v, a: AltForm) -> AltForm:
    """Interior product ``v _| a`` (insertion into the first slot)."""
    comps = _components(v)
    if len(comps) != a.dim:
        raise FormError(f"dimension mismatch: vector {len(comps)} vs form {a.dim}")
    if a.degree < 1:
        raise FormError("cannot contract a vector into a 0-form")
    backend = a.backend
    out = {}
    for key, val in a._c.items():
        for pos, i in enumerate(key):
            vi = comps[i]
            if vi == 0:
                continue
            term = val * to_backend(vi, backend)
            if pos & 1:
                term = -term
            rest = key[:pos] + key[pos + 1:]
            out[rest] = out[rest] + term if rest in out else term
    return AltForm._raw(a.degree - 1, a.dim, {k: x for k, x in out.items() if x != 0}, backend)


def _float_null(m: np.ndarray, threshold: float = RANK_THRESHOLD) -> np.ndarray:
    """Orthonormal null-space basis (columns), pivot threshold relative to max entry."""
    n = m.shape[1]
    scale = np.max(np.abs(m)) if m.size else 0.0
    if scale == 0.0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(m)
    r = int(np.sum(s > threshold * scale))
    return np.conj(vh[r:]).T


def float_rank(m: np.ndarray, threshold: float = RANK_THRESHOLD) -> int:
    m = np.asarray(m, dtype=complex)
    scale = np.max(np.abs(m)) if m.size else 0.0
    if scale == 0.0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > threshold * scale))


def kernel(omega: AltForm) -> list[TangentVector]:
    """Basis of ``{v : v _| omega = 0}`` in the complexified tangent space."""
    if omega.degree != 2:
        raise FormError("kernel is defined here for 2-forms only")
    m = omega.matrix()
    if omega.backend == FLOAT:
        null = _float_null(m)
        return [TangentVector(null[:, k]) for k in range(null.shape[1])]
    basis = _linalg.nullspace(m.tolist(), ncols=omega.dim, one=GaussQ(1), zero=GaussQ(0))
    return [TangentVector(np.array(b, dtype=object)) for b in basis]


def vectors_rank(vectors: Iterable[TangentVector], threshold: float = RANK_THRESHOLD) -> int:
    vectors = list(vectors)
    if not vectors:
        return 0
    if all(v.backend == EXACT for v in vectors):
        return _linalg.rank([list(v.components) for v in vectors])
    return float_rank(np.array([np.asarray(v.components, dtype=complex) for v in vectors]),
                      threshold)


@dataclass(frozen=True)
class PointwiseCheckReport:
    power_vanishes: bool
    volume_nonzero: bool
    kernel_rank: int
    kernel_conjugate_complementary: bool
    verdict: bool
    max_residual: float
    volume: complex = 0j


def check_pointwise_csymplectic(omega: AltForm, n: int, power_tol: float = 1e-12,
                                volume_tol: float = 1e-10) -> PointwiseCheckReport:
    """Algebraic C-symplectic conditions for a 2-form on ``R^{4n}``.

    Float tolerances are relative to ``|omega|^k`` where ``|omega|`` is the
    largest coefficient modulus; the exact backend decides everything exactly.
    """
    if omega.degree != 2:
        raise FormError("expected a 2-form")
    if omega.dim % 4 != 0:
        raise FormError(f"dim {omega.dim} is not divisible by 4")
    if omega.dim != 4 * n:
        raise FormError(f"dim {omega.dim} does not equal 4n = {4 * n}")
    exact = omega.backend == EXACT
    scale = omega.norm()
    pw_n = omega.power(n)
    pw_n1 = wedge(pw_n, omega)
    vol = wedge(pw_n, pw_n.conjugate()).top_coefficient()
    if exact:
        power_ok = pw_n1.is_zero()
        power_res = 0.0 if power_ok else pw_n1.norm()
        vol_ok = vol != 0
    else:
        denom = scale ** (n + 1) if scale > 0 else 1.0
        power_res = pw_n1.norm() / denom
        power_ok = power_res <= power_tol
        vol_ok = scale > 0 and abs(vol) > volume_tol * scale ** (2 * n)
    ker = kernel(omega)
    k_rank = len(ker)
    complementary = vectors_rank(ker + [v.conjugate() for v in ker]) == omega.dim
    verdict = power_ok and vol_ok and k_rank == 2 * n and complementary
    return PointwiseCheckReport(power_ok, vol_ok, k_rank, complementary, verdict,
                                float(power_res), complex(vol))


class ComplexStructureMatrix:
    """Real ``2m x 2m`` matrix ``J`` with ``J^2 = -1``."""

    def __init__(self, matrix):
        self.matrix = matrix

    @property
    def exact(self) -> bool:
        return self.matrix.dtype == object

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def square_residual(self) -> float:
        j2 = self.matrix @ self.matrix
        eye = np.eye(self.dim)
        if self.exact:
            return float(max(abs(Fraction(j2[i, k]) + (1 if i == k else 0))
                             for i in range(self.dim) for k in range(self.dim)))
        return float(np.max(np.abs(j2 + eye)))

    def eigenspace(self, sign: int) -> list[TangentVector]:
        """Basis of the ``sign * i`` eigenspace (``sign`` = +1 gives T^{1,0})."""
        if self.exact:
            lam = GaussQ(0, sign)
            m = [[GaussQ(self.matrix[i, k]) - (lam if i == k else 0) for k in range(self.dim)]
                 for i in range(self.dim)]
            return [TangentVector(np.array(b, dtype=object))
                    for b in _linalg.nullspace(m, ncols=self.dim, one=GaussQ(1), zero=GaussQ(0))]
        m = self.matrix.astype(complex) - sign * 1j * np.eye(self.dim)
        null = _float_null(m)
        return [TangentVector(null[:, k]) for k in range(null.shape[1])]

    def apply(self, v) -> TangentVector:
        comps = _components(v)
        if self.exact:
            out = np.array([sum((GaussQ(self.matrix[i, k]) * GaussQ.coerce(comps[k])
                                 for k in range(self.dim)), GaussQ(0))
                            for i in range(self.dim)], dtype=object)
            return TangentVector(out)
        return TangentVector(self.matrix @ np.asarray(comps, dtype=complex))

    def __repr__(self):
        return f"ComplexStructureMatrix({self.matrix!r})"


def recover_complex_structure(omega: AltForm, n: int, check: bool = True) -> ComplexStructureMatrix:
    """Complex structure ``J = omega_2^{-1} o omega_1`` of a C-symplectic 2-form.

    The real and imaginary parts act as maps ``v -> v _| omega_j``; with the
    matrix convention ``w(u, v) = u^T M v`` this is ``J = M_2^{-1} M_1``.
    """
    if check:
        rep = check_pointwise_csymplectic(omega, n)
        if not rep.verdict:
            raise NotCSymplecticError("form fails the pointwise C-symplectic conditions")
    m = omega.matrix()
    if omega.backend == FLOAT:
        m1, m2 = m.real, m.imag
        if float_rank(m2) < omega.dim:
            raise NotCSymplecticError("imaginary part is degenerate")
        return ComplexStructureMatrix(np.linalg.solve(m2, m1))
    m1 = [[x.re for x in row] for row in m]
    m2 = [[x.im for x in row] for row in m]
    try:
        j = _linalg.solve(m2, m1)
    except np.linalg.LinAlgError as exc:
        raise NotCSymplecticError("imaginary part is degenerate") from exc
    return ComplexStructureMatrix(_linalg.as_object_array(j))


def pullback(a: AltForm, transform) -> AltForm:
    """``(A^* a)(v_1, ...) = a(A v_1, ...)`` for a square matrix ``A``."""
    backend = a.backend
    t = np.asarray(transform, dtype=object if backend == EXACT else complex)
    dim = a.dim
    if a.degree == 0:
        return a
    out = {}
    for cols in itertools.combinations(range(dim), a.degree):
        total = to_backend(0, backend)
        for key, val in a._c.items():
            sub = [[t[i, c] for c in cols] for i in key]
            d = _det(sub, backend)
            if d != 0:
                total = total + val * to_backend(d, backend)
        if total != 0:
            out[cols] = total
    return AltForm._raw(a.degree, dim, out, backend)


def _frame(j: ComplexStructureMatrix, backend: str):
    """Columns ``[T^{1,0} basis, conjugates]`` and the inverse matrix."""
    plus = j.eigenspace(+1)
    m = j.dim // 2
    if len(plus) != m:
        raise FormError("J does not have an m-dimensional +i eigenspace")
    cols = plus + [v.conjugate() for v in plus]
    if backend == EXACT:
        b = [[GaussQ.coerce(cols[c].components[r]) for c in range(2 * m)] for r in range(2 * m)]
        binv = _linalg.inverse(b, one=GaussQ(1), zero=GaussQ(0))
        return _linalg.as_object_array(b), _linalg.as_object_array(binv)
    b = np.array([np.asarray(v.components, dtype=complex) for v in cols]).T
    return b, np.linalg.inv(b)


def type_decomposition(a: AltForm, j: ComplexStructureMatrix) -> dict[tuple[int, int], AltForm]:
    """All ``(p, q)`` components of ``a`` with respect to ``j``."""
    if a.dim != j.dim:
        raise FormError("form and complex structure dimensions differ")
    backend = EXACT if (a.backend == EXACT and j.exact) else FLOAT
    a = a.to_backend(backend)
    m = a.dim // 2
    b, binv = _frame(j, backend)
    framed = pullback(a, b)
    buckets: dict[int, dict] = {}
    for key, val in framed.items():
        p = sum(1 for i in key if i < m)
        buckets.setdefault(p, {})[key] = val
    out = {}
    for p in range(a.degree + 1):
        part = AltForm._raw(a.degree, a.dim, buckets.get(p, {}), backend)
        out[(p, a.degree - p)] = pullback(part, binv)
    return out


def hodge_project(a: AltForm, j: ComplexStructureMatrix, p: int, q: int) -> AltForm:
    """The ``(p, q)`` component of ``a`` with respect to ``j``."""
    if p < 0 or q < 0 or p + q != a.degree:
        raise FormError(f"type ({p},{q}) does not match degree {a.degree}")
    return type_decomposition(a, j)[(p, q)]
