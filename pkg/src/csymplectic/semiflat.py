"""Semi-flat holomorphic Lagrangian torus fibrations and their twistor family.

The total space is ``B x C^n / (Z^n + tau Z^n)`` with ``B`` the polydisc
``|z_j| < base_radius``.  Real coordinates are ordered as in
:mod:`csymplectic.exterior` with complex coordinates ``(z_0..z_{n-1},
w_0..w_{n-1})``, so base coordinates occupy real indices ``0..2n-1`` and the
projection ``pi`` keeps the leading ``2n`` coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
import sympy as sp

from .errors import DomainError, FormError, ModelError
from .exterior import (
    AltForm,
    TangentVector,
    check_pointwise_csymplectic,
    contract,
    d_dx,
    d_dz,
    dz,
    kernel,
    recover_complex_structure,
    standard_complex_structure,
    type_decomposition,
    vectors_rank,
    wedge,
)
from .fields import FormField, fubini_study_form, polynomial_form
from .reports import CheckReport
from .scalars import EXACT, FLOAT, GaussQ, parse_rational, to_backend

ETA_KINDS = ("fubini_study", "polynomial", "zero")

INVARIANT_SAMPLES = 20


@dataclass(frozen=True)
class EtaSpec:
    kind: str = "zero"
    terms: tuple = ()

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "polynomial":
            out["coeffs"] = [dict(t) for t in self.terms]
        return out

    @classmethod
    def from_json(cls, data) -> "EtaSpec":
        if isinstance(data, str):
            return cls(data)
        kind = data.get("kind")
        if kind not in ETA_KINDS:
            raise ModelError(f"unknown eta kind {kind!r}")
        return cls(kind, tuple(data.get("coeffs", ())))


@dataclass(frozen=True, eq=False)
class SemiFlatModel:
    n: int
    base_radius: float
    tau: np.ndarray
    eta: FormField
    omega: FormField
    eta_spec: EtaSpec = field(default_factory=EtaSpec)

    @property
    def dim(self) -> int:
        return 4 * self.n

    @property
    def base_dim(self) -> int:
        return 2 * self.n

    @property
    def pi_eta(self) -> FormField:
        return self.eta.embed(self.dim)

    def family_field(self, t) -> FormField:
        """Symbolic ``Omega + t pi^* eta``."""
        return self.omega + self.pi_eta.scale(sp.sympify(complex(t)) if not isinstance(t, GaussQ)
                                              else sp.Rational(str(t.re)) + sp.I * sp.Rational(str(t.im)))

    def base_point(self, x) -> list:
        return list(x[: self.base_dim])

    def in_domain(self, x) -> bool:
        if len(x) != self.dim:
            return False
        r2 = float(self.base_radius) ** 2
        for j in range(self.n):
            xr, yi = _num(x[2 * j]), _num(x[2 * j + 1])
            if xr * xr + yi * yi >= r2:
                return False
        return True

    def require_domain(self, x):
        if not self.in_domain(x):
            raise DomainError(f"point {list(x)} lies outside the chart domain")

    def to_json(self) -> dict:
        return {"n": self.n, "base_radius": float(self.base_radius),
                "tau": [[float(v.real), float(v.imag)] for v in np.ravel(self.tau)],
                "eta": self.eta_spec.to_json()}


def _num(v) -> float:
    return float(parse_rational(v)) if isinstance(v, str) else float(v)


def omega_standard(n: int) -> FormField:
    """``sum_j dz_j ^ dw_j`` on ``C^{2n}``."""
    dim = 4 * n
    out = FormField.zero(2, dim)
    for j in range(n):
        out = out + FormField.dz(j, dim).wedge(FormField.dz(n + j, dim))
    return out


def _parse_tau(tau, n: int) -> np.ndarray:
    arr = np.asarray(tau)
    if arr.dtype != complex and arr.ndim >= 1 and arr.shape[-1] == 2 and arr.size == 2 * n * n:
        arr = arr.reshape(n * n, 2)
        arr = (arr[:, 0] + 1j * arr[:, 1]).reshape(n, n)
    arr = np.asarray(arr, dtype=complex).reshape(n, n)
    return arr


def eta_from_spec(n: int, spec: EtaSpec) -> FormField:
    if spec.kind == "zero":
        return FormField.zero(2, 2 * n)
    if spec.kind == "fubini_study":
        return fubini_study_form(n)
    if spec.kind == "polynomial":
        form = polynomial_form(n, spec.terms)
        if form.degree != 2:
            raise ModelError("polynomial eta must be a 2-form")
        return form
    raise ModelError(f"unknown eta kind {spec.kind!r}")


def sample_points(model: SemiFlatModel, rng: np.random.Generator, count: int,
                  radius_fraction: float = 0.8) -> np.ndarray:
    """Seeded points: ``z`` uniform in the shrunken polydisc, ``w`` in the fundamental domain."""
    n = model.n
    pts = np.zeros((count, model.dim))
    r = radius_fraction * model.base_radius
    for j in range(n):
        rad = r * np.sqrt(rng.uniform(0.0, 1.0, count))
        ang = rng.uniform(0.0, 2 * np.pi, count)
        pts[:, 2 * j] = rad * np.cos(ang)
        pts[:, 2 * j + 1] = rad * np.sin(ang)
    a = rng.uniform(0.0, 1.0, (count, n))
    b = rng.uniform(0.0, 1.0, (count, n))
    w = a + b @ model.tau.T
    for j in range(n):
        pts[:, 2 * (n + j)] = w[:, j].real
        pts[:, 2 * (n + j) + 1] = w[:, j].imag
    return pts


def build_model(n: int, base_radius: float = 1.0, tau=None, eta_spec="zero",
                seed: int = 0) -> SemiFlatModel:
    """Validated semi-flat model.

    Rejects a non-positive radius, ``Im(tau)`` not positive definite, and
    ``eta`` that is not closed or has a nonzero (0,2)-part.
    """
    if n < 1:
        raise ModelError("n must be at least 1")
    if not base_radius > 0:
        raise ModelError("base_radius must be positive")
    tau = np.eye(n) * 1j if tau is None else _parse_tau(tau, n)
    im = tau.imag
    if not np.allclose(im, im.T) or np.min(np.linalg.eigvalsh((im + im.T) / 2)) <= 0:
        raise ModelError("Im(tau) must be symmetric positive definite")
    spec = eta_spec if isinstance(eta_spec, EtaSpec) else EtaSpec.from_json(eta_spec)
    eta = eta_from_spec(n, spec)
    if eta.dim != 2 * n:
        raise ModelError("eta must live on the base")
    if not eta.d().is_zero():
        raise ModelError("eta is not closed")
    model = SemiFlatModel(n, float(base_radius), tau, eta, omega_standard(n), spec)
    rng = np.random.default_rng(seed)
    jb = standard_complex_structure(n)
    for x in sample_points(model, rng, INVARIANT_SAMPLES):
        ev = eta.evaluate(x[: 2 * n])
        if eta.terms and ev.degree == 2:
            part = type_decomposition(ev, jb)[(0, 2)]
            if part.norm() > 1e-10 * max(1.0, ev.norm()):
                raise ModelError("eta has a nonzero (0,2)-component")
        om = model.omega.evaluate(x)
        fib = [d_dx(2 * n + k, 4 * n) for k in range(2 * n)]
        if any(abs(om.evaluate(u, v)) > 0 for u in fib for v in fib):
            raise ModelError("omega does not vanish on fibres")
    return model


def model_from_json(data: Mapping, seed: int = 0) -> SemiFlatModel:
    allowed = {"n", "base_radius", "tau", "eta"}
    extra = set(data) - allowed
    if extra:
        raise ModelError(f"unknown model key(s): {sorted(extra)}")
    n = int(data["n"])
    return build_model(n, float(data.get("base_radius", 1.0)), data.get("tau"),
                       data.get("eta", "zero"), seed=seed)


def _infer_backend(t, x) -> str:
    exact_t = isinstance(t, (GaussQ, Fraction, int)) or isinstance(t, str)
    exact_x = all(isinstance(v, (Fraction, int, str)) and not isinstance(v, bool) for v in x)
    return EXACT if exact_t and exact_x else FLOAT


def eval_family_form(model: SemiFlatModel, t, x, backend: str | None = None) -> AltForm:
    """``Omega_t(x) = Omega + t (pi^* eta)(x)`` on ``R^{4n}``."""
    model.require_domain(x)
    backend = backend or _infer_backend(t, x)
    om = model.omega.evaluate(x, backend)
    if not model.eta.terms:
        return om
    pe = model.eta.evaluate(model.base_point(x), backend)
    pe = AltForm(2, model.dim, dict(pe.items()), backend)
    tt = to_backend(parse_rational(t) if isinstance(t, str) else t, backend)
    return om + pe.scale(tt)


def pulled_back(model: SemiFlatModel, alpha: FormField, x, backend: str = FLOAT) -> AltForm:
    val = alpha.evaluate(model.base_point(x), backend)
    return AltForm(val.degree, model.dim, dict(val.items()), backend)


def _tol_zero(form: AltForm, tol: float) -> tuple[bool, float]:
    if form.backend == EXACT:
        return form.is_zero(), form.norm()
    return form.norm() <= tol, form.norm()


def vanishing_lemma_check(model: SemiFlatModel, k: int, alpha: FormField, x,
                          backend: str | None = None, tol: float = 1e-12) -> CheckReport:
    """``Omega^k ^ pi^* alpha = 0`` whenever ``p + k > n`` for ``alpha`` of type (p, q)."""
    model.require_domain(x)
    backend = backend or _infer_backend(0, x)
    base_val = alpha.evaluate(model.base_point(x), backend)
    jb = standard_complex_structure(model.n, EXACT if backend == EXACT else FLOAT)
    parts = {pq: f for pq, f in type_decomposition(base_val, jb).items()
             if not f.is_zero(1e-13 * max(1.0, base_val.norm()))}
    if len(parts) > 1:
        raise FormError(f"alpha is not of pure type: components {sorted(parts)}")
    p, q = next(iter(parts)) if parts else (alpha.degree, 0)
    if p + q > 2 * model.n:
        raise FormError("p + q exceeds the base dimension")
    om = model.omega.evaluate(x, backend)
    pa = AltForm(alpha.degree, model.dim, dict(base_val.items()), backend)
    prod = wedge(om.power(k), pa)
    forced = p + k > model.n
    scale = max(1.0, om.norm()) ** k * max(1.0, pa.norm())
    zero, measured = _tol_zero(prod, tol * scale)
    return CheckReport("vanishing_lemma", "Eq. (2.1) Omega^k ^ pi*alpha = 0",
                       zero if forced else True, measured, tol * scale,
                       {"p": p, "q": q, "k": k, "forced": forced, "form": prod.to_json()})


def volume_invariance_check(model: SemiFlatModel, t, x, backend: str | None = None,
                            tol: float = 1e-10) -> CheckReport:
    """Relative deviation of ``Omega_t^n ^ conj(Omega_t)^n`` from the ``t = 0`` value."""
    backend = backend or _infer_backend(t, x)
    n = model.n
    ot = eval_family_form(model, t, x, backend)
    o0 = eval_family_form(model, 0, x, backend)
    pt, p0 = ot.power(n), o0.power(n)
    vt = wedge(pt, pt.conjugate()).top_coefficient()
    v0 = wedge(p0, p0.conjugate()).top_coefficient()
    if backend == EXACT:
        dev = vt - v0
        ok = dev == 0
        measured = abs(complex(dev)) / abs(complex(v0)) if v0 != 0 else float("inf")
    else:
        measured = abs(vt - v0) / abs(v0)
        ok = measured <= tol
    return CheckReport("volume_invariance", "Sec 2.2 proof Omega_t^n ^ conj(Omega_t)^n = Omega^n ^ conj(Omega)^n",
                       bool(ok), float(measured), tol, {"volume_t": complex(vt), "volume_0": complex(v0)})


@dataclass(frozen=True)
class DarbouxFrame:
    """Frame at a point with ``Omega = sum e*_j ^ f*_j``.

    ``e`` spans the (1,0) fibre directions, ``f`` is the Omega-dual horizontal
    family; ``a`` and ``b`` are the coefficients of ``(pi^* eta)(x)`` in
    ``sum a_jk f*_j ^ f*_k + b_jk f*_j ^ conj(f*_k)`` with ``a`` antisymmetric.
    """

    e: tuple
    f: tuple
    e_dual: tuple
    f_dual: tuple
    a: np.ndarray
    b: np.ndarray
    backend: str = FLOAT

    def reconstruct(self) -> AltForm:
        n = len(self.e)
        dim = self.e[0].dim
        out = AltForm.zero(2, dim, self.backend)
        for j in range(n):
            for k in range(n):
                out = out + wedge(self.f_dual[j], self.f_dual[k]).scale(self.a[j, k])
                out = out + wedge(self.f_dual[j], self.f_dual[k].conjugate()).scale(self.b[j, k])
        return out


def darboux_frame(model: SemiFlatModel, x, backend: str | None = None) -> DarbouxFrame:
    """``e_j = d/dw_j``, ``f_j = -d/dz_j`` and the extracted ``a``, ``b`` matrices."""
    model.require_domain(x)
    backend = backend or _infer_backend(0, x)
    n, dim = model.n, model.dim
    e = tuple(d_dz(n + j, dim, backend) for j in range(n))
    f = tuple(-d_dz(j, dim, backend) for j in range(n))
    e_dual = tuple(dz(n + j, dim, backend) for j in range(n))
    f_dual = tuple(-dz(j, dim, backend) for j in range(n))
    eta_x = pulled_back(model, model.eta, x, backend) if model.eta.terms else AltForm.zero(2, dim, backend)
    dtype = object if backend == EXACT else complex
    a = np.zeros((n, n), dtype=dtype)
    b = np.zeros((n, n), dtype=dtype)
    half = to_backend(Fraction(1, 2), backend)
    for j in range(n):
        for k in range(n):
            a[j, k] = eta_x.evaluate(f[j], f[k]) * half
            b[j, k] = eta_x.evaluate(f[j], f[k].conjugate())
    return DarbouxFrame(e, f, e_dual, f_dual, a, b, backend)


def predicted_kernel(frame: DarbouxFrame, t) -> list[TangentVector]:
    """``conj(e_j)`` and ``conj(f_j) + t sum_l b_lj e_l``."""
    n = len(frame.e)
    tt = to_backend(t, frame.backend)
    out = [v.conjugate() for v in frame.e]
    for j in range(n):
        v = frame.f[j].conjugate()
        for l in range(n):
            v = v + frame.e[l] * (tt * frame.b[l, j])
        out.append(v)
    return out


def _orthonormal(vectors) -> np.ndarray:
    m = np.array([np.asarray(v.components, dtype=complex) for v in vectors]).T
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    r = int(np.sum(s > 1e-10 * (s[0] if s.size else 0)))
    return u[:, :r]


def subspace_distance(a, b) -> float:
    """Symmetric containment residual between the spans of two vector lists."""
    qa, qb = _orthonormal(a), _orthonormal(b)
    if qa.shape[1] != qb.shape[1]:
        return float("inf")
    ra = qa - qb @ (qb.conj().T @ qa)
    rb = qb - qa @ (qa.conj().T @ qb)
    return float(max(np.max(np.abs(ra)), np.max(np.abs(rb))))


def kernel_formula_check(model: SemiFlatModel, t, x, backend: str | None = None,
                         tol: float = 1e-10) -> CheckReport:
    """Predicted kernel vectors annihilate ``Omega_t(x)`` and span its kernel."""
    backend = backend or _infer_backend(t, x)
    om = eval_family_form(model, t, x, backend)
    frame = darboux_frame(model, x, backend)
    pred = predicted_kernel(frame, t if backend == FLOAT else to_backend(t, EXACT))
    computed = kernel(om)
    contractions = [contract(v, om) for v in pred]
    if backend == EXACT:
        annihilate = all(c.is_zero() for c in contractions)
        both = vectors_rank(pred + computed)
        span_ok = vectors_rank(pred) == 2 * model.n == len(computed) == both
        measured = 0.0 if annihilate and span_ok else 1.0
        ok = annihilate and span_ok
    else:
        scale = max(1.0, om.norm())
        contr = max(c.norm() / (scale * np.max(np.abs(v.components))) for c, v in zip(contractions, pred))
        span = subspace_distance(pred, computed) if len(computed) == 2 * model.n else float("inf")
        measured = max(contr, span)
        ok = measured <= tol
    return CheckReport("kernel_formula", "Sec 2.2 proof (2) kernel is spanned by the vectors",
                       bool(ok), float(measured), tol, {"rank": len(computed)})


def holomorphy_check(model: SemiFlatModel, t, x, backend: str | None = None,
                     tol: float = 1e-10) -> CheckReport:
    """``d pi o I_t = J_S o d pi``, ``I_t^2 = -1`` and ``Omega_t`` vanishing on the fibre."""
    backend = backend or _infer_backend(t, x)
    n, dim = model.n, model.dim
    om = eval_family_form(model, t, x, backend)
    it = recover_complex_structure(om, n)
    js = standard_complex_structure(n, EXACT if it.exact else FLOAT).matrix
    dpi_it = it.matrix[: 2 * n, :]
    proj = np.zeros((2 * n, dim), dtype=object if it.exact else float)
    if it.exact:
        proj[:] = Fraction(0)
    for k in range(2 * n):
        proj[k, k] = 1
    comm = dpi_it - js @ proj
    frame = darboux_frame(model, x, backend)
    fib = [om.evaluate(u, v) for u in frame.e for v in frame.e]
    fib_real = [om.evaluate(d_dx(2 * n + a, dim, backend), d_dx(2 * n + b, dim, backend))
                for a in range(2 * n) for b in range(2 * n)]
    comm_res = float(max(abs(float(v)) for v in np.ravel(comm)))
    sq_res = it.square_residual()
    fib_res = float(max(abs(complex(v)) for v in fib + fib_real))
    measured = max(comm_res, sq_res, fib_res)
    ok = measured == 0 if backend == EXACT else measured <= tol
    return CheckReport("holomorphy", "Sec 2.2 Thm (2) holomorphic Lagrangian fibration from (X,I_t)",
                       bool(ok), measured, tol,
                       {"commutator": comm_res, "square": sq_res, "fibre_restriction": fib_res})


def csymplectic_check(model: SemiFlatModel, t, x, backend: str | None = None,
                      power_tol: float = 1e-12, volume_tol: float = 1e-10) -> CheckReport:
    om = eval_family_form(model, t, x, backend)
    rep = check_pointwise_csymplectic(om, model.n, power_tol, volume_tol)
    return CheckReport("csymplectic", "Def 2.1 C-symplectic conditions", rep.verdict,
                       rep.max_residual, power_tol,
                       {"power_vanishes": rep.power_vanishes, "volume_nonzero": rep.volume_nonzero,
                        "kernel_rank": rep.kernel_rank,
                        "kernel_conjugate_complementary": rep.kernel_conjugate_complementary})


def closedness_check(model: SemiFlatModel) -> CheckReport:
    """``d Omega_t = 0`` for every ``t``: both summands are closed symbolically."""
    ok = model.omega.d().is_zero() and model.pi_eta.d().is_zero()
    return CheckReport("closedness", "Def 2.1 (1) d Omega_t = 0", ok, 0.0 if ok else 1.0, 0.0)


def rational_sample_points(model: SemiFlatModel, rng: np.random.Generator, count: int,
                           denominator: int = 16, radius_fraction: float = 0.8) -> list:
    """Seeded points with rational coordinates inside the shrunken polydisc."""
    out = []
    r = radius_fraction * model.base_radius
    while len(out) < count:
        raw = rng.integers(-denominator, denominator + 1, model.dim)
        pt = [Fraction(int(v), denominator) * Fraction(r).limit_denominator(1000) for v in raw]
        if model.in_domain(pt):
            out.append(pt)
    return out
