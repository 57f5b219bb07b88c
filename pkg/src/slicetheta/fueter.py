"""Quaternionic Cauchy-Fueter machinery and the monogenic theta function.

Quaternions are written ``w + x i + y j + z k``.  Every function of a
single quaternion used here (powers, ``Exp``, slice theta values) takes
values in the slice plane of its argument, which keeps products commutative
where the formulas rely on it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Literal

import numpy as np

from .clifford import Multivector, Paravector, UnitVector
from .errors import ConvergenceError, DomainError
from .lattice import Lattice
from .slice_algebra import Characteristic, CPlaneValue, SlicePoint
from .theta import ThetaParams, tail_bound, theta_Hr, truncation_radius_for_tol
from .verify import ResidualReport

__all__ = [
    "Quaternion",
    "QPolynomial",
    "t_coefficient",
    "f_poly",
    "q_poly",
    "q_poly_via_f",
    "cf_exp",
    "cf_exp_series",
    "cf_exp_closed",
    "t_coefficient_pochhammer",
    "theta_monogenic",
    "theta_monogenic_bounded",
    "slice_theta_q",
    "laplacian_fd",
    "gradient_fd",
    "dirac_fd",
    "FueterMapReport",
    "check_fueter_map",
    "isolate_term_factor",
    "product_rule_residual",
    "inversion_chain_residual",
    "verify_monogenic_functional_eq",
]

QFunc = Callable[["Quaternion"], "Quaternion"]


@dataclass(frozen=True)
class Quaternion:
    w: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        for name in ("w", "x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def from_array(cls, a) -> Quaternion:
        w, x, y, z = (float(t) for t in a)
        return cls(w, x, y, z)

    @classmethod
    def unit(cls, mu: int) -> Quaternion:
        """``1, i, j, k`` for ``mu = 0..3``."""
        a = [0.0] * 4
        a[mu] = 1.0
        return cls(*a)

    @classmethod
    def from_paravector(cls, p: Paravector) -> Quaternion:
        if p.dim != 3:
            raise ValueError("quaternions correspond to paravectors of R_3")
        return cls(p.x0, *p.xv)

    def to_paravector(self) -> Paravector:
        return Paravector(self.w, [self.x, self.y, self.z])

    @classmethod
    def from_multivector(cls, m: Multivector) -> Quaternion:
        """``i, j, k`` are ``e1, e2, e12`` of ``R_2``."""
        if m.dim != 2:
            raise ValueError("quaternions are the even-and-odd algebra R_2")
        return cls.from_array(m.coeffs)

    def to_multivector(self) -> Multivector:
        return Multivector(2, self.array)

    @property
    def array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def __add__(self, o):
        if isinstance(o, Quaternion):
            return Quaternion(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
        return Quaternion(self.w + o, self.x, self.y, self.z)

    __radd__ = __add__

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, Quaternion):
            a1, b1, c1, d1 = self.w, self.x, self.y, self.z
            a2, b2, c2, d2 = o.w, o.x, o.y, o.z
            return Quaternion(
                a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
                a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
                a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
                a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
            )
        return Quaternion(self.w * o, self.x * o, self.y * o, self.z * o)

    def __rmul__(self, s):
        return self * s

    def __truediv__(self, o):
        if isinstance(o, Quaternion):
            return self * o.inverse()
        return Quaternion(self.w / o, self.x / o, self.y / o, self.z / o)

    def __pow__(self, k: int) -> Quaternion:
        if k < 0:
            return self.inverse() ** (-k)
        out, base = Quaternion(1.0), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> Quaternion:
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm_sq(self) -> float:
        return self.w**2 + self.x**2 + self.y**2 + self.z**2

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def inverse(self) -> Quaternion:
        n = self.norm_sq()
        if n == 0:
            raise ZeroDivisionError("zero quaternion has no inverse")
        return self.conj() / n

    def allclose(self, o: Quaternion, atol: float = 1e-12) -> bool:
        return (self - o).norm() <= atol

    def slice_point(self) -> SlicePoint:
        """Polar form ``w + r omega``; a real quaternion gets ``omega = i``."""
        r = float(np.linalg.norm(self.vector))
        omega = UnitVector.normalized(self.vector) if r > 0 else UnitVector.basis(1, 3)
        return SlicePoint(self.w, r, omega)

    @classmethod
    def on_slice(cls, alpha: float, beta: float, omega: UnitVector) -> Quaternion:
        return cls(alpha, *(beta * omega.components))


# -- special polynomials ----------------------------------------------------------


def t_coefficient(k: int, j: int) -> Fraction:
    """``T^k_j = 2(k-j+1)/((k+1)(k+2))``."""
    if not 0 <= j <= k:
        raise ValueError(f"need 0 <= j <= k, got k={k}, j={j}")
    return Fraction(2 * (k - j + 1), (k + 1) * (k + 2))


def _pochhammer(a: int, n: int) -> int:
    return math.prod(range(a, a + n))


def t_coefficient_pochhammer(k: int, j: int) -> Fraction:
    """``k!/(3)_k * (2)_{k-j} (1)_j / ((k-j)! j!)``, the long form of ``T^k_j``."""
    return Fraction(math.factorial(k), _pochhammer(3, k)) * Fraction(
        _pochhammer(2, k - j) * _pochhammer(1, j), math.factorial(k - j) * math.factorial(j)
    )


@dataclass(frozen=True)
class QPolynomial:
    k: int
    coefficients: tuple[Fraction, ...]

    @classmethod
    def of_degree(cls, k: int) -> QPolynomial:
        return _qpoly(k)

    def __call__(self, x: Quaternion) -> Quaternion:
        xb = x.conj()
        out = Quaternion(0.0)
        left = [Quaternion(1.0)]
        for _ in range(self.k):
            left.append(left[-1] * x)
        right = Quaternion(1.0)
        for j, t in enumerate(self.coefficients):
            out = out + float(t) * (left[self.k - j] * right)
            right = right * xb
        return out


@lru_cache(maxsize=None)
def _qpoly(k: int) -> QPolynomial:
    if k < 0:
        raise ValueError("degree must be non-negative")
    return QPolynomial(k, tuple(t_coefficient(k, j) for j in range(k + 1)))


def f_poly(k: int, x: Quaternion) -> Quaternion:
    """``f_k(x) = Delta(x^k) = -4 sum_{j=1}^{k-1} (k-j) x^{k-j-1} xbar^{j-1}``."""
    if k < 2:
        raise ValueError("f_k is defined for k >= 2")
    xb = x.conj()
    out = Quaternion(0.0)
    for j in range(1, k):
        out = out + (k - j) * (x ** (k - j - 1) * xb ** (j - 1))
    return -4 * out


def q_poly(k: int, x: Quaternion) -> Quaternion:
    """``Q_k(x) = sum_j T^k_j x^{k-j} xbar^j``."""
    return _qpoly(k)(x)


def q_poly_via_f(k: int, x: Quaternion, normalization: Literal["consistent", "unhalved"] = "consistent") -> Quaternion:
    """``Q_k`` from ``f_{k+2}``.

    ``"consistent"`` divides by ``2(k+1)(k+2)``, which agrees with
    :func:`q_poly`; ``"unhalved"`` divides by ``(k+1)(k+2)`` and is twice as
    large (already ``Q_0 = 2`` instead of 1).
    """
    denom = (k + 1) * (k + 2)
    if normalization == "consistent":
        denom *= 2
    elif normalization != "unhalved":
        raise ValueError(f"unknown normalization {normalization!r}")
    return -f_poly(k + 2, x) / denom


# -- the regular exponential -----------------------------------------------------------


def cf_exp_series(x: Quaternion, tol: float = 1e-15, kmax: int = 200) -> tuple[Quaternion, float]:
    """Partial sum of ``sum_k Q_k(x)/k!`` and a bound on the remainder.

    ``|Q_k(x)| <= |x|^k`` because the ``T^k_j`` are positive with sum 1, so
    the remainder after ``K`` terms is below
    ``|x|^(K+1)/(K+1)! / (1 - |x|/(K+2))``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = x.norm()
    total = Quaternion(0.0)
    fact = 1.0
    for k in range(kmax + 1):
        if k:
            fact *= k
        total = total + q_poly(k, x) / fact
        ratio = a / (k + 2)
        if ratio < 1:
            rest = a ** (k + 1) / (fact * (k + 1)) / (1 - ratio)
            if rest < tol:
                return total, rest
    raise ConvergenceError(f"Exp series did not reach tol={tol:g} within {kmax} terms")


def cf_exp(x: Quaternion, tol: float = 1e-15, kmax: int = 200) -> Quaternion:
    return cf_exp_series(x, tol, kmax)[0]


def cf_exp_closed(x: Quaternion) -> Quaternion:
    """``Exp(x0 + r omega) = e^{x0} (sin r / r + omega (sin r - r cos r)/r^2)``.

    Summing the series in closed form avoids its cancellation for large
    arguments; the tests compare both.
    """
    v = x.vector
    r = float(np.linalg.norm(v))
    if r < 1e-3:
        r2 = r * r
        s0 = 1 - r2 / 6 + r2 * r2 / 120
        s1 = 1 / 3 - r2 / 30 + r2 * r2 / 840
    else:
        s0 = math.sin(r) / r
        s1 = (math.sin(r) - r * math.cos(r)) / r**3
    e = math.exp(x.w)
    return Quaternion(e * s0, *(e * s1 * v))


# bound on |Exp(x)| / e^{x0}: sqrt(1 + max_r ((sin r - r cos r)/r^2)^2) < 1.1
_EXP_ENVELOPE = 1.1


def _shells(lattice: Lattice, radius_sq: float) -> tuple[np.ndarray, np.ndarray]:
    ps = lattice.point_set(radius_sq)
    norms, counts = np.unique(np.round(ps.norm_sq, 9), return_counts=True)
    return norms, counts


def theta_monogenic_bounded(
    x: Quaternion,
    lattice: Lattice,
    tail_tol: float = 1e-12,
    radius_sq: float | None = None,
    weight: Literal["plain", "laplacian"] = "plain",
) -> tuple[Quaternion, float]:
    """``sum_q c_q Exp(-pi |q|^2 x)`` with ``c_q = 1`` or ``c_q = -2 pi^2 |q|^4``.

    ``weight="laplacian"`` gives the series obtained by applying the
    Laplacian term by term to the slice theta series.
    """
    if x.w <= 0:
        raise DomainError(f"need x0 > 0, got {x.w}")
    c = math.pi * x.w
    if weight == "plain":
        decay, scale = c, _EXP_ENVELOPE
    elif weight == "laplacian":
        # t^4 e^{-c t^2} <= (4/(c e))^2 e^{-c t^2 / 2}
        decay, scale = c / 2, _EXP_ENVELOPE * 2 * math.pi**2 * (4 / (c * math.e)) ** 2
    else:
        raise ValueError(f"unknown weight {weight!r}")
    if radius_sq is None:
        radius_sq = truncation_radius_for_tol(decay, tail_tol / scale, lattice)
    norms, counts = _shells(lattice, radius_sq)
    total = Quaternion(0.0)
    for n, m in zip(norms, counts):
        term = cf_exp_closed(x * (-math.pi * n))
        if weight == "laplacian":
            term = term * (-2 * math.pi**2 * n * n)
        total = total + term * int(m)
    return total, scale * tail_bound(lattice, decay, radius_sq)


def theta_monogenic(x: Quaternion, lattice: Lattice, tail_tol: float = 1e-12, radius_sq: float | None = None) -> Quaternion:
    """``sum_{q in L} Exp(-pi |q|^2 x)`` on the right half-space."""
    return theta_monogenic_bounded(x, lattice, tail_tol, radius_sq)[0]


def slice_theta_q(x: Quaternion, p: ThetaParams) -> Quaternion:
    """The slice theta-null series ``sum_q exp_*(-pi |q|^2 x)`` as a quaternion."""
    pt = x.slice_point()
    v = theta_Hr(pt, Characteristic.zero(p.lattice.dim), p).value
    return Quaternion.on_slice(v.re, v.im, pt.omega)


# -- finite differences ---------------------------------------------------------------------


def _step(x: Quaternion, mu: int, h: float) -> Quaternion:
    return x + Quaternion.unit(mu) * h


def laplacian_fd(f: QFunc, x: Quaternion, h: float = 1e-2) -> Quaternion:
    if h <= 0:
        raise ValueError("step must be positive")
    f0 = f(x)
    out = Quaternion(0.0)
    for mu in range(4):
        out = out + (f(_step(x, mu, h)) - 2 * f0 + f(_step(x, mu, -h)))
    return out / (h * h)


def gradient_fd(f: QFunc, x: Quaternion, h: float = 1e-3) -> list[Quaternion]:
    """``[d f / d x_mu]`` for ``mu = 0..3``, central differences."""
    if h <= 0:
        raise ValueError("step must be positive")
    return [(f(_step(x, mu, h)) - f(_step(x, mu, -h))) / (2 * h) for mu in range(4)]


def dirac_fd(f: QFunc, x: Quaternion, h: float = 1e-3, side: Literal["left", "right"] = "left") -> Quaternion:
    """Cauchy-Fueter operator ``sum_mu e_mu d_mu f`` (or ``d_mu f e_mu``)."""
    out = Quaternion(0.0)
    for mu, g in enumerate(gradient_fd(f, x, h)):
        e = Quaternion.unit(mu)
        out = out + (e * g if side == "left" else g * e)
    return out


# -- Fueter map checks ---------------------------------------------------------------------


@dataclass(frozen=True)
class FueterMapReport:
    x: Quaternion
    fd_laplacian: Quaternion
    candidates: dict[str, Quaternion]
    residuals: dict[str, float]
    fd_step: float

    @property
    def best(self) -> str:
        return min(self.residuals, key=self.residuals.get)

    def to_json(self) -> dict:
        return {
            "identity": "fueter-map",
            "x": self.x.array.tolist(),
            "fd_laplacian": self.fd_laplacian.array.tolist(),
            "candidates": {k: v.array.tolist() for k, v in self.candidates.items()},
            "residuals": dict(self.residuals),
            "best": self.best,
            "fd_step": self.fd_step,
        }


def check_fueter_map(lattice: Lattice, x: Quaternion, h: float = 1e-2, tail_tol: float = 1e-12) -> FueterMapReport:
    """Laplacian of the slice theta series against three right-hand sides.

    ``plain``: ``sum Exp(-pi|q|^2 x)``; ``pi2``: with the factor
    ``-pi^2 |q|^4``; ``two_pi2``: with ``-2 pi^2 |q|^4``.  All residuals are
    returned; none is selected silently.
    """
    if x.w <= 0:
        raise DomainError(f"need x0 > 0, got {x.w}")
    base = theta_Hr(x.slice_point(), Characteristic.zero(lattice.dim), ThetaParams(lattice, tail_tol=tail_tol))
    p = ThetaParams(lattice, truncation_radius_sq=base.radius_sq)
    lap = laplacian_fd(lambda y: slice_theta_q(y, p), x, h)
    plain = theta_monogenic(x, lattice, radius_sq=base.radius_sq)
    two_pi2 = theta_monogenic_bounded(x, lattice, radius_sq=base.radius_sq, weight="laplacian")[0]
    candidates = {"plain": plain, "pi2": two_pi2 / 2, "two_pi2": two_pi2}
    residuals = {k: (lap - v).norm() for k, v in candidates.items()}
    return FueterMapReport(x, lap, candidates, residuals, h)


def isolate_term_factor(norm_sq: float, x: Quaternion, h: float = 1e-3) -> float:
    """``kappa`` with ``Delta exp(-pi n x) = kappa pi^2 n^2 Exp(-pi n x)`` for one shell ``n``.

    The ratio of the two quaternions is real up to finite-difference error;
    its real part is returned.
    """
    if norm_sq <= 0:
        raise ValueError("need a nonzero lattice vector")

    def single(y: Quaternion) -> Quaternion:
        pt = y.slice_point()
        z = complex(-math.pi * norm_sq * pt.x0, -math.pi * norm_sq * pt.r)
        e = np.exp(z)
        return Quaternion.on_slice(e.real, e.imag, pt.omega)

    lap = laplacian_fd(single, x, h)
    ratio = lap * cf_exp_closed(x * (-math.pi * norm_sq)).inverse()
    return ratio.w / (math.pi**2 * norm_sq**2)


def product_rule_residual(f: QFunc, g: QFunc, x: Quaternion, h: float = 1e-2) -> float:
    """``|Delta(fg) - f Delta g - (Delta f) g - 2 sum_{A,B} <grad f_A, grad g_B> e_A e_B|``."""
    lhs = laplacian_fd(lambda y: f(y) * g(y), x, h)
    gf, gg = gradient_fd(f, x, h), gradient_fd(g, x, h)
    cross = Quaternion(0.0)
    for a in range(4):
        for b in range(4):
            ea, eb = Quaternion.unit(a), Quaternion.unit(b)
            dot = sum(gf[mu].array[a] * gg[mu].array[b] for mu in range(4))
            cross = cross + (ea * eb) * dot
    rhs = f(x) * laplacian_fd(g, x, h) + laplacian_fd(f, x, h) * g(x) + 2 * cross
    return (lhs - rhs).norm()


def _chain_rhs(lap_f_inv: Quaternion, grad_f_inv: list[Quaternion], x: Quaternion, form: str) -> Quaternion:
    if form == "weighted":
        inner = -4 * x.w * grad_f_inv[0]
        for i in range(1, 4):
            inner = inner + 4 * x.array[i] * grad_f_inv[i]
    elif form == "unweighted":
        inner = -4 * grad_f_inv[0]
        for i in range(1, 4):
            inner = inner + 4 * grad_f_inv[i]
    else:
        raise ValueError(f"unknown form {form!r}")
    return (lap_f_inv + inner) / x.norm_sq() ** 2


def inversion_chain_residual(
    f: QFunc, x: Quaternion, h: float = 1e-2, form: Literal["weighted", "unweighted"] = "weighted"
) -> float:
    """Residual of ``Delta[f(x^-1)] = |x|^-4 ((Delta f)(x^-1) - 4 x0 d0 f(x^-1) + 4 sum x_i d_i f(x^-1))``.

    ``form="unweighted"`` drops the ``x0``, ``x_i`` factors in front of the
    partial derivatives, for comparison.
    """
    y = x.inverse()
    lhs = laplacian_fd(lambda t: f(t.inverse()), x, h)
    rhs = _chain_rhs(laplacian_fd(f, y, h), gradient_fd(f, y, h), x, form)
    return (lhs - rhs).norm()


def verify_monogenic_functional_eq(
    x: Quaternion,
    lattice: Lattice,
    h: float = 1e-2,
    tail_tol: float = 1e-12,
    lhs_form: Literal["laplacian", "plain"] = "laplacian",
    tol: float = 1e-2,
) -> ResidualReport:
    """Laplacian of ``theta_L(x) = x^{-2} theta_{L#}(x^-1)`` on both sides.

    Left: the monogenic series (``lhs_form="laplacian"`` is the term-wise
    Laplacian, ``"plain"`` the unweighted ``sum Exp``).  Right: product rule
    with ``f = x^{-2}``, ``g = theta_{L#}(x^-1)``; ``Delta g`` is expanded
    through the inversion chain rule with the monogenic series of the dual
    lattice at ``x^-1``.  Derivatives are central differences.
    """
    if not lattice.is_unimodular():
        raise DomainError("the functional equation is checked on unimodular lattices")
    if x.w <= 0:
        raise DomainError(f"need x0 > 0, got {x.w}")
    dual = lattice.dual()
    weight = "laplacian" if lhs_form == "laplacian" else "plain"
    lhs, lhs_tail = theta_monogenic_bounded(x, lattice, tail_tol, weight=weight)

    y = x.inverse()
    base = theta_Hr(y.slice_point(), Characteristic.zero(dual.dim), ThetaParams(dual, tail_tol=tail_tol))
    pd = ThetaParams(dual, truncation_radius_sq=max(base.radius_sq, 1.0))

    def theta_dual(t: Quaternion) -> Quaternion:
        return slice_theta_q(t, pd)

    def f(t: Quaternion) -> Quaternion:
        return t ** (-2)

    def g(t: Quaternion) -> Quaternion:
        return theta_dual(t.inverse())

    mono_inv, _ = theta_monogenic_bounded(y, dual, tail_tol, weight=weight)
    lap_g = _chain_rhs(mono_inv, gradient_fd(theta_dual, y, h), x, "weighted")
    gf, gg = gradient_fd(f, x, h), gradient_fd(g, x, h)
    cross = Quaternion(0.0)
    for mu in range(4):
        cross = cross + gf[mu] * gg[mu]
    rhs = f(x) * lap_g + laplacian_fd(f, x, h) * g(x) + 2 * cross
    omega = x.slice_point().omega.components
    res = (lhs - rhs).norm()
    budget = lhs_tail
    return ResidualReport(
        "monogenic-functional",
        CPlaneValue(lhs.w, float(lhs.vector @ omega)),
        CPlaneValue(rhs.w, float(rhs.vector @ omega)),
        res,
        res / max(lhs.norm(), rhs.norm(), 1e-300),
        budget,
        bool(res <= tol + budget),
        tol,
        extra={"lhs_q": lhs.array.tolist(), "rhs_q": rhs.array.tolist(), "fd_step": h, "lhs_form": lhs_form},
    )
