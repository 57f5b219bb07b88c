"""Slice functions, the star product and the star exponential.

A slice function is handled pointwise through its pair ``(alpha, beta)``:
on the plane ``C_omega`` it takes the value ``alpha + omega * beta``.  All
operations here act on those pairs, so a single evaluation never needs to
know which ``omega`` the caller has in mind.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .clifford import Multivector, Paravector, UnitVector, mul, norm
from .errors import ConvergenceError, DimensionError, DomainError

__all__ = [
    "CPlaneValue",
    "SlicePoint",
    "SliceValue",
    "SliceFunction",
    "Characteristic",
    "star_product",
    "star_power",
    "star_exp",
    "star_exp_cplane",
    "slice_cr_residual",
    "slice_derivative_fd",
]

DEFAULT_KMAX = 200
DEFAULT_FD_STEP = 1e-4


@dataclass(frozen=True)
class CPlaneValue:
    """``re + im * omega`` for the ambient ``omega``.

    Arithmetic is that of complex numbers since ``omega**2 = -1``.
    """

    re: float
    im: float

    @classmethod
    def from_complex(cls, z: complex) -> CPlaneValue:
        return cls(float(z.real), float(z.imag))

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def _other(self, other) -> complex | None:
        if isinstance(other, CPlaneValue):
            return complex(other)
        if isinstance(other, (int, float, np.floating, np.integer)):
            return complex(float(other), 0.0)
        return None

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is None else CPlaneValue.from_complex(complex(self) + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is None else CPlaneValue.from_complex(complex(self) - o)

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is None else CPlaneValue.from_complex(o - complex(self))

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is None else CPlaneValue.from_complex(complex(self) * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return NotImplemented if o is None else CPlaneValue.from_complex(complex(self) / o)

    def __pow__(self, k: int):
        return CPlaneValue.from_complex(complex(self) ** k)

    def __neg__(self):
        return CPlaneValue(-self.re, -self.im)

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)

    def flipped(self) -> CPlaneValue:
        """The same element written against ``-omega`` instead of ``omega``."""
        return CPlaneValue(self.re, -self.im)

    def embed(self, omega: UnitVector) -> Multivector:
        return Multivector.from_vector(self.re, self.im * omega.components)

    @classmethod
    def project(cls, m: Multivector, omega: UnitVector, tol: float | None = None) -> CPlaneValue:
        """Coordinates of ``m`` in the basis ``{1, omega}``.

        With ``tol`` set, raise if ``m`` has a component outside that span.
        """
        re = m.scalar_part
        im = float(np.dot(m.vector_part(), omega.components))
        if tol is not None:
            rest = m - cls(re, im).embed(omega)
            if norm(rest) > tol:
                raise ValueError(f"multivector is not in C_omega (off-plane norm {norm(rest):.3e})")
        return cls(re, im)

    def as_pair(self) -> list[float]:
        return [self.re, self.im]


@dataclass(frozen=True)
class SlicePoint:
    """``x = x0 + r * omega`` with ``r >= 0``."""

    x0: float
    r: float
    omega: UnitVector

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"radial part must be non-negative, got r={self.r}")
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "r", float(self.r))

    @classmethod
    def from_paravector(cls, p: Paravector, omega: UnitVector | None = None) -> SlicePoint:
        """Polar form of a paravector.

        For a real paravector the direction is not determined and must be
        passed as ``omega``.
        """
        r = float(np.linalg.norm(p.xv))
        if r == 0.0:
            if omega is None:
                raise DomainError("real point: an explicit omega is required")
            return cls(p.x0, 0.0, omega)
        return cls(p.x0, r, UnitVector.normalized(p.xv))

    @property
    def dim(self) -> int:
        return self.omega.dim

    @property
    def in_H(self) -> bool:
        return self.r > 0

    @property
    def in_Hr(self) -> bool:
        return self.x0 > 0

    @property
    def z(self) -> complex:
        """The point as a complex number on its own slice, ``omega -> i``."""
        return complex(self.x0, self.r)

    def to_paravector(self) -> Paravector:
        return Paravector(self.x0, self.r * self.omega.components)

    def to_multivector(self) -> Multivector:
        return self.to_paravector().to_multivector()

    def shifted(self, dx0: float = 0.0, dr: float = 0.0) -> SlicePoint:
        return SlicePoint(self.x0 + dx0, self.r + dr, self.omega)


@dataclass(frozen=True)
class Characteristic:
    """``w = sum_i e_i (u_i + v_i omega)`` in ``C_omega^(n+1)``.

    The components are relative to whatever ``omega`` the evaluation point
    carries.
    """

    u: np.ndarray
    v: np.ndarray = field(default=None)

    def __post_init__(self):
        u = np.array(self.u, dtype=np.float64).reshape(-1)
        v = np.zeros_like(u) if self.v is None else np.array(self.v, dtype=np.float64).reshape(-1)
        if u.shape != v.shape:
            raise DimensionError(f"u and v differ in length: {u.size} vs {v.size}")
        u.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @classmethod
    def zero(cls, dim: int) -> Characteristic:
        return cls(np.zeros(dim), np.zeros(dim))

    @property
    def dim(self) -> int:
        return self.u.size

    @property
    def w(self) -> np.ndarray:
        """Complex components with ``omega -> i``."""
        return self.u + 1j * self.v

    def flipped(self) -> Characteristic:
        """Same element of ``C_omega^(n+1)`` written against ``-omega``."""
        return Characteristic(self.u, -self.v)

    def shifted(self, l: Sequence[float]) -> Characteristic:
        return Characteristic(self.u + np.asarray(l, dtype=np.float64), self.v)

    def __eq__(self, other):
        if not isinstance(other, Characteristic):
            return NotImplemented
        return np.array_equal(self.u, other.u) and np.array_equal(self.v, other.v)

    def __hash__(self):
        return hash((self.u.tobytes(), self.v.tobytes()))


@dataclass(frozen=True)
class SliceValue:
    """``f(u + omega v) = alpha + omega * beta`` at one ``(u, v)``."""

    alpha: Multivector
    beta: Multivector

    def __post_init__(self):
        if self.alpha.dim != self.beta.dim:
            raise DimensionError("alpha and beta live in different algebras")

    @property
    def dim(self) -> int:
        return self.alpha.dim

    @classmethod
    def constant(cls, c: float, dim: int) -> SliceValue:
        return cls(Multivector.scalar(c, dim), Multivector.zero(dim))

    @classmethod
    def from_cplane(cls, z: CPlaneValue | complex, dim: int) -> SliceValue:
        z = complex(z)
        return cls(Multivector.scalar(z.real, dim), Multivector.scalar(z.imag, dim))

    def value(self, omega: UnitVector) -> Multivector:
        return self.alpha + mul(omega.to_multivector(), self.beta)

    def __add__(self, other: SliceValue) -> SliceValue:
        return SliceValue(self.alpha + other.alpha, self.beta + other.beta)

    def __sub__(self, other: SliceValue) -> SliceValue:
        return SliceValue(self.alpha - other.alpha, self.beta - other.beta)

    def __mul__(self, s: float) -> SliceValue:
        return SliceValue(self.alpha * s, self.beta * s)

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> SliceValue:
        return SliceValue(self.alpha / s, self.beta / s)

    def norm(self) -> float:
        return math.hypot(norm(self.alpha), norm(self.beta))


class SliceFunction:
    """A slice function given by its evaluator ``(u, v) -> SliceValue``."""

    def __init__(self, evaluator: Callable[[float, float], SliceValue], dim: int):
        self._eval = evaluator
        self.dim = dim

    def __call__(self, u: float, v: float) -> SliceValue:
        return self._eval(u, v)

    def __add__(self, other: SliceFunction) -> SliceFunction:
        return SliceFunction(lambda u, v: self(u, v) + other(u, v), self.dim)

    def __mul__(self, s: float) -> SliceFunction:
        return SliceFunction(lambda u, v: self(u, v) * s, self.dim)

    __rmul__ = __mul__

    @classmethod
    def constant(cls, alpha: Multivector, beta: Multivector | None = None) -> SliceFunction:
        beta = Multivector.zero(alpha.dim) if beta is None else beta
        value = SliceValue(alpha, beta)
        return cls(lambda u, v: value, alpha.dim)

    @classmethod
    def identity(cls, dim: int) -> SliceFunction:
        """``x -> x``, i.e. ``alpha = u``, ``beta = v``."""
        return cls(lambda u, v: SliceValue(Multivector.scalar(u, dim), Multivector.scalar(v, dim)), dim)

    @classmethod
    def linear(cls, a: Multivector, b: Multivector) -> SliceFunction:
        """``x -> x a + b`` (coefficients on the right)."""
        def evaluate(u, v):
            return SliceValue(a * u + b, a * v)
        return cls(evaluate, a.dim)

    @classmethod
    def from_complex(cls, fn: Callable[[complex], complex], dim: int) -> SliceFunction:
        """Intrinsic function obtained from a holomorphic ``fn``."""
        return cls(lambda u, v: SliceValue.from_cplane(fn(complex(u, v)), dim), dim)


def star_product(f: SliceValue, g: SliceValue) -> SliceValue:
    """``(alpha gamma - beta delta) + omega (beta gamma + alpha delta)``."""
    if f.dim != g.dim:
        raise DimensionError(f"dimension mismatch: {f.dim} vs {g.dim}")
    a, b, c, d = f.alpha, f.beta, g.alpha, g.beta
    return SliceValue(mul(a, c) - mul(b, d), mul(b, c) + mul(a, d))


def star_power(f: SliceFunction, k: int) -> SliceFunction:
    if k < 0:
        raise ValueError("star power needs k >= 0")

    def evaluate(u, v):
        base = f(u, v)
        acc = SliceValue.constant(1.0, f.dim)
        for _ in range(k):
            acc = star_product(acc, base)
        return acc

    return SliceFunction(evaluate, f.dim)


def star_exp(
    f: SliceFunction,
    at: tuple[float, float],
    tol: float = 1e-15,
    kmax: int = DEFAULT_KMAX,
) -> tuple[SliceValue, float]:
    """Truncated series ``sum_k f^{*k} / k!`` at one point.

    Returns the partial sum and an estimate of the omitted tail (twice the
    last term norm).  Summation stops at the first term whose norm is below
    ``tol`` once consecutive terms shrink at least by half, which makes the
    estimate a bound for the remaining geometric tail.
    """
    if tol <= 0 or kmax < 1:
        raise ValueError("need tol > 0 and kmax >= 1")
    base = f(*at)
    term = SliceValue.constant(1.0, f.dim)
    total = term
    prev = term.norm()
    for k in range(1, kmax + 1):
        term = star_product(term, base) / k
        total = total + term
        t = term.norm()
        if t < tol and (t == 0.0 or t <= 0.5 * prev):
            return total, 2.0 * t
        prev = t
    raise ConvergenceError(f"star exponential did not reach tol={tol:g} within {kmax} terms (last term {prev:.3e})")


def star_exp_cplane(z: CPlaneValue | complex) -> CPlaneValue:
    """``exp_*`` when every coefficient lies in ``C_omega``: the complex exponential."""
    return CPlaneValue.from_complex(cmath.exp(complex(z)))


def slice_cr_residual(f: SliceFunction, at: tuple[float, float], h: float = DEFAULT_FD_STEP) -> float:
    """Largest Cauchy-Riemann defect of ``(alpha, beta)`` by central differences."""
    if h <= 0:
        raise ValueError("step must be positive")
    u, v = at
    fu_p, fu_m = f(u + h, v), f(u - h, v)
    fv_p, fv_m = f(u, v + h), f(u, v - h)
    da_du = (fu_p.alpha - fu_m.alpha) / (2 * h)
    db_du = (fu_p.beta - fu_m.beta) / (2 * h)
    da_dv = (fv_p.alpha - fv_m.alpha) / (2 * h)
    db_dv = (fv_p.beta - fv_m.beta) / (2 * h)
    return max(norm(da_du - db_dv), norm(db_du + da_dv))


def slice_derivative_fd(f: SliceFunction, at: tuple[float, float], h: float = DEFAULT_FD_STEP) -> SliceValue:
    """Slice derivative as the central difference in ``u``.

    Only meaningful for slice monogenic ``f``; check with
    :func:`slice_cr_residual` first.
    """
    if h <= 0:
        raise ValueError("step must be positive")
    u, v = at
    return (f(u + h, v) - f(u - h, v)) / (2 * h)
