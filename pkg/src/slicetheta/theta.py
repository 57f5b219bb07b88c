"""Slice monogenic theta series and the functions built from them.

Every summand ``exp_*((pi |q|^2 x + 2 pi <q, w>) omega)`` has its
coefficients in the slice plane of ``x``, so each series is evaluated as a
complex exponential sum with ``omega -> i`` and returned as a
:class:`CPlaneValue`.  Truncation is by a lattice ball whose radius is chosen
from a certified bound on the omitted terms.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np
from scipy import integrate

from . import kernels
from .errors import ConvergenceError, DomainError
from .lattice import CosetRep, Lattice
from .slice_algebra import (
    Characteristic,
    CPlaneValue,
    SlicePoint,
    SliceFunction,
    SliceValue,
    star_exp,
    star_product,
)

__all__ = [
    "ThetaParams",
    "ThetaValue",
    "Normalization",
    "normalization_factor",
    "tail_bound",
    "truncation_radius_for_tol",
    "theta_H",
    "theta_Hr",
    "theta_null",
    "theta_tilde",
    "theta_tilde_tilde",
    "theta_general",
    "shifted_theta",
    "eta_tilde",
    "eta_tilde_bounded",
    "discriminant",
    "discriminant_bounded",
    "chi",
    "summand_slice_value",
]

Normalization = Literal["gram_det", "sqrt_gram_det"]
Model = Literal["H", "Hr"]

MAX_POINTS = 3_000_000


def normalization_factor(lattice: Lattice, mode: Normalization) -> float:
    """Lattice factor in front of the dual theta series.

    ``"gram_det"`` is ``|det Gram(L)|`` read literally; ``"sqrt_gram_det"`` is
    the Poisson summation factor ``1/vol(L) = gram_det(L)^(-1/2)``.  Both are
    1 on unimodular lattices.
    """
    if mode == "gram_det":
        return abs(lattice.gram_det)
    if mode == "sqrt_gram_det":
        return 1.0 / math.sqrt(lattice.gram_det)
    raise ValueError(f"unknown normalization {mode!r}")


@dataclass(frozen=True)
class ThetaParams:
    """Lattice plus truncation policy.

    With ``truncation_radius_sq=None`` the radius is chosen per evaluation
    so that the certified tail bound is below ``tail_tol``.
    """

    lattice: Lattice
    truncation_radius_sq: float | None = None
    tail_tol: float = 1e-12
    normalization: Normalization = "sqrt_gram_det"

    def __post_init__(self):
        if self.tail_tol <= 0:
            raise ValueError("tail_tol must be positive")
        if self.truncation_radius_sq is not None and self.truncation_radius_sq < 0:
            raise ValueError("truncation_radius_sq must be non-negative")
        normalization_factor(self.lattice, self.normalization)

    def with_lattice(self, lattice: Lattice) -> ThetaParams:
        return replace(self, lattice=lattice)

    def fixed_radius(self, radius_sq: float | None) -> ThetaParams:
        return replace(self, truncation_radius_sq=radius_sq)

    @property
    def norm(self) -> float:
        return normalization_factor(self.lattice, self.normalization)


@dataclass(frozen=True)
class ThetaValue:
    value: CPlaneValue
    tail_bound: float
    terms_used: int
    radius_sq: float = 0.0

    def __complex__(self) -> complex:
        return complex(self.value)


# -- tail control -------------------------------------------------------------


def tail_bound(lattice: Lattice, decay_c: float, radius_sq: float, drift: float = 0.0, log_scale: float = 0.0) -> float:
    """Bound for ``sum_{q in L, |q|^2 > R^2} exp(log_scale - c|q|^2 + drift|q|)``.

    With ``g(t) = exp(log_scale - c t^2 + drift t)`` decreasing on
    ``[R, inf)`` and ``N(t)`` the number of points in the ball of radius
    ``t``, summation by parts gives ``tail <= int_R^inf N(t) (-g'(t)) dt``,
    and ``N`` is replaced by :meth:`Lattice.count_upper_bound`.
    Returns ``inf`` when ``g`` is not yet decreasing at ``R``.
    """
    if decay_c <= 0:
        raise DomainError(f"decay constant must be positive, got {decay_c}")
    R = math.sqrt(radius_sq)
    slope = 2.0 * decay_c * R - drift
    if slope < 0:
        return math.inf
    log_g = log_scale - decay_c * R * R + drift * R

    def integrand(s: float) -> float:
        t = R + s
        return lattice.count_upper_bound(t) * (2.0 * decay_c * t - drift) * math.exp(-slope * s - decay_c * s * s)

    split = 10.0 / (slope + math.sqrt(decay_c))
    head, e1 = integrate.quad(integrand, 0.0, split, limit=200)
    rest, e2 = integrate.quad(integrand, split, math.inf, limit=200)
    total = (head + rest + e1 + e2) * (1.0 + 1e-9)
    if total == 0.0:
        return 0.0
    log_total = log_g + math.log(total)
    return math.exp(log_total) if log_total > -745.0 else 0.0


def truncation_radius_for_tol(
    decay_c: float,
    tol: float,
    lattice: Lattice,
    drift: float = 0.0,
    log_scale: float = 0.0,
    max_points: int = MAX_POINTS,
) -> float:
    """Smallest integer ``R^2 >= 1`` whose :func:`tail_bound` is below ``tol``."""
    if decay_c <= 0:
        raise DomainError(f"decay constant must be positive, got {decay_c}")
    if tol <= 0:
        raise ValueError("tol must be positive")

    def ok(r2: int) -> bool:
        return tail_bound(lattice, decay_c, r2, drift, log_scale) < tol

    def too_big(r2: int) -> bool:
        return lattice.count_upper_bound(math.sqrt(r2)) > max_points

    lo = max(1, math.ceil((drift / (2.0 * decay_c)) ** 2))
    if ok(lo):
        return float(lo)
    hi = lo
    while not ok(hi):
        lo = hi
        hi *= 2
        if too_big(hi) and not ok(hi):
            raise ConvergenceError(
                f"tail bound {tol:g} needs a ball beyond {max_points} points (decay {decay_c:.3g})"
            )
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return float(hi)


def _sum(
    lattice: Lattice,
    a: complex,
    params: ThetaParams,
    shift=None,
    lin=None,
    weights=None,
) -> ThetaValue:
    """``sum_q weight(q) exp(a |q + shift|^2 + lin . q)`` with ``|weight| <= 1``."""
    d = lattice.dim
    shift = np.zeros(d, dtype=np.complex128) if shift is None else np.asarray(shift, dtype=np.complex128)
    lin = np.zeros(d, dtype=np.complex128) if lin is None else np.asarray(lin, dtype=np.complex128)
    c = -a.real
    if c <= 0:
        raise DomainError("series does not converge at this point")
    drift = float(np.linalg.norm((2.0 * a * shift + lin).real))
    log_scale = float((a * np.sum(shift * shift)).real)
    if params.truncation_radius_sq is None:
        r2 = truncation_radius_for_tol(c, params.tail_tol, lattice, drift, log_scale)
    else:
        r2 = params.truncation_radius_sq
    ps = lattice.point_set(r2)
    w = None if weights is None else weights(ps)
    value = kernels.exp_sum(ps.coords, a, shift, lin, w)
    bound = tail_bound(lattice, c, r2, drift, log_scale)
    return ThetaValue(CPlaneValue.from_complex(value), bound, len(ps), r2)


def _check_dims(x: SlicePoint, lattice: Lattice, w: Characteristic | None = None) -> None:
    if w is not None and w.dim != lattice.dim:
        raise ValueError(f"characteristic has {w.dim} components, lattice dimension is {lattice.dim}")


def _require_H(x: SlicePoint) -> None:
    if not x.in_H:
        raise DomainError(f"point must lie off the real axis (r > 0), got r={x.r}")


def _require_Hr(x: SlicePoint) -> None:
    if not x.in_Hr:
        raise DomainError(f"point must lie in the right half-space (x0 > 0), got x0={x.x0}")


# -- theta series ---------------------------------------------------------------


def theta_H(x: SlicePoint, w: Characteristic, p: ThetaParams) -> ThetaValue:
    """``sum_q exp_*((pi |q|^2 x + 2 pi <q, w>) omega)`` on the half-space model H."""
    _require_H(x)
    _check_dims(x, p.lattice, w)
    return _sum(p.lattice, 1j * math.pi * x.z, p, lin=2j * math.pi * w.w)


def theta_Hr(x: SlicePoint, w: Characteristic, p: ThetaParams) -> ThetaValue:
    """``sum_q exp_*(-pi |q|^2 x + 2 pi <q, w> omega)`` on the right half-space."""
    _require_Hr(x)
    _check_dims(x, p.lattice, w)
    return _sum(p.lattice, -math.pi * x.z, p, lin=2j * math.pi * w.w)


def theta_null(x: SlicePoint, p: ThetaParams, model: Model = "H") -> ThetaValue:
    w = Characteristic.zero(p.lattice.dim)
    if model == "H":
        return theta_H(x, w, p)
    if model == "Hr":
        return theta_Hr(x, w, p)
    raise ValueError(f"unknown model {model!r}")


def shifted_theta(x: SlicePoint, shift: Characteristic, p: ThetaParams, model: Model = "H") -> ThetaValue:
    """``sum_q exp_*(pi <q+w, q+w> x omega)`` (H) or ``exp_*(-pi <q+w, q+w> x)`` (Hr).

    The shift enters the quadratic form itself, which is how the
    transformation laws are stated.
    """
    _check_dims(x, p.lattice, shift)
    if model == "H":
        _require_H(x)
        a = 1j * math.pi * x.z
    elif model == "Hr":
        _require_Hr(x)
        a = -math.pi * x.z
    else:
        raise ValueError(f"unknown model {model!r}")
    return _sum(p.lattice, a, p, shift=shift.w)


def _warn_unless_unimodular(lattice: Lattice) -> None:
    if not lattice.is_unimodular():
        warnings.warn("conjugated theta functions assume an integral unimodular lattice", stacklevel=3)


def theta_tilde(x: SlicePoint, qtilde: CosetRep, p: ThetaParams) -> ThetaValue:
    """First conjugated theta function: the phase ``exp(2 pi <q, qtilde> omega)`` taken literally."""
    _warn_unless_unimodular(p.lattice)
    return theta_H(x, Characteristic(qtilde.coords), p)


def theta_tilde_tilde(x: SlicePoint, qtilde: CosetRep, p: ThetaParams) -> ThetaValue:
    """Second conjugated theta function ``sum_q exp_*(pi |q + qtilde|^2 x omega)``."""
    _warn_unless_unimodular(p.lattice)
    return shifted_theta(x, Characteristic(qtilde.coords), p)


def chi(norm_sq) -> np.ndarray:
    """``(-1)^{|q|^2}`` for integer norms."""
    n = np.rint(np.asarray(norm_sq)).astype(np.int64)
    return np.where(n % 2 == 0, 1.0, -1.0)


def theta_general(
    x: SlicePoint,
    w: Characteristic,
    p: ThetaParams,
    variant: Literal["tilde", "tilde_tilde"],
) -> ThetaValue:
    """Character-twisted series over ``L`` or the series over ``L/2`` minus ``L``."""
    _require_H(x)
    _check_dims(x, p.lattice, w)
    a = 1j * math.pi * x.z
    lin = 2j * math.pi * w.w
    if variant == "tilde":
        if not p.lattice.is_integral_norms():
            raise DomainError("the character (-1)^{|q|^2} needs integer norms")
        return _sum(p.lattice, a, p, lin=lin, weights=lambda ps: chi(ps.norm_sq))
    if variant == "tilde_tilde":
        half = p.lattice.scaled(0.5)
        # q in L/2 lies in L exactly when all its coefficients are even
        return _sum(half, a, p, lin=lin, weights=lambda ps: np.any(ps.coeffs % 2, axis=1).astype(np.float64))
    raise ValueError(f"unknown variant {variant!r}")


# -- eta and discriminant ----------------------------------------------------------


def _product_bound(values: list[complex], bounds: list[float]) -> float:
    hi = math.prod(abs(v) + b for v, b in zip(values, bounds))
    return max(hi - math.prod(abs(v) for v in values), 0.0)


def eta_tilde_bounded(x: SlicePoint, qtilde: CosetRep, p: ThetaParams) -> tuple[CPlaneValue, float]:
    """``theta * theta_tilde * theta_tilde_tilde`` and a bound on its truncation error."""
    _require_H(x)
    parts = [theta_null(x, p), theta_tilde(x, qtilde, p), theta_tilde_tilde(x, qtilde, p)]
    values = [complex(t.value) for t in parts]
    return CPlaneValue.from_complex(math.prod(values)), _product_bound(values, [t.tail_bound for t in parts])


def eta_tilde(x: SlicePoint, qtilde: CosetRep, p: ThetaParams) -> CPlaneValue:
    return eta_tilde_bounded(x, qtilde, p)[0]


def discriminant_bounded(x: SlicePoint, qtilde: CosetRep, p: ThetaParams) -> tuple[CPlaneValue, float]:
    eta, err = eta_tilde_bounded(x, qtilde, p)
    e = complex(eta)
    return CPlaneValue.from_complex(e**8), max((abs(e) + err) ** 8 - abs(e) ** 8, 0.0)


def discriminant(x: SlicePoint, qtilde: CosetRep, p: ThetaParams) -> CPlaneValue:
    """Eighth star power of the slice eta function."""
    return discriminant_bounded(x, qtilde, p)[0]


# -- generic cross-check ------------------------------------------------------------------


def summand_slice_value(x: SlicePoint, q, w: Characteristic, model: Model = "H") -> SliceValue:
    """One summand through the generic star-exponential series.

    The exponent ``(pi |q|^2 x + 2 pi <q, w>) omega`` (or its right
    half-space counterpart) is written as a slice function with
    multivector pair and expanded with :func:`star_exp`; no complex
    arithmetic is involved.
    """
    from .clifford import Multivector

    q = np.asarray(q, dtype=np.float64)
    nsq = float(q @ q)
    qu, qv = float(q @ w.u), float(q @ w.v)
    dim = x.dim
    if model == "H":
        # (pi nsq (u + v omega) + 2 pi (qu + qv omega)) omega
        alpha = -math.pi * nsq * x.r - 2 * math.pi * qv
        beta = math.pi * nsq * x.x0 + 2 * math.pi * qu
    elif model == "Hr":
        alpha = -math.pi * nsq * x.x0 - 2 * math.pi * qv
        beta = -math.pi * nsq * x.r + 2 * math.pi * qu
    else:
        raise ValueError(f"unknown model {model!r}")
    # scaling and squaring: the raw series cancels badly once |exponent| >~ 10
    s = max(0, math.ceil(math.log2(math.hypot(alpha, beta) + 1e-300)))
    scale = 2.0**-s
    f = SliceFunction.constant(Multivector.scalar(alpha * scale, dim), Multivector.scalar(beta * scale, dim))
    value, _ = star_exp(f, (x.x0, x.r), tol=1e-17, kmax=400)
    for _ in range(s):
        value = star_product(value, value)
    return value
