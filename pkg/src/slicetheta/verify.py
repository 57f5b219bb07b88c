"""Residual checks for the theta transformation laws and the heat equation.

Each ``verify_*`` function sums both sides of an identity independently and
returns a :class:`ResidualReport`.  A report passes when the residual is
within the requested tolerance plus the certified truncation bounds of both
sides.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .clifford import paravector_inverse
from .errors import DomainError
from .lattice import CosetRep, Lattice
from .slice_algebra import Characteristic, CPlaneValue, SlicePoint
from .theta import (
    Model,
    Normalization,
    ThetaParams,
    ThetaValue,
    discriminant_bounded,
    eta_tilde_bounded,
    shifted_theta,
    theta_H,
    theta_Hr,
    theta_tilde,
    theta_tilde_tilde,
)

__all__ = [
    "ResidualReport",
    "AutomorphyFactor",
    "automorphy_power",
    "inverted_point",
    "verify_theta_trafo_H",
    "verify_theta_trafo_Hr",
    "verify_conjugated_trafo",
    "verify_eta_trafo",
    "verify_discriminant_trafo",
    "heat_residual",
    "verify_heat",
    "select_normalization",
    "compare_Hr_exponents",
]

DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class ResidualReport:
    identity: str
    lhs: CPlaneValue
    rhs: CPlaneValue
    abs_residual: float
    rel_residual: float
    tail_budget: float
    passed: bool
    tolerance: float = DEFAULT_TOL
    x: SlicePoint | None = None
    w: Characteristic | None = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        identity: str,
        lhs: complex,
        rhs: complex,
        tail_budget: float,
        tolerance: float,
        x: SlicePoint | None = None,
        w: Characteristic | None = None,
        **extra,
    ) -> ResidualReport:
        res = abs(lhs - rhs)
        scale = max(abs(lhs), abs(rhs))
        rel = res / scale if scale > 0 else res
        return cls(
            identity,
            CPlaneValue.from_complex(lhs),
            CPlaneValue.from_complex(rhs),
            res,
            rel,
            tail_budget,
            bool(res <= tolerance + tail_budget),
            tolerance,
            x,
            w,
            extra,
        )

    def to_json(self) -> dict:
        out = {
            "identity": self.identity,
            "x": [self.x.x0, self.x.r] if self.x is not None else None,
            "omega": self.x.omega.components.tolist() if self.x is not None else None,
            "w": {"u": self.w.u.tolist(), "v": self.w.v.tolist()} if self.w is not None else None,
            "lhs": self.lhs.as_pair(),
            "rhs": self.rhs.as_pair(),
            "abs_residual": self.abs_residual,
            "rel_residual": self.rel_residual,
            "tail_budget": self.tail_budget,
            "passed": self.passed,
        }
        out.update(self.extra)
        return out


@dataclass(frozen=True)
class AutomorphyFactor:
    base: CPlaneValue
    exponent: float

    def value(self) -> CPlaneValue:
        b = complex(self.base)
        if b.real <= 0:
            raise DomainError(f"automorphy base {b} must have positive real part")
        return CPlaneValue.from_complex(cmath.exp(self.exponent * cmath.log(b)))


def automorphy_power(x: SlicePoint, exponent: float, model: Model = "H") -> CPlaneValue:
    """Principal power of ``x omega^-1 = r - x0 omega`` (H) or of ``x`` (Hr)."""
    if model == "H":
        base = complex(x.r, -x.x0)
    elif model == "Hr":
        base = x.z
    else:
        raise ValueError(f"unknown model {model!r}")
    return AutomorphyFactor(CPlaneValue.from_complex(base), exponent).value()


def inverted_point(x: SlicePoint, model: Model = "H") -> tuple[SlicePoint, bool]:
    """``-x^-1`` for H, ``x^-1`` for Hr, computed on paravectors.

    The second entry is true when the result lies on the opposite slice
    direction ``-omega`` (always the case for ``x^-1`` off the real axis).
    """
    inv = paravector_inverse(x.to_paravector())
    if model == "H":
        inv = -inv
    elif model != "Hr":
        raise ValueError(f"unknown model {model!r}")
    y = SlicePoint.from_paravector(inv, omega=x.omega)
    flipped = y.r > 0 and float(np.dot(y.omega.components, x.omega.components)) < 0
    return y, flipped


def _on_slice_of(x: SlicePoint, evaluate, y: SlicePoint, flipped: bool, w: Characteristic) -> ThetaValue:
    """Evaluate at ``y`` and express the value on the slice of ``x``.

    On ``-omega`` the characteristic reads ``(u, -v)`` and the slice-complex
    value is conjugated when mapped back.
    """
    if not flipped:
        return evaluate(y, w)
    t = evaluate(y, w.flipped())
    return ThetaValue(t.value.flipped(), t.tail_bound, t.terms_used, t.radius_sq)


def _dual_params(p: ThetaParams) -> ThetaParams:
    return p.with_lattice(p.lattice.dual())


def verify_theta_trafo_H(
    x: SlicePoint, w: Characteristic, p: ThetaParams, tol: float = DEFAULT_TOL
) -> ResidualReport:
    """``sum_q exp_*(pi <q+w,q+w> x omega) = (x omega^-1)^{-d/2} norm(L) Theta_{L#}(-x^-1, w)``."""
    d = p.lattice.dim
    lhs = shifted_theta(x, w, p, "H")
    y, flipped = inverted_point(x, "H")
    rhs_t = _on_slice_of(x, lambda pt, ch: theta_H(pt, ch, _dual_params(p)), y, flipped, w)
    factor = complex(automorphy_power(x, -d / 2, "H")) * p.norm
    rhs = factor * complex(rhs_t.value)
    budget = lhs.tail_bound + abs(factor) * rhs_t.tail_bound
    return ResidualReport.build("theta-H", complex(lhs.value), rhs, budget, tol, x, w)


def verify_theta_trafo_Hr(
    x: SlicePoint,
    w: Characteristic,
    p: ThetaParams,
    tol: float = DEFAULT_TOL,
    exponent_form: Literal["half_dim", "radial"] = "half_dim",
) -> ResidualReport:
    """``sum_q exp_*(-pi <q+w,q+w> x) = x^{-d/2} norm(L) Theta^r_{L#}(x^-1, w)``.

    ``exponent_form="radial"`` swaps the automorphy factor ``x^{-d/2}`` for
    ``(r omega)^{-d}`` so the two candidates can be compared.
    """
    d = p.lattice.dim
    lhs = shifted_theta(x, w, p, "Hr")
    y, flipped = inverted_point(x, "Hr")
    rhs_t = _on_slice_of(x, lambda pt, ch: theta_Hr(pt, ch, _dual_params(p)), y, flipped, w)
    if exponent_form == "half_dim":
        auto = complex(automorphy_power(x, -d / 2, "Hr"))
    elif exponent_form == "radial":
        if x.r == 0:
            raise DomainError("the (r omega)^{-d} factor needs r > 0")
        auto = complex(0.0, x.r) ** (-d)
    else:
        raise ValueError(f"unknown exponent form {exponent_form!r}")
    factor = auto * p.norm
    rhs = factor * complex(rhs_t.value)
    budget = lhs.tail_bound + abs(factor) * rhs_t.tail_bound
    return ResidualReport.build("theta-Hr", complex(lhs.value), rhs, budget, tol, x, w, exponent_form=exponent_form)


def compare_Hr_exponents(x: SlicePoint, w: Characteristic, p: ThetaParams) -> dict[str, float]:
    """Residual of the right half-space law under each candidate automorphy factor."""
    return {
        form: verify_theta_trafo_Hr(x, w, p, exponent_form=form).abs_residual
        for form in ("half_dim", "radial")
    }


def _require_unimodular(lattice: Lattice) -> None:
    if not lattice.is_unimodular():
        raise DomainError("this transformation law is stated for integral unimodular lattices")


def verify_conjugated_trafo(
    x: SlicePoint,
    qtilde: CosetRep,
    p: ThetaParams,
    which: Literal["first", "second"] = "first",
    tol: float = DEFAULT_TOL,
) -> ResidualReport:
    """First: ``theta~~(x) = (x omega^-1)^{-d/2} |det L| theta~(-x^-1)``.

    Second: ``theta~(x) = (x omega^-1)^{-d/2} |det L|^-1 theta~~(-x^-1)``.
    """
    _require_unimodular(p.lattice)
    d = p.lattice.dim
    det = abs(p.lattice.gram_det)
    y, _ = inverted_point(x, "H")
    auto = complex(automorphy_power(x, -d / 2, "H"))
    if which == "first":
        lhs, inner, factor = theta_tilde_tilde(x, qtilde, p), theta_tilde(y, qtilde, p), auto * det
    elif which == "second":
        lhs, inner, factor = theta_tilde(x, qtilde, p), theta_tilde_tilde(y, qtilde, p), auto / det
    else:
        raise ValueError(f"unknown relation {which!r}")
    budget = lhs.tail_bound + abs(factor) * inner.tail_bound
    return ResidualReport.build(
        f"conjugated-{which}",
        complex(lhs.value),
        factor * complex(inner.value),
        budget,
        tol,
        x,
        qtilde.as_characteristic(),
        qtilde=list(qtilde.bits),
    )


def _power_law(identity, bounded, x, qtilde, p, exponent, det_power, tol) -> ResidualReport:
    _require_unimodular(p.lattice)
    d = p.lattice.dim
    y, _ = inverted_point(x, "H")
    lhs, lhs_err = bounded(x, qtilde, p)
    inner, inner_err = bounded(y, qtilde, p)
    factor = complex(automorphy_power(x, exponent * d, "H")) * abs(p.lattice.gram_det) ** det_power
    budget = lhs_err + abs(factor) * inner_err
    return ResidualReport.build(
        identity,
        complex(lhs),
        factor * complex(inner),
        budget,
        tol,
        x,
        qtilde.as_characteristic(),
        qtilde=list(qtilde.bits),
    )


def verify_eta_trafo(x: SlicePoint, qtilde: CosetRep, p: ThetaParams, tol: float = DEFAULT_TOL) -> ResidualReport:
    """``eta~(x) = (x omega^-1)^{-3d/2} |det L| eta~(-x^-1)``."""
    return _power_law("eta", eta_tilde_bounded, x, qtilde, p, -1.5, 1, tol)


def verify_discriminant_trafo(
    x: SlicePoint, qtilde: CosetRep, p: ThetaParams, tol: float = DEFAULT_TOL
) -> ResidualReport:
    """``Delta(x) = (x omega^-1)^{-12 d} |det L|^4 Delta(-x^-1)``."""
    return _power_law("discriminant", discriminant_bounded, x, qtilde, p, -12.0, 4, tol)


# -- heat equation --------------------------------------------------------------


def _heat_terms(x: SlicePoint, w: Characteristic, p: ThetaParams, h: float) -> tuple[complex, complex, ThetaValue]:
    base = theta_H(x, w, p)
    fixed = p.fixed_radius(base.radius_sq)

    def at(pt: SlicePoint, ch: Characteristic) -> complex:
        return complex(theta_H(pt, ch, fixed).value)

    c0 = complex(base.value)
    lap = 0j
    for i in range(p.lattice.dim):
        e = np.zeros(p.lattice.dim)
        e[i] = h
        plus = Characteristic(w.u + e, w.v)
        minus = Characteristic(w.u - e, w.v)
        lap += (at(x, plus) - 2.0 * c0 + at(x, minus)) / (h * h)
    ds = (at(x.shifted(dx0=h), w) - at(x.shifted(dx0=-h), w)) / (2.0 * h)
    return lap, ds, base


def heat_residual(x: SlicePoint, w: Characteristic, p: ThetaParams, h: float = 1e-3) -> float:
    """``|Delta_w Theta - 4 pi omega d_s Theta|`` by central differences.

    The truncation ball is fixed at ``x`` so every stencil point sums the
    same lattice points.
    """
    if h <= 0:
        raise ValueError("step must be positive")
    lap, ds, _ = _heat_terms(x, w, p, h)
    return abs(lap - 4j * math.pi * ds)


def verify_heat(
    x: SlicePoint, w: Characteristic, p: ThetaParams, h: float = 1e-3, tol: float = 1e-6
) -> ResidualReport:
    """Heat equation as a report; the budget adds ``100 h^2`` for the stencils."""
    if h <= 0:
        raise ValueError("step must be positive")
    lap, ds, base = _heat_terms(x, w, p, h)
    rhs = 4j * math.pi * ds
    return ResidualReport.build("heat", lap, rhs, 100.0 * h * h + base.tail_bound, tol, x, w, fd_step=h)


# -- normalization ---------------------------------------------------------------

_REFERENCE_LATTICE = ((2.0, 0.0), (0.0, 1.0))


def select_normalization(
    lattice: Lattice | None = None, points: list[SlicePoint] | None = None
) -> tuple[Normalization, dict[str, float]]:
    """Pick the lattice factor that makes the H-model law hold.

    Runs the transformation law under each normalization on a lattice that
    is not unimodular (default ``diag(2, 1)``) and returns the mode with the
    smaller worst residual together with all residuals.
    """
    from .clifford import UnitVector

    lattice = lattice or Lattice(_REFERENCE_LATTICE)
    if points is None:
        omega = UnitVector.basis(1, max(lattice.dim - 1, 1))
        points = [SlicePoint(0.0, 1.0, omega), SlicePoint(0.4, 0.8, omega), SlicePoint(-0.7, 1.3, omega)]
    w = Characteristic.zero(lattice.dim)
    worst: dict[str, float] = {}
    for mode in ("gram_det", "sqrt_gram_det"):
        p = ThetaParams(lattice, normalization=mode)
        worst[mode] = max(verify_theta_trafo_H(x, w, p).abs_residual for x in points)
    best = min(worst, key=worst.get)
    return best, worst
