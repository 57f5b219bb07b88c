"""Slice monogenic theta series over real Clifford algebras.

Lattice sums ``sum_q exp_*(pi |q|^2 x omega)`` on the half-space models of
``R^(n+1)``, their conjugated and eta-type relatives, the quaternionic
monogenic theta function, and residual checks for their transformation laws.
"""
from .clifford import Multivector, Paravector, UnitVector, paravector_inverse
from .errors import ConvergenceError, DimensionError, DomainError
from .kernels import BACKEND
from .lattice import CosetRep, Lattice, LatticePoint, bilinear_form, parse_lattice
from .slice_algebra import (
    Characteristic,
    CPlaneValue,
    SliceFunction,
    SlicePoint,
    SliceValue,
    star_exp,
    star_product,
)
from .theta import (
    ThetaParams,
    ThetaValue,
    discriminant,
    eta_tilde,
    theta_general,
    theta_H,
    theta_Hr,
    theta_null,
    theta_tilde,
    theta_tilde_tilde,
    truncation_radius_for_tol,
)
from .verify import (
    ResidualReport,
    automorphy_power,
    heat_residual,
    select_normalization,
    verify_conjugated_trafo,
    verify_discriminant_trafo,
    verify_eta_trafo,
    verify_theta_trafo_H,
    verify_theta_trafo_Hr,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Characteristic",
    "ConvergenceError",
    "CosetRep",
    "CPlaneValue",
    "DimensionError",
    "DomainError",
    "Lattice",
    "LatticePoint",
    "Multivector",
    "Paravector",
    "ResidualReport",
    "SliceFunction",
    "SlicePoint",
    "SliceValue",
    "ThetaParams",
    "ThetaValue",
    "UnitVector",
    "automorphy_power",
    "bilinear_form",
    "discriminant",
    "eta_tilde",
    "heat_residual",
    "parse_lattice",
    "paravector_inverse",
    "select_normalization",
    "star_exp",
    "star_product",
    "theta_general",
    "theta_H",
    "theta_Hr",
    "theta_null",
    "theta_tilde",
    "theta_tilde_tilde",
    "truncation_radius_for_tol",
    "verify_conjugated_trafo",
    "verify_discriminant_trafo",
    "verify_eta_trafo",
    "verify_theta_trafo_H",
    "verify_theta_trafo_Hr",
]
