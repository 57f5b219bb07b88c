import math
import warnings

import numpy as np
import pytest

from conftest import random_omega
from oracles import (
    ETA_AT_I,
    THETA3_AT_I,
    THETA_Z2_AT_I,
    box_scan,
    classical_theta_Zd,
    complex_lattice_sum,
    eta,
    real_theta,
    theta2,
    theta3,
    theta4,
)
from slicetheta.clifford import UnitVector
from slicetheta.errors import ConvergenceError, DomainError
from slicetheta.lattice import Lattice
from slicetheta.slice_algebra import Characteristic, SlicePoint, SliceFunction, SliceValue, slice_cr_residual
from slicetheta.theta import (
    ThetaParams,
    chi,
    discriminant,
    discriminant_bounded,
    eta_tilde,
    eta_tilde_bounded,
    shifted_theta,
    summand_slice_value,
    tail_bound,
    theta_general,
    theta_H,
    theta_Hr,
    theta_null,
    theta_tilde,
    theta_tilde_tilde,
    truncation_radius_for_tol,
)

OM1 = UnitVector.basis(1, 1)


def pt(x0, r, omega=OM1):
    return SlicePoint(x0, r, omega)


def c(v):
    return complex(v.value) if hasattr(v, "value") else complex(v)


def random_char(rng, d, scale=0.3):
    return Characteristic(rng.uniform(-1, 1, d), rng.uniform(-scale, scale, d))


# -- examples -----------------------------------------------------------------


def test_zero_ball_gives_one(p_Z2):
    p = p_Z2.fixed_radius(0)
    for x in (pt(0.3, 0.2), pt(-4.0, 3.0)):
        v = theta_H(x, Characteristic.zero(2), p)
        assert c(v) == 1 and v.terms_used == 1


def test_Z2_matches_classical_sum_at_i(p_Z2):
    v = c(theta_H(pt(0.0, 1.0), Characteristic.zero(2), p_Z2))
    assert v == pytest.approx(THETA_Z2_AT_I, abs=1e-10)
    assert v == pytest.approx(complex_lattice_sum(np.eye(2), 1j), abs=1e-10)


def test_Z1_reduces_to_theta3(p_Z1):
    assert c(theta_null(pt(0.0, 1.0), p_Z1)) == pytest.approx(THETA3_AT_I, abs=1e-14)
    for z in (2j, 0.3 + 0.7j, -1.2 + 0.4j):
        got = c(theta_null(pt(z.real, z.imag), p_Z1))
        assert got == pytest.approx(theta3(z), abs=1e-10)


def test_theta_null_delegates(p_Z2, rng):
    x = pt(0.4, 0.8)
    assert c(theta_null(x, p_Z2)) == c(theta_H(x, Characteristic.zero(2), p_Z2))
    assert c(theta_null(x, p_Z2, "Hr")) == c(theta_Hr(x, Characteristic.zero(2), p_Z2))
    with pytest.raises(ValueError):
        theta_null(x, p_Z2, "upper")


def test_large_r_is_one_within_bound(p_Z2):
    v = theta_null(pt(0.0, 50.0), p_Z2)
    assert abs(c(v) - 1) < 1e-30
    assert v.tail_bound < 1e-30


def test_Hr_real_point_matches_scalar_sum(p_Z1):
    assert c(theta_Hr(pt(1.0, 0.0), Characteristic.zero(1), p_Z1)) == pytest.approx(real_theta(1.0), abs=1e-15)


def test_domain_errors(p_Z2):
    with pytest.raises(DomainError):
        theta_H(pt(1.0, 0.0), Characteristic.zero(2), p_Z2)
    with pytest.raises(DomainError):
        theta_Hr(pt(0.0, 1.0), Characteristic.zero(2), p_Z2)
    with pytest.raises(DomainError):
        theta_Hr(pt(-1.0, 1.0), Characteristic.zero(2), p_Z2)
    with pytest.raises(ValueError):
        theta_H(pt(0.0, 1.0), Characteristic.zero(3), p_Z2)
    with pytest.raises(ValueError):
        ThetaParams(Lattice.integer(1), tail_tol=0)


# -- periodicity ----------------------------------------------------------------


@pytest.mark.parametrize("lattice", [Lattice.integer(2), Lattice.checkerboard(4)], ids=["Z2", "D4"])
def test_x0_two_periodic(lattice, rng):
    p = ThetaParams(lattice)
    for _ in range(5):
        x = pt(rng.uniform(-1, 1), rng.uniform(0.5, 1.5))
        w = random_char(rng, lattice.dim)
        a = c(theta_H(x, w, p))
        b = c(theta_H(x.shifted(dx0=2.0), w, p))
        assert abs(a - b) < 1e-12


def test_Hr_radially_two_periodic(p_Z2, rng):
    for _ in range(5):
        x = pt(rng.uniform(0.5, 1.5), rng.uniform(0, 1))
        w = random_char(rng, 2)
        assert abs(c(theta_Hr(x, w, p_Z2)) - c(theta_Hr(x.shifted(dr=2.0), w, p_Z2))) < 1e-12


def test_periodic_in_w(rng):
    for lattice in (Lattice.integer(2), Lattice([[1.0, 1.0], [0.0, 1.0]]), Lattice.checkerboard(4)):
        p = ThetaParams(lattice)
        for _ in range(3):
            m = rng.integers(-2, 3, lattice.dim)
            l = m @ lattice.generators
            w = random_char(rng, lattice.dim)
            xH = pt(rng.uniform(-1, 1), rng.uniform(0.6, 1.5))
            xR = pt(rng.uniform(0.6, 1.5), rng.uniform(0, 1))
            assert abs(c(theta_H(xH, w, p)) - c(theta_H(xH, w.shifted(l), p))) < 1e-10
            assert abs(c(theta_Hr(xR, w, p)) - c(theta_Hr(xR, w.shifted(l), p))) < 1e-12


# -- conjugated families ---------------------------------------------------------


def test_conjugated_with_zero_rep_equal_theta_null(p_Z2):
    zero = p_Z2.lattice.half_coset_reps()[0]
    x = pt(0.2, 0.9)
    assert c(theta_tilde(x, zero, p_Z2)) == c(theta_null(x, p_Z2))
    assert c(theta_tilde_tilde(x, zero, p_Z2)) == c(theta_null(x, p_Z2))


def test_all_halves_phase_is_chi(p_Z2):
    rep = p_Z2.lattice.coset_rep([1, 1])
    ps = p_Z2.lattice.point_set(25)
    phase = np.exp(2j * math.pi * ps.coords @ rep.coords)
    assert np.allclose(phase, chi(ps.norm_sq), atol=1e-12)


def test_chi_values():
    assert chi([1.0, 2.0, 0.0, 3.0]).tolist() == [-1.0, 1.0, 1.0, -1.0]


def test_theta_tilde_signed_classical(p_Z2):
    rep = p_Z2.lattice.coset_rep([1, 1])
    got = c(theta_tilde(pt(0.0, 1.0), rep, p_Z2))
    assert got == pytest.approx(classical_theta_Zd(1j, 2, signed=True), abs=1e-12)


def test_theta_tilde_tilde_Z1(p_Z1):
    rep = p_Z1.lattice.coset_rep([1])
    v = theta_tilde_tilde(pt(0.0, 1.0), rep, p_Z1)
    assert c(v) == pytest.approx(theta2(1j), abs=1e-12)
    # dominant terms sit at |q + 1/2|^2 = 1/4
    x = pt(0.0, 20.0)
    assert abs(c(theta_tilde_tilde(x, rep, p_Z1))) == pytest.approx(2 * math.exp(-math.pi * 20 / 4), rel=1e-12)


def test_conjugated_warn_on_non_unimodular():
    p = ThetaParams(Lattice.checkerboard(4))
    with pytest.warns(UserWarning):
        theta_tilde(pt(0.0, 1.0), p.lattice.coset_rep([1, 0, 0, 0]), p)


def test_general_tilde_matches_all_halves(p_Z2, rng):
    rep = p_Z2.lattice.coset_rep([1, 1])
    for _ in range(3):
        x = pt(rng.uniform(-1, 1), rng.uniform(0.5, 1.5))
        a = c(theta_general(x, Characteristic.zero(2), p_Z2, "tilde"))
        b = c(theta_tilde(x, rep, p_Z2))
        assert abs(a - b) < 1e-12


def test_general_tilde_tilde_is_half_shift(p_Z1, rng):
    rep = p_Z1.lattice.coset_rep([1])
    for _ in range(3):
        x = pt(rng.uniform(-1, 1), rng.uniform(0.5, 1.5))
        a = c(theta_general(x, Characteristic.zero(1), p_Z1, "tilde_tilde"))
        b = c(theta_tilde_tilde(x, rep, p_Z1))
        assert abs(a - b) < 1e-12


def test_general_requires_integer_norms():
    p = ThetaParams(Lattice([[2 ** 0.25, 0.0], [0.0, 1.0]]))
    with pytest.raises(DomainError):
        theta_general(pt(0.0, 1.0), Characteristic.zero(2), p, "tilde")
    with pytest.raises(ValueError):
        theta_general(pt(0.0, 1.0), Characteristic.zero(2), p, "hat")


# -- eta and discriminant --------------------------------------------------------


def test_eta_zero_rep_is_cube(p_Z2):
    zero = p_Z2.lattice.half_coset_reps()[0]
    x = pt(0.1, 0.8)
    th = c(theta_null(x, p_Z2))
    assert c(eta_tilde(x, zero, p_Z2)) == pytest.approx(th**3, rel=1e-14)
    assert c(discriminant(x, zero, p_Z2)) == pytest.approx(th**24, rel=1e-12)


def test_eta_Z1_is_twice_eta_cubed(p_Z1):
    rep = p_Z1.lattice.coset_rep([1])
    assert c(eta_tilde(pt(0.0, 1.0), rep, p_Z1)) == pytest.approx(2 * ETA_AT_I**3, rel=1e-13)
    for z in (0.25 + 0.9j, -0.4 + 1.3j):
        x = pt(z.real, z.imag)
        product = theta2(z) * theta3(z) * theta4(z)
        assert c(eta_tilde(x, rep, p_Z1)) == pytest.approx(product, rel=1e-12)
        assert c(eta_tilde(x, rep, p_Z1)) == pytest.approx(2 * eta(z) ** 3, rel=1e-12)
        assert c(discriminant(x, rep, p_Z1)) == pytest.approx(256 * eta(z) ** 24, rel=1e-11)


def test_eta_factor_order_irrelevant(p_Z1):
    rep = p_Z1.lattice.coset_rep([1])
    x = pt(0.3, 0.7)
    f = [c(theta_null(x, p_Z1)), c(theta_tilde(x, rep, p_Z1)), c(theta_tilde_tilde(x, rep, p_Z1))]
    e = c(eta_tilde(x, rep, p_Z1))
    assert abs(e - f[2] * f[0] * f[1]) < 1e-12 * abs(e)
    assert abs(e - (f[1] * f[2]) * f[0]) < 1e-12 * abs(e)


def test_discriminant_modulus(p_Z2, rng):
    rep = p_Z2.lattice.coset_rep([1, 1])
    x = pt(0.2, 1.1)
    e, eb = eta_tilde_bounded(x, rep, p_Z2)
    d, db = discriminant_bounded(x, rep, p_Z2)
    assert abs(d) == pytest.approx(abs(e) ** 8, rel=1e-10)
    assert db >= 0 and eb >= 0


# -- truncation ----------------------------------------------------------------


def test_huge_decay_needs_first_shell_only(Z2):
    assert truncation_radius_for_tol(100.0, 1e-12, Z2) == 1.0
    assert truncation_radius_for_tol(500.0, 1e-12, Lattice.checkerboard(4)) == 1.0


def test_radius_monotone_in_tol(Z2):
    radii = [truncation_radius_for_tol(0.5, 10.0 ** -k, Z2) for k in range(2, 30, 2)]
    assert radii == sorted(radii)
    assert radii[-1] > radii[0]


def test_truncation_errors(Z2):
    with pytest.raises(DomainError):
        truncation_radius_for_tol(0.0, 1e-12, Z2)
    with pytest.raises(ValueError):
        truncation_radius_for_tol(1.0, 0.0, Z2)
    with pytest.raises(ConvergenceError):
        truncation_radius_for_tol(1e-6, 1e-12, Lattice.integer(4))


def test_tail_bound_certified_by_box_sum(rng):
    for _ in range(8):
        while True:
            g = rng.uniform(-1.5, 1.5, (2, 2))
            if abs(np.linalg.det(g)) > 0.4:
                break
        L = Lattice(g)
        for decay in (0.3, 1.0, 3.0):
            for r2 in (1.0, 4.0, 9.0):
                box = int(math.sqrt(60.0 / decay) * np.linalg.norm(L.dual().generators, axis=1).max()) + 2
                inside = set(box_scan(g, r2, box))
                tail = 0.0
                for m in box_scan(g, 60.0 / decay, box):
                    if m not in inside:
                        q = np.asarray(m, float) @ g
                        tail += math.exp(-decay * (q @ q))
                assert tail <= tail_bound(L, decay, r2) * (1 + 1e-12)


def test_doubling_radius_stays_within_bound(rng):
    for lattice in (Lattice.integer(2), Lattice.checkerboard(4), Lattice([[1.3, 0.2], [0.1, 0.8]])):
        for _ in range(3):
            x = pt(rng.uniform(-1, 1), rng.uniform(0.3, 1.0))
            w = random_char(rng, lattice.dim, 0.1)
            for r2 in (1.0, 2.0, 4.0):
                p = ThetaParams(lattice, truncation_radius_sq=r2)
                coarse = theta_H(x, w, p)
                fine = theta_H(x, w, p.fixed_radius(4 * r2))
                assert abs(c(fine) - c(coarse)) <= coarse.tail_bound


def test_auto_radius_meets_tolerance(p_Z2):
    v = theta_null(pt(0.0, 0.2), p_Z2)
    assert v.tail_bound < p_Z2.tail_tol
    assert c(v) == pytest.approx(classical_theta_Zd(0.2j, 2, box=60), abs=1e-11)


# -- slice structure ------------------------------------------------------------------


def test_summand_generic_path_agrees(rng):
    for model in ("H", "Hr"):
        for _ in range(6):
            omega = random_omega(rng, 3)
            x = SlicePoint(rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0), omega)
            q = rng.integers(-2, 3, 2).astype(float)
            w = random_char(rng, 2, 0.2)
            got = summand_slice_value(x, q, w, model)
            nsq = q @ q
            if model == "H":
                e = 1j * math.pi * nsq * x.z + 2j * math.pi * complex(q @ w.u, q @ w.v)
            else:
                e = -math.pi * nsq * x.z + 2j * math.pi * complex(q @ w.u, q @ w.v)
            want = SliceValue.from_cplane(np.exp(e), 3)
            assert (got - want).norm() < 1e-10 * max(1.0, abs(np.exp(e)))


def test_theta_is_slice_regular(p_Z2, rng):
    p = p_Z2.fixed_radius(40)
    w = random_char(rng, 2, 0.1)
    f = SliceFunction.from_complex(lambda z: c(theta_H(pt(z.real, z.imag), w, p)), 1)
    for at in ((0.1, 0.9), (-0.6, 1.4), (0.5, 0.6)):
        assert slice_cr_residual(f, at, h=1e-4) < 1e-5


def test_shifted_theta_models(p_Z1):
    s = Characteristic([0.5])
    assert c(shifted_theta(pt(0.0, 1.0), s, p_Z1)) == pytest.approx(theta2(1j), abs=1e-12)
    assert c(shifted_theta(pt(1.0, 0.0), s, p_Z1, "Hr")) == pytest.approx(theta2(1j), abs=1e-12)
    with pytest.raises(ValueError):
        shifted_theta(pt(1.0, 0.0), s, p_Z1, "disk")


def test_normalization_modes():
    p = ThetaParams(Lattice([[2.0, 0.0], [0.0, 1.0]]))
    assert p.norm == pytest.approx(0.5)
    assert ThetaParams(p.lattice, normalization="gram_det").norm == pytest.approx(4.0)
    with pytest.raises(ValueError):
        ThetaParams(p.lattice, normalization="volume")
