import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import blade_words, multivector_product, word_product
from slicetheta.clifford import (
    Multivector,
    Paravector,
    UnitVector,
    blade_mul,
    conjugate,
    involute,
    mul,
    paravector_inverse,
    reverse,
)
from slicetheta.errors import DimensionError


def random_mv(rng, dim):
    return Multivector(dim, rng.normal(size=1 << dim))


def test_generators_square_to_minus_one():
    for dim in range(1, 6):
        for i in range(1, dim + 1):
            e = Multivector.basis_vector(i, dim)
            assert (e * e).allclose(Multivector.scalar(-1.0, dim))


def test_generators_anticommute():
    dim = 4
    for i in range(1, dim + 1):
        for j in range(i + 1, dim + 1):
            ei, ej = Multivector.basis_vector(i, dim), Multivector.basis_vector(j, dim)
            assert (ei * ej + ej * ei).allclose(Multivector.zero(dim))


def test_blade_mul_matches_word_reduction():
    for dim in range(0, 6):
        words = blade_words(dim)
        for a in range(1 << dim):
            for b in range(1 << dim):
                s, c = blade_mul(a, b)
                s_ref, w = word_product(words[a], words[b])
                assert s == s_ref and words[c] == w


@pytest.mark.parametrize("dim", range(0, 7))
def test_product_matches_oracle(rng, dim):
    for _ in range(3):
        a, b = rng.normal(size=1 << dim), rng.normal(size=1 << dim)
        got = mul(Multivector(dim, a), Multivector(dim, b)).coeffs
        assert np.max(np.abs(got - multivector_product(a, b, dim))) < 1e-12


@pytest.mark.parametrize("dim", range(1, 7))
def test_associativity(rng, dim):
    a, b, c = (random_mv(rng, dim) for _ in range(3))
    assert ((a * b) * c).allclose(a * (b * c), atol=1e-12 * 10 ** (dim / 2))


@pytest.mark.parametrize("dim", range(1, 7))
def test_reverse_and_conjugate_are_anti_automorphisms(rng, dim):
    a, b = random_mv(rng, dim), random_mv(rng, dim)
    assert reverse(a * b).allclose(reverse(b) * reverse(a), atol=1e-11)
    assert conjugate(a * b).allclose(conjugate(b) * conjugate(a), atol=1e-11)
    assert involute(a * b).allclose(involute(a) * involute(b), atol=1e-11)


def test_conjugate_is_reverse_of_involute(rng):
    a = random_mv(rng, 5)
    assert conjugate(a).allclose(reverse(involute(a)))


def test_conjugation_signs_by_grade():
    dim = 4
    # grades 0..4: reverse + + - - +, involute + - + - +, conjugate + - - + +
    expected = {"reverse": [1, 1, -1, -1, 1], "involute": [1, -1, 1, -1, 1], "conjugate": [1, -1, -1, 1, 1]}
    for mask in range(1 << dim):
        k = bin(mask).count("1")
        e = Multivector.blade(mask, dim)
        assert reverse(e).coeffs[mask] == expected["reverse"][k]
        assert involute(e).coeffs[mask] == expected["involute"][k]
        assert conjugate(e).coeffs[mask] == expected["conjugate"][k]


@given(st.lists(st.floats(-10, 10), min_size=4, max_size=4))
def test_paravector_norm_is_multiplicative_against_conjugate(c):
    x = Paravector(c[0], c[1:])
    m = x.to_multivector()
    prod = m * x.conjugate().to_multivector()
    assert prod.allclose(Multivector.scalar(x.norm() ** 2, 3), atol=1e-9 * (1 + x.norm() ** 2))


def test_paravector_inverse(rng):
    x = Paravector(rng.normal(), rng.normal(size=3))
    one = x.to_multivector() * paravector_inverse(x).to_multivector()
    assert one.allclose(Multivector.scalar(1.0, 3))
    with pytest.raises(ZeroDivisionError):
        paravector_inverse(Paravector(0.0, [0.0, 0.0]))


def test_unit_vector_squares_to_minus_one(rng):
    om = UnitVector.normalized(rng.normal(size=4))
    m = om.to_multivector()
    assert (m * m).allclose(Multivector.scalar(-1.0, 4))
    assert (m * om.inverse().to_multivector()).allclose(Multivector.scalar(1.0, 4))


def test_unit_vector_validation():
    with pytest.raises(ValueError):
        UnitVector([1.0, 1.0])
    with pytest.raises(ValueError):
        UnitVector.basis(0, 3)
    assert UnitVector.basis(2, 3).components.tolist() == [0.0, 1.0, 0.0]


def test_dimension_checks():
    with pytest.raises(DimensionError):
        Multivector.zero(2) + Multivector.zero(3)
    with pytest.raises(ValueError):
        Multivector(2, [1.0, 2.0])


def test_multivector_is_immutable():
    m = Multivector.scalar(1.0, 2)
    with pytest.raises(ValueError):
        m.coeffs[0] = 2.0
