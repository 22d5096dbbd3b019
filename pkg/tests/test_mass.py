from fractions import Fraction
from math import factorial

import pytest
import sympy
from hypothesis import given, strategies as st

from conftest import random_positive_gram
from oracles import class_number_mass
from vhmass.genus import genus_symbol, parse_symbol
from vhmass.lattice import IntLattice, d_plus, direct_sum, hyperbolic_plane, rescale, root_lattice
from vhmass.mass import (
    MassError,
    bernoulli,
    character_bernoulli,
    fundamental_discriminant,
    kronecker,
    lattice_mass,
    sms_mass,
)

W_E8 = 696729600


def test_bernoulli_numbers_match_sympy():
    for k in range(0, 30):
        expected = sympy.bernoulli(k) if k != 1 else sympy.Rational(-1, 2)
        assert bernoulli(k) == Fraction(int(expected.p), int(expected.q))


@pytest.mark.parametrize("d", [-4, -3, 5, 8, -7, 12, -15, 13, -20, 21])
def test_kronecker_agrees_with_jacobi_on_odd_moduli(d):
    for n in range(1, 60, 2):
        assert kronecker(d, n) == sympy.jacobi_symbol(d % n, n) if n > 1 else kronecker(d, n) == 1


@pytest.mark.parametrize("d,f", [(-3, -3), (-12, -3), (-4, -4), (8, 8), (2, 8), (-1, -4), (9, 1), (45, 5), (-28, -7)])
def test_fundamental_discriminant(d, f):
    assert fundamental_discriminant(d) == f


# B_{1,chi} = -2h/w for imaginary quadratic fields; B_{2,chi} = 24 zeta_K(-1) for real ones
@pytest.mark.parametrize("k,disc,value", [(1, -3, Fraction(-1, 3)), (1, -4, Fraction(-1, 2)),
                                           (2, 5, Fraction(4, 5)), (1, -7, Fraction(-1)), (2, 8, Fraction(2))])
def test_generalized_bernoulli(k, disc, value):
    assert character_bernoulli(k, disc) == value


def test_e8():
    assert lattice_mass(root_lattice("E", 8)) == Fraction(1, W_E8)


def test_rank16_unimodular():
    expected = Fraction(1, 2 * W_E8 ** 2) + Fraction(1, 2 ** 15 * factorial(16))
    assert lattice_mass(direct_sum(root_lattice("E", 8), root_lattice("E", 8))) == expected
    assert lattice_mass(d_plus(16)) == expected


@pytest.mark.parametrize(
    "lat,value",
    [(root_lattice("A", 2), Fraction(1, 12)), (root_lattice("A", 3), Fraction(1, 48)),
     (root_lattice("D", 4), Fraction(1, 1152)), (root_lattice("E", 7), Fraction(1, 2903040)),
     (root_lattice("D", 5), Fraction(1, 2 ** 4 * 120 * 2)), (root_lattice("E", 6), Fraction(1, 51840 * 2)),
     (IntLattice([[1, 0], [0, 1]]), Fraction(1, 8)), (IntLattice([[1, 0, 0], [0, 1, 0], [0, 0, 1]]), Fraction(1, 48))],
)
def test_single_class_genera(lat, value):
    # each of these genera has one class, so the mass is 1/|Aut|
    assert lattice_mass(lat) == value


def test_sqrt2_d12_genus_two_classes():
    w_d12 = 2 ** 11 * factorial(12) * 2
    w_e8_d4 = W_E8 * 1152
    assert lattice_mass(rescale(root_lattice("D", 12), 2)) == Fraction(1, w_d12) + Fraction(1, w_e8_d4)


def test_rank_one_and_errors():
    assert sms_mass(parse_symbol("II_{1,0}(2^+1_1)")) == Fraction(1, 2)
    with pytest.raises(MassError):
        sms_mass(genus_symbol(direct_sum(root_lattice("E", 8), hyperbolic_plane())))
    with pytest.raises(MassError):
        sms_mass(parse_symbol("II_{0,0}"))


@pytest.mark.parametrize(
    "n,d,even",
    [(2, 3, True), (2, 15, True), (2, 20, False), (2, 28, False), (2, 36, True), (2, 45, False),
     (3, 4, True), (3, 7, False), (3, 12, False), (3, 16, True), (3, 18, False), (3, 20, True),
     (3, 27, False), (3, 32, True), (3, 36, False), (3, 50, False)],
)
def test_mass_equals_class_sum(n, d, even):
    # reference: all classes from reduced forms, automorphisms counted by brute force
    for sym, mass in class_number_mass(n, d, even).items():
        assert sms_mass(sym) == mass, str(sym)


@given(random_positive_gram(max_rank=4, even=False), st.sampled_from([2, 3, 4, 5, 6, 9, 10]))
def test_mass_invariant_under_rescaling(lat, k):
    assert lattice_mass(rescale(lat, k)) == lattice_mass(lat)


@given(random_positive_gram(max_rank=5, even=False))
def test_mass_positive_with_small_denominator_primes(lat):
    m = lattice_mass(lat)
    assert m > 0
    allowed = max([2 * lat.rank + 1] + list(sympy.factorint(lat.det())))
    assert all(p <= allowed for p in sympy.factorint(m.denominator))
