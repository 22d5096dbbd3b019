import itertools
import json
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from conftest import random_positive_gram, transform, unimodular
from vhmass.lattice import (
    DegenerateError,
    IntLattice,
    LatticeError,
    NonIntegralError,
    RationalSpan,
    cartan_matrix,
    d_plus,
    det,
    direct_sum,
    dual_and_discriminant,
    hnf_rows,
    hyperbolic_plane,
    lattice_from_generators,
    long_root_lattice,
    norm_counts,
    reduce_lattice,
    rescale,
    root_lattice,
    short_vectors,
    smith_invariants,
    theta_series,
    vectors_of_norm,
)


def brute_short(lat, bound, box):
    out = []
    for v in itertools.product(range(-box, box + 1), repeat=lat.rank):
        if any(v) and lat.norm(v) <= bound:
            out.append(v)
    return out


def test_root_lattice_determinants():
    assert root_lattice("E", 8).det() == 1
    assert root_lattice("A", 5).det() == 6
    assert root_lattice("D", 7).det() == 4
    assert root_lattice("E", 6).det() == 3
    assert root_lattice("E", 7).det() == 2


def test_non_simply_laced_root_lattice_rejected():
    with pytest.raises(LatticeError):
        root_lattice("B", 3)
    with pytest.raises(LatticeError):
        cartan_matrix("E", 5)


@pytest.mark.parametrize("t,n,expected", [("B", 5, 4), ("C", 4, 16), ("F", 4, 4), ("G", 2, 3)])
def test_long_root_lattice_det(t, n, expected):
    assert long_root_lattice(t, n).det() == expected


def test_d_plus_is_unimodular_and_even():
    d16 = d_plus(16)
    assert d16.det() == 1 and d16.is_even()
    assert len(vectors_of_norm(d16, 2)) == 480
    with pytest.raises(LatticeError):
        d_plus(12)


def test_e8_theta():
    assert theta_series(root_lattice("E", 8), 6) == [1, 0, 240, 0, 2160, 0, 6720]


def test_hyperbolic_plane_signature():
    assert hyperbolic_plane().signature() == (1, 1)
    assert hyperbolic_plane().det() == -1


def test_rescale_and_direct_sum():
    l = direct_sum(rescale(root_lattice("E", 8), 2), root_lattice("D", 8))
    assert l.rank == 16 and l.det() == 2**8 * 4
    assert min(l.gram[i][i] for i in range(16)) == 2


def test_generators_non_integral_names_pair():
    span = RationalSpan([[1, 0], [0, 1]], [[Fraction(1, 2), 0], [0, 1]])
    with pytest.raises(NonIntegralError) as e:
        lattice_from_generators(span)
    assert e.value.pair == (0, 0)


def test_generators_degenerate_radical_dim():
    span = RationalSpan([[2, 0], [0, 0]], [[1, 0], [0, 1]])
    with pytest.raises(DegenerateError) as e:
        lattice_from_generators(span)
    assert e.value.radical_dim == 1


def test_generators_dependent_set():
    span = RationalSpan(cartan_matrix("A", 2), [[1, 0], [0, 1], [1, 1], [2, -1]])
    assert lattice_from_generators(span).det() == 3


def test_discriminant_group():
    assert dual_and_discriminant(root_lattice("D", 4)).elementary_divisors == (2, 2)
    assert dual_and_discriminant(root_lattice("A", 3)).elementary_divisors == (4,)
    assert dual_and_discriminant(rescale(root_lattice("D", 12), 2)).order == 2**14


def test_json_round_trip():
    l = IntLattice([[2, 1], [1, 2]], "A2")
    assert IntLattice.from_json(l.to_json()).gram == l.gram
    with pytest.raises(LatticeError):
        IntLattice.from_json(json.dumps({"gram": [[2.0]]}))
    with pytest.raises(LatticeError):
        IntLattice([[2, 1], [0, 2]])


@given(random_positive_gram(max_rank=4, even=False), st.integers(2, 8))
def test_short_vectors_match_brute_force(lat, bound):
    # x_i^2 <= (G^-1)_ii * (x, x) for every x
    inv = sympy.Matrix(lat.gram).inv()
    box = max(int(sympy.sqrt(inv[i, i] * bound)) + 1 for i in range(lat.rank))
    brute = brute_short(lat, bound, box)
    got = short_vectors(lat, bound)
    assert len(got) * 2 == len(brute)
    assert set(got) | {tuple(-x for x in v) for v in got} == set(brute)


@given(random_positive_gram(max_rank=5, even=False))
def test_det_matches_sympy(lat):
    assert lat.det() == sympy.Matrix(lat.gram).det()


@given(st.lists(st.lists(st.integers(-9, 9), min_size=4, max_size=4), min_size=1, max_size=6))
def test_hnf_spans_same_module(rows):
    h = hnf_rows(rows)
    m = sympy.Matrix(rows)
    assert len(h) == m.rank()
    if h:
        # same row module: each set expresses the other over Z
        hm = sympy.Matrix(h)
        for r in rows:
            sol = hm.T.gauss_jordan_solve(sympy.Matrix(r))[0]
            assert all(x.is_integer for x in sol.subs({s: 0 for s in sol.free_symbols}))
        assert hnf_rows(h) == h


@given(st.lists(st.lists(st.integers(-20, 20), min_size=3, max_size=3), min_size=3, max_size=3))
def test_smith_invariants_match_sympy(rows):
    from sympy.matrices.normalforms import smith_normal_form

    snf = smith_normal_form(sympy.Matrix(rows), domain=sympy.ZZ)
    expected = [abs(snf[i, i]) for i in range(3) if snf[i, i] != 0]
    assert smith_invariants(rows) == expected


@given(random_positive_gram(max_rank=5), st.integers(0, 10**6))
def test_reduction_preserves_lattice(lat, seed):
    red, t = reduce_lattice(lat)
    assert red.det() == lat.det()
    assert abs(det(t)) == 1
    assert transform(lat, t).gram == red.gram
    assert norm_counts(red, 6) == norm_counts(lat, 6)


@given(random_positive_gram(max_rank=4), st.integers(0, 10**6))
def test_theta_invariant_under_basis_change(lat, seed):
    other = transform(lat, unimodular(lat.rank, random.Random(seed)))
    assert theta_series(other, 8) == theta_series(lat, 8)
