from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from vhmass.enumeration import GenusEnumeration, enumerate_genus
from vhmass.genus import format_symbol, genus_symbol
from vhmass.isometry import is_isometric
from vhmass.lattice import (
    IntLattice,
    direct_sum,
    long_root_lattice,
    rescale,
    root_lattice,
    vectors_of_norm,
)
from vhmass.mass import MassError, lattice_mass
from vhmass.voa import (
    KNOWN_INDEX,
    AffineComponent,
    AffineVoaSpec,
    VoaSpecError,
    affine_floor,
    cominimal_weights,
    floor_of_entry,
    fundamental_weights,
    load_hol_table,
    long_root_count,
    mass_fix_check,
    maximal_lattice,
    norm2_longroot_check,
    norm2_longroot_counts,
    parse_affine_symbol,
    root_system,
    vh_mass,
)

TYPES = [("A", 1), ("A", 4), ("B", 2), ("B", 5), ("C", 3), ("C", 4), ("D", 4), ("D", 6),
         ("E", 6), ("E", 7), ("E", 8), ("F", 4), ("G", 2)]


@pytest.mark.parametrize(
    "t,n,expected",
    [("E", 8, [0]), ("A", 3, [0, 1, 2, 3]), ("D", 6, [0, 1, 5, 6]), ("B", 4, [0, 1]),
     ("C", 3, [0, 3]), ("E", 6, [0, 1, 6]), ("E", 7, [0, 7]), ("F", 4, [0]), ("G", 2, [0])],
)
def test_cominimal_weights(t, n, expected):
    assert cominimal_weights(t, n) == expected


@pytest.mark.parametrize("t,n", TYPES)
def test_root_system_data(t, n):
    rs = root_system(t, n)
    assert rs.long_root_count() == long_root_count(t, n)
    assert rs.norm(rs.highest_root) == 2
    # long root lattice re-derived independently of the closed-form table
    floor = affine_floor(AffineVoaSpec([(t, n, 1)]))
    assert len(vectors_of_norm(floor, 2)) == long_root_count(t, n)
    assert is_isometric(floor, long_root_lattice(t, n))


@pytest.mark.parametrize("t,n", TYPES)
def test_fundamental_weights_are_dual_to_coroots(t, n):
    rs = root_system(t, n)
    for i, lam in enumerate(fundamental_weights(t, n)):
        for j in range(n):
            pair = sum(lam[k] * rs.form[k][j] for k in range(n))
            assert 2 * pair / rs.form[j][j] == (1 if i == j else 0)


def test_affine_floor_examples():
    assert is_isometric(affine_floor(AffineVoaSpec([("B", 12, 2)])), rescale(root_lattice("D", 12), 2))
    f = affine_floor(AffineVoaSpec([("E", 8, 2), ("B", 8, 1)]))
    assert format_symbol(genus_symbol(f)) == "II_{16,0}(2^+10)"
    assert is_isometric(f, direct_sum(rescale(root_lattice("E", 8), 2), root_lattice("D", 8)))
    assert affine_floor(AffineVoaSpec([("A", 1, 1)])).gram == ((2,),)


def test_empty_cosets_give_floor():
    spec = AffineVoaSpec([("D", 4, 2), ("A", 2, 3)])
    assert maximal_lattice(spec).gram == affine_floor(spec).gram


def test_spinor_glue_gives_d16_plus():
    spec = AffineVoaSpec([("D", 16, 1)], [[16]])
    lat = maximal_lattice(spec)
    assert lat.det() == 1 and lat.is_even()
    assert norm2_longroot_counts(spec) == (480, 480)


def test_vector_glue_on_b12_level2():
    # sqrt2 * Lambda_1 has norm 2 and enlarges sqrt2 D12 to sqrt2 Z^12
    lat = maximal_lattice(AffineVoaSpec([("B", 12, 2)], [[1]]))
    assert is_isometric(lat, IntLattice([[2 * (i == j) for j in range(12)] for i in range(12)]))


def test_glue_contains_floor_with_index_from_dets():
    spec = AffineVoaSpec([("A", 1, 4)] * 4, [[1, 1, 1, 1]])
    big, small = maximal_lattice(spec), affine_floor(spec)
    ratio = Fraction(small.det(), big.det())
    assert ratio.denominator == 1 and round(ratio ** 0.5) ** 2 == ratio and ratio > 1
    assert big.is_even()


@pytest.mark.parametrize("spec", [AffineVoaSpec([("A", 1, 1)], [[1]]), AffineVoaSpec([("A", 1, 2)], [[1]])])
def test_non_isotropic_coset_rejected(spec):
    with pytest.raises(VoaSpecError):
        maximal_lattice(spec)


def test_spec_validation():
    with pytest.raises(VoaSpecError):
        AffineVoaSpec([("E", 8, 1)], [[3]])
    with pytest.raises(VoaSpecError):
        AffineVoaSpec([("E", 9, 1)])
    with pytest.raises(VoaSpecError):
        AffineVoaSpec([("A", 1, 0)])
    with pytest.raises(VoaSpecError):
        AffineVoaSpec([("A", 1, 1)], [[0, 1]])
    spec = AffineVoaSpec.from_json({"components": [{"type": "b", "rank": 12, "level": 2}], "cosets": [[1]]})
    assert spec.components == (AffineComponent("B", 12, 2),) and spec.cosets == ((1,),)


def test_norm2_longroot_examples():
    assert norm2_longroot_counts(AffineVoaSpec([("E", 8, 2), ("B", 8, 1)])) == (112, 112)
    assert norm2_longroot_counts(AffineVoaSpec([("B", 12, 2)])) == (0, 0)
    assert norm2_longroot_check(AffineVoaSpec([("A", 1, 1)]))


def test_vh_mass():
    e8 = root_lattice("E", 8)
    assert vh_mass(e8, 1) == Fraction(1, 696729600)
    l = rescale(root_lattice("D", 12), 2)
    assert vh_mass(l, 2) == 2 * vh_mass(l, 1)
    with pytest.raises(MassError):
        vh_mass(IntLattice([[0, 1], [1, 0]]), 1)
    with pytest.raises(VoaSpecError):
        vh_mass(e8, 0)


def test_mass_fix_check():
    e8 = enumerate_genus(root_lattice("E", 8))
    assert mass_fix_check(e8, 1)
    truncated = GenusEnumeration(e8.classes, Fraction(0), e8.target_mass, False)
    assert not mass_fix_check(truncated, 1)
    with pytest.raises(VoaSpecError):
        mass_fix_check(e8, 2)


def test_table():
    table = load_hol_table()
    assert len(table) == 69
    assert all(sum(c.rank for c in e.components) == e.rank for e in table)
    assert next(e for e in table if e.symbol == "(E_{8,1})^3").rank == 24
    entry = next(e for e in table if e.symbol == "E_{8,2}B_{8,1}")
    assert format_symbol(genus_symbol(floor_of_entry(entry))) == "II_{16,0}(2^+10)"
    assert KNOWN_INDEX[entry.symbol] == 1


def test_rank16_rows_level_one_roots():
    for e in load_hol_table():
        if e.rank == 16:
            assert norm2_longroot_check(e.spec()), e.symbol


def test_table_errors_carry_line_numbers(tmp_path):
    p = tmp_path / "t.tsv"
    p.write_text("16\tE_{8,2}B_{8,1}\nx\tA_{1,1}\n")
    with pytest.raises(VoaSpecError, match="line 2"):
        load_hol_table(p)
    p.write_text("8\tE_{8,1}\n8\tQ_{8,1}\n")
    with pytest.raises(VoaSpecError, match="line 2"):
        load_hol_table(p)


def test_parse_affine_symbol():
    comps = parse_affine_symbol("(A_{5,2})^2C_{2,1}(A_{2,1})^2")
    assert [str(c) for c in comps] == ["A_{5,2}", "A_{5,2}", "C_{2,1}", "A_{2,1}", "A_{2,1}"]
    assert len(parse_affine_symbol("A_{2,1}^{12}")) == 12


@given(st.sampled_from(TYPES), st.integers(1, 4))
def test_floor_is_rescaled_long_root_lattice(tn, k):
    t, n = tn
    floor = affine_floor(AffineVoaSpec([(t, n, k)]))
    assert floor.gram == rescale(affine_floor(AffineVoaSpec([(t, n, 1)])), k).gram
