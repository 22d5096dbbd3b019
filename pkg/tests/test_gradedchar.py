import pytest
from hypothesis import given, strategies as st

from vhmass.gradedchar import cartan_max_check, colored_partitions, lattice_voa_dims
from vhmass.lattice import LatticeError, IntLattice, d_plus, direct_sum, rescale, root_lattice

E8 = root_lattice("E", 8)


def series_oracle(r, nmax):
    """Truncated product of geometric series 1/(1 - q^i), r times each."""
    coeffs = [1] + [0] * nmax
    for i in range(1, nmax + 1):
        for _ in range(r):
            for k in range(i, nmax + 1):
                coeffs[k] += coeffs[k - i]
    return coeffs


@given(st.integers(0, 8), st.integers(0, 6))
def test_colored_partitions_match_series(r, nmax):
    assert colored_partitions(r, nmax) == series_oracle(r, nmax)


def test_partition_numbers():
    assert colored_partitions(1, 10) == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]


def test_e8_character():
    # theta_E8 / eta^8 = j^(1/3) q^(1/3)
    assert lattice_voa_dims(E8, 4).by_degree == [1, 248, 4124, 34752, 213126]


def test_a1_degree_one():
    assert lattice_voa_dims(root_lattice("A", 1), 3).by_degree[:2] == [1, 3]


def test_weight_one_counts_roots_plus_rank():
    for lat in (root_lattice("D", 5), d_plus(16), rescale(E8, 2)):
        roots = sum(1 for v in lattice_voa_dims(lat, 1).per_alpha if lat.norm(v) == 2)
        assert lattice_voa_dims(lat, 1).by_degree[1] == lat.rank + roots


@pytest.mark.parametrize("lat", [E8, rescale(E8, 2), root_lattice("A", 2)])
def test_cartan_max(lat):
    assert cartan_max_check(lat, 4)


def test_per_alpha_lowest_degree():
    dims = lattice_voa_dims(root_lattice("A", 2), 3)
    for v, row in dims.per_alpha.items():
        h = root_lattice("A", 2).norm(v) // 2
        assert row[h] == 1 and not any(row[:h])


def test_odd_lattice_rejected():
    with pytest.raises(LatticeError):
        lattice_voa_dims(IntLattice([[1]]), 2)
