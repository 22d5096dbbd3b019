"""Graded dimensions of lattice vertex algebras.

V_L is M(1) tensor C[L]; its degree-n piece collects e^alpha times Heisenberg
states of degree n - (alpha, alpha)/2, and the Heisenberg character is the
r-coloured partition function.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .lattice import IntLattice, LatticeError, short_vectors


def colored_partitions(r: int, nmax: int) -> list[int]:
    """Coefficients of prod_{i>=1} (1 - q^i)^(-r) up to q^nmax."""
    if r < 0 or nmax < 0:
        raise ValueError("r and nmax must be non-negative")
    sigma = [0] * (nmax + 1)
    for d in range(1, nmax + 1):
        for m in range(d, nmax + 1, d):
            sigma[m] += d
    a = [1] + [0] * nmax
    for n in range(1, nmax + 1):
        a[n] = r * sum(sigma[k] * a[n - k] for k in range(1, n + 1)) // n
    return a


@dataclass
class GradedDims:
    rank: int
    by_degree: list[int]
    per_alpha: dict[tuple[int, ...], list[int]] = field(default_factory=dict)

    def dim(self, n: int) -> int:
        return self.by_degree[n]


def lattice_voa_dims(lat: IntLattice, nmax: int) -> GradedDims:
    """dim V_n for n <= nmax, with the contribution of every alpha of norm <= 2 nmax."""
    if not lat.is_even() or not lat.is_positive_definite():
        raise LatticeError("graded dimensions need an even positive definite lattice")
    r = lat.rank
    part = colored_partitions(r, nmax)
    vecs = [tuple([0] * r)]
    if r and nmax:
        for v in short_vectors(lat, 2 * nmax):
            vecs.append(tuple(v))
            vecs.append(tuple(-x for x in v))
    per_alpha = {}
    total = [0] * (nmax + 1)
    for v in vecs:
        h = lat.norm(v) // 2
        row = [part[n - h] if n >= h else 0 for n in range(nmax + 1)]
        per_alpha[v] = row
        for n, d in enumerate(row):
            total[n] += d
    return GradedDims(r, total, per_alpha)


def cartan_max_check(lat: IntLattice, nmax: int) -> bool:
    """Every alpha up to norm 2 nmax appears first in degree alpha^2/2, once.

    The per-alpha tally is also cross-checked against the theta series
    convolved with the Heisenberg character.
    """
    dims = lattice_voa_dims(lat, nmax)
    for v, row in dims.per_alpha.items():
        h = lat.norm(v) // 2
        if any(row[:h]) or row[h] != 1:
            return False
    counts = [0] * (nmax + 1)
    for v in dims.per_alpha:
        counts[lat.norm(v) // 2] += 1
    part = colored_partitions(lat.rank, nmax)
    conv = [sum(counts[m] * part[n - m] for m in range(n + 1)) for n in range(nmax + 1)]
    return conv == dims.by_degree
