"""Bilinear 2-cocycles for twisted group algebras of even lattices.

A span of vectors in a rational quadratic space generates a Z-module whose
form may be degenerate.  The cocycle only depends on the form mod 2, so it
is built on the nondegenerate quotient by the radical and pulled back.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lattice import (
    IntLattice,
    LatticeError,
    NonIntegralError,
    RationalSpan,
    gram_of_basis,
    hnf_rows,
    inverse,
    lattice_from_generators,
    rank_of,
    span_basis,
)


class CocycleError(LatticeError):
    pass


@dataclass(frozen=True)
class RadicalQuotient:
    lattice: IntLattice                 # nondegenerate quotient L / rad
    projection: tuple[tuple[int, ...], ...]  # q x r, coordinates in L -> quotient
    radical: tuple[tuple[int, ...], ...]     # basis of rad in L-coordinates
    basis: tuple[tuple[Fraction, ...], ...]  # Z-basis of L, ambient coordinates
    gram: tuple[tuple[int, ...], ...]        # (possibly degenerate) Gram of L


def _integral_gram(span: RationalSpan):
    basis = span_basis(span)
    g = gram_of_basis(span, basis)
    for i in range(len(g)):
        for j in range(i + 1):
            if g[i][j].denominator != 1:
                raise NonIntegralError(f"pairing of basis vectors {j},{i} is {g[i][j]}", (j, i), g[i][j])
        if g[i][i].numerator % 2:
            raise CocycleError(f"basis vector {i} has odd norm {g[i][i]}")
    return basis, [[int(x) for x in row] for row in g]


def radical_quotient(span: RationalSpan) -> RadicalQuotient:
    """Quotient of the generated module by its radical, with the projection map."""
    basis, g = _integral_gram(span)
    r = len(g)
    if r and rank_of(g) == r:
        ident = tuple(tuple(int(i == j) for j in range(r)) for i in range(r))
        return RadicalQuotient(IntLattice(g), ident, (), tuple(tuple(b) for b in basis),
                               tuple(tuple(row) for row in g))
    aug = [g[i] + [int(i == j) for j in range(r)] for i in range(r)]
    rows = hnf_rows(aug) if r else []
    image = [row for row in rows if any(row[:r])]
    radical = [row[r:] for row in rows if not any(row[:r])]
    lifts = [row[r:] for row in image]  # G y_j = w_j, the y_j lift a basis of L/rad
    w = [row[:r] for row in image]
    q = len(w)
    qgram = [[sum(a[i] * g[i][j] * b[j] for i in range(r) for j in range(r)) for b in lifts] for a in lifts]
    if q:
        # c = (W W^T)^{-1} W G x expresses G x in the w basis
        wwt = [[sum(x * y for x, y in zip(a, b)) for b in w] for a in w]
        inv = inverse(wwt)
        wg = [[sum(a[k] * g[k][j] for k in range(r)) for j in range(r)] for a in w]
        proj = [[sum(inv[i][k] * wg[k][j] for k in range(q)) for j in range(r)] for i in range(q)]
    else:
        proj = []
    for row in proj:
        for x in row:
            if Fraction(x).denominator != 1:
                raise CocycleError("projection to the radical quotient is not integral")
    return RadicalQuotient(
        IntLattice(qgram),
        tuple(tuple(int(x) for x in row) for row in proj),
        tuple(tuple(row) for row in radical),
        tuple(tuple(b) for b in basis),
        tuple(tuple(row) for row in g),
    )


@dataclass(frozen=True)
class Cocycle:
    """f(a, b) = (-1)^(a^T bits b) on coordinates with respect to the lattice basis."""

    rank: int
    bits: tuple[tuple[int, ...], ...]
    radical_projection: tuple[tuple[int, ...], ...]
    gram: tuple[tuple[int, ...], ...]

    def exponent(self, a, b) -> int:
        return sum(a[i] * self.bits[i][j] * b[j] for i in range(self.rank) if a[i] for j in range(self.rank)) % 2

    def __call__(self, a, b) -> int:
        return -1 if self.exponent(a, b) else 1

    def pairing(self, a, b) -> int:
        g = self.gram
        return sum(a[i] * g[i][j] * b[j] for i in range(self.rank) for j in range(self.rank))


def build_cocycle(span: RationalSpan) -> Cocycle:
    """Cocycle with f(a,b) f(b,a) = (-1)^{(a,b)}, taken through the radical quotient.

    On the quotient basis the bits are the strictly lower triangle of the
    Gram matrix mod 2; pulled back through the projection they are constant
    on radical cosets.
    """
    rq = radical_quotient(span)
    q = rq.lattice.rank
    qg = rq.lattice.gram
    lower = [[qg[i][j] % 2 if i > j else 0 for j in range(q)] for i in range(q)]
    p = rq.projection
    r = len(rq.gram)
    bits = [
        [sum(p[i][a] * lower[i][j] * p[j][b] for i in range(q) for j in range(q)) % 2 for b in range(r)]
        for a in range(r)
    ]
    return Cocycle(r, tuple(tuple(row) for row in bits), p, rq.gram)


def verify_cocycle(c: Cocycle, coefficient_bound: int = 2) -> list[str]:
    """Exhaustively test the cocycle, commutator and normalisation identities.

    Every triple of coefficient vectors with entries in [-bound, bound] is
    checked.  Returns descriptions of violations; empty when all hold.
    """
    r = c.rank
    rng = range(-coefficient_bound, coefficient_bound + 1)
    v = np.array(list(itertools.product(rng, repeat=r)), dtype=np.int64).reshape(-1, r)
    bits = np.array(c.bits, dtype=np.int64).reshape(r, r)
    gram = np.array(c.gram, dtype=np.int64).reshape(r, r)
    vb = v @ bits
    e = (vb @ v.T) % 2  # e[a, b]: exponent of f(a, b)
    bad = []
    zero = [0] * r
    for a in v.tolist():
        if c(zero, a) != 1 or c(a, zero) != 1:
            bad.append(f"normalisation fails at {a}")
    comm = (e + e.T) % 2
    pair = (v @ gram @ v.T) % 2
    for i, j in zip(*np.nonzero(comm != pair)):
        bad.append(f"commutator fails at {v[i].tolist()},{v[j].tolist()}")
    # f(a,b) f(a+b,d) = f(b,d) f(a,b+d), checked one a at a time
    for i in range(len(v)):
        ab = v[i] + v  # rows: a + b
        left = (e[i][:, None] + (ab @ bits) @ v.T) % 2
        right = (e + (vb[i] @ (v[:, None, :] + v[None, :, :]).transpose(0, 2, 1))) % 2
        for j, k in zip(*np.nonzero(left != right)):
            bad.append(f"cocycle identity fails at {v[i].tolist()},{v[j].tolist()},{v[k].tolist()}")
    return bad


@dataclass(frozen=True)
class TwistedElement:
    """coefficient * e^alpha in the twisted group algebra."""

    coefficient: int
    alpha: tuple[int, ...]


def twisted_multiply(c: Cocycle, x: TwistedElement, y: TwistedElement) -> TwistedElement:
    alpha = tuple(a + b for a, b in zip(x.alpha, y.alpha))
    return TwistedElement(x.coefficient * y.coefficient * c(x.alpha, y.alpha), alpha)


def monoid_units(generators, witness_bound: int, gram) -> IntLattice:
    """The group of units of the monoid generated by ``generators``.

    A vector counts as a unit when both it and its negative are non-negative
    combinations of the generators with coefficients at most witness_bound.
    ``gram`` is the ambient form the generators live in.
    """
    gens = [tuple(int(x) for x in g) for g in generators]
    if not gens:
        return IntLattice([])
    n = len(gens[0])
    reach = set()
    for coeffs in itertools.product(range(witness_bound + 1), repeat=len(gens)):
        reach.add(tuple(sum(c * g[i] for c, g in zip(coeffs, gens)) for i in range(n)))
    units = [v for v in reach if any(v) and tuple(-x for x in v) in reach]
    if not units:
        return IntLattice([])
    return lattice_from_generators(RationalSpan(gram, units))
