"""Integral lattices given by Gram matrices.

Everything here is exact: Gram entries are Python ints, rational data uses
:class:`fractions.Fraction`.  Floating point only appears inside the LLL and
short-vector search as a pruning heuristic, and every result coming out of
those routines is re-checked with integer arithmetic.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np


class LatticeError(ValueError):
    """Domain error raised for invalid lattice input."""


class DegenerateError(LatticeError):
    def __init__(self, message: str, radical_dim: int):
        super().__init__(message)
        self.radical_dim = radical_dim


class NonIntegralError(LatticeError):
    def __init__(self, message: str, pair: tuple[int, int], value):
        super().__init__(message)
        self.pair = pair
        self.value = value


Matrix = list[list[int]]


def _as_int_matrix(rows) -> tuple[tuple[int, ...], ...]:
    out = []
    for row in rows:
        r = []
        for x in row:
            if isinstance(x, (float, np.floating)):
                raise LatticeError("Gram entries must be exact integers, got float")
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise LatticeError(f"non-integral Gram entry {x}")
                x = x.numerator
            r.append(int(x))
        out.append(tuple(r))
    return tuple(out)


@dataclass(frozen=True)
class IntLattice:
    """A finite rank lattice given by its integer Gram matrix."""

    gram: tuple[tuple[int, ...], ...]
    label: str = ""

    def __init__(self, gram, label: str = ""):
        g = _as_int_matrix(gram)
        n = len(g)
        for i, row in enumerate(g):
            if len(row) != n:
                raise LatticeError("Gram matrix must be square")
            for j in range(i):
                if row[j] != g[j][i]:
                    raise LatticeError(f"Gram matrix not symmetric at ({i}, {j})")
        object.__setattr__(self, "gram", g)
        object.__setattr__(self, "label", label or "")

    @property
    def rank(self) -> int:
        return len(self.gram)

    def matrix(self) -> Matrix:
        return [list(r) for r in self.gram]

    def array(self) -> np.ndarray:
        return np.array(self.gram, dtype=np.int64).reshape(self.rank, self.rank)

    def det(self) -> int:
        return det(self.gram)

    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def is_positive_definite(self) -> bool:
        return is_positive_definite(self.gram)

    def norm(self, v: Sequence[int]) -> int:
        return inner(self.gram, v, v)

    def signature(self) -> tuple[int, int]:
        return signature(self.gram)

    def to_json(self) -> str:
        return json.dumps({"label": self.label, "gram": self.matrix()})

    @classmethod
    def from_json(cls, text: str) -> "IntLattice":
        data = json.loads(text)
        if not isinstance(data, dict) or "gram" not in data:
            raise LatticeError("lattice JSON must be an object with a 'gram' key")
        for row in data["gram"]:
            for x in row:
                if not isinstance(x, int) or isinstance(x, bool):
                    raise LatticeError("lattice JSON must hold exact integers only")
        return cls(data["gram"], data.get("label", ""))

    def __repr__(self) -> str:
        return f"IntLattice(rank={self.rank}, label={self.label!r})"


@dataclass(frozen=True)
class RationalSpan:
    """Generators (possibly dependent) inside a rational quadratic space."""

    ambient_gram: tuple[tuple[Fraction, ...], ...]
    generators: tuple[tuple[Fraction, ...], ...] = field(default=())

    def __init__(self, ambient_gram, generators):
        a = tuple(tuple(Fraction(x) for x in row) for row in ambient_gram)
        m = len(a)
        for i in range(m):
            if len(a[i]) != m:
                raise LatticeError("ambient Gram must be square")
            for j in range(i):
                if a[i][j] != a[j][i]:
                    raise LatticeError("ambient Gram not symmetric")
        gens = tuple(tuple(Fraction(x) for x in g) for g in generators)
        for g in gens:
            if len(g) != m:
                raise LatticeError("generator length does not match ambient dimension")
        object.__setattr__(self, "ambient_gram", a)
        object.__setattr__(self, "generators", gens)

    def pairing(self, u, v) -> Fraction:
        a = self.ambient_gram
        return sum((u[i] * a[i][j] * v[j] for i in range(len(u)) for j in range(len(v)) if u[i] and v[j]), Fraction(0))


@dataclass(frozen=True)
class DiscriminantGroup:
    elementary_divisors: tuple[int, ...]
    order: int


# ----------------------------------------------------------------- arithmetic


def inner(gram, u, v) -> int:
    return sum(u[i] * gram[i][j] * v[j] for i in range(len(u)) if u[i] for j in range(len(v)) if v[j])


def det(m) -> int | Fraction:
    """Exact determinant by fraction-free Bareiss elimination (or Fractions)."""
    n = len(m)
    if n == 0:
        return 1
    if any(isinstance(x, Fraction) for row in m for x in row):
        a = [[Fraction(x) for x in row] for row in m]
        d = Fraction(1)
        for k in range(n):
            p = next((i for i in range(k, n) if a[i][k] != 0), None)
            if p is None:
                return Fraction(0)
            if p != k:
                a[k], a[p] = a[p], a[k]
                d = -d
            d *= a[k][k]
            for i in range(k + 1, n):
                f = a[i][k] / a[k][k]
                if f:
                    for j in range(k, n):
                        a[i][j] -= f * a[k][j]
        return d
    a = [list(map(int, row)) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            p = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if p is None:
                return 0
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def ldl(gram) -> list[Fraction]:
    """Diagonal of an exact LDL^T (pivoting-free when possible, with a fallback)."""
    n = len(gram)
    a = [[Fraction(x) for x in row] for row in gram]
    diag = []
    for k in range(n):
        if a[k][k] == 0:
            j = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
            if j is None:
                diag.append(Fraction(0))
                continue
            # congruence x_k <- x_k + x_j makes the pivot nonzero unless it is hyperbolic
            if a[j][j] + 2 * a[k][j] == 0:
                j2 = j
                for i in range(n):
                    a[k][i] -= a[j2][i]
                for i in range(n):
                    a[i][k] -= a[i][j2]
            else:
                for i in range(n):
                    a[k][i] += a[j][i]
                for i in range(n):
                    a[i][k] += a[i][j]
        piv = a[k][k]
        diag.append(piv)
        for i in range(k + 1, n):
            f = a[i][k] / piv
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
                a[i][k] = Fraction(0)
        for j in range(k + 1, n):
            a[k][j] = Fraction(0)
    return diag


def signature(gram) -> tuple[int, int]:
    d = ldl(gram)
    return sum(1 for x in d if x > 0), sum(1 for x in d if x < 0)


def is_positive_definite(gram) -> bool:
    n = len(gram)
    # leading principal minors
    for k in range(1, n + 1):
        if det([row[:k] for row in gram[:k]]) <= 0:
            return False
    return True


def hnf_rows(rows: list[list[int]]) -> list[list[int]]:
    """Row-style Hermite normal form; returns the nonzero rows (a Z-basis of the row module)."""
    a = [list(r) for r in rows if any(r)]
    if not a:
        return []
    ncols = len(a[0])
    out = []
    r = 0
    for c in range(ncols):
        # gcd-reduce column c over rows r..end
        while True:
            nz = [i for i in range(r, len(a)) if a[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[piv] = a[piv], a[r]
            done = True
            for i in range(r + 1, len(a)):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if r < len(a) and a[r][c] != 0:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
            for i in range(r):
                q = a[i][c] // a[r][c]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            r += 1
            if r == len(a):
                break
    out = [row for row in a[:r] if any(row)]
    return out


def smith_invariants(m) -> list[int]:
    """Invariant factors (nonzero ones, in divisibility order) of an integer matrix."""
    a = [list(map(int, row)) for row in m]
    if not a or not a[0]:
        return []
    nr, nc = len(a), len(a[0])
    invs = []
    t = 0
    while t < min(nr, nc):
        # find pivot of minimal abs value in remaining submatrix
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            changed = False
            p = a[t][t]
            for i in range(t + 1, nr):
                if a[i][t]:
                    q = a[i][t] // p
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        changed = True
            for j in range(t + 1, nc):
                if a[t][j]:
                    q = a[t][j] // p
                    for row in a:
                        row[j] -= q * row[t]
                    if a[t][j]:
                        changed = True
            if changed:
                # move smallest nonzero in row/col t to pivot
                cands = [(abs(a[i][t]), i, t) for i in range(t, nr) if a[i][t]]
                cands += [(abs(a[t][j]), t, j) for j in range(t, nc) if a[t][j]]
                _, i, j = min(cands)
                a[t], a[i] = a[i], a[t]
                for row in a:
                    row[t], row[j] = row[j], row[t]
                continue
            # divisibility condition
            bad = next(((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc) if a[i][j] % p), None)
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
        invs.append(abs(a[t][t]))
        t += 1
    return invs


def mat_mul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def transpose(a):
    return [list(r) for r in zip(*a)]


def congruent(basis, gram) -> Matrix:
    """B * G * B^T for row-vector basis B."""
    return mat_mul(mat_mul(basis, gram), transpose(basis))


def inverse(m) -> list[list[Fraction]]:
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            raise LatticeError("matrix is singular")
        a[k], a[p] = a[p], a[k]
        pv = a[k][k]
        a[k] = [x / pv for x in a[k]]
        for i in range(n):
            if i != k and a[i][k]:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return [row[n:] for row in a]


def rank_of(m) -> int:
    a = [[Fraction(x) for x in row] for row in m]
    if not a:
        return 0
    r = 0
    nc = len(a[0])
    for c in range(nc):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c] / a[r][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
    return r


# ------------------------------------------------------------ constructions


def cartan_matrix(lie_type: str, rank: int) -> Matrix:
    """Cartan matrix with Bourbaki numbering (a_ij = <a_i^vee, a_j>)."""
    t = lie_type.upper()
    n = rank
    valid = {
        "A": n >= 1, "B": n >= 2, "C": n >= 2, "D": n >= 3,
        "E": n in (6, 7, 8), "F": n == 4, "G": n == 2,
    }
    if not valid.get(t, False):
        raise LatticeError(f"invalid simple Lie type {lie_type}{rank}")
    c = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j):
        c[i][j] = c[j][i] = -1

    if t in "ABC":
        for i in range(n - 1):
            link(i, i + 1)
        if t == "B":
            c[n - 2][n - 1] = -2  # alpha_n short
        if t == "C":
            c[n - 1][n - 2] = -2  # alpha_n long
    elif t == "D":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif t == "E":
        link(0, 2)
        link(1, 3)
        for i in range(2, n - 1):
            link(i, i + 1)
    elif t == "F":
        link(0, 1)
        link(2, 3)
        c[1][2] = -2
        c[2][1] = -1
    elif t == "G":
        c[0][1] = -1
        c[1][0] = -3
    return c


def root_lattice(lie_type: str, rank: int) -> IntLattice:
    t = lie_type.upper()
    if t not in "ADE":
        raise LatticeError(f"{lie_type} is not simply laced")
    return IntLattice(cartan_matrix(t, rank), f"{t}{rank}")


def long_root_lattice(lie_type: str, rank: int) -> IntLattice:
    """The lattice spanned by 2a/(a,a) over roots a, normalised so long roots have norm 2."""
    t = lie_type.upper()
    cartan_matrix(t, rank)  # validation
    if t in "ADE":
        return root_lattice(t, rank)
    if t == "B":
        return IntLattice(cartan_matrix("D", rank) if rank >= 3 else [[2, 0], [0, 2]], f"D{rank}")
    if t == "C":
        return IntLattice([[2 * (i == j) for j in range(rank)] for i in range(rank)], f"A1^{rank}")
    if t == "F":
        return IntLattice(cartan_matrix("D", 4), "D4")
    return IntLattice(cartan_matrix("A", 2), "A2")


def rescale(lat: IntLattice, k: int) -> IntLattice:
    if k == 1:
        return lat
    label = f"sqrt{k}({lat.label})" if lat.label else ""
    return IntLattice([[k * x for x in row] for row in lat.gram], label)


def direct_sum(*lats: IntLattice) -> IntLattice:
    n = sum(l.rank for l in lats)
    g = [[0] * n for _ in range(n)]
    off = 0
    for l in lats:
        for i in range(l.rank):
            for j in range(l.rank):
                g[off + i][off + j] = l.gram[i][j]
        off += l.rank
    label = "+".join(l.label for l in lats if l.label)
    return IntLattice(g, label)


def hyperbolic_plane() -> IntLattice:
    return IntLattice([[0, -1], [-1, 0]], "II1,1")


def empty_lattice() -> IntLattice:
    return IntLattice([], "0")


def d_plus(n: int) -> IntLattice:
    """D_n together with the glue vector (1/2,...,1/2); needs 8 | n."""
    if n <= 0 or n % 8:
        raise LatticeError(f"D_{n}^+ is an even integral lattice only for n divisible by 8")
    gens = []
    for i in range(n - 1):
        v = [0] * n
        v[i], v[i + 1] = 1, -1
        gens.append(v)
    gens.append([0] * (n - 2) + [1, 1])
    gens.append([Fraction(1, 2)] * n)
    identity = [[int(i == j) for j in range(n)] for i in range(n)]
    g = lattice_from_generators(RationalSpan(identity, gens)).gram
    return IntLattice(g, f"D{n}+")


# --------------------------------------------------- generated lattices


def _common_denominator(vectors) -> int:
    return reduce(math.lcm, (x.denominator for v in vectors for x in v), 1)


def span_basis(span: RationalSpan) -> list[list[Fraction]]:
    """A Z-basis (row vectors, ambient coordinates) of the module generated by the span."""
    gens = span.generators
    if not gens:
        return []
    den = _common_denominator(gens)
    rows = [[int(x * den) for x in g] for g in gens]
    h = hnf_rows(rows)
    return [[Fraction(x, den) for x in row] for row in h]


def gram_of_basis(span: RationalSpan, basis) -> list[list[Fraction]]:
    a = span.ambient_gram
    m = len(a)
    av = [[sum(a[i][k] * b[k] for k in range(m) if b[k]) for i in range(m)] for b in basis]
    return [[sum(u[i] * w[i] for i in range(m) if u[i]) for w in av] for u in basis]


def lattice_from_generators(span: RationalSpan, label: str = "") -> IntLattice:
    """Gram matrix of the Z-module generated by ``span.generators``.

    Raises :class:`DegenerateError` (with ``radical_dim``) when the generated
    module is degenerate and :class:`NonIntegralError` naming the first
    offending pair of basis vectors when a pairing is not an integer.
    """
    basis = span_basis(span)
    g = gram_of_basis(span, basis)
    if basis:
        r = rank_of(g)
        if r < len(basis):
            raise DegenerateError(
                f"generated lattice is degenerate (radical dimension {len(basis) - r})", len(basis) - r
            )
    for i in range(len(g)):
        for j in range(i, len(g)):
            if g[i][j].denominator != 1:
                raise NonIntegralError(f"pairing of basis vectors {i},{j} is {g[i][j]}", (i, j), g[i][j])
    return IntLattice(g, label)


def dual_and_discriminant(lat: IntLattice) -> DiscriminantGroup:
    d = lat.det()
    if d == 0:
        raise DegenerateError("lattice is degenerate", lat.rank - rank_of(lat.gram))
    invs = [x for x in smith_invariants(lat.gram) if x != 1]
    return DiscriminantGroup(tuple(invs), abs(d))


# ---------------------------------------------------------------- reduction


def lll_reduce(gram, delta: float = 0.99) -> tuple[Matrix, Matrix]:
    """LLL on a positive definite Gram matrix.

    Returns ``(T, G')`` with ``G' = T G T^T`` and ``T`` unimodular.  The
    transformation is tracked in exact integers; Gram-Schmidt data is in
    floating point and only steers the reduction.
    """
    n = len(gram)
    g = [list(map(int, r)) for r in gram]
    t = [[int(i == j) for j in range(n)] for i in range(n)]
    if n <= 1:
        return t, g

    def gso(upto):
        mu = [[0.0] * n for _ in range(n)]
        bstar = [0.0] * n
        for i in range(upto + 1):
            for j in range(i):
                s = float(g[i][j])
                for l in range(j):
                    s -= mu[j][l] * mu[i][l] * bstar[l]
                mu[i][j] = s / bstar[j]
            s = float(g[i][i])
            for l in range(i):
                s -= mu[i][l] * mu[i][l] * bstar[l]
            bstar[i] = s
        return mu, bstar

    k = 1
    guard = 0
    while k < n:
        guard += 1
        if guard > 100000:
            break
        mu, bstar = gso(k)
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                t[k] = [a - q * b for a, b in zip(t[k], t[j])]
                gkk = g[k][k] - 2 * q * g[k][j] + q * q * g[j][j]
                newrow = [g[k][i] - q * g[j][i] for i in range(n)]
                newrow[k] = gkk
                for i in range(n):
                    g[k][i] = newrow[i]
                    g[i][k] = newrow[i]
                mu, bstar = gso(k)
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            t[k], t[k - 1] = t[k - 1], t[k]
            g[k], g[k - 1] = g[k - 1], g[k]
            for row in g:
                row[k], row[k - 1] = row[k - 1], row[k]
            k = max(k - 1, 1)
    return t, g


def reduce_lattice(lat: IntLattice) -> tuple[IntLattice, Matrix]:
    """LLL-reduce and sort the basis by norm; returns (lattice, transform)."""
    t, g = lll_reduce(lat.gram)
    order = sorted(range(lat.rank), key=lambda i: g[i][i])
    t = [t[i] for i in order]
    g = [[g[i][j] for j in order] for i in order]
    return IntLattice(g, lat.label), t


# ------------------------------------------------------- short vectors


def _cholesky_float(gram):
    n = len(gram)
    q = np.array(gram, dtype=float).reshape(n, n)
    # q_ii and mu_ij with Q(x) = sum_i q_i (x_i + sum_{j>i} mu_ij x_j)^2
    a = q.copy()
    qd = np.zeros(n)
    mu = np.zeros((n, n))
    for i in range(n):
        qd[i] = a[i, i] - sum(mu[k, i] ** 2 * qd[k] for k in range(i))
        if qd[i] <= 0:
            raise LatticeError("lattice is not positive definite")
        for j in range(i + 1, n):
            mu[i, j] = (a[i, j] - sum(mu[k, i] * mu[k, j] * qd[k] for k in range(i))) / qd[i]
    return qd, mu


def short_vectors(lat: IntLattice, bound: int, min_norm: int = 1) -> list[tuple[int, ...]]:
    """All v with min_norm <= v.G.v <= bound, one representative per +-pair.

    The representative has its last nonzero coordinate positive.  Order is
    lexicographic on coordinates.
    """
    n = lat.rank
    if n == 0:
        return []
    if not lat.is_positive_definite():
        raise LatticeError("short vector enumeration needs a positive definite lattice")
    red, t = reduce_lattice(lat)
    qd, mu = _cholesky_float(red.gram)
    eps = 1e-7 * max(1.0, float(bound))
    g = red.gram
    found = []
    x = [0] * n
    # iterative Fincke-Pohst from the last coordinate
    centers = [0.0] * n
    rem = [0.0] * (n + 1)
    rem[n] = float(bound)

    def rng(i):
        c = -sum(mu[i, j] * x[j] for j in range(i + 1, n))
        r = rem[i + 1] / qd[i]
        if r < -eps:
            return c, 1, 0
        s = math.sqrt(max(r, 0.0) + eps)
        return c, math.ceil(c - s - 1e-9), math.floor(c + s + 1e-9)

    def recurse(i, leading_zero):
        c, lo, hi = rng(i)
        if leading_zero:
            # all coordinates above are zero: enforce last nonzero coordinate > 0
            lo = max(lo, 0)
        for xi in range(lo, hi + 1):
            x[i] = xi
            val = qd[i] * (xi - c) ** 2
            rem[i] = rem[i + 1] - val
            if rem[i] < -eps:
                continue
            if i == 0:
                if leading_zero and xi == 0:
                    continue
                v = x[:]
                nv = inner(g, v, v)
                if min_norm <= nv <= bound:
                    found.append(v)
            else:
                recurse(i - 1, leading_zero and xi == 0)
        x[i] = 0

    recurse(n - 1, True)
    # back to original coordinates: v_orig = v_red * T
    out = []
    for v in found:
        w = [sum(v[i] * t[i][j] for i in range(n)) for j in range(n)]
        last = next(a for a in reversed(w) if a)
        if last < 0:
            w = [-a for a in w]
        out.append(tuple(w))
    out.sort()
    return out


def vectors_of_norm(lat: IntLattice, m: int) -> list[tuple[int, ...]]:
    """All vectors of norm exactly m (both signs), sorted lexicographically."""
    if m <= 0:
        raise LatticeError("norm must be positive")
    if not lat.is_positive_definite():
        raise LatticeError("vectors_of_norm needs a positive definite lattice")
    half = short_vectors(lat, m, m)
    out = half + [tuple(-a for a in v) for v in half]
    out.sort()
    return out


def norm_counts(lat: IntLattice, bound: int) -> dict[int, int]:
    """Number of vectors (both signs) of each norm 1..bound."""
    counts: dict[int, int] = {}
    for v in short_vectors(lat, bound):
        m = lat.norm(v)
        counts[m] = counts.get(m, 0) + 2
    return counts


def theta_series(lat: IntLattice, bound: int) -> list[int]:
    c = norm_counts(lat, bound)
    return [1] + [c.get(m, 0) for m in range(1, bound + 1)]


def lattice_from_json(path: str) -> IntLattice:
    with open(path) as fh:
        return IntLattice.from_json(fh.read())
