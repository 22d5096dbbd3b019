"""Automorphism groups and isometry tests for positive definite lattices.

Backtracking over images of a reduced basis inside the finite set of
vectors of bounded norm.  Candidates are filtered by norm, by a vector
fingerprint (inner product histogram against the whole vector set, refined
once by the classes of the partners) and by the inner products with the
images already chosen.  The automorphism group order is the product of the
basic orbit lengths of a stabilizer chain.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .lattice import IntLattice, LatticeError, inverse, mat_mul, reduce_lattice, short_vectors, transpose

_CHUNK = 512
_REF_CAP = 4000


@dataclass
class AutResult:
    order: int
    generators: list[list[list[int]]] = field(default_factory=list)


@dataclass
class IsometryWitness:
    matrix: list[list[int]] | None

    def __bool__(self) -> bool:
        return self.matrix is not None


class _VectorSystem:
    """All vectors of norm <= bound of a reduced lattice (both signs)."""

    def __init__(self, gram, bound: int):
        self.gram = np.array(gram, dtype=np.int64)
        self.n = len(gram)
        half = short_vectors(IntLattice(gram), bound)
        vecs = [v for v in half] + [tuple(-a for a in v) for v in half]
        vecs.sort()
        self.V = np.array(vecs, dtype=np.int64).reshape(len(vecs), self.n)
        self.VG = self.V @ self.gram
        self.norms = (self.VG * self.V).sum(axis=1)
        self.bound = bound
        self.index = {row.tobytes(): i for i, row in enumerate(self.V)}
        # reference set for fingerprints: the shortest norm levels, capped in size
        levels = sorted(set(self.norms.tolist()))
        keep = []
        total = 0
        for m in levels:
            c = int((self.norms == m).sum())
            if keep and total + c > _REF_CAP:
                break
            keep.append(m)
            total += c
        self.ref_norms = tuple(keep)
        self.ref = np.flatnonzero(np.isin(self.norms, keep))
        self.Vf = self.V.astype(np.float64)
        self.VGf = self.VG.astype(np.float64)

    def __len__(self):
        return len(self.V)

    def lookup(self, vec) -> int:
        return self.index[np.asarray(vec, dtype=np.int64).tobytes()]

    def ip_blocks(self):
        """Inner products of all vectors against the reference set, in row blocks."""
        R = self.Vf[self.ref].T
        for s in range(0, len(self.V), _CHUNK):
            yield s, np.rint(self.VGf[s:s + _CHUNK] @ R).astype(np.int64)

    def permutation(self, A: np.ndarray) -> np.ndarray:
        W = self.V @ A
        return np.array([self.index[row.tobytes()] for row in W], dtype=np.int64)


def _fingerprints(systems: list[_VectorSystem]) -> list[np.ndarray]:
    """Isometry-invariant class ids, comparable across the given systems."""
    bound = max(s.bound for s in systems)
    width = 2 * bound + 1
    if len({s.ref_norms for s in systems}) != 1:
        return None
    raw = []
    for s in systems:
        hist = np.zeros((len(s), width), dtype=np.int64)
        for start, ip in s.ip_blocks():
            for t in range(width):
                hist[start:start + ip.shape[0], t] = (ip == t - bound).sum(axis=1)
        raw.append([(int(s.norms[i]),) + tuple(hist[i]) for i in range(len(s))])
    keys = sorted({k for r in raw for k in r})
    kid = {k: i for i, k in enumerate(keys)}
    ids0 = [np.array([kid[k] for k in r], dtype=np.int64) for r in raw]
    # one refinement round: counts of (inner product, partner class)
    nclass = len(keys)
    raw2 = []
    for s, ids in zip(systems, ids0):
        onehot = np.zeros((len(s.ref), nclass), dtype=np.float64)
        onehot[np.arange(len(s.ref)), ids[s.ref]] = 1
        rows = [[] for _ in range(len(s))]
        for start, ip in s.ip_blocks():
            parts = []
            for t in range(-bound, bound + 1):
                parts.append((ip == t).astype(np.float64) @ onehot)
            block = np.rint(np.concatenate(parts, axis=1)).astype(np.int64)
            for r in range(block.shape[0]):
                rows[start + r] = (int(ids[start + r]),) + tuple(block[r].tolist())
        raw2.append(rows)
    keys2 = sorted({k for r in raw2 for k in r})
    kid2 = {k: i for i, k in enumerate(keys2)}
    return [np.array([kid2[k] for k in r], dtype=np.int64) for r in raw2]


class _Search:
    """Depth-first search for images of basis vectors of ``src`` inside ``dst``."""

    def __init__(self, src_gram, basis_fp, dst: _VectorSystem, dst_fp, budget: int | None = None):
        self.gb = np.array(src_gram, dtype=np.int64)
        self.n = len(src_gram)
        self.dst = dst
        self.cands = [np.flatnonzero((dst_fp == f) & (dst.norms == self.gb[d, d])) for d, f in enumerate(basis_fp)]
        self.nodes = 0
        self.budget = budget

    def candidates(self, imgs: list[int]) -> np.ndarray:
        d = len(imgs)
        c = self.cands[d]
        if d == 0 or len(c) == 0:
            return c
        ips = self.dst.VG[c] @ self.dst.V[imgs].T
        ok = (ips == self.gb[d, :d]).all(axis=1)
        return c[ok]

    def extend(self, imgs: list[int]) -> list[int] | None:
        """Complete a partial image list (images of the first levels, in order).

        The remaining levels are filled fail-first: always branch on the
        level with the fewest candidates left, after filtering every pool by
        the inner products with all images chosen so far.
        """
        d = len(imgs)
        if d == self.n:
            return list(imgs)
        pools = {}
        for e in range(d, self.n):
            pool = self.cands[e]
            if d and len(pool):
                ips = self.dst.VG[pool] @ self.dst.V[imgs].T
                pool = pool[(ips == self.gb[e, :d]).all(axis=1)]
            if len(pool) == 0:
                return None
            pools[e] = pool
        chosen = dict(enumerate(imgs))
        if self._extend(chosen, pools):
            return [chosen[e] for e in range(self.n)]
        return None

    def _extend(self, chosen: dict[int, int], pools: dict[int, np.ndarray]) -> bool:
        if not pools:
            return True
        lvl = min(pools, key=lambda e: (len(pools[e]), e))
        rest = [e for e in pools if e != lvl]
        taken = set(chosen.values())
        for c in pools[lvl]:
            c = int(c)
            if c in taken:
                continue
            self.nodes += 1
            if self.budget is not None and self.nodes > self.budget:
                raise RuntimeError("isometry search budget exhausted")
            col = self.dst.V[c]
            nxt = {}
            for e in rest:
                pool = pools[e]
                pool = pool[(self.dst.VG[pool] @ col) == self.gb[e, lvl]]
                if len(pool) == 0:
                    break
                nxt[e] = pool
            else:
                chosen[lvl] = c
                if self._extend(chosen, nxt):
                    return True
                del chosen[lvl]
        return False


def _prepare(lat: IntLattice):
    if lat.rank == 0:
        raise LatticeError("rank 0 lattice")
    if not lat.is_positive_definite():
        raise LatticeError("automorphisms/isometries need a positive definite lattice")
    red, t = reduce_lattice(lat)
    return red, t


def _basis_order(fp_src, basis_idx, dst_fp) -> list[int]:
    counts = Counter(dst_fp.tolist())
    return sorted(range(len(basis_idx)), key=lambda i: (counts[int(fp_src[basis_idx[i]])], i))


def _to_int(m) -> list[list[int]]:
    out = []
    for row in m:
        r = []
        for x in row:
            x = Fraction(x)
            if x.denominator != 1:
                raise LatticeError("transformation is not integral")
            r.append(x.numerator)
        out.append(r)
    return out


def _greedy_order(gram, fp, basis_idx, counts) -> list[int]:
    """Order basis vectors: start with the rarest class, then prefer vectors
    that interact with the ones already chosen (better pruning)."""
    n = len(gram)
    left = set(range(n))
    order = []
    while left:
        def key(i):
            links = sum(1 for j in order if gram[i][j] != 0)
            return (-links if order else 0, counts[int(fp[basis_idx[i]])], i)
        i = min(left, key=key)
        order.append(i)
        left.remove(i)
    return order


def _setup_auto(lat: IntLattice):
    red, t = _prepare(lat)
    g = red.gram
    bound = max(g[i][i] for i in range(red.rank))
    vs = _VectorSystem(g, bound)
    fp = _fingerprints([vs])[0]
    basis_idx = [vs.lookup([int(i == j) for j in range(red.rank)]) for i in range(red.rank)]
    counts = Counter(fp.tolist())
    order = _greedy_order(g, fp, basis_idx, counts)
    return red, t, vs, fp, basis_idx, order


def aut_order(lat: IntLattice) -> AutResult:
    """Order and generators of O(L) for positive definite L.

    Generators g are returned in column convention: g^T G g = G.
    """
    red, t, vs, fp, basis_idx, order = _setup_auto(lat)
    n = red.rank
    # work in the permuted basis b_k = e_{order[k]}
    perm_basis = [basis_idx[i] for i in order]
    P = np.zeros((n, n), dtype=np.int64)
    for k, i in enumerate(order):
        P[k, i] = 1
    gb = (P @ np.array(red.gram, dtype=np.int64) @ P.T).tolist()
    search = _Search(gb, [fp[b] for b in perm_basis], vs, fp)
    Pinv = P.T  # permutation matrix

    gens: list[np.ndarray] = []
    perms: list[np.ndarray] = []

    def orbit(start: int) -> set[int]:
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for p in perms:
                y = int(p[x])
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    total = 1
    for level in range(n - 1, -1, -1):
        prefix = perm_basis[:level]
        b = perm_basis[level]
        orb = orbit(b)
        excluded: set[int] = set()
        for w in search.candidates(prefix):
            w = int(w)
            if w in orb or w in excluded:
                continue
            imgs = search.extend(prefix + [w])
            if imgs is None:
                excluded |= orbit(w)
                continue
            A = Pinv @ vs.V[imgs]  # x_red -> x_red A
            gens.append(A)
            perms.append(vs.permutation(A))
            orb = orbit(b)
        total *= len(orb)

    # back to the input coordinates: A_orig = T^{-1} A T, reported transposed
    tinv = inverse(t)
    out = []
    for A in gens:
        m = _to_int(mat_mul(mat_mul(tinv, A.tolist()), t))
        g = transpose(m)
        assert mat_mul(mat_mul(transpose(g), lat.gram), g) == [list(r) for r in lat.gram]
        out.append(g)
    return AutResult(total, out)


def _component_profile(vs: _VectorSystem) -> tuple:
    """Per norm: sorted sizes of connected components of the 'nonorthogonal' graph."""
    profile = []
    for m in vs.ref_norms:
        idx = np.flatnonzero(vs.norms == m)
        ip = vs.VG[idx] @ vs.V[idx].T
        adj = ip != 0
        comp = -np.ones(len(idx), dtype=np.int64)
        sizes = []
        for s in range(len(idx)):
            if comp[s] >= 0:
                continue
            comp[s] = len(sizes)
            frontier = [s]
            size = 1
            while frontier:
                nxt = np.flatnonzero(adj[frontier].any(axis=0) & (comp < 0))
                comp[nxt] = len(sizes)
                size += len(nxt)
                frontier = nxt.tolist()
            sizes.append(size)
        profile.append((m, tuple(sorted(sizes))))
    return tuple(profile)


def invariants(lat: IntLattice, bound: int | None = None) -> tuple:
    """Cheap isometry invariants: rank, det, norm counts and component profile."""
    red, _ = reduce_lattice(lat)
    if bound is None:
        bound = max(red.gram[i][i] for i in range(red.rank)) if red.rank else 0
    vs = _VectorSystem(red.gram, bound) if red.rank else None
    counts = tuple(sorted(Counter(vs.norms.tolist()).items())) if vs is not None else ()
    prof = _component_profile(vs) if vs is not None else ()
    return (lat.rank, lat.det(), counts, prof)


def is_isometric(l1: IntLattice, l2: IntLattice, budget: int | None = None) -> IsometryWitness:
    """Witness M with M^T G1 M = G2 when the lattices are isometric."""
    r1, t1 = _prepare(l1)
    r2, t2 = _prepare(l2)
    if r1.rank != r2.rank or l1.det() != l2.det():
        return IsometryWitness(None)
    bound = max(max(r.gram[i][i] for i in range(r.rank)) for r in (r1, r2))
    v1 = _VectorSystem(r1.gram, bound)
    v2 = _VectorSystem(r2.gram, bound)
    if Counter(v1.norms.tolist()) != Counter(v2.norms.tolist()):
        return IsometryWitness(None)
    if _component_profile(v1) != _component_profile(v2):
        return IsometryWitness(None)
    fps = _fingerprints([v1, v2])
    if fps is None:
        return IsometryWitness(None)
    f1, f2 = fps
    if Counter(f1.tolist()) != Counter(f2.tolist()):
        return IsometryWitness(None)
    n = r1.rank
    basis_idx = [v1.lookup([int(i == j) for j in range(n)]) for i in range(n)]
    order = _greedy_order(r1.gram, f1, basis_idx, Counter(f2.tolist()))
    P = np.zeros((n, n), dtype=np.int64)
    for k, i in enumerate(order):
        P[k, i] = 1
    gb = (P @ np.array(r1.gram, dtype=np.int64) @ P.T).tolist()
    search = _Search(gb, [f1[basis_idx[i]] for i in order], v2, f2, budget)
    imgs = search.extend([])
    if imgs is None:
        return IsometryWitness(None)
    A = (P.T @ v2.V[imgs]).tolist()  # x1_red -> x2_red
    full = mat_mul(mat_mul(inverse(t1), A), t2)  # x1 -> x2 in input coordinates
    s = _to_int(inverse(full))
    m = transpose(s)
    assert mat_mul(mat_mul(transpose(m), l1.gram), m) == [list(r) for r in l2.gram]
    return IsometryWitness(m)
