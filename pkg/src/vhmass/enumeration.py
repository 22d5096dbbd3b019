"""Genus enumeration by Kneser p-neighbours, closed off by the mass formula."""
from __future__ import annotations

import itertools
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import nextprime

from .genus import genus_symbol
from .isometry import aut_order, invariants, is_isometric
from .lattice import IntLattice, LatticeError, hnf_rows, reduce_lattice, short_vectors
from .mass import sms_mass

log = logging.getLogger(__name__)


@dataclass
class GenusEnumeration:
    classes: list[tuple[IntLattice, int]]
    accumulated_mass: Fraction
    target_mass: Fraction
    complete: bool
    prime: int = 0
    steps: int = 0
    diagnostics: list[str] = field(default_factory=list)


def neighbor_prime(lat: IntLattice) -> int:
    """Smallest prime not dividing 2*det."""
    d = abs(lat.det())
    p = 3
    while d % p == 0:
        p = nextprime(p)
    return p


def _pairing_row(gram, v, p):
    return [sum(gram[i][j] * v[j] for j in range(len(v))) % p for i in range(len(v))]


def _lift_isotropic(gram, v, p):
    """Adjust v modulo p so that (v, v) = 0 mod 2p^2 (v is isotropic mod p)."""
    n = len(v)
    v = list(v)
    a = _pairing_row(gram, v, p)
    i = next(k for k in range(n) if a[k])
    norm = sum(v[r] * gram[r][c] * v[c] for r in range(n) for c in range(n))
    if norm % p:
        raise LatticeError("vector is not isotropic mod p")
    # (v + p t e_i)^2 = norm + 2 p t a_i + p^2 t^2 g_ii; need norm/p + 2 t a_i = 0 mod p
    t = (-(norm // p) * pow(2 * a[i], -1, p)) % p
    v[i] += p * t
    return v


def neighbor(lat: IntLattice, v, p: int) -> IntLattice:
    """The p-neighbour L_v + Z v/p for v isotropic mod p (v not in pL)."""
    g = lat.gram
    n = lat.rank
    v = _lift_isotropic(g, [x % p for x in v], p)
    a = _pairing_row(g, v, p)
    i = next(k for k in range(n) if a[k])
    inv = pow(a[i], -1, p)
    # generators of L_v, scaled by p, plus v itself
    gens = []
    for j in range(n):
        row = [0] * n
        if j == i:
            row[i] = p * p
        else:
            row[j] = p
            row[i] = -p * ((a[j] * inv) % p)
        gens.append(row)
    gens.append(list(v))
    basis = hnf_rows(gens)
    gram = [
        [sum(b1[r] * g[r][c] * b2[c] for r in range(n) for c in range(n)) // (p * p) for b2 in basis]
        for b1 in basis
    ]
    red, _ = reduce_lattice(IntLattice(gram))
    return red


def _isotropic_lines(gram, p):
    n = len(gram)
    for v in itertools.product(range(p), repeat=n):
        last = next((x for x in reversed(v) if x), 0)
        if last != 1:
            continue
        if sum(v[r] * gram[r][c] * v[c] for r in range(n) for c in range(n)) % p == 0:
            yield list(v)


def _random_isotropic(gram, p, rng: random.Random):
    n = len(gram)
    while True:
        v = [rng.randrange(p) for _ in range(n)]
        if any(v) and sum(v[r] * gram[r][c] * v[c] for r in range(n) for c in range(n)) % p == 0:
            return v


def kneser_neighbors(lat: IntLattice, p: int, limit: int | None = None, seed: int = 0) -> list[IntLattice]:
    """p-neighbours of an even lattice, one per isotropic line mod p.

    With ``limit`` set, at most that many lines are used, drawn at random
    when the full set is larger.
    """
    if not lat.is_even():
        raise LatticeError("Kneser neighbours need an even lattice")
    if lat.det() % p == 0:
        raise LatticeError(f"p={p} divides det")
    n = lat.rank
    if limit is None or p ** (n - 1) <= 4 * limit:
        lines = list(_isotropic_lines(lat.gram, p))
        if limit is not None and len(lines) > limit:
            lines = random.Random(seed).sample(lines, limit)
    else:
        rng = random.Random(seed)
        lines = [_random_isotropic(lat.gram, p, rng) for _ in range(limit)]
    return [neighbor(lat, v, p) for v in lines]


class _SpecialCandidates:
    """Isotropic vectors built from short vectors: a, or a +- b."""

    def __init__(self, lat: IntLattice, p: int, bound: int, rng: random.Random):
        self.lat = lat
        self.p = p
        self.rng = rng
        self.vecs = [list(v) for v in short_vectors(lat, bound)]
        self.singles = [v for v in self.vecs if lat.norm(v) % p == 0 and any(x % p for x in v)]
        rng.shuffle(self.singles)

    def draw(self):
        if self.singles:
            return self.singles.pop()
        if len(self.vecs) < 2:
            return None
        for _ in range(50):
            a, b = self.rng.sample(self.vecs, 2)
            s = self.rng.choice((1, -1))
            v = [x + s * y for x, y in zip(a, b)]
            if self.lat.norm(v) % self.p == 0 and any(x % self.p for x in v):
                return v
        return None


def _key_bound(lat: IntLattice, cap: int = 3000) -> int:
    """Largest even norm bound whose vector count stays under ``cap``."""
    bound = min(lat.gram[i][i] for i in range(lat.rank))
    while len(short_vectors(lat, bound + 2)) <= cap // 2:
        bound += 2
    return bound


class _Registry:
    def __init__(self, bound: int):
        self.bound = bound
        self.classes: list[tuple[IntLattice, int]] = []
        self.by_key: dict[tuple, list[int]] = {}
        self.mass = Fraction(0)

    def key(self, lat: IntLattice) -> tuple:
        return invariants(lat, self.bound)

    def find(self, lat: IntLattice, key, test: bool) -> bool:
        """True when lat is (or is assumed to be) a known class."""
        idx = self.by_key.get(key)
        if not idx:
            return False
        if not test:
            return True
        return any(bool(is_isometric(lat, self.classes[i][0])) for i in idx)

    def add(self, lat: IntLattice, key) -> int:
        order = aut_order(lat).order
        self.by_key.setdefault(key, []).append(len(self.classes))
        self.classes.append((lat, order))
        self.mass += Fraction(1, order)
        return order


# candidates drawn per round; fixed so results do not depend on the worker count
_BATCH = 8


def enumerate_genus(
    lat: IntLattice,
    budget: int = 10**6,
    workers: int = 1,
    p: int | None = None,
    seed: int = 0,
    key_bound: int | None = None,
) -> GenusEnumeration:
    """All isometry classes in the genus of an even positive definite lattice.

    Neighbours are explored round-robin from every known class.  A neighbour
    whose invariants match a known class is first assumed known; once the
    search stalls, matching neighbours are checked by full isometry tests so
    that classes sharing invariants are still found.
    """
    if not lat.is_even() or not lat.is_positive_definite():
        raise LatticeError("enumeration needs an even positive definite lattice")
    if lat.rank < 3:
        raise LatticeError("enumeration needs rank >= 3")
    target = sms_mass(genus_symbol(lat))
    p = p or neighbor_prime(lat)
    start, _ = reduce_lattice(lat)
    if key_bound is None:
        key_bound = _key_bound(start)
    reg = _Registry(key_bound)
    reg.add(start, reg.key(start))
    rng = random.Random(seed)
    steps = 0
    stall = 0
    stall_limit = 200 + 40 * lat.rank
    careful = False
    diag: list[str] = []
    special: dict[int, list] = {}
    cursor = 0

    def candidate(ci: int):
        # a class of mass m is reached from K about |Aut K| m times as often
        # as from a class of mass 1/|Aut K|, so favour sources with big groups
        if rng.random() < 0.5:
            ci = rng.choices(range(len(reg.classes)), weights=[c[1] for c in reg.classes])[0]
        base = reg.classes[ci][0]
        src = special.get(ci)
        if src is None:
            src = special[ci] = _SpecialCandidates(base, p, key_bound, rng)
        if rng.random() < 0.5:
            v = src.draw()
            if v is not None:
                return base, v
        return base, _random_isotropic(base.gram, p, rng)

    def make(job):
        base, v = job
        nb = neighbor(base, v, p)
        return nb, reg.key(nb)

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while reg.mass < target and steps < budget:
            batch = []
            for _ in range(_BATCH):
                batch.append(candidate(cursor % len(reg.classes)))
                cursor += 1
            results = list(pool.map(make, batch)) if pool else [make(j) for j in batch]
            for nb, key in results:
                steps += 1
                if reg.find(nb, key, careful):
                    stall += 1
                    if stall > stall_limit and not careful:
                        careful = True
                        diag.append(f"switching to full isometry checks after {steps} steps")
                        log.debug(diag[-1])
                    continue
                order = reg.add(nb, key)
                stall = 0
                log.debug("class %d after %d steps: |Aut| = %d, mass %s of %s",
                          len(reg.classes), steps, order, reg.mass, target)
                if reg.mass > target:
                    raise AssertionError("accumulated mass exceeds the mass formula")
                if reg.mass == target:
                    break
    finally:
        if pool:
            pool.shutdown()
    classes = sorted(reg.classes, key=lambda c: (-c[1], c[0].gram))
    return GenusEnumeration(
        classes=classes,
        accumulated_mass=reg.mass,
        target_mass=target,
        complete=reg.mass == target,
        prime=p,
        steps=steps,
        diagnostics=diag,
    )
