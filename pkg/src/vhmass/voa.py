"""Lattices attached to affine vertex algebras and their simple-current extensions.

For a simple Lie algebra g the Cartan subalgebra is modelled in simple-root
coordinates, with the invariant form normalised so long roots have norm 2.
A component of level k contributes its coroot lattice with the form scaled
by k, so the floor lattice is the sum of sqrt(k_i) Q_{g_i}.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .enumeration import GenusEnumeration
from .genus import genus_symbol
from .lattice import (
    IntLattice,
    LatticeError,
    NonIntegralError,
    RationalSpan,
    cartan_matrix,
    inverse,
    lattice_from_generators,
    vectors_of_norm,
)
from .mass import sms_mass


class VoaSpecError(ValueError):
    pass


@dataclass(frozen=True)
class AffineComponent:
    lie_type: str
    rank: int
    level: int

    def __str__(self):
        return f"{self.lie_type}_{{{self.rank},{self.level}}}"


@dataclass(frozen=True)
class AffineVoaSpec:
    """Affine components plus the simple currents used to extend them.

    Each coset is a tuple with one entry per component: a fundamental-weight
    index (0 for the vacuum) that must be cominimal for that component.
    """

    components: tuple[AffineComponent, ...]
    cosets: tuple[tuple[int, ...], ...] = ()
    index: int = 1

    def __post_init__(self):
        comps = tuple(
            c if isinstance(c, AffineComponent) else AffineComponent(*c) for c in self.components
        )
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "cosets", tuple(tuple(c) for c in self.cosets))
        for c in comps:
            try:
                cartan_matrix(c.lie_type, c.rank)
            except LatticeError as e:
                raise VoaSpecError(str(e)) from None
            if c.level < 1:
                raise VoaSpecError(f"level of {c} must be positive")
        for coset in self.cosets:
            if len(coset) != len(comps):
                raise VoaSpecError(f"coset {list(coset)} has {len(coset)} entries for {len(comps)} components")
            for c, w in zip(comps, coset):
                if w not in cominimal_weights(c.lie_type, c.rank):
                    raise VoaSpecError(f"weight {w} is not cominimal for {c.lie_type}{c.rank}")
        if self.index < 1:
            raise VoaSpecError("index must be a positive integer")

    @property
    def rank(self) -> int:
        return sum(c.rank for c in self.components)

    @classmethod
    def from_json(cls, data: dict) -> "AffineVoaSpec":
        try:
            comps = [
                AffineComponent(str(c["type"]).upper(), int(c["rank"]), int(c.get("level", 1)))
                for c in data["components"]
            ]
        except (KeyError, TypeError, ValueError) as e:
            raise VoaSpecError(f"malformed component list: {e}") from None
        return cls(tuple(comps), tuple(tuple(int(x) for x in c) for c in data.get("cosets", [])),
                   int(data.get("index", 1)))


# ------------------------------------------------------------- root systems


@dataclass(frozen=True)
class RootSystem:
    lie_type: str
    rank: int
    form: tuple[tuple[Fraction, ...], ...]  # (a_i, a_j), long roots of norm 2
    positive_roots: tuple[tuple[int, ...], ...]

    def norm(self, v) -> Fraction:
        f = self.form
        n = self.rank
        return sum((v[i] * f[i][j] * v[j] for i in range(n) for j in range(n)), Fraction(0))

    @property
    def highest_root(self) -> tuple[int, ...]:
        return max(self.positive_roots, key=sum)

    def long_root_count(self) -> int:
        return 2 * sum(1 for r in self.positive_roots if self.norm(r) == 2)


@lru_cache(maxsize=None)
def root_system(lie_type: str, rank: int) -> RootSystem:
    t = lie_type.upper()
    c = cartan_matrix(t, rank)  # c[i][j] = 2(a_i, a_j)/(a_j, a_j)
    n = rank
    half = [None] * n  # (a_i, a_i)/2
    half[0] = Fraction(1)
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(n):
            if c[i][j] and half[j] is None:
                half[j] = half[i] * Fraction(c[j][i], c[i][j])
                stack.append(j)
    top = max(half)
    half = [h / top for h in half]
    form = tuple(tuple(half[j] * c[i][j] for j in range(n)) for i in range(n))
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    seen = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for r in frontier:
            for i in range(n):
                pair = sum(r[k] * form[k][i] for k in range(n))
                m = pair / half[i]  # 2(r, a_i)/(a_i, a_i)
                s = tuple(r[k] - (int(m) if k == i else 0) for k in range(n))
                if all(x >= 0 for x in s) and any(s) and s not in seen:
                    seen.add(s)
                    nxt.append(s)
        frontier = nxt
    return RootSystem(t, n, form, tuple(sorted(seen, key=lambda r: (sum(r), r))))


def cominimal_weights(lie_type: str, rank: int) -> list[int]:
    """Indices i (1-based) with mark 1 in the highest root, plus 0 for the vacuum."""
    theta = root_system(lie_type, rank).highest_root
    return [0] + [i + 1 for i, a in enumerate(theta) if a == 1]


def fundamental_weights(lie_type: str, rank: int) -> list[list[Fraction]]:
    """Fundamental weights in simple-root coordinates."""
    rs = root_system(lie_type, rank)
    inv = inverse([list(row) for row in rs.form])
    halves = [rs.form[i][i] / 2 for i in range(rank)]
    return [[inv[k][i] * halves[i] for k in range(rank)] for i in range(rank)]


LONG_ROOTS = {
    "A": lambda n: n * (n + 1),
    "B": lambda n: 2 * n * (n - 1),
    "C": lambda n: 2 * n,
    "D": lambda n: 2 * n * (n - 1),
    "E": lambda n: {6: 72, 7: 126, 8: 240}[n],
    "F": lambda n: 24,
    "G": lambda n: 6,
}


def long_root_count(lie_type: str, rank: int) -> int:
    return LONG_ROOTS[lie_type.upper()](rank)


# ------------------------------------------------------------ lattices


def _ambient(spec: AffineVoaSpec):
    """Block form sum k_i (,)_i on concatenated simple-root coordinates."""
    n = spec.rank
    g = [[Fraction(0)] * n for _ in range(n)]
    off = 0
    offsets = []
    for c in spec.components:
        rs = root_system(c.lie_type, c.rank)
        for i in range(c.rank):
            for j in range(c.rank):
                g[off + i][off + j] = c.level * rs.form[i][j]
        offsets.append(off)
        off += c.rank
    return g, offsets


def _floor_generators(spec: AffineVoaSpec, offsets) -> list[list[Fraction]]:
    gens = []
    for c, off in zip(spec.components, offsets):
        rs = root_system(c.lie_type, c.rank)
        for i in range(c.rank):
            v = [Fraction(0)] * spec.rank
            v[off + i] = 2 / rs.form[i][i]  # simple coroot
            gens.append(v)
    return gens


def _checked(lat: IntLattice, what: str) -> IntLattice:
    if not lat.is_even():
        raise VoaSpecError(f"{what} is odd")
    return lat


def affine_floor(spec: AffineVoaSpec) -> IntLattice:
    """The lattice sum of sqrt(k_i) times the long-root-normalised coroot lattices."""
    g, offsets = _ambient(spec)
    label = "+".join(
        (f"sqrt{c.level}" if c.level > 1 else "") + f"Q({c.lie_type}{c.rank})" for c in spec.components
    )
    return lattice_from_generators(RationalSpan(g, _floor_generators(spec, offsets)), label)


def coset_vector(spec: AffineVoaSpec, coset) -> list[Fraction]:
    _, offsets = _ambient(spec)
    v = [Fraction(0)] * spec.rank
    for c, off, w in zip(spec.components, offsets, coset):
        if w:
            lam = fundamental_weights(c.lie_type, c.rank)[w - 1]
            for i, x in enumerate(lam):
                v[off + i] = x
    return v


def maximal_lattice(spec: AffineVoaSpec) -> IntLattice:
    """Floor lattice glued with one vector sqrt(k_i) Lambda per coset."""
    g, offsets = _ambient(spec)
    gens = _floor_generators(spec, offsets)
    span = RationalSpan(g, [])
    for coset in spec.cosets:
        v = coset_vector(spec, coset)
        q = span.pairing(v, v) / 2
        if q.denominator != 1:
            raise VoaSpecError(f"coset {list(coset)} is not isotropic: q = {q}")
        gens.append(v)
    try:
        lat = lattice_from_generators(RationalSpan(g, gens))
    except NonIntegralError as e:
        raise VoaSpecError(f"cosets do not glue to an integral lattice: {e}") from None
    return _checked(lat, "glued lattice")


def norm2_longroot_counts(spec: AffineVoaSpec) -> tuple[int, int]:
    """(norm-2 vectors of the maximal lattice, long roots of the level-1 components)."""
    lat = maximal_lattice(spec)
    found = len(vectors_of_norm(lat, 2)) if lat.rank else 0
    expected = sum(long_root_count(c.lie_type, c.rank) for c in spec.components if c.level == 1)
    return found, expected


def norm2_longroot_check(spec: AffineVoaSpec) -> bool:
    found, expected = norm2_longroot_counts(spec)
    return found == expected


# extension indices [Aut L~ : G] that lattice data alone cannot determine
KNOWN_INDEX = {"E_{8,2}B_{8,1}": 1}


def vh_mass(lat: IntLattice, index: int = 1) -> Fraction:
    """Mass of the genus of lat weighted by the number of inequivalent extensions."""
    if index < 1:
        raise VoaSpecError("index must be a positive integer")
    return sms_mass(genus_symbol(lat)) * index


def mass_fix_check(enum: GenusEnumeration, index: int = 1) -> bool:
    """Whether an enumeration reproduces the genus mass class by class."""
    if index != 1:
        raise VoaSpecError("class-by-class comparison needs index 1")
    if not enum.complete:
        return False
    total = sum((Fraction(1, a) for _, a in enum.classes), Fraction(0))
    return total == enum.accumulated_mass == enum.target_mass


# ------------------------------------------------------------ the table


_COMPONENT = re.compile(r"\(?([A-G])_\{(\d+),(\d+)\}\)?(?:\^\{?(\d+)\}?)?")


@dataclass(frozen=True)
class HolTableEntry:
    rank: int
    symbol: str
    components: tuple[AffineComponent, ...] = field(default=())

    def spec(self) -> AffineVoaSpec:
        return AffineVoaSpec(self.components)


def parse_affine_symbol(text: str) -> tuple[AffineComponent, ...]:
    """Parse strings like "E_{8,2}B_{8,1}" or "(A_{2,1})^{12}"."""
    comps = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _COMPONENT.match(text, pos)
        if not m:
            raise VoaSpecError(f"cannot parse affine symbol at position {pos}: {text[pos:pos + 12]!r}")
        t, r, k, mult = m.group(1), int(m.group(2)), int(m.group(3)), int(m.group(4) or 1)
        comps.extend([AffineComponent(t, r, k)] * mult)
        pos = m.end()
    if not comps:
        raise VoaSpecError("empty affine symbol")
    return tuple(comps)


def load_hol_table(path: str | Path | None = None) -> list[HolTableEntry]:
    """Read a table of "<rank>\\t<symbol>" lines; the bundled one by default."""
    if path is None:
        text = resources.files("vhmass").joinpath("data/holomorphic_c24.tsv").read_text()
    else:
        text = Path(path).read_text()
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise VoaSpecError(f"line {lineno}: expected '<rank>\\t<symbol>'")
        try:
            rank = int(parts[0])
        except ValueError:
            raise VoaSpecError(f"line {lineno}: rank {parts[0]!r} is not an integer") from None
        try:
            comps = parse_affine_symbol(parts[1])
        except VoaSpecError as e:
            raise VoaSpecError(f"line {lineno}: {e}") from None
        out.append(HolTableEntry(rank, parts[1].strip(), comps))
    return out


def floor_of_entry(entry: HolTableEntry) -> IntLattice:
    return affine_floor(entry.spec())
