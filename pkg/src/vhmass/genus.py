"""p-adic Jordan decompositions and Conway-Sloane genus symbols.

Symbols print as ``II_{n+,n-}(q^{sign}dim ...)``.  Only constituents of
scale q > 1 are printed; the unimodular part at every prime is recovered
from the rank and the determinant.  Odd (type I) 2-adic constituents carry
an ``_<oddity>`` suffix; after oddity fusion the whole compartment oddity
sits on its first constituent and the others show ``_0``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from sympy import factorint

from .lattice import IntLattice, LatticeError, DegenerateError, rank_of, signature


class SymbolParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True, order=True)
class Constituent:
    scale: int  # exponent of p
    dim: int
    det_class: int  # +1 / -1
    parity: str | None = None  # "even" / "odd" at p = 2, None for odd p
    oddity: int | None = None  # mod 8, p = 2 only

    @property
    def is_odd(self) -> bool:
        return self.parity == "odd"


@dataclass(frozen=True)
class LocalSymbol:
    prime: int
    constituents: tuple[Constituent, ...]

    def rank(self) -> int:
        return sum(c.dim for c in self.constituents)


@dataclass(frozen=True)
class GenusSymbol:
    signature: tuple[int, int]
    locals: tuple[LocalSymbol, ...]

    @property
    def rank(self) -> int:
        return self.signature[0] + self.signature[1]

    def local(self, p: int) -> LocalSymbol | None:
        return next((s for s in self.locals if s.prime == p), None)

    def is_even(self) -> bool:
        two = self.local(2)
        return all(not c.is_odd for c in two.constituents if c.scale == 0) if two else True

    def det(self) -> int:
        d = (-1) ** self.signature[1]
        for s in self.locals:
            d *= s.prime ** sum(c.scale * c.dim for c in s.constituents)
        return d

    def __str__(self) -> str:
        return format_symbol(self)


# ------------------------------------------------------------ valuations


def valuation(x, p: int) -> float | int:
    x = Fraction(x)
    if x == 0:
        return float("inf")
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def unit_part(x, p: int) -> Fraction:
    x = Fraction(x)
    v = valuation(x, p)
    return x / Fraction(p) ** v


def _unit_mod(x: Fraction, m: int) -> int:
    """A p-adic unit x = a/b reduced mod m (b invertible mod m)."""
    return x.numerator * pow(x.denominator, -1, m) % m


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def kronecker2(a: int) -> int:
    """The Kronecker symbol (a/2) for odd a."""
    return 1 if a % 8 in (1, 7) else -1


# ------------------------------------------------------------ Jordan


def jordan_blocks(gram, p: int) -> list[tuple[int, list[list[Fraction]]]]:
    """Split a nondegenerate Gram matrix over Z_p into blocks.

    Returns ``(scale_exponent, block)`` with 1x1 blocks, plus 2x2 blocks of
    even type when p = 2.  Arithmetic is exact; every denominator that
    appears is a p-adic unit.
    """
    a = [[Fraction(x) for x in row] for row in gram]
    n = len(a)
    if n and rank_of(a) < n:
        raise DegenerateError("lattice is degenerate", n - rank_of(a))
    idx = list(range(n))
    blocks = []

    def sub(rows):
        return [[a[i][j] for j in rows] for i in rows]

    while idx:
        vmin = min(valuation(a[i][j], p) for i in idx for j in idx)
        diag = [i for i in idx if valuation(a[i][i], p) == vmin]
        if diag:
            piv = [diag[0]]
        elif p != 2:
            i, j = next((i, j) for i in idx for j in idx if i < j and valuation(a[i][j], p) == vmin)
            # e_i <- e_i + e_j has diagonal of valuation vmin for odd p
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            piv = [i]
        else:
            i, j = next((i, j) for i in idx for j in idx if i < j and valuation(a[i][j], p) == vmin)
            piv = [i, j]
        rest = [k for k in idx if k not in piv]
        B = sub(piv)
        if len(piv) == 1:
            binv = [[1 / B[0][0]]]
        else:
            d = B[0][0] * B[1][1] - B[0][1] * B[1][0]
            binv = [[B[1][1] / d, -B[0][1] / d], [-B[1][0] / d, B[0][0] / d]]
        blocks.append((int(vmin), B))
        # Schur complement
        for r in rest:
            cr = [a[r][c] for c in piv]
            t = [sum(cr[k] * binv[k][l] for k in range(len(piv))) for l in range(len(piv))]
            for s in rest:
                if s < r:
                    continue
                corr = sum(t[l] * a[piv[l]][s] for l in range(len(piv)))
                a[r][s] -= corr
                if s != r:
                    a[s][r] = a[r][s]
        for r in rest:
            for c in piv:
                a[r][c] = a[c][r] = Fraction(0)
        idx = rest
    return blocks


def jordan_decomposition(lat: IntLattice, p: int) -> list[Constituent]:
    """Local constituents (one per scale, increasing) of L at p."""
    blocks = jordan_blocks(lat.gram, p)
    by_scale: dict[int, list] = {}
    for s, b in blocks:
        by_scale.setdefault(s, []).append(b)
    out = []
    for s in sorted(by_scale):
        bs = by_scale[s]
        dim = sum(len(b) for b in bs)
        if p == 2:
            unit = 1
            odd = False
            oddity = 0
            for b in bs:
                if len(b) == 1:
                    u = _unit_mod(b[0][0] / Fraction(2) ** s, 8)
                    odd = True
                    oddity += u
                    unit = unit * u % 8
                else:
                    d = (b[0][0] * b[1][1] - b[0][1] ** 2) / Fraction(4) ** s
                    unit = unit * _unit_mod(d, 8) % 8
            out.append(Constituent(s, dim, kronecker2(unit), "odd" if odd else "even", oddity % 8 if odd else 0))
        else:
            unit = 1
            for b in bs:
                unit = unit * _unit_mod(b[0][0] / Fraction(p) ** s, p) % p
            out.append(Constituent(s, dim, legendre(unit, p)))
    return out


# --------------------------------------------------- 2-adic canonical form


def _dense(cons: list[Constituent]) -> list[Constituent]:
    top = max(c.scale for c in cons)
    by = {c.scale: c for c in cons}
    return [by.get(s, Constituent(s, 0, 1, "even", 0)) for s in range(top + 1)]


def compartments(cons: list[Constituent]) -> list[list[int]]:
    """Maximal runs of consecutive-scale odd constituents (indices into ``cons``)."""
    out: list[list[int]] = []
    for i, c in enumerate(cons):
        if not c.is_odd:
            continue
        if out and out[-1][-1] == i - 1 and cons[i - 1].scale == c.scale - 1:
            out[-1].append(i)
        else:
            out.append([i])
    return out


def trains(cons: list[Constituent]) -> list[list[int]]:
    """Trains over the nonempty constituents.

    Two constituents at adjacent scales are linked when at least one is odd;
    an empty scale in between counts as even.
    """
    dense = _dense(cons)
    groups: list[list[int]] = [[0]]
    for s in range(1, len(dense)):
        if dense[s].is_odd or dense[s - 1].is_odd:
            groups[-1].append(s)
        else:
            groups.append([s])
    pos = {c.scale: i for i, c in enumerate(cons)}
    out = []
    for g in groups:
        members = [pos[s] for s in g if s in pos and cons[pos[s]].dim > 0]
        if members:
            out.append(members)
    return out


def canonical_2adic(cons: list[Constituent]) -> tuple[Constituent, ...]:
    """Oddity fusion followed by sign walking to the front of every train."""
    cons = [c for c in sorted(cons) if c.dim > 0]
    if not cons:
        return ()
    comps = compartments(cons)
    eps = [c.det_class for c in cons]
    odd = [c.oddity if c.is_odd else 0 for c in cons]
    for comp in comps:
        total = sum(odd[i] for i in comp) % 8
        for i in comp:
            odd[i] = 0
        odd[comp[0]] = total
    for train in trains(cons):
        for k in range(len(train) - 1, 0, -1):
            i, j = train[k - 1], train[k]
            if eps[j] == -1:
                eps[j] = 1
                eps[i] = -eps[i]
                touched = {tuple(c) for c in comps if i in c or j in c}
                for c in touched:
                    odd[c[0]] = (odd[c[0]] + 4) % 8
    return tuple(
        Constituent(c.scale, c.dim, eps[i], c.parity, odd[i] if c.is_odd else 0) for i, c in enumerate(cons)
    )


# ---------------------------------------------------------- genus symbol


def _primes(d: int) -> list[int]:
    return sorted(set(factorint(abs(d))) | {2})


def genus_symbol(lat: IntLattice) -> GenusSymbol:
    d = lat.det()
    if d == 0:
        raise DegenerateError("genus symbol of a degenerate lattice", lat.rank - rank_of(lat.gram))
    sig = signature(lat.gram)
    locs = []
    for p in _primes(d):
        cons = jordan_decomposition(lat, p) if lat.rank else []
        if p == 2:
            cons = list(canonical_2adic(cons))
        else:
            cons = [c for c in cons if c.dim > 0]
        locs.append(LocalSymbol(p, tuple(cons)))
    return GenusSymbol(sig, tuple(locs))


def same_genus(l1: IntLattice, l2: IntLattice) -> bool:
    return genus_symbol(l1) == genus_symbol(l2)


# ----------------------------------------------------- printing / parsing


def _sign(e: int) -> str:
    return "+" if e > 0 else "-"


def format_symbol(s: GenusSymbol) -> str:
    head = ("II" if s.is_even() else "I") + f"_{{{s.signature[0]},{s.signature[1]}}}"
    toks = []
    for loc in s.locals:
        for c in loc.constituents:
            if c.scale == 0 and not (loc.prime == 2 and c.is_odd):
                continue
            t = f"{loc.prime ** c.scale}^{_sign(c.det_class)}{c.dim}"
            if c.is_odd:
                t += f"_{c.oddity}"
            toks.append(t)
    return head + (f"({' '.join(toks)})" if toks else "")


_HEAD = re.compile(r"(II|I)_\{(\d+),(\d+)\}")
_TOK = re.compile(r"(\d+)\^([+-])(\d+)(?:_(\d+))?")


def _prime_power(q: int) -> tuple[int, int] | None:
    f = factorint(q)
    if len(f) != 1:
        return None
    (p, e), = f.items()
    return p, e


def parse_symbol(text: str) -> GenusSymbol:
    text = text.strip()
    m = _HEAD.match(text)
    if not m:
        raise SymbolParseError("expected II_{a,b} or I_{a,b}", 0)
    even = m.group(1) == "II"
    sig = (int(m.group(2)), int(m.group(3)))
    rank = sig[0] + sig[1]
    pos = m.end()
    by_p: dict[int, list[Constituent]] = {}
    if pos < len(text):
        if text[pos] != "(":
            raise SymbolParseError("expected '('", pos)
        if not text.endswith(")"):
            raise SymbolParseError("expected ')'", len(text))
        body = text[pos + 1:-1]
        off = pos + 1
        i = 0
        while i < len(body):
            if body[i] == " ":
                i += 1
                continue
            tm = _TOK.match(body, i)
            if not tm:
                raise SymbolParseError("malformed constituent", off + i)
            q = int(tm.group(1))
            pp = _prime_power(q) if q > 1 else (2, 0)
            if pp is None:
                raise SymbolParseError(f"{q} is not a prime power", off + i)
            p, e = pp
            if q == 1 and tm.group(4) is None:
                raise SymbolParseError("scale 1 constituent must be odd", off + i)
            eps = 1 if tm.group(2) == "+" else -1
            dim = int(tm.group(3))
            if tm.group(4) is not None:
                if p != 2:
                    raise SymbolParseError("oddity given at an odd prime", off + i)
                c = Constituent(e, dim, eps, "odd", int(tm.group(4)) % 8)
            else:
                c = Constituent(e, dim, eps, "even" if p == 2 else None, 0 if p == 2 else None)
            by_p.setdefault(p, []).append(c)
            i = tm.end()
    by_p.setdefault(2, [])
    det = (-1) ** sig[1]
    for p, cs in by_p.items():
        det *= p ** sum(c.scale * c.dim for c in cs)
    locs = []
    for p in sorted(by_p):
        cs = sorted(by_p[p])
        have_unimodular = any(c.scale == 0 for c in cs)
        rest = rank - sum(c.dim for c in cs)
        if rest < 0:
            raise SymbolParseError(f"dimensions at {p} exceed the rank", len(text))
        if not have_unimodular and rest > 0:
            u = det // p ** sum(c.scale * c.dim for c in cs)
            total = kronecker2(u) if p == 2 else legendre(u, p)
            e0 = total
            for c in cs:
                e0 *= c.det_class
            if p == 2:
                if not even:
                    raise SymbolParseError("odd symbol needs an explicit 1^..._t constituent", len(text))
                cs.insert(0, Constituent(0, rest, e0, "even", 0))
            else:
                cs.insert(0, Constituent(0, rest, e0))
        elif rest != 0:
            raise SymbolParseError(f"dimensions at {p} do not add up to the rank", len(text))
        if p == 2:
            cs = list(canonical_2adic(cs))
        locs.append(LocalSymbol(p, tuple(c for c in cs if c.dim > 0)))
    sym = GenusSymbol(sig, tuple(locs))
    problem = _nonexistence(sym)
    if problem:
        raise SymbolParseError(f"no lattice has this symbol: {problem}", len(text))
    return sym


def _nonexistence(sym: GenusSymbol) -> str | None:
    """Why no lattice can carry ``sym``, or None when the local data are consistent.

    Checks parity of even 2-adic constituents and odd compartments, the
    determinant class at each prime and the oddity formula.
    """
    det = sym.det()
    excess = 0
    oddity = 0
    for loc in sym.locals:
        p = loc.prime
        unit = det // p ** sum(c.scale * c.dim for c in loc.constituents)
        eps = 1
        for c in loc.constituents:
            eps *= c.det_class
        if eps != (kronecker2(unit) if p == 2 else legendre(unit, p)):
            return f"determinant classes at {p} do not match the determinant"
        if p == 2:
            for c in loc.constituents:
                if not c.is_odd and c.dim % 2:
                    return f"even 2-adic constituent 2^{c.scale} has odd dimension {c.dim}"
                oddity += c.oddity or 0
                if c.scale % 2 and c.det_class < 0:
                    oddity += 4
            for comp in compartments(list(loc.constituents)):
                if (sum(loc.constituents[i].dim for i in comp)
                        - sum(loc.constituents[i].oddity for i in comp)) % 2:
                    return "compartment oddity and dimension differ in parity"
        else:
            for c in loc.constituents:
                excess += c.dim * (p ** c.scale - 1)
                if c.scale % 2 and c.det_class < 0:
                    excess += 4
    if (sym.signature[0] - sym.signature[1] + excess - oddity) % 8:
        return "oddity formula fails"
    return None
