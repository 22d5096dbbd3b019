"""Exact Smith-Minkowski-Siegel masses of positive-definite genera.

The mass is a standard mass (Gamma values, even zeta values and one
quadratic L-value) times a local correction for every prime dividing
2*det.  Powers of pi and square roots are carried symbolically in
:class:`_Exact` and must cancel; the result is a :class:`fractions.Fraction`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from sympy import factorint

from .genus import Constituent, GenusSymbol, LocalSymbol, legendre


class MassError(ValueError):
    pass


MassValue = Fraction


# ---------------------------------------------------------------- Bernoulli


@lru_cache(maxsize=None)
def _bernoulli_table(k: int) -> tuple[Fraction, ...]:
    b = [Fraction(1)]
    for m in range(1, k + 1):
        b.append(-sum(comb(m + 1, j) * b[j] for j in range(m)) / (m + 1))
    return tuple(b)


def bernoulli(k: int) -> Fraction:
    """B_k with B_1 = -1/2."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return _bernoulli_table(k)[k]


def bernoulli_poly(k: int, x: Fraction) -> Fraction:
    return sum(comb(k, j) * bernoulli(j) * x ** (k - j) for j in range(k + 1))


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol (d/n) for n >= 1."""
    if n == 1:
        return 1
    res = 1
    for p, e in factorint(n).items():
        if p == 2:
            if d % 2 == 0:
                return 0
            c = 1 if d % 8 in (1, 7) else -1
        else:
            c = legendre(d, p)
            if c == 0:
                return 0
        res *= c ** e
    return res


def fundamental_discriminant(d: int) -> int:
    """Discriminant of Q(sqrt d); 1 when d is a square."""
    sign = -1 if d < 0 else 1
    core = sign
    for p, e in factorint(abs(d)).items():
        if e % 2:
            core *= p
    if core == 1:
        return 1
    return core if core % 4 == 1 else 4 * core


def character_bernoulli(k: int, disc: int) -> Fraction:
    """Generalized Bernoulli number B_{k,chi} for chi = (disc/.) primitive."""
    f = abs(disc)
    if f == 1:
        return bernoulli(k) if k != 1 else Fraction(1, 2)
    return Fraction(f) ** (k - 1) * sum(
        kronecker(disc, a) * bernoulli_poly(k, Fraction(a, f)) for a in range(1, f + 1)
    )


# ------------------------------------------------- exact pi/sqrt arithmetic


@dataclass
class _Exact:
    """coef * pi^pi_exp * prod(p^e) with half-integral e folded to {0, 1/2}."""

    coef: Fraction = Fraction(1)
    pi_exp: Fraction = Fraction(0)
    roots: dict = field(default_factory=dict)

    def __mul__(self, other):
        if not isinstance(other, _Exact):
            other = _Exact(Fraction(other))
        out = _Exact(self.coef * other.coef, self.pi_exp + other.pi_exp, dict(self.roots))
        for p, e in other.roots.items():
            out.roots[p] = out.roots.get(p, 0) + e
        for p in list(out.roots):
            if out.roots[p] == 1:
                out.coef *= p
                del out.roots[p]
        return out

    __rmul__ = __mul__

    @staticmethod
    def power(base: int, exp: Fraction) -> "_Exact":
        """base^exp for a positive integer base and half-integral exp."""
        twice = Fraction(exp) * 2
        if twice.denominator != 1:
            raise MassError("only half-integral exponents are supported")
        twice = int(twice)
        out = _Exact(Fraction(base) ** (twice // 2))
        if twice % 2:
            for p, e in factorint(base).items():
                out = out * Fraction(p) ** (e // 2)
                if e % 2:
                    out = out * _Exact(roots={p: Fraction(1, 2)})
        return out

    def rational(self) -> Fraction:
        if self.pi_exp != 0 or self.roots:
            raise MassError(f"mass did not reduce to a rational: {self}")
        return self.coef


def _gamma_half(j: int) -> _Exact:
    """Gamma(j/2)."""
    if j % 2 == 0:
        return _Exact(Fraction(factorial(j // 2 - 1)))
    k = (j - 1) // 2
    return _Exact(Fraction(factorial(2 * k), 4 ** k * factorial(k)), Fraction(1, 2))


def _zeta_even(k: int) -> _Exact:
    return _Exact(abs(bernoulli(k)) * 2 ** k / (2 * factorial(k)), Fraction(k))


def _l_value(s: int, disc: int) -> _Exact:
    """L(s, chi_disc) for s >= 1 with chi(-1) = (-1)^s."""
    f = abs(disc)
    delta = 0 if disc > 0 else 1
    if (s - delta) % 2:
        raise MassError("character parity does not match s")
    sign = (-1) ** (1 + (s - delta) // 2)
    coef = Fraction(sign, 2) * Fraction(2) ** s / Fraction(f) ** s * character_bernoulli(s, disc) / factorial(s)
    return _Exact(coef, Fraction(s)) * _Exact.power(f, Fraction(1, 2))


# ------------------------------------------------------------ local factors


def _diag_factor(species: int, sign: int, p: int) -> Fraction:
    if species == 0:
        return Fraction(1)
    q = Fraction(1, p)
    if species % 2:
        prod = Fraction(1)
        for i in range(1, (species - 1) // 2 + 1):
            prod *= 1 - q ** (2 * i)
        return 1 / (2 * prod)
    prod = Fraction(1)
    for i in range(1, species // 2):
        prod *= 1 - q ** (2 * i)
    return 1 / (2 * prod * (1 - sign * q ** (species // 2)))


def _octane(c: Constituent) -> int:
    base = 0 if c.det_class == 1 else 4
    return (base + (c.oddity if c.is_odd else 0)) % 8


def _species_2(c: Constituent, bound: bool) -> tuple[int, int]:
    n = c.dim
    if not c.is_odd:
        if bound:
            return n + 1, 0
        return n, c.det_class
    if bound:
        return (n, 0) if n % 2 else (n - 1, 0)
    o = _octane(c)
    if n % 2:
        return n - 1, (1 if o in (0, 1, 7) else -1)
    if o in (2, 6):
        return n - 1, 0
    return n - 2, (1 if o == 0 else -1)


def _cross(loc: LocalSymbol) -> _Exact:
    out = _Exact()
    cs = loc.constituents
    for i, a in enumerate(cs):
        for b in cs[i + 1:]:
            out = out * _Exact.power(loc.prime, Fraction((b.scale - a.scale) * a.dim * b.dim, 2))
    return out


def local_mass(loc: LocalSymbol) -> _Exact:
    """Local factor m_p of one prime."""
    p = loc.prime
    out = _cross(loc)
    if p != 2:
        for c in loc.constituents:
            sign = c.det_class * legendre(-1, p) ** (c.dim // 2) if c.dim % 2 == 0 else 0
            out = out * _diag_factor(c.dim, sign, p)
        return out
    by = {c.scale: c for c in loc.constituents if c.dim > 0}
    if not by:
        return out
    odd = lambda s: s in by and by[s].is_odd  # noqa: E731
    n_even = 0
    n_odd_pairs = 0
    # empty scales count as even forms, including the one just below scale 1
    for s in range(min(by) - 1, max(by) + 2):
        c = by.get(s, Constituent(s, 0, 1, "even", 0))
        S, sign = _species_2(c, odd(s - 1) or odd(s + 1))
        out = out * _diag_factor(S, sign, 2)
        if not c.is_odd:
            n_even += c.dim
        if odd(s) and odd(s + 1):
            n_odd_pairs += 1
    return out * Fraction(2) ** (n_odd_pairs - n_even)


def _std_local(n: int, p: int) -> Fraction:
    s = (n + 1) // 2
    prod = Fraction(1)
    for i in range(1, s):
        prod *= 1 - Fraction(1, p ** (2 * i))
    return 2 * prod


def sms_mass(symbol: GenusSymbol) -> MassValue:
    n_plus, n_minus = symbol.signature
    if n_minus:
        raise MassError("mass is only defined here for positive-definite genera")
    n = n_plus
    if n == 0:
        raise MassError("rank-0 genus has no mass convention")
    if n == 1:
        return Fraction(1, 2)
    s = (n + 1) // 2
    det = symbol.det()
    primes = [loc.prime for loc in symbol.locals]
    value = _Exact(Fraction(2), Fraction(-n * (n + 1), 4))
    for j in range(1, n + 1):
        value = value * _gamma_half(j)
    for i in range(1, s):
        value = value * _zeta_even(2 * i)
    if n % 2 == 0:
        disc = fundamental_discriminant((-1) ** s * det)
        value = value * _l_value(s, disc)
        for p in primes:
            value = value * (1 - kronecker(disc, p) * Fraction(1, p ** s))
    for loc in symbol.locals:
        value = value * local_mass(loc) * _std_local(n, loc.prime)
    return value.rational()


def lattice_mass(lat) -> MassValue:
    from .genus import genus_symbol

    return sms_mass(genus_symbol(lat))
