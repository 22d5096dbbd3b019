"""Command-line entry point: ``vhmass <verb> [flags]``.

Exit status is 0 on success, 1 when the mathematics rejects the input and
2 when the invocation itself is malformed.  Failures print one line to
stderr of the form ``<kind>: <message>``.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction

from .cocycle import build_cocycle, verify_cocycle
from .enumeration import enumerate_genus
from .genus import format_symbol, genus_symbol, parse_symbol
from .gradedchar import lattice_voa_dims
from .isometry import aut_order, is_isometric
from .lattice import (
    IntLattice,
    RationalSpan,
    d_plus,
    direct_sum,
    hyperbolic_plane,
    long_root_lattice,
    rescale,
)
from .mass import sms_mass
from .voa import AffineVoaSpec, load_hol_table, maximal_lattice, vh_mass

VERBS = ("construct", "symbol", "mass", "aut", "isom", "enumerate", "cocycle",
         "voa-maxlat", "voa-mass", "char", "table")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ------------------------------------------------------------- shorthands


class _NameParser:
    """Sums of terms such as E8, D16+, sqrt2E8, sqrt2(E8+D4), E8^2, II1,1, Z."""

    def __init__(self, text: str):
        self.text = text.replace(" ", "")
        self.pos = 0

    def fail(self, what):
        raise UsageError(f"bad lattice name {self.text!r} at position {self.pos}: {what}")

    def peek(self, k=0):
        i = self.pos + k
        return self.text[i] if i < len(self.text) else ""

    def parse(self) -> IntLattice:
        lat = self.sum()
        if self.pos != len(self.text):
            self.fail("unexpected trailing text")
        return lat

    def sum(self) -> IntLattice:
        terms = [self.term()]
        while self.peek() == "+":
            self.pos += 1
            terms.append(self.term())
        return direct_sum(*terms) if len(terms) > 1 else terms[0]

    def number(self) -> int:
        m = re.compile(r"\d+").match(self.text, self.pos)
        if not m:
            self.fail("expected a number")
        self.pos = m.end()
        return int(m.group())

    def term(self) -> IntLattice:
        scale = 1
        if self.text.startswith("sqrt", self.pos):
            self.pos += 4
            scale = self.number()
        lat = self.atom()
        if self.peek() == "^":
            self.pos += 1
            lat = direct_sum(*[lat] * self.number())
        return rescale(lat, scale) if scale != 1 else lat

    def atom(self) -> IntLattice:
        c = self.peek()
        if c == "(":
            self.pos += 1
            lat = self.sum()
            if self.peek() != ")":
                self.fail("expected ')'")
            self.pos += 1
            return lat
        if self.text.startswith("II1,1", self.pos):
            self.pos += 5
            return hyperbolic_plane()
        if c == "Z":
            self.pos += 1
            return IntLattice([[1]], "Z")
        if c and c in "ABCDEFG":
            self.pos += 1
            n = self.number()
            # a trailing '+' not followed by another term is the D_n^+ glue
            if c == "D" and self.peek() == "+" and not re.match(r"[A-GIZs(]", self.peek(1)):
                self.pos += 1
                return d_plus(n)
            return long_root_lattice(c, n)
        self.fail("expected a lattice name")


def lattice_by_name(name: str) -> IntLattice:
    lat = _NameParser(name).parse()
    return IntLattice(lat.gram, name)


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"malformed JSON in {path}: {e}") from None


def _lattice_from_file(path: str) -> IntLattice:
    data = _read_json(path)
    return IntLattice.from_json(json.dumps(data))


def _lattices(args) -> list[IntLattice]:
    out = [_lattice_from_file(p) for p in args.lattice or []]
    out += [lattice_by_name(n) for n in args.name or []]
    return out


def _one_lattice(args) -> IntLattice:
    lats = _lattices(args)
    if len(lats) != 1:
        raise UsageError(f"{args.verb} needs exactly one of --lattice or --name")
    return lats[0]


def _spec(args) -> AffineVoaSpec:
    if not args.spec:
        raise UsageError(f"{args.verb} needs --spec")
    data = _read_json(args.spec)
    if not isinstance(data, dict):
        raise UsageError("spec JSON must be an object")
    return AffineVoaSpec.from_json(data)


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _lattice_json(lat: IntLattice) -> str:
    return json.dumps({"label": lat.label, "gram": lat.matrix()})


# ------------------------------------------------------------------ verbs


def _construct(args, out):
    out.append(_lattice_json(_one_lattice(args)))


def _symbol(args, out):
    out.append(format_symbol(genus_symbol(_one_lattice(args))))


def _mass(args, out):
    if args.symbol:
        sym = parse_symbol(args.symbol)
    else:
        sym = genus_symbol(_one_lattice(args))
    out.append(_frac(sms_mass(sym)))


def _aut(args, out):
    out.append(str(aut_order(_one_lattice(args)).order))


def _isom(args, out):
    lats = _lattices(args)
    if len(lats) != 2:
        raise UsageError("isom needs two lattices (repeat --lattice/--name)")
    w = is_isometric(lats[0], lats[1], budget=args.budget)
    out.append(json.dumps({"isometric": bool(w), "transform": w.matrix}))


def _enumerate(args, out):
    lat = _one_lattice(args)
    kw = {"workers": args.workers}
    if args.budget is not None:
        kw["budget"] = args.budget
    res = enumerate_genus(lat, **kw)
    items = [
        {"label": f"{lat.label or 'class'}#{i + 1}", "gram": cls.matrix(), "aut_order": order}
        for i, (cls, order) in enumerate(res.classes)
    ]
    items.append({"mass": _frac(res.accumulated_mass), "complete": res.complete})
    out.append(json.dumps(items))


def _cocycle(args, out):
    if args.lattice and len(args.lattice) == 1 and not args.name:
        data = _read_json(args.lattice[0])
        if not isinstance(data, dict) or "gram" not in data:
            raise UsageError("cocycle input must be a JSON object with a 'gram' key")
        gram = data["gram"]
        gens = data.get("generators") or [[int(i == j) for j in range(len(gram))] for i in range(len(gram))]
        span = RationalSpan(gram, [[Fraction(x) for x in g] for g in gens])
    else:
        lat = _one_lattice(args)
        span = RationalSpan(lat.gram, [[int(i == j) for j in range(lat.rank)] for i in range(lat.rank)])
    c = build_cocycle(span)
    for row in c.bits:
        out.append(" ".join(str(b) for b in row))
    bad = verify_cocycle(c)
    if bad:
        raise ValueError(f"{len(bad)} cocycle identity violations, first: {bad[0]}")
    out.append("verified")


def _voa_maxlat(args, out):
    out.append(_lattice_json(maximal_lattice(_spec(args))))


def _voa_mass(args, out):
    spec = _spec(args)
    out.append(_frac(vh_mass(maximal_lattice(spec), spec.index)))


def _char(args, out):
    dims = lattice_voa_dims(_one_lattice(args), args.nmax)
    out.extend(str(d) for d in dims.by_degree)


def _table(args, out):
    for e in load_hol_table(args.table_file):
        out.append(f"{e.rank}\t{e.symbol}")


HANDLERS = {
    "construct": _construct, "symbol": _symbol, "mass": _mass, "aut": _aut, "isom": _isom,
    "enumerate": _enumerate, "cocycle": _cocycle, "voa-maxlat": _voa_maxlat,
    "voa-mass": _voa_mass, "char": _char, "table": _table,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vhmass", description="Lattice genera, masses and VOA maximal lattices.")
    p.add_argument("verb", choices=VERBS)
    p.add_argument("--lattice", action="append", help="lattice JSON file {label, gram}; repeatable")
    p.add_argument("--name", action="append", help="lattice shorthand such as E8 or sqrt2E8+D8; repeatable")
    p.add_argument("--symbol", help="genus symbol text")
    p.add_argument("--spec", help="affine VOA spec JSON file")
    p.add_argument("--table-file", dest="table_file", help="holomorphic table file (default: bundled)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--budget", type=int)
    p.add_argument("--nmax", type=int, default=4)
    return p


def main(argv=None) -> int:
    out: list[str] = []
    try:
        args = build_parser().parse_args(argv)
        if args.workers < 1:
            raise UsageError("--workers must be at least 1")
        if args.nmax < 0:
            raise UsageError("--nmax must be non-negative")
        HANDLERS[args.verb](args, out)
    except UsageError as e:
        print(f"usage-error: {e}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, AssertionError) as e:
        msg = str(e).replace("\n", " ")
        print(f"domain-error: {type(e).__name__}: {msg}", file=sys.stderr)
        return 1
    for line in out:
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
