"""Polynomial sign atoms ``p in S`` for S a set of allowed signs of p.

The six relations are the nonempty proper subsets of {-1, 0, 1}:
``=`` {0}, ``!=`` {-1, 1}, ``<`` {-1}, ``<=`` {-1, 0}, ``>`` {1}, ``>=`` {0, 1}.
Polynomials are kept primitive with positive leading coefficient, so that
syntactically different atoms over the same polynomial can be merged.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Mapping

from ..arith import REAL
from ..formula import (
    And, Bottom, Eq, FALSE, Formula, Leq, Not, Or, TRUE, Top, Zero, nnf,
)
from ..poly import Poly
from ..terms import poly_to_term, term_to_poly

EQ = frozenset({0})
NE = frozenset({-1, 1})
LT = frozenset({-1})
LE = frozenset({-1, 0})
GT = frozenset({1})
GE = frozenset({0, 1})
ALL = frozenset({-1, 0, 1})

REL_TEXT = {EQ: "=", NE: "!=", LT: "<", LE: "<=", GT: ">", GE: ">="}


def flip(signs: FrozenSet[int]) -> FrozenSet[int]:
    return frozenset(-s for s in signs)


def sign(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class PAtom(Formula):
    poly: Poly
    signs: FrozenSet[int]

    def __str__(self):
        return f"{self.poly} {REL_TEXT.get(self.signs, self.signs)} 0"

    def holds(self, values: Mapping[str, Fraction]) -> bool:
        return sign(self.poly.evaluate(values)) in self.signs


def make_atom(p: Poly, signs: FrozenSet[int]) -> Formula:
    """Normalized atom, or TRUE/FALSE when the polynomial is constant."""
    signs = frozenset(signs)
    if not signs:
        return FALSE
    if signs == ALL:
        return TRUE
    if p.is_constant():
        return TRUE if sign(p.constant_value()) in signs else FALSE
    c, q = p.primitive()
    if c < 0:
        signs = flip(signs)
    if signs in (EQ, NE) and len(q.variables()) == 1 and q.degree() > 1:
        r = _squarefree_univariate(q)
        if r != q:
            return make_atom(r, signs)
    if len(q.terms) == 1:
        (mono,) = q.terms
        if len(mono) == 1 and mono[0][1] > 1:
            v, e = mono[0]
            if e % 2:
                return PAtom(Poly.var(v), signs)
            allowed = set()
            if 0 in signs:
                allowed.add(0)
            if 1 in signs:
                allowed |= {-1, 1}
            return make_atom(Poly.var(v), frozenset(allowed))
    return PAtom(q, signs)


def _squarefree_univariate(q: Poly) -> Poly:
    from .sturm import squarefree
    (v,) = q.variables()
    sf = squarefree([Fraction(x.constant_value()) for x in q.coeff_list(v)])
    x = Poly.var(v)
    out = Poly()
    for k, coef in enumerate(sf):
        if coef:
            out = out + (x ** k).scale(coef)
    return out


def negate(f: Formula) -> Formula:
    if isinstance(f, PAtom):
        return PAtom(f.poly, ALL - f.signs)
    if isinstance(f, Top):
        return FALSE
    if isinstance(f, Bottom):
        return TRUE
    if isinstance(f, And):
        return Or(tuple(negate(a) for a in f.args))
    if isinstance(f, Or):
        return And(tuple(negate(a) for a in f.args))
    raise TypeError(f"cannot negate {f!r}")


def from_scalar(f: Formula) -> Formula:
    """Quantifier-free real scalar formula -> formula over PAtoms (NNF)."""
    return _from(nnf(f))


def _from(f: Formula) -> Formula:
    if isinstance(f, (Top, Bottom)):
        return f
    if isinstance(f, Eq):
        return make_atom(term_to_poly(f.left, REAL) - term_to_poly(f.right, REAL), EQ)
    if isinstance(f, Leq):
        return make_atom(term_to_poly(f.left, REAL) - term_to_poly(f.right, REAL), LE)
    if isinstance(f, Not):
        inner = _from(f.arg)
        return negate(inner)
    if isinstance(f, And):
        return And(tuple(_from(a) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(_from(a) for a in f.args))
    raise TypeError(f"not a quantifier-free formula: {f!r}")


def atom_to_scalar(a: PAtom) -> Formula:
    t = poly_to_term(a.poly)
    z = Zero()
    s = a.signs
    if s == EQ:
        return Eq(t, z)
    if s == NE:
        return Not(Eq(t, z))
    if s == LE:
        return Leq(t, z)
    if s == GE:
        return Leq(z, t)
    if s == LT:
        return Not(Leq(z, t))
    if s == GT:
        return Not(Leq(t, z))
    raise ValueError(f"degenerate sign set {s}")


def to_scalar(f: Formula) -> Formula:
    if isinstance(f, PAtom):
        return atom_to_scalar(f)
    if isinstance(f, (Top, Bottom)):
        return f
    if isinstance(f, And):
        args = tuple(to_scalar(a) for a in f.args)
        return args[0] if len(args) == 1 else And(args) if args else TRUE
    if isinstance(f, Or):
        args = tuple(to_scalar(a) for a in f.args)
        return args[0] if len(args) == 1 else Or(args) if args else FALSE
    raise TypeError(f"not an internal formula: {f!r}")


def evaluate(f: Formula, values: Mapping[str, Fraction]) -> bool:
    if isinstance(f, PAtom):
        return f.holds(values)
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, And):
        return all(evaluate(a, values) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate(a, values) for a in f.args)
    raise TypeError(f"not an internal formula: {f!r}")


def variables(f: Formula) -> frozenset:
    if isinstance(f, PAtom):
        return f.poly.variables()
    if isinstance(f, (And, Or)):
        out = frozenset()
        for a in f.args:
            out |= variables(a)
        return out
    return frozenset()
