"""Conversion between scalar terms and polynomials.

In complex mode the conjugate of a variable ``v`` is the independent
polynomial variable ``v*``; conjugating a polynomial conjugates its
coefficients and swaps ``v`` with ``v*``.
"""
from __future__ import annotations

from fractions import Fraction

from .arith import GaussRational, REAL
from .formula import Add, IntLit, Mul, One, Star, Term, Tr, Var, Zero, int_term
from .poly import Poly


class NotPolynomial(ValueError):
    """A term that has no polynomial reading in the scalar language."""


def conj_name(name: str) -> str:
    return name[:-1] if name.endswith("*") else name + "*"


def conj_poly(p: Poly) -> Poly:
    out = {}
    for m, c in p.terms.items():
        mm = tuple(sorted((conj_name(v), e) for v, e in m))
        out[mm] = c.conjugate() if isinstance(c, GaussRational) else c
    return Poly(out)


def term_to_poly(t: Term, mode: str = REAL) -> Poly:
    if isinstance(t, Var):
        return Poly.var(t.name)
    if isinstance(t, Zero):
        return Poly()
    if isinstance(t, One):
        return Poly.const(1)
    if isinstance(t, IntLit):
        return Poly.const(t.value)
    if isinstance(t, Add):
        return term_to_poly(t.left, mode) + term_to_poly(t.right, mode)
    if isinstance(t, Mul):
        return term_to_poly(t.left, mode) * term_to_poly(t.right, mode)
    if isinstance(t, Star):
        inner = term_to_poly(t.arg, mode)
        return inner if mode == REAL else conj_poly(inner)
    if isinstance(t, Tr):
        raise NotPolynomial("tr has no meaning in the scalar language")
    raise TypeError(f"not a term: {t!r}")


def _int_coeff(c) -> int:
    if isinstance(c, GaussRational):
        if c.im != 0:
            raise NotPolynomial(f"coefficient {c} is not real")
        c = c.re
    c = Fraction(c)
    if c.denominator != 1:
        raise NotPolynomial(f"coefficient {c} is not an integer")
    return int(c)


def _var_term(name: str) -> Term:
    if name.endswith("*"):
        return Star(Var(name[:-1]))
    return Var(name)


def _mono_term(m) -> Term:
    out = None
    for v, e in m:
        base = _var_term(v)
        for _ in range(e):
            out = base if out is None else Mul(out, base)
    return out


def poly_to_term(p: Poly) -> Term:
    """Canonical term for a polynomial with integer coefficients.

    Terms are summed in graded order; negative coefficients print as
    subtraction.
    """
    items = p.sorted_terms()
    if not items:
        return Zero()
    out = None
    for m, c in items:
        k = _int_coeff(c)
        mono = _mono_term(m)
        mag = abs(k)
        if mono is None:
            piece = int_term(mag)
        elif mag == 1:
            piece = mono
        else:
            piece = Mul(IntLit(mag), mono)
        if out is None:
            out = piece if k > 0 else (IntLit(k) if mono is None else Mul(IntLit(-1), piece))
        else:
            out = Add(out, piece) if k > 0 else Add(out, Mul(IntLit(-1), piece))
    return out
