"""Virtual substitution for one existential variable of degree at most two.

Test points are -infinity, the (symbolic) roots of every atom polynomial, and
root + epsilon for roots of atoms whose relation excludes zero.  A root is
represented as (alpha + beta*sqrt(disc)) / gamma; substituting it into an
atom and clearing the (even power of the) denominator gives a condition on
A + B*sqrt(disc), which is expanded into plain polynomial sign conditions.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

from ..formula import And, FALSE, Formula, Or, TRUE
from ..poly import Poly
from .atoms import EQ, GE, GT, LT, NE, PAtom, make_atom


@dataclass(frozen=True)
class TestPoint:
    guard: Formula
    alpha: Poly
    beta: Poly
    disc: Poly
    gamma: Poly
    epsilon: bool = False


MINF = "-inf"


def _and(*fs: Formula) -> Formula:
    return And(tuple(fs))


def _or(*fs: Formula) -> Formula:
    return Or(tuple(fs))


def _clear(q: Poly, var: str, tp: TestPoint):
    """Return (A, B) with q(root) * gamma^e = A + B*sqrt(disc), e even >= deg q."""
    cs = q.coeff_list(var)
    d = len(cs) - 1
    e = d if d % 2 == 0 else d + 1
    a_sum, b_sum = Poly(), Poly()
    pk, qk = Poly.const(1), Poly()
    for k, c in enumerate(cs):
        if c:
            mult = c * tp.gamma ** (e - k)
            a_sum = a_sum + mult * pk
            if qk:
                b_sum = b_sum + mult * qk
        if k < d:
            pk, qk = (pk * tp.alpha + qk * tp.beta * tp.disc,
                      pk * tp.beta + qk * tp.alpha)
    return a_sum, b_sum


def _sign_class(a: Poly, b: Poly, disc: Poly, sigma: int) -> Formula:
    """sign(a + b*sqrt(disc)) == sigma, assuming disc >= 0."""
    if not b:
        return make_atom(a, frozenset({sigma}))
    norm = a * a - b * b * disc
    if sigma == 0:
        return _and(make_atom(a * b, frozenset({-1, 0})), make_atom(norm, EQ))
    if sigma == 1:
        a, b = -a, -b
    return _or(_and(make_atom(a, LT), make_atom(norm, GT)),
               _and(make_atom(b, LT), make_atom(norm, LT)),
               _and(make_atom(a, LT), make_atom(b, LT)))


def _at_point(q: Poly, var: str, tp: TestPoint, sigma: int) -> Formula:
    if var not in q.variables():
        return make_atom(q, frozenset({sigma}))
    a, b = _clear(q, var, tp)
    return _sign_class(a, b, tp.disc, sigma)


def _at_point_eps(q: Poly, var: str, tp: TestPoint, sigma: int) -> Formula:
    """sign(q(root + eps)) == sigma for infinitesimal eps > 0."""
    if sigma == 0:
        return _and(*(make_atom(c, EQ) for c in q.coeff_list(var)))
    parts = []
    prefix: List[Formula] = []
    deriv = q
    while deriv:
        parts.append(_and(*prefix, _at_point(deriv, var, tp, sigma)))
        prefix.append(_at_point(deriv, var, tp, 0))
        if var not in deriv.variables():
            break
        deriv = deriv.derivative(var)
    return _or(*parts)


def _at_minf(q: Poly, var: str, sigma: int) -> Formula:
    cs = q.coeff_list(var)
    if sigma == 0:
        return _and(*(make_atom(c, EQ) for c in cs))
    parts = []
    prefix: List[Formula] = []
    for k in range(len(cs) - 1, -1, -1):
        c = cs[k] if k % 2 == 0 else -cs[k]
        parts.append(_and(*prefix, make_atom(c, frozenset({sigma}))))
        prefix.append(make_atom(cs[k], EQ))
    return _or(*parts)


def substitute_atom(atom: PAtom, var: str, tp) -> Formula:
    classes = []
    for sigma in sorted(atom.signs):
        if tp == MINF:
            classes.append(_at_minf(atom.poly, var, sigma))
        elif tp.epsilon:
            classes.append(_at_point_eps(atom.poly, var, tp, sigma))
        else:
            classes.append(_at_point(atom.poly, var, tp, sigma))
    return _or(*classes)


def test_points(atoms: Sequence[PAtom], var: str) -> list:
    points = [MINF]
    seen = set()

    def add(tp: TestPoint):
        key = (tp.guard, tp.alpha, tp.beta, tp.disc, tp.gamma, tp.epsilon)
        if key not in seen:
            seen.add(key)
            points.append(tp)

    for atom in atoms:
        cs = atom.poly.coeff_list(var)
        eps = 0 not in atom.signs
        if len(cs) == 2:
            c0, c1 = cs
            add(TestPoint(make_atom(c1, NE), -c0, Poly(), Poly(), c1, eps))
        elif len(cs) == 3:
            c0, c1, c2 = cs
            disc = c1 * c1 - Poly.const(4) * c2 * c0
            for beta in (Poly.const(1), Poly.const(-1)):
                add(TestPoint(_and(make_atom(c2, NE), make_atom(disc, GE)),
                              -c1, beta, disc, Poly.const(2) * c2, eps))
            if not c2.is_constant():
                add(TestPoint(_and(make_atom(c2, EQ), make_atom(c1, NE)),
                              -c0, Poly(), Poly(), c1, eps))
        elif len(cs) > 3:
            raise ValueError(f"degree {len(cs) - 1} in {var} exceeds virtual substitution")
    return points


def eliminate(atoms: Sequence[PAtom], var: str) -> Formula:
    """Equivalent of  exists var: AND(atoms)  for atoms of degree <= 2 in var."""
    disjuncts = []
    for tp in test_points(atoms, var):
        subs = [substitute_atom(a, var, tp) for a in atoms]
        if tp == MINF:
            disjuncts.append(_and(*subs))
        else:
            disjuncts.append(_and(tp.guard, *subs))
    return _or(*disjuncts)
