"""Exact decision of  exists x: phi(x)  for phi with rational parameters.

Used as an independent check on the eliminator.  Every polynomial of phi is
specialised to a univariate rational polynomial; real roots are isolated by
Sturm sequences, and phi is evaluated at every root and at one rational point
in every open cell between consecutive roots.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Mapping, Sequence, Tuple

from ..formula import Formula
from ..poly import Poly
from .atoms import PAtom, evaluate, sign
from .atoms import variables as atom_variables

UPoly = List[Fraction]  # coefficients, lowest degree first


def _trim(p: UPoly) -> UPoly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def u_eval(p: UPoly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def u_deriv(p: UPoly) -> UPoly:
    return _trim([k * p[k] for k in range(1, len(p))])


def u_mul(a: UPoly, b: UPoly) -> UPoly:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def u_divmod(a: UPoly, b: UPoly) -> Tuple[UPoly, UPoly]:
    a = _trim(a)
    b = _trim(b)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        c = a[-1] / b[-1]
        q[k] = c
        for i, bc in enumerate(b):
            a[i + k] -= c * bc
        a = _trim(a)
    return _trim(q), a


def u_gcd(a: UPoly, b: UPoly) -> UPoly:
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, u_divmod(a, b)[1]
    if not a:
        return a
    return [c / a[-1] for c in a]


def squarefree(p: UPoly) -> UPoly:
    g = u_gcd(p, u_deriv(p))
    return u_divmod(p, g)[0] if len(g) > 1 else _trim(p)


def sturm_chain(p: UPoly) -> List[UPoly]:
    chain = [_trim(p), u_deriv(p)]
    while chain[-1]:
        r = u_divmod(chain[-2], chain[-1])[1]
        chain.append([-c for c in r])
    return chain[:-1]


def _variations(chain, x: Fraction) -> int:
    signs = [sign(u_eval(q, x)) for q in chain]
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def root_bound(p: UPoly) -> Fraction:
    p = _trim(p)
    lead = abs(p[-1])
    return 1 + max((abs(c) / lead for c in p[:-1]), default=Fraction(0))


def isolate(p: UPoly) -> List[Tuple[Fraction, Fraction]]:
    """Disjoint intervals (a, b] each containing exactly one root of squarefree p."""
    p = squarefree(p)
    if len(p) <= 1:
        return []
    chain = sturm_chain(p)
    bound = root_bound(p)
    out = []
    stack = [(-bound, bound)]
    while stack:
        a, b = stack.pop()
        n = _variations(chain, a) - _variations(chain, b)
        if n == 0:
            continue
        if n == 1:
            out.append((a, b))
            continue
        m = (a + b) / 2
        stack.append((a, m))
        stack.append((m, b))
    return sorted(out)


class RealRoot:
    """A real root of a squarefree polynomial, known by an isolating interval."""

    def __init__(self, p: UPoly, a: Fraction, b: Fraction):
        self.p, self.a, self.b = p, a, b
        self.chain = sturm_chain(p)
        if u_eval(p, b) == 0:
            self.a = b

    def exact(self) -> bool:
        return self.a == self.b

    def refine(self):
        if self.exact():
            return
        m = (self.a + self.b) / 2
        if u_eval(self.p, m) == 0:
            self.a = self.b = m
        elif _variations(self.chain, self.a) - _variations(self.chain, m) == 1:
            self.b = m
        else:
            self.a = m

    def sign_of(self, q: UPoly) -> int:
        q = _trim(q)
        if not q:
            return 0
        if self.exact():
            return sign(u_eval(q, self.a))
        g = u_gcd(self.p, q)
        if len(g) > 1:
            ch = sturm_chain(squarefree(g))
            if _variations(ch, self.a) - _variations(ch, self.b) == 1:
                return 0
        qs = squarefree(q)
        qchain = sturm_chain(qs)
        while True:
            if self.exact():
                return sign(u_eval(q, self.a))
            if (_variations(qchain, self.a) - _variations(qchain, self.b) == 0
                    and u_eval(q, self.b) != 0):
                return sign(u_eval(q, self.b))
            self.refine()

    def upper(self) -> Fraction:
        return self.b

    def lower(self) -> Fraction:
        return self.a


def _to_upoly(p: Poly, var: str, params: Mapping[str, Fraction]) -> UPoly:
    cs = p.coeff_list(var)
    return _trim([Fraction(c.evaluate(params)) for c in cs])


def _atoms(f: Formula) -> List[PAtom]:
    if isinstance(f, PAtom):
        return [f]
    return [a for g in getattr(f, "args", ()) for a in _atoms(g)]


def _holds_signs(f: Formula, signs: Mapping[Poly, int]) -> bool:
    if isinstance(f, PAtom):
        return signs[f.poly] in f.signs
    name = type(f).__name__
    if name == "And":
        return all(_holds_signs(a, signs) for a in f.args)
    if name == "Or":
        return any(_holds_signs(a, signs) for a in f.args)
    return name == "Top"


def exists_holds(f: Formula, var: str, params: Mapping[str, Fraction]) -> bool:
    """Truth of  exists var: f  (f over PAtoms) at the given parameter values."""
    params = {k: Fraction(v) for k, v in params.items()}
    missing = atom_variables(f) - set(params) - {var}
    if missing:
        raise ValueError(f"unassigned parameters {sorted(missing)}")
    polys = list(dict.fromkeys(a.poly for a in _atoms(f)))
    ups = {p: _to_upoly(p, var, params) for p in polys}
    prod: UPoly = [Fraction(1)]
    for u in ups.values():
        if len(u) > 1:
            prod = u_mul(prod, u)
    prod = squarefree(prod)
    roots = [RealRoot(prod, a, b) for a, b in isolate(prod)] if len(prod) > 1 else []
    for r in roots:
        signs = {p: r.sign_of(u) for p, u in ups.items()}
        if _holds_signs(f, signs):
            return True
    for x in _gap_points(roots):
        if evaluate(f, {**params, var: x}):
            return True
    return False


def _gap_points(roots: Sequence[RealRoot]) -> List[Fraction]:
    """One rational point in each open cell cut out by the (distinct, sorted) roots."""
    if not roots:
        return [Fraction(0)]
    out = [roots[0].lower() - 1, roots[-1].upper() + 1]
    for r1, r2 in zip(roots, roots[1:]):
        while not r1.upper() < r2.lower():
            r1.refine()
            r2.refine()
        out.append((r1.upper() + r2.lower()) / 2)
    return out
