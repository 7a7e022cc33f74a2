"""Sparse multivariate polynomials with exact coefficients.

A monomial is a tuple of ``(variable, exponent)`` pairs sorted by variable
name; the constant monomial is ``()``.  Coefficients are ``Fraction`` or
``GaussRational``.  Polynomials are immutable and hashable.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Dict, Iterable, Mapping, Tuple

Monomial = Tuple[Tuple[str, int], ...]

ONE_MONO: Monomial = ()


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_key(m: Monomial):
    """Graded lexicographic key; larger sorts first in canonical output."""
    return (mono_degree(m), tuple((v, e) for v, e in m))


def _canon_key(m: Monomial):
    # graded, then lexicographic with earlier variable names ranking higher
    exps = tuple((_neg_str(v), e) for v, e in m)
    return (mono_degree(m), exps)


def _neg_str(s: str):
    return tuple(-ord(c) for c in s)


class Poly:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        clean: Dict[Monomial, object] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = c
        self.terms = clean
        self._hash = None

    # --- constructors ---------------------------------------------------
    @staticmethod
    def const(c) -> "Poly":
        if not isinstance(c, Fraction) and type(c).__name__ != "GaussRational":
            c = Fraction(c)
        return Poly({ONE_MONO: c})

    @staticmethod
    def var(name: str) -> "Poly":
        return Poly({((name, 1),): Fraction(1)})

    @staticmethod
    def zero() -> "Poly":
        return Poly()

    # --- arithmetic -------------------------------------------------------
    def __add__(self, other) -> "Poly":
        other = _lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            out[m] = c if s is None else s + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-_lift(other))

    def __rsub__(self, other) -> "Poly":
        return _lift(other) - self

    def __mul__(self, other) -> "Poly":
        other = _lift(other)
        if not self.terms or not other.terms:
            return Poly()
        out: Dict[Monomial, object] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                p = c1 * c2
                s = out.get(m)
                out[m] = p if s is None else s + p
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power")
        result = Poly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c) -> "Poly":
        return Poly({m: c * v for m, v in self.terms.items()})

    # --- comparison ------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Poly.const(other).terms if other else not self.terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # --- inspection -------------------------------------------------------
    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant_value(self):
        return self.terms.get(ONE_MONO, Fraction(0))

    def variables(self) -> frozenset:
        return frozenset(v for m in self.terms for v, _ in m)

    def degree(self, var: str | None = None) -> int:
        if not self.terms:
            return -1
        if var is None:
            return max(mono_degree(m) for m in self.terms)
        return max((dict(m).get(var, 0) for m in self.terms), default=0)

    def total_degree(self) -> int:
        return self.degree()

    def coeffs(self, var: str) -> Dict[int, "Poly"]:
        """Map exponent k -> coefficient polynomial of var^k."""
        parts: Dict[int, Dict[Monomial, object]] = {}
        for m, c in self.terms.items():
            k = 0
            rest = []
            for v, e in m:
                if v == var:
                    k = e
                else:
                    rest.append((v, e))
            parts.setdefault(k, {})[tuple(rest)] = c
        return {k: Poly(t) for k, t in parts.items()}

    def coeff_list(self, var: str) -> list:
        """Dense list [c_0, ..., c_d] of coefficient polynomials in var."""
        cs = self.coeffs(var)
        d = max(cs) if cs else 0
        return [cs.get(k, Poly()) for k in range(d + 1)]

    def exponent_gcd(self, var: str) -> int:
        g = 0
        for m in self.terms:
            g = gcd(g, dict(m).get(var, 0))
        return g

    # --- substitution / evaluation -------------------------------------
    def subs(self, mapping: Mapping[str, "Poly"]) -> "Poly":
        if not any(v in mapping for v in self.variables()):
            return self
        out = Poly()
        cache: Dict[Tuple[str, int], Poly] = {}
        for m, c in self.terms.items():
            term = Poly({(): c})
            keep = []
            for v, e in m:
                if v in mapping:
                    key = (v, e)
                    if key not in cache:
                        cache[key] = _lift(mapping[v]) ** e
                    term = term * cache[key]
                else:
                    keep.append((v, e))
            if keep:
                term = term * Poly({tuple(keep): Fraction(1)})
            out = out + term
        return out

    def rename(self, mapping: Mapping[str, str]) -> "Poly":
        out: Dict[Monomial, object] = {}
        for m, c in self.terms.items():
            d: Dict[str, int] = {}
            for v, e in m:
                w = mapping.get(v, v)
                d[w] = d.get(w, 0) + e
            mm = tuple(sorted(d.items()))
            s = out.get(mm)
            out[mm] = c if s is None else s + c
        return Poly(out)

    def evaluate(self, values: Mapping[str, object]):
        total = None
        for m, c in self.terms.items():
            t = c
            for v, e in m:
                t = t * values[v] ** e
            total = t if total is None else total + t
        return Fraction(0) if total is None else total

    def derivative(self, var: str) -> "Poly":
        out: Dict[Monomial, object] = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(var, 0)
            if not e:
                continue
            if e == 1:
                del d[var]
            else:
                d[var] = e - 1
            out[tuple(sorted(d.items()))] = c * e
        return Poly(out)

    # --- normalization -------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: _canon_key(mc[0]), reverse=True)

    def leading_coeff(self):
        items = self.sorted_terms()
        return items[0][1] if items else Fraction(0)

    def primitive(self) -> Tuple[Fraction, "Poly"]:
        """Return (c, p) with self = c * p, p having coprime integer
        coefficients and a positive leading coefficient (real coefficients only)."""
        if not self.terms:
            return Fraction(1), self
        cs = [Fraction(c) for c in self.terms.values()]
        den = reduce(lcm, (c.denominator for c in cs), 1)
        nums = [int(c * den) for c in cs]
        g = reduce(gcd, (abs(x) for x in nums), 0)
        c = Fraction(g, den)
        if self.leading_coeff() < 0:
            c = -c
        return c, Poly({m: Fraction(v) / c for m, v in self.terms.items()})

    def divide_exact(self, other: "Poly") -> "Poly | None":
        """Quotient q with self == q * other, or None if other does not divide self."""
        if not other.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        lm, lc = max(other.terms.items(), key=lambda mc: _canon_key(mc[0]))
        lead = dict(lm)
        rem = dict(self.terms)
        quot: Dict[Monomial, object] = {}
        while rem:
            m = max(rem, key=_canon_key)
            d = dict(m)
            if any(d.get(v, 0) < e for v, e in lead.items()):
                return None
            qm = tuple(sorted((v, e - lead.get(v, 0)) for v, e in d.items() if e != lead.get(v, 0)))
            qc = Fraction(rem[m]) / lc
            quot[qm] = qc
            for om, oc in other.terms.items():
                mm = mono_mul(qm, om)
                val = rem.get(mm, 0) - qc * oc
                if val == 0:
                    rem.pop(mm, None)
                else:
                    rem[mm] = val
        return Poly(quot)

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _lift(x) -> Poly:
    if isinstance(x, Poly):
        return x
    return Poly.const(x)


def poly_sum(items: Iterable[Poly]) -> Poly:
    out = Poly()
    for p in items:
        out = out + p
    return out
