"""Quantifier elimination for real scalar formulas.

Blocks are eliminated innermost first; a universal block is handled as the
negation of an existential one.  Each existential block is processed per DNF
branch and per variable, trying equational substitution, then virtual
substitution, then the sign-matrix procedure.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from ..formula import (
    And, Bottom, Exists, Forall, Formula, Or, TRUE, Top, free_vars, is_quantifier_free,
    prenex, split_prefix,
)
from ..poly import Poly
from ..terms import NotPolynomial
from . import cohen_hormander, vs
from .atoms import EQ, GE, NE, PAtom, from_scalar, make_atom, negate, to_scalar
from .atoms import variables as atom_vars
from .simplify import TooLarge, dnf, fkey, from_dnf, simplify_internal

BACKENDS = ("auto", "linear", "virtual-substitution", "generic")


class CapacityExceeded(RuntimeError):
    def __init__(self, message: str, variable: Optional[str] = None, degree: Optional[int] = None):
        super().__init__(message)
        self.variable = variable
        self.degree = degree


class Unsupported(ValueError):
    pass


@dataclass(frozen=True)
class QERequest:
    formula: Formula
    backend: str = "auto"
    max_degree: int = 8
    max_atoms: int = 512
    time_budget_ms: int = 60_000


@dataclass
class QEResult:
    formula: Formula
    diagnostics: Dict = field(default_factory=dict)


class _Engine:
    def __init__(self, req: QERequest):
        if req.backend not in BACKENDS:
            raise ValueError(f"unknown backend {req.backend!r}")
        self.req = req
        self.log: List[Dict] = []

    # -- capacity checks --------------------------------------------------
    def _check_atoms(self, atoms: Sequence[PAtom], var: str):
        if len(atoms) > self.req.max_atoms:
            raise CapacityExceeded(
                f"{len(atoms)} atoms in a branch exceed the cap of {self.req.max_atoms} "
                f"while eliminating {var}", var, None)
        for a in atoms:
            d = a.poly.degree(var)
            if d > self.req.max_degree:
                raise CapacityExceeded(
                    f"degree {d} in {var} exceeds the cap of {self.req.max_degree}", var, d)

    def _dnf(self, f: Formula, var: str) -> List[List[PAtom]]:
        try:
            return dnf(f, max_branches=200_000, max_atoms=self.req.max_atoms)
        except TooLarge as exc:
            raise CapacityExceeded(f"{exc} while eliminating {var}", var, None) from exc

    # -- blocks -----------------------------------------------------------
    def exists(self, f: Formula, names: Sequence[str]) -> Formula:
        names = [v for v in names if v in atom_vars(f)]
        if not names:
            return f
        out = []
        for branch in self._dnf(f, names[0]):
            out.append(self.exists_conj(branch, names))
        return simplify_internal(Or(tuple(out)) if out else Bottom())

    def exists_conj(self, atoms: List[PAtom], names: Sequence[str]) -> Formula:
        names = [v for v in names if any(v in a.poly.variables() for a in atoms)]
        if not names:
            return And(tuple(atoms)) if atoms else TRUE
        inner = [a for a in atoms if a.poly.variables() & set(names)]
        outer = [a for a in atoms if not a.poly.variables() & set(names)]
        var = self.choose(inner, names)
        rest = [v for v in names if v != var]
        g = self.eliminate(inner, var)
        if rest:
            g = self.exists(g, rest)
        return simplify_internal(And(tuple(outer) + (g,)))

    def choose(self, atoms: Sequence[PAtom], names: Sequence[str]) -> str:
        def rank(v):
            g = _gcd_exp(atoms, v)
            lin_const = lin_param = False
            eqs = 0
            maxdeg = 0
            for a in atoms:
                d = a.poly.degree(v)
                if d == 0:
                    continue
                maxdeg = max(maxdeg, d // g)
                if a.signs == EQ:
                    eqs += 1
                    if d == g:
                        head = a.poly.coeff_list(v)[-1]
                        if head.is_constant():
                            lin_const = True
                        else:
                            lin_param = True
            if lin_const:
                cls = 0
            elif lin_param:
                cls = 1
            elif maxdeg <= 2:
                cls = 2
            else:
                cls = 3
            return (cls, maxdeg, -eqs, v)

        return min(names, key=rank)

    # -- one variable -----------------------------------------------------
    def eliminate(self, atoms: List[PAtom], var: str) -> Formula:
        start = time.monotonic()
        self._check_atoms(atoms, var)
        g = _gcd_exp(atoms, var)
        extra: List[Formula] = []
        if g > 1:
            atoms = [_reduce_exp(a, var, g) for a in atoms]
            if g % 2 == 0:
                extra.append(make_atom(Poly.var(var), GE))
        work = simplify_internal(And(tuple(atoms) + tuple(extra)))
        method, result = self._eliminate_formula(work, var, depth=0)
        self.log.append({
            "variable": var,
            "backend": method,
            "atoms_before": len(atoms),
            "atoms_after": _count_atoms(result),
            "elapsed_ms": round((time.monotonic() - start) * 1000, 3),
        })
        return result

    def _eliminate_formula(self, f: Formula, var: str, depth: int):
        """Eliminate var from a conjunction (possibly after case splits)."""
        if isinstance(f, Bottom):
            return "trivial", f
        if var not in atom_vars(f):
            return "trivial", f
        if isinstance(f, Or):
            methods, parts = [], []
            for a in f.args:
                m, r = self._eliminate_formula(a, var, depth)
                methods.append(m)
                parts.append(r)
            return _merge_methods(methods), simplify_internal(Or(tuple(parts)))
        atoms = _conj_atoms(f)
        if atoms is None:
            methods, parts = [], []
            for br in self._dnf(f, var):
                m, r = self._eliminate_formula(And(tuple(br)) if br else TRUE, var, depth)
                methods.append(m)
                parts.append(r)
            return _merge_methods(methods), simplify_internal(Or(tuple(parts)))
        inner = [a for a in atoms if var in a.poly.variables()]
        outer = [a for a in atoms if var not in a.poly.variables()]
        backend = self.req.backend
        if backend != "generic":
            sol = _linear_equation(inner, var)
            if sol is not None and depth < 256:
                m, r = self._substitute_equation(inner, sol, var, depth)
                return m, simplify_internal(And(tuple(outer) + (r,)))
        if backend in ("auto", "virtual-substitution") and depth < 256:
            red = self._reduce_by_equation(inner, var, depth)
            if red is not None:
                m, r = red
                return m, simplify_internal(And(tuple(outer) + (r,)))
        maxdeg = max(a.poly.degree(var) for a in inner)
        if backend in ("auto", "virtual-substitution", "linear") and maxdeg <= 2:
            if backend == "linear" and maxdeg > 1:
                raise CapacityExceeded(
                    f"degree {maxdeg} in {var} needs more than the linear backend", var, maxdeg)
            r = vs.eliminate(inner, var)
            return "virtual-substitution", simplify_internal(And(tuple(outer) + (r,)))
        if backend in ("linear", "virtual-substitution"):
            raise CapacityExceeded(
                f"degree {maxdeg} in {var} is beyond the {backend} backend", var, maxdeg)
        deadline = cohen_hormander.Deadline(self.req.time_budget_ms / 1000.0)
        body = And(tuple(inner))
        try:
            r = _deep(lambda: cohen_hormander.eliminate(body, inner, var, deadline))
        except TimeoutError as exc:
            raise CapacityExceeded(
                f"time budget of {self.req.time_budget_ms} ms exhausted eliminating {var} "
                f"(degree {maxdeg})", var, maxdeg) from exc
        return "sign-matrix", simplify_internal(And(tuple(outer) + (r,)))

    def _reduce_by_equation(self, inner: List[PAtom], var: str, depth: int):
        """Reduce the other atoms modulo the lowest-degree equation in var.

        At a root of p (with nonzero head) the sign of q equals the sign of
        its pseudo-remainder, adjusted by an even power of the head.  Returns
        None when nothing would change.
        """
        eqs = [a for a in inner if a.signs == EQ and a.poly.degree(var) >= 2]
        if not eqs:
            return None
        p = min(eqs, key=lambda a: (a.poly.degree(var),
                                    not a.poly.coeff_list(var)[-1].is_constant(), fkey(a)))
        dp = p.poly.degree(var)
        if not any(a is not p and a.poly.degree(var) >= dp for a in inner):
            return None
        head = p.poly.coeff_list(var)[-1]
        reduced = [p]
        for a in inner:
            if a is p:
                continue
            if a.poly.degree(var) < dp:
                reduced.append(a)
                continue
            r = _prem_even(a.poly, p.poly, var, head)
            reduced.append(make_atom(r, a.signs))
        main = simplify_internal(And(tuple(reduced)))
        if head.is_constant():
            m, r = self._eliminate_formula(main, var, depth + 1)
            return _merge_methods(["reduction", m]), r
        xpow = Poly.var(var) ** dp
        beheaded = make_atom(p.poly - head * xpow, EQ)
        rest = [a for a in inner if a is not p]
        degenerate = simplify_internal(And((make_atom(head, EQ), beheaded) + tuple(rest)))
        m1, r1 = self._eliminate_formula(simplify_internal(And((make_atom(head, NE), main))),
                                         var, depth + 1)
        m2, r2 = self._eliminate_formula(degenerate, var, depth + 1)
        return _merge_methods(["reduction", m1, m2]), simplify_internal(Or((r1, r2)))

    def _substitute_equation(self, inner: List[PAtom], eq: PAtom, var: str, depth: int):
        tail, head = eq.poly.coeff_list(var)
        others = [a for a in inner if a is not eq]
        tp = vs.TestPoint(TRUE, -tail, Poly(), Poly(), head)
        subbed = []
        for a in others:
            if var in a.poly.variables():
                A, _ = vs._clear(a.poly, var, tp)
                subbed.append(make_atom(A, a.signs))
            else:
                subbed.append(a)
        if head.is_constant():
            return "equational", simplify_internal(And(tuple(subbed)))
        main = And((make_atom(head, NE),) + tuple(subbed))
        degenerate = And((make_atom(head, EQ), make_atom(tail, EQ)) + tuple(others))
        m, r = self._eliminate_formula(simplify_internal(degenerate), var, depth + 1)
        return _merge_methods(["equational", m]), simplify_internal(Or((main, r)))

    # -- driver -----------------------------------------------------------
    def run(self, f: Formula) -> Formula:
        prefix, matrix = split_prefix(prenex(f))
        body = from_scalar(matrix)
        for a in _iter_atoms(body):
            d = a.poly.degree()
            if d > self.req.max_degree:
                worst = max(a.poly.variables(), key=lambda v: a.poly.degree(v))
                raise CapacityExceeded(
                    f"atom of degree {d} exceeds the cap of {self.req.max_degree}",
                    worst, d)
        body = simplify_internal(body)
        blocks = _blocks(prefix)
        for kind, names in reversed(blocks):
            if kind is Exists:
                body = self.exists(body, names)
            else:
                body = negate(self.exists(negate(body), names))
            body = simplify_internal(body)
        return body


def _prem_even(q: Poly, p: Poly, var: str, head: Poly) -> Poly:
    """r with sign(r) = sign(q) at every root of p where head(p) != 0."""
    dp = p.degree(var)
    x = Poly.var(var)
    r = q
    k = 0
    while r and r.degree(var) >= dp:
        lr = r.coeff_list(var)[-1]
        r = r * head - lr * p * x ** (r.degree(var) - dp)
        k += 1
    if k % 2 == 1:
        r = r * head
    return r


def _deep(fn):
    """Run a deeply recursive computation on a thread with a large stack."""
    import sys
    import threading

    box = {}

    def target():
        try:
            box["value"] = fn()
        except BaseException as exc:  # re-raised on the calling thread
            box["error"] = exc

    old_limit = sys.getrecursionlimit()
    old_size = threading.stack_size()
    sys.setrecursionlimit(max(old_limit, 200_000))
    threading.stack_size(512 * 1024 * 1024)
    try:
        t = threading.Thread(target=target)
        t.start()
        t.join()
    finally:
        threading.stack_size(old_size)
        sys.setrecursionlimit(old_limit)
    if "error" in box:
        raise box["error"]
    return box["value"]


def _blocks(prefix):
    blocks = []
    for kind, name in prefix:
        if blocks and blocks[-1][0] is kind:
            blocks[-1][1].append(name)
        else:
            blocks.append((kind, [name]))
    return blocks


def _iter_atoms(f: Formula):
    if isinstance(f, PAtom):
        yield f
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from _iter_atoms(a)


def _count_atoms(f: Formula) -> int:
    return sum(1 for _ in _iter_atoms(f))


def _conj_atoms(f: Formula):
    if isinstance(f, PAtom):
        return [f]
    if isinstance(f, Top):
        return []
    if isinstance(f, And) and all(isinstance(a, PAtom) for a in f.args):
        return list(f.args)
    return None


def _merge_methods(methods):
    methods = sorted({m for m in methods if m != "trivial"})
    if not methods:
        return "trivial"
    return "+".join(methods)


def _gcd_exp(atoms: Sequence[PAtom], var: str) -> int:
    from math import gcd
    g = 0
    for a in atoms:
        g = gcd(g, a.poly.exponent_gcd(var))
    return g or 1


def _reduce_exp(a: PAtom, var: str, g: int) -> PAtom:
    terms = {}
    for mono, c in a.poly.terms.items():
        terms[tuple((v, e // g if v == var else e) for v, e in mono)] = c
    return make_atom(Poly(terms), a.signs)


def _linear_equation(atoms: Sequence[PAtom], var: str) -> Optional[PAtom]:
    """An equation of degree one in var, preferring a constant coefficient."""
    best = None
    for a in sorted(atoms, key=fkey):
        if a.signs == EQ and a.poly.degree(var) == 1:
            head = a.poly.coeff_list(var)[1]
            if head.is_constant():
                return a
            if best is None:
                best = a
    return best


def _as_dnf(f: Formula) -> Formula:
    """Flatten to a disjunction of conjunctions when that stays reasonably small."""
    try:
        branches = dnf(f, max_branches=4096)
    except TooLarge:
        return f
    return from_dnf(branches)


def qe(req: QERequest) -> QEResult:
    f = req.formula
    if not isinstance(f, Formula):
        raise Unsupported(f"not a formula: {f!r}")
    start = time.monotonic()
    engine = _Engine(req)
    try:
        out = engine.run(f)
    except NotPolynomial as exc:
        raise Unsupported(str(exc)) from exc
    out = _as_dnf(out)
    result = to_scalar(out)
    extra = free_vars(result) - free_vars(f)
    assert not extra, f"eliminator introduced variables {sorted(extra)}"
    return QEResult(result, {
        "steps": engine.log,
        "atoms_in": _count_atoms(from_scalar(split_prefix(prenex(f))[1])),
        "atoms_out": _count_atoms(out),
        "elapsed_ms": round((time.monotonic() - start) * 1000, 3),
    })


def simplify(f: Formula) -> Formula:
    """Canonical simplification of a quantifier-free real scalar formula."""
    if not is_quantifier_free(f):
        raise ValueError("simplify expects a quantifier-free formula")
    return to_scalar(simplify_internal(from_scalar(f)))


__all__ = ["QERequest", "QEResult", "CapacityExceeded", "Unsupported", "qe", "simplify",
           "BACKENDS", "Forall"]
