"""Terms and formulas shared by the matrix language (+, *, 0, 1, tr, star, <=)
and the scalar language (+, *, 0, 1, star, <=).

Both languages use the same node classes; ``Tr`` only occurs in matrix terms.
In the scalar language ``Star`` is complex conjugation and ``Leq`` the field
order, in the matrix language ``Star`` is conjugate transposition and ``Leq``
the positive semidefinite order.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Mapping, Tuple


# --- terms ---------------------------------------------------------------

class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Zero(Term):
    pass


@dataclass(frozen=True)
class One(Term):
    pass


@dataclass(frozen=True)
class IntLit(Term):
    value: int


@dataclass(frozen=True)
class Add(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Mul(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Tr(Term):
    arg: Term


@dataclass(frozen=True)
class Star(Term):
    arg: Term


# --- formulas -------------------------------------------------------------

class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Leq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: Tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    args: Tuple[Formula, ...]


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


TRUE = Top()
FALSE = Bottom()
ATOMS = (Eq, Leq)
QUANTIFIERS = (Exists, Forall)


class CaptureError(ValueError):
    """Substitution would capture a free variable of the substituted term."""


# --- small constructors --------------------------------------------------

def int_term(k: int) -> Term:
    if k == 0:
        return Zero()
    if k == 1:
        return One()
    return IntLit(k)


def neg(t: Term) -> Term:
    return Mul(IntLit(-1), t)


def sub(a: Term, b: Term) -> Term:
    return Add(a, neg(b))


def conj(*fs: Formula) -> Formula:
    items = [f for f in fs if not isinstance(f, Top)]
    if not items:
        return TRUE
    if len(items) == 1:
        return items[0]
    return And(tuple(items))


def disj(*fs: Formula) -> Formula:
    items = [f for f in fs if not isinstance(f, Bottom)]
    if not items:
        return FALSE
    if len(items) == 1:
        return items[0]
    return Or(tuple(items))


def geq(a: Term, b: Term) -> Formula:
    return Leq(b, a)


def lt(a: Term, b: Term) -> Formula:
    return And((Leq(a, b), Not(Eq(a, b))))


def gt(a: Term, b: Term) -> Formula:
    return lt(b, a)


def quantify(kind, names: Iterable[str], body: Formula) -> Formula:
    for v in reversed(list(names)):
        body = kind(v, body)
    return body


# --- traversal -------------------------------------------------------------

def term_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, (Add, Mul)):
        return term_vars(t.left) | term_vars(t.right)
    if isinstance(t, (Tr, Star)):
        return term_vars(t.arg)
    return frozenset()


def free_vars(f) -> frozenset:
    """Free variables of a formula (or the variables of a term)."""
    if isinstance(f, Term):
        return term_vars(f)
    if isinstance(f, ATOMS):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, (And, Or)):
        out = frozenset()
        for a in f.args:
            out |= free_vars(a)
        return out
    if isinstance(f, Implies):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, QUANTIFIERS):
        return free_vars(f.body) - {f.var}
    return frozenset()


def all_vars(f) -> frozenset:
    """Every variable name occurring in f, free or bound."""
    if isinstance(f, Term):
        return term_vars(f)
    if isinstance(f, ATOMS):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Not):
        return all_vars(f.arg)
    if isinstance(f, (And, Or)):
        out = frozenset()
        for a in f.args:
            out |= all_vars(a)
        return out
    if isinstance(f, Implies):
        return all_vars(f.left) | all_vars(f.right)
    if isinstance(f, QUANTIFIERS):
        return all_vars(f.body) | {f.var}
    return frozenset()


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, QUANTIFIERS):
        return False
    if isinstance(f, Not):
        return is_quantifier_free(f.arg)
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(a) for a in f.args)
    if isinstance(f, Implies):
        return is_quantifier_free(f.left) and is_quantifier_free(f.right)
    return True


def count_quantifiers(f: Formula) -> int:
    if isinstance(f, QUANTIFIERS):
        return 1 + count_quantifiers(f.body)
    if isinstance(f, Not):
        return count_quantifiers(f.arg)
    if isinstance(f, (And, Or)):
        return sum(count_quantifiers(a) for a in f.args)
    if isinstance(f, Implies):
        return count_quantifiers(f.left) + count_quantifiers(f.right)
    return 0


def map_terms(f: Formula, fn: Callable[[Term], Term]) -> Formula:
    """Apply fn to both sides of every atom; does not look at binders."""
    if isinstance(f, Eq):
        return Eq(fn(f.left), fn(f.right))
    if isinstance(f, Leq):
        return Leq(fn(f.left), fn(f.right))
    if isinstance(f, Not):
        return Not(map_terms(f.arg, fn))
    if isinstance(f, And):
        return And(tuple(map_terms(a, fn) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(map_terms(a, fn) for a in f.args))
    if isinstance(f, Implies):
        return Implies(map_terms(f.left, fn), map_terms(f.right, fn))
    if isinstance(f, QUANTIFIERS):
        return type(f)(f.var, map_terms(f.body, fn))
    return f


def map_atoms(f: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    if isinstance(f, ATOMS):
        return fn(f)
    if isinstance(f, Not):
        return Not(map_atoms(f.arg, fn))
    if isinstance(f, And):
        return And(tuple(map_atoms(a, fn) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(map_atoms(a, fn) for a in f.args))
    if isinstance(f, Implies):
        return Implies(map_atoms(f.left, fn), map_atoms(f.right, fn))
    if isinstance(f, QUANTIFIERS):
        return type(f)(f.var, map_atoms(f.body, fn))
    return f


def atoms(f: Formula) -> List[Formula]:
    out: List[Formula] = []

    def walk(g):
        if isinstance(g, ATOMS):
            out.append(g)
        elif isinstance(g, Not):
            walk(g.arg)
        elif isinstance(g, (And, Or)):
            for a in g.args:
                walk(a)
        elif isinstance(g, Implies):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, QUANTIFIERS):
            walk(g.body)

    walk(f)
    return out


# --- fresh names -------------------------------------------------------------

_SUFFIX = re.compile(r"^(.*?)(\d+)$")


class FreshNames:
    """Deterministic fresh-name source: base name plus a counter shared by
    every name requested from this instance."""

    def __init__(self, used: Iterable[str] = ()):
        self.used = set(used)
        self.counter = 0

    def fresh(self, base: str) -> str:
        while True:
            self.counter += 1
            cand = f"{base}{self.counter}"
            if cand not in self.used:
                self.used.add(cand)
                return cand

    def reserve(self, name: str) -> None:
        self.used.add(name)


# --- substitution ------------------------------------------------------------

def subst_term(t: Term, mapping: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, Add):
        return Add(subst_term(t.left, mapping), subst_term(t.right, mapping))
    if isinstance(t, Mul):
        return Mul(subst_term(t.left, mapping), subst_term(t.right, mapping))
    if isinstance(t, Tr):
        return Tr(subst_term(t.arg, mapping))
    if isinstance(t, Star):
        return Star(subst_term(t.arg, mapping))
    return t


def substitute(f, mapping: Mapping[str, Term], rename: bool = True,
               names: FreshNames | None = None):
    """Capture-avoiding simultaneous substitution of terms for free variables.

    With ``rename=False`` a would-be capture raises :class:`CaptureError`.
    """
    if isinstance(f, Term):
        return subst_term(f, mapping)
    if names is None:
        used = set(all_vars(f))
        for t in mapping.values():
            used |= term_vars(t)
        used |= set(mapping)
        names = FreshNames(used)
    return _subst(f, dict(mapping), rename, names)


def _subst(f: Formula, mapping: Dict[str, Term], rename: bool, names: FreshNames) -> Formula:
    if not mapping:
        return f
    if isinstance(f, Eq):
        return Eq(subst_term(f.left, mapping), subst_term(f.right, mapping))
    if isinstance(f, Leq):
        return Leq(subst_term(f.left, mapping), subst_term(f.right, mapping))
    if isinstance(f, Not):
        return Not(_subst(f.arg, mapping, rename, names))
    if isinstance(f, And):
        return And(tuple(_subst(a, mapping, rename, names) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(_subst(a, mapping, rename, names) for a in f.args))
    if isinstance(f, Implies):
        return Implies(_subst(f.left, mapping, rename, names),
                       _subst(f.right, mapping, rename, names))
    if isinstance(f, QUANTIFIERS):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        body_free = free_vars(f.body)
        inner = {k: v for k, v in inner.items() if k in body_free}
        if not inner:
            return f
        incoming = frozenset().union(*(term_vars(t) for t in inner.values()))
        var = f.var
        body = f.body
        if var in incoming:
            if not rename:
                raise CaptureError(f"substitution would capture {var!r}")
            new = names.fresh(var)
            body = _subst(body, {var: Var(new)}, rename, names)
            var = new
        return type(f)(var, _subst(body, inner, rename, names))
    return f


# --- negation normal form and prenex form -----------------------------------

def nnf(f: Formula, negate: bool = False) -> Formula:
    """Negation normal form: Implies eliminated, Not only directly on atoms."""
    if isinstance(f, Top):
        return FALSE if negate else TRUE
    if isinstance(f, Bottom):
        return TRUE if negate else FALSE
    if isinstance(f, ATOMS):
        return Not(f) if negate else f
    if isinstance(f, Not):
        return nnf(f.arg, not negate)
    if isinstance(f, Implies):
        return nnf(Or((Not(f.left), f.right)), negate)
    if isinstance(f, And):
        args = tuple(nnf(a, negate) for a in f.args)
        return Or(args) if negate else And(args)
    if isinstance(f, Or):
        args = tuple(nnf(a, negate) for a in f.args)
        return And(args) if negate else Or(args)
    if isinstance(f, Exists):
        return (Forall if negate else Exists)(f.var, nnf(f.body, negate))
    if isinstance(f, Forall):
        return (Exists if negate else Forall)(f.var, nnf(f.body, negate))
    raise TypeError(f"not a formula: {f!r}")


def _flip(kind):
    return Forall if kind is Exists else Exists


def prenex(f: Formula) -> Formula:
    """Move all quantifiers to the front.

    Bound variables that clash with free variables or with an earlier binder
    are renamed to ``name<k>`` with a counter shared across the formula.
    Quantifier-free input is returned unchanged.
    """
    if is_quantifier_free(f):
        return f
    names = FreshNames(all_vars(f))
    taken = set(free_vars(f))
    prefix, matrix = _pull(f, names, taken)
    out = matrix
    for kind, v in reversed(prefix):
        out = kind(v, out)
    return out


def _pull(f: Formula, names: FreshNames, taken: set):
    if isinstance(f, QUANTIFIERS):
        var, body = f.var, f.body
        if var in taken:
            new = names.fresh(var)
            body = substitute(body, {var: Var(new)}, names=names)
            var = new
        taken.add(var)
        pre, m = _pull(body, names, taken)
        return [(type(f), var)] + pre, m
    if isinstance(f, Not):
        pre, m = _pull(f.arg, names, taken)
        return [(_flip(k), v) for k, v in pre], Not(m)
    if isinstance(f, (And, Or)):
        pre, ms = [], []
        for a in f.args:
            p, m = _pull(a, names, taken)
            pre += p
            ms.append(m)
        return pre, type(f)(tuple(ms))
    if isinstance(f, Implies):
        pl, ml = _pull(f.left, names, taken)
        pr, mr = _pull(f.right, names, taken)
        return [(_flip(k), v) for k, v in pl] + pr, Implies(ml, mr)
    return [], f


def split_prefix(f: Formula):
    """Return ([(kind, var), ...], matrix) for a prenex formula."""
    prefix = []
    while isinstance(f, QUANTIFIERS):
        prefix.append((type(f), f.var))
        f = f.body
    return prefix, f


def top_conjuncts(f: Formula) -> List[Formula]:
    if isinstance(f, And):
        out = []
        for a in f.args:
            out += top_conjuncts(a)
        return out
    return [f]
