"""Spell matrix formulas out entrywise.

Each n x n matrix variable X becomes the n^2 scalar variables ``X_r_s``;
ring operations, trace and star are expanded symbolically, ``=`` becomes n^2
entry equations and ``A <= B`` becomes the positive semidefiniteness
conditions on ``B - A``.  :func:`split_complex` then turns a formula over
Q[i] into one over pairs of real variables.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .arith import COMPLEX, GaussRational, REAL
from .formula import (
    ATOMS, Add, And, Bottom, Eq, Exists, Forall, Formula, Implies, IntLit, Leq,
    Mul, Not, One, Or, QUANTIFIERS, Star, Term, Top, Tr, Var, Zero, all_vars,
    conj, top_conjuncts,
)
from .poly import Poly, poly_sum
from .terms import conj_poly, poly_to_term, term_to_poly


@dataclass(frozen=True)
class EntryNaming:
    """Maps (matrix variable, row, column) to the scalar variable name.

    Rows and columns are 1-based.  ``prefix`` is prepended when the plain
    scheme would collide with a name already in use.
    """

    prefix: str = ""

    def name(self, var: str, r: int, s: int) -> str:
        return f"{self.prefix}{var}_{r}_{s}"

    @classmethod
    def avoiding(cls, used: Iterable[str], matrix_vars: Iterable[str], n: int) -> "EntryNaming":
        used = set(used)
        prefix = ""
        while True:
            naming = cls(prefix)
            names = {naming.name(v, r, s) for v in matrix_vars
                     for r in range(1, n + 1) for s in range(1, n + 1)}
            if not names & used:
                return naming
            prefix += "_"


@dataclass(frozen=True)
class SymbolicMatrix:
    n: int
    mode: str
    entries: Tuple[Tuple[Term, ...], ...]


class _Ctx:
    def __init__(self, n: int, mode: str, naming: EntryNaming, hermitian: FrozenSet[str]):
        self.n = n
        self.mode = mode
        self.naming = naming
        self.hermitian = set(hermitian)

    def entry_vars(self, var: str) -> List[str]:
        """Scalar variables that carry X's entries (upper triangle if hermitian)."""
        n = self.n
        if var in self.hermitian:
            return [self.naming.name(var, r, s) for r in range(1, n + 1) for s in range(r, n + 1)]
        return [self.naming.name(var, r, s) for r in range(1, n + 1) for s in range(1, n + 1)]

    def var_matrix(self, var: str) -> List[List[Poly]]:
        n = self.n
        out = []
        for r in range(1, n + 1):
            row = []
            for s in range(1, n + 1):
                if var in self.hermitian and r > s:
                    p = Poly.var(self.naming.name(var, s, r))
                    row.append(conj_poly(p) if self.mode == COMPLEX else p)
                else:
                    row.append(Poly.var(self.naming.name(var, r, s)))
            out.append(row)
        return out


# --- polynomial matrices ---------------------------------------------------

PM = List[List[Poly]]


def _pm_scalar(n: int, c: Poly) -> PM:
    return [[c if i == j else Poly() for j in range(n)] for i in range(n)]


def _pm_add(a: PM, b: PM) -> PM:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _pm_mul(a: PM, b: PM) -> PM:
    n = len(a)
    return [[poly_sum(a[i][k] * b[k][j] for k in range(n) if a[i][k] and b[k][j])
             for j in range(n)] for i in range(n)]


def _pm_star(a: PM, mode: str) -> PM:
    n = len(a)
    if mode == REAL:
        return [[a[j][i] for j in range(n)] for i in range(n)]
    return [[conj_poly(a[j][i]) for j in range(n)] for i in range(n)]


def _pm_trace(a: PM) -> Poly:
    return poly_sum(a[i][i] for i in range(len(a)))


def _pm_sub(a: PM, b: PM) -> PM:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _poly_matrix(t: Term, ctx: _Ctx) -> PM:
    n = ctx.n
    if isinstance(t, Var):
        return ctx.var_matrix(t.name)
    if isinstance(t, Zero):
        return _pm_scalar(n, Poly())
    if isinstance(t, One):
        return _pm_scalar(n, Poly.const(1))
    if isinstance(t, IntLit):
        return _pm_scalar(n, Poly.const(t.value))
    if isinstance(t, Add):
        return _pm_add(_poly_matrix(t.left, ctx), _poly_matrix(t.right, ctx))
    if isinstance(t, Mul):
        return _pm_mul(_poly_matrix(t.left, ctx), _poly_matrix(t.right, ctx))
    if isinstance(t, Star):
        return _pm_star(_poly_matrix(t.arg, ctx), ctx.mode)
    if isinstance(t, Tr):
        return _pm_scalar(n, _pm_trace(_poly_matrix(t.arg, ctx)))
    raise TypeError(f"not a matrix term: {t!r}")


def symbolic_charpoly(a: PM) -> List[Poly]:
    """(e_1, ..., e_n) of a polynomial matrix by Faddeev-LeVerrier."""
    n = len(a)
    ident = _pm_scalar(n, Poly.const(1))
    m = ident
    out = []
    for k in range(1, n + 1):
        am = _pm_mul(a, m)
        c = _pm_trace(am).scale(Fraction(-1, k))
        out.append(c if k % 2 == 0 else -c)
        m = _pm_add(am, _pm_scalar(n, c))
    return out


def _to_sym(pm: PM, mode: str) -> SymbolicMatrix:
    return SymbolicMatrix(len(pm), mode, tuple(tuple(poly_to_term(p) for p in row) for row in pm))


def _from_sym(sm: SymbolicMatrix) -> PM:
    return [[term_to_poly(t, sm.mode) for t in row] for row in sm.entries]


# --- public operations -------------------------------------------------------

def scalarize_term(t: Term, n: int, naming: EntryNaming = EntryNaming(),
                   mode: str = REAL, hermitian: Iterable[str] = ()) -> SymbolicMatrix:
    ctx = _Ctx(n, mode, naming, frozenset(hermitian))
    return _to_sym(_poly_matrix(t, ctx), mode)


def psd_encoding(sm: SymbolicMatrix) -> Formula:
    """Hermitian conditions plus nonnegativity of all charpoly coefficients."""
    return _psd_from_pm(_from_sym(sm), sm.mode)


def _psd_from_pm(pm: PM, mode: str) -> Formula:
    n = len(pm)
    parts: List[Formula] = []
    star = _pm_star(pm, mode)
    for i in range(n):
        for j in range(i, n):
            parts.append(Eq(poly_to_term(pm[i][j]), poly_to_term(star[i][j])))
    for e in symbolic_charpoly(pm):
        parts.append(Leq(Zero(), poly_to_term(e)))
    return And(tuple(parts)) if len(parts) > 1 else parts[0]


def scalarize_formula(f: Formula, n: int, mode: str = REAL,
                      naming: Optional[EntryNaming] = None,
                      hermitian: Iterable[str] = ()) -> Formula:
    """Entrywise translation of a matrix formula.

    Variables listed in ``hermitian`` use only their upper-triangular entries
    (the lower triangle is the conjugate mirror); the caller is responsible
    for that restriction being licensed by the formula.
    """
    if naming is None:
        naming = EntryNaming.avoiding(all_vars(f), all_vars(f), n)
    ctx = _Ctx(n, mode, naming, frozenset(hermitian))
    return _scal(f, ctx)


def _scal(f: Formula, ctx: _Ctx) -> Formula:
    if isinstance(f, (Top, Bottom)):
        return f
    if isinstance(f, Eq):
        a = _poly_matrix(f.left, ctx)
        b = _poly_matrix(f.right, ctx)
        eqs = tuple(Eq(poly_to_term(a[i][j]), poly_to_term(b[i][j]))
                    for i in range(ctx.n) for j in range(ctx.n))
        return eqs[0] if len(eqs) == 1 else And(eqs)
    if isinstance(f, Leq):
        diff = _pm_sub(_poly_matrix(f.right, ctx), _poly_matrix(f.left, ctx))
        return _psd_from_pm(diff, ctx.mode)
    if isinstance(f, Not):
        return Not(_scal(f.arg, ctx))
    if isinstance(f, And):
        return And(tuple(_scal(a, ctx) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(_scal(a, ctx) for a in f.args))
    if isinstance(f, Implies):
        return Implies(_scal(f.left, ctx), _scal(f.right, ctx))
    if isinstance(f, QUANTIFIERS):
        body = _scal(f.body, ctx)
        for v in reversed(ctx.entry_vars(f.var)):
            body = type(f)(v, body)
        return body
    raise TypeError(f"not a formula: {f!r}")


# --- symmetry detection --------------------------------------------------------

def _closed_hermitian(t: Term) -> bool:
    if isinstance(t, (Zero, One, IntLit)):
        return True
    if isinstance(t, (Add, Mul)):
        return _closed_hermitian(t.left) and _closed_hermitian(t.right)
    return False


def hermitian_witness(atom: Formula) -> Optional[str]:
    """Variable X if the atom forces X = X* (X = X*, c <= X or X <= c with c constant)."""
    if isinstance(atom, Eq):
        l, r = atom.left, atom.right
        if isinstance(l, Var) and r == Star(l):
            return l.name
        if isinstance(r, Var) and l == Star(r):
            return r.name
    if isinstance(atom, Leq):
        l, r = atom.left, atom.right
        if isinstance(r, Var) and _closed_hermitian(l):
            return r.name
        if isinstance(l, Var) and _closed_hermitian(r):
            return l.name
    return None


def licensed_hermitian(f: Formula) -> FrozenSet[str]:
    """Free or existentially bound variables forced hermitian by a conjunct
    at the top level of the prenex matrix."""
    prefix = []
    g = f
    while isinstance(g, QUANTIFIERS):
        prefix.append((type(g), g.var))
        g = g.body
    universal = {v for k, v in prefix if k is Forall}
    out = set()
    for c in top_conjuncts(g):
        v = hermitian_witness(c)
        if v is not None and v not in universal:
            out.add(v)
    return frozenset(out)


# --- complex splitting --------------------------------------------------------

def re_name(v: str) -> str:
    return f"{v}_re"


def im_name(v: str) -> str:
    return f"{v}_im"


def split_poly(p: Poly) -> Tuple[Poly, Poly]:
    """Real and imaginary parts of a polynomial over Q[i] in variables v, v*."""
    i = GaussRational(Fraction(0), Fraction(1))
    mapping = {}
    for v in p.variables():
        base = v[:-1] if v.endswith("*") else v
        re_p, im_p = Poly.var(re_name(base)), Poly.var(im_name(base))
        if v.endswith("*"):
            mapping[v] = re_p - im_p.scale(i)
        else:
            mapping[v] = re_p + im_p.scale(i)
    q = p.subs(mapping)
    re_t, im_t = {}, {}
    for m, c in q.terms.items():
        c = GaussRational.coerce(c)
        if c.re:
            re_t[m] = c.re
        if c.im:
            im_t[m] = c.im
    return Poly(re_t), Poly(im_t)


def split_complex(f: Formula) -> Formula:
    """Rewrite a complex-mode scalar formula over pairs (v_re, v_im) of reals."""
    if isinstance(f, (Top, Bottom)):
        return f
    if isinstance(f, ATOMS):
        lre, lim = split_poly(term_to_poly(f.left, COMPLEX))
        rre, rim = split_poly(term_to_poly(f.right, COMPLEX))
        if isinstance(f, Eq):
            return And((Eq(poly_to_term(lre), poly_to_term(rre)),
                        Eq(poly_to_term(lim), poly_to_term(rim))))
        return And((Eq(poly_to_term(lim), Zero()), Eq(poly_to_term(rim), Zero()),
                    Leq(poly_to_term(lre), poly_to_term(rre))))
    if isinstance(f, Not):
        return Not(split_complex(f.arg))
    if isinstance(f, And):
        return And(tuple(split_complex(a) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(split_complex(a) for a in f.args))
    if isinstance(f, Implies):
        return Implies(split_complex(f.left), split_complex(f.right))
    if isinstance(f, QUANTIFIERS):
        return type(f)(re_name(f.var), type(f)(im_name(f.var), split_complex(f.body)))
    raise TypeError(f"not a formula: {f!r}")
