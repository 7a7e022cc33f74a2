"""Boolean simplification over polynomial sign atoms, and DNF conversion."""
from __future__ import annotations

from typing import Dict, List, Optional, Sequence

from ..formula import And, Bottom, FALSE, Formula, Or, TRUE, Top
from ..poly import Poly
from .atoms import ALL, EQ, NE, PAtom, make_atom


class TooLarge(RuntimeError):
    pass


def fkey(f: Formula):
    """Deterministic sort key."""
    if isinstance(f, PAtom):
        return (1, str(f.poly), tuple(sorted(f.signs)))
    if isinstance(f, Top):
        return (0, "true")
    if isinstance(f, Bottom):
        return (0, "false")
    if isinstance(f, And):
        return (2, tuple(fkey(a) for a in f.args))
    if isinstance(f, Or):
        return (3, tuple(fkey(a) for a in f.args))
    raise TypeError(f"unexpected node {f!r}")


def _mk(kind, args: List[Formula]) -> Formula:
    if not args:
        return TRUE if kind is And else FALSE
    if len(args) == 1:
        return args[0]
    return kind(tuple(sorted(args, key=fkey)))


def _known(ctx, p: Poly) -> frozenset:
    return ctx.get(p, ALL)


def _s(f: Formula, ctx: Dict[Poly, frozenset]) -> Formula:
    """One simplification pass; ctx maps polynomials to the signs still possible."""
    if isinstance(f, PAtom):
        if ctx:
            f = _refine_atom(f, ctx)
            if not isinstance(f, PAtom):
                return f
        k = _known(ctx, f.poly)
        if k <= f.signs:
            return TRUE
        if not (k & f.signs):
            return FALSE
        return f
    if isinstance(f, And):
        return _s_and(f.args, ctx)
    if isinstance(f, Or):
        return _s_or(f.args, ctx)
    return f


def _refine_atom(a: PAtom, ctx) -> Formula:
    """Use context facts about single variables: zero ones are substituted,
    sign-definite monomial factors are divided out."""
    p = a.poly
    signs = a.signs
    fixed = {}
    for q, k in ctx.items():
        if k == frozenset({0}) and len(q.variables()) == 1 and q.total_degree() == 1:
            (v,) = q.variables()
            if v in p.variables():
                c1 = q.terms[((v, 1),)]
                fixed[v] = Poly.const(-q.terms.get((), 0) / c1)
    if fixed:
        p = p.subs(fixed)
    changed = bool(fixed)
    if signs in (EQ, NE):
        # any context polynomial known to be nonzero may be cancelled
        for q, k in ctx.items():
            if 0 in k or len(q.terms) < 2 or not p.terms:
                continue
            if not q.variables() <= p.variables() or q.total_degree() > p.total_degree():
                continue
            d = p.divide_exact(q)
            while d is not None and d.total_degree() < p.total_degree():
                p, changed = d, True
                d = p.divide_exact(q) if q.total_degree() <= p.total_degree() else None
    content = _monomial_content(p)
    for v, e in content.items():
        k = ctx.get(Poly.var(v))
        if k is None or 0 in k:
            continue
        if k == frozenset({1}) or (e % 2 == 0):
            pass
        elif k == frozenset({-1}):
            signs = frozenset(-x for x in signs)
        else:
            continue
        p = _divide_monomial(p, v, e)
        changed = True
    if not changed:
        return a
    return make_atom(p, signs)


def _is_fact(p: Poly, s: frozenset) -> bool:
    if p.total_degree() == 1 and len(p.variables()) == 1:
        return len(p.terms) == 1 or s == EQ
    return 0 not in s and len(p.terms) > 1


def _monomial_content(p: Poly) -> Dict[str, int]:
    out = None
    for mono in p.terms:
        exps = dict(mono)
        if out is None:
            out = exps
        else:
            out = {v: min(e, exps.get(v, 0)) for v, e in out.items() if exps.get(v, 0) > 0}
        if not out:
            return {}
    return out or {}


def _divide_monomial(p: Poly, v: str, e: int) -> Poly:
    terms = {}
    for mono, c in p.terms.items():
        new = tuple((w, k - e if w == v else k) for w, k in mono if not (w == v and k == e))
        terms[new] = c
    return Poly(terms)


def _flatten(args, kind):
    out = []
    for a in args:
        if isinstance(a, kind):
            out.extend(_flatten(a.args, kind))
        else:
            out.append(a)
    return out


def _s_and(args, ctx) -> Formula:
    pending = _flatten(args, And)
    table: Dict[Poly, frozenset] = {}
    others: List[Formula] = []
    for _ in range(len(pending) + 2):
        new_atoms = [a for a in pending if isinstance(a, PAtom)]
        rest = [a for a in pending if not isinstance(a, (PAtom, Top))]
        if any(isinstance(a, Bottom) for a in pending):
            return FALSE
        for a in new_atoms:
            s = table.get(a.poly, _known(ctx, a.poly)) & a.signs
            if not s:
                return FALSE
            table[a.poly] = s
        inner = dict(ctx)
        inner.update(table)
        others, pending = [], []
        for o in rest:
            r = _s(o, inner)
            if isinstance(r, Bottom):
                return FALSE
            if isinstance(r, Top):
                continue
            if isinstance(r, (PAtom, And)):
                pending.extend(_flatten([r], And))
            else:
                others.append(r)
        if not pending:
            break
        pending = pending + others
        others = []
    facts = {p: s for p, s in table.items() if _is_fact(p, s)}
    if facts:
        inner = dict(ctx)
        inner.update(facts)
        for p, s in list(table.items()):
            if p in facts:
                continue
            r = _refine_atom(PAtom(p, s), inner)
            if r is not PAtom(p, s) and r != PAtom(p, s):
                rebuilt = [make_atom(q, t) for q, t in table.items() if q != p]
                return _s_and(rebuilt + [r] + others, ctx)
    atoms = []
    for p, s in table.items():
        k = _known(ctx, p)
        if k <= s:
            continue
        atoms.append(_tight(p, s, k))
    uniq = {fkey(o): o for o in others}
    return _mk(And, atoms + list(uniq.values()))


def _tight(p: Poly, s: frozenset, known: frozenset) -> Formula:
    """Atom for p in s; uses the smaller of s and s-plus-impossible-signs."""
    wide = s | (ALL - known)
    best = s if len(s) <= len(wide) or wide == ALL else wide
    return make_atom(p, best)


def _s_or(args, ctx) -> Formula:
    flat = _flatten(args, Or)
    if any(isinstance(a, Top) for a in flat):
        return TRUE
    table: Dict[Poly, frozenset] = {}
    for a in flat:
        if isinstance(a, PAtom):
            s = (table.get(a.poly, frozenset()) | a.signs) & _known(ctx, a.poly)
            if s == _known(ctx, a.poly):
                return TRUE
            table[a.poly] = s
    rest = [a for a in flat if not isinstance(a, (PAtom, Bottom))]
    inner = dict(ctx)
    for p, s in table.items():
        inner[p] = _known(ctx, p) - s
    kept: List[Formula] = []
    for o in rest:
        r = _s(o, inner)
        if isinstance(r, Top):
            return TRUE
        if isinstance(r, Bottom):
            continue
        for piece in _flatten([r], Or):
            if isinstance(piece, PAtom):
                s = (table.get(piece.poly, frozenset()) | piece.signs) & _known(ctx, piece.poly)
                if s == _known(ctx, piece.poly):
                    return TRUE
                table[piece.poly] = s
            else:
                kept.append(piece)
    uniq = {}
    for o in kept:
        uniq.setdefault(fkey(o), o)
    kept = list(uniq.values())
    conj_sets = [frozenset(fkey(a) for a in o.args) if isinstance(o, And)
                 else frozenset([fkey(o)]) for o in kept]
    atom_keys = {fkey(make_atom(p, s)) for p, s in table.items() if s}
    survivors = []
    for i, o in enumerate(kept):
        if conj_sets[i] & atom_keys:
            continue
        if any(j != i and conj_sets[j] < conj_sets[i] for j in range(len(kept))):
            continue
        survivors.append(o)
    atoms = [_tight(p, s, _known(ctx, p)) for p, s in table.items() if s]
    return _mk(Or, atoms + survivors)


def simplify_internal(f: Formula) -> Formula:
    """Simplify to a fixpoint (idempotent)."""
    for _ in range(20):
        g = _s(f, {})
        if g == f:
            return g
        f = g
    return f


def dnf(f: Formula, max_branches: int = 100_000, max_atoms: Optional[int] = None) -> List[List[PAtom]]:
    """Disjunctive normal form as a list of atom lists; contradictory branches dropped."""
    f = simplify_internal(f)
    branches = _dnf(f, max_branches)
    out = []
    seen = set()
    for br in branches:
        merged = _s_and(br, {})
        if isinstance(merged, Bottom):
            continue
        if isinstance(merged, Top):
            atoms = []
        elif isinstance(merged, PAtom):
            atoms = [merged]
        else:
            atoms = list(merged.args)
        key = tuple(fkey(a) for a in atoms)
        if key in seen:
            continue
        seen.add(key)
        if max_atoms is not None and len(atoms) > max_atoms:
            raise TooLarge(f"branch with {len(atoms)} atoms exceeds the cap of {max_atoms}")
        out.append(atoms)
    return out


def _dnf(f: Formula, cap: int) -> List[List[Formula]]:
    if isinstance(f, Top):
        return [[]]
    if isinstance(f, Bottom):
        return []
    if isinstance(f, PAtom):
        return [[f]]
    if isinstance(f, Or):
        out = []
        for a in f.args:
            out.extend(_dnf(a, cap))
            if len(out) > cap:
                raise TooLarge(f"DNF exceeds {cap} branches")
        return out
    if isinstance(f, And):
        acc: List[List[Formula]] = [[]]
        for a in f.args:
            parts = _dnf(a, cap)
            acc = [x + y for x in acc for y in parts]
            if len(acc) > cap:
                raise TooLarge(f"DNF exceeds {cap} branches")
        return acc
    raise TypeError(f"unexpected node {f!r}")


def from_dnf(branches: List[List[PAtom]]) -> Formula:
    return simplify_internal(Or(tuple(And(tuple(b)) if b else TRUE for b in branches))
                             if branches else FALSE)
