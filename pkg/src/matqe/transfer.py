"""Quantifier elimination for matrix formulas via trace-word coordinates.

The formula's solution set D in Mat_n^m is pushed forward along the map
A -> (tr w(A))_w, eliminated over the reals, and pulled back by replacing
each coordinate with the corresponding trace term.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .arith import COMPLEX, GaussRational, Mat, REAL
from .formula import (
    And, Bottom, Eq, Exists, Formula, FreshNames, Leq, Mul, Not, Or, Star, Term, Top, Tr,
    TRUE, Var, Zero, all_vars, free_vars, is_quantifier_free, prenex, quantify, subst_term,
)
from .poly import Poly
from .rcf import atoms as ratoms
from .rcf.qe import CapacityExceeded, QERequest, QEResult, qe, simplify
from .scalarize import (
    EntryNaming, _Ctx, im_name, licensed_hermitian, re_name, scalarize_formula,
    scalarize_term, split_complex,
)
from .specht import Word, WordIndex, enumerate_words
from .syntax import to_text
from .terms import conj_name, poly_to_term, term_to_poly


class BackSubstitutionError(ValueError):
    """A scalar atom has no trace-term counterpart in the matrix language."""


def word_term(w: Word, names: Sequence[str]) -> Term:
    out: Optional[Term] = None
    for i, starred in w:
        t: Term = Var(names[i - 1])
        if starred:
            t = Star(t)
        out = t if out is None else Mul(out, t)
    return out


def _coord_base(w: Word, names: Sequence[str]) -> str:
    return "tr_" + "_".join(names[i - 1] + ("s" if s else "") for i, s in w)


@dataclass(frozen=True)
class InvariantCoordinates:
    index: Optional[WordIndex]
    matrix_vars: Tuple[str, ...]
    names: Tuple[str, ...]
    definitions: Tuple[Poly, ...]
    mode: str = REAL

    def trace_term(self, k: int) -> Term:
        return Tr(word_term(self.index.words[k], self.matrix_vars))

    def equations(self) -> List[Formula]:
        return [Eq(Var(x), poly_to_term(d)) for x, d in zip(self.names, self.definitions)]


def build_coordinates(matrix_vars: Sequence[str], n: int, mode: str, naming: EntryNaming,
                      hermitian=(), dedup: bool = True,
                      taken: Sequence[str] = ()) -> InvariantCoordinates:
    mvars = tuple(matrix_vars)
    if not mvars:
        return InvariantCoordinates(None, (), (), (), mode)
    idx = enumerate_words(n, len(mvars), dedup_cyclic=dedup)
    fresh = FreshNames(taken)
    names, defs = [], []
    for w in idx.words:
        base = _coord_base(w, mvars)
        name = base if base not in fresh.used else fresh.fresh(base + "_")
        fresh.reserve(name)
        names.append(name)
        sm = scalarize_term(Tr(word_term(w, mvars)), n, naming, mode, hermitian)
        defs.append(term_to_poly(sm.entries[0][0], mode))
    return InvariantCoordinates(idx, mvars, tuple(names), tuple(defs), mode)


def image_formula(f: Formula, n: int, mode: str = REAL, dedup: bool = True,
                  hermitian: Optional[Sequence[str]] = None):
    """Scalar formula over the coordinates defining the image of f's solution set.

    Returns (formula, coordinates, info).  With ``hermitian`` None the
    symmetry pass decides which variables may be restricted.
    """
    p = prenex(f)
    mvars = tuple(sorted(free_vars(p)))
    herm = licensed_hermitian(p) if hermitian is None else frozenset(hermitian)
    used = all_vars(p)
    naming = EntryNaming.avoiding(used, used, n)
    scal = scalarize_formula(p, n, mode, naming, herm)
    entry_names = {naming.name(v, r, s) for v in used
                   for r in range(1, n + 1) for s in range(1, n + 1)}
    taken = set(used) | entry_names
    if mode == COMPLEX:
        taken |= {re_name(x) for x in entry_names} | {im_name(x) for x in entry_names}
    coords = build_coordinates(mvars, n, mode, naming, herm, dedup, sorted(taken))
    ctx = _Ctx(n, mode, naming, herm)
    entries = [e for v in mvars for e in ctx.entry_vars(v)]
    body = And((scal,) + tuple(coords.equations())) if coords.names else scal
    img = quantify(Exists, entries, body)
    if mode == COMPLEX:
        img = split_complex(img)
    info = {"hermitian": sorted(herm), "entry_variables": len(entries),
            "scalarized": scal, "naming": naming}
    return prenex(img), coords, info


# --- back-substitution ---------------------------------------------------------

def _complex_atom_poly(p: Poly, coords: InvariantCoordinates, signs) -> Poly:
    """Rewrite p over (x_re, x_im) as a polynomial over z = x, z* = conj(x)."""
    half = Fraction(1, 2)
    i = GaussRational(Fraction(0), Fraction(1))
    mapping = {}
    for x in coords.names:
        z, zb = Poly.var(x), Poly.var(conj_name(x))
        mapping[re_name(x)] = (z + zb).scale(half)
        mapping[im_name(x)] = (z - zb).scale(-i * half)
    q = p.subs(mapping).scale(2 ** max(p.degree(), 0))
    coeffs = [GaussRational.coerce(c) for c in q.terms.values()]
    if all(c.im == 0 for c in coeffs):
        return Poly({m: GaussRational.coerce(c).re for m, c in q.terms.items()})
    if all(c.re == 0 for c in coeffs) and signs in (ratoms.EQ, ratoms.NE):
        return Poly({m: GaussRational.coerce(c).im for m, c in q.terms.items()})
    raise BackSubstitutionError(
        f"atom {p} {ratoms.REL_TEXT[signs]} 0 mixes real and imaginary parts; "
        "it has no integer trace-term counterpart")


def back_substitute(g: Formula, coords: InvariantCoordinates) -> Formula:
    """Replace each coordinate variable by its trace term."""
    allowed = set(coords.names)
    if coords.mode == COMPLEX:
        allowed = {re_name(x) for x in coords.names} | {im_name(x) for x in coords.names}
    stray = free_vars(g) - allowed
    if stray:
        raise ValueError(f"stray free variables {sorted(stray)}")
    mapping: Dict[str, Term] = {}
    for k, x in enumerate(coords.names):
        tt = coords.trace_term(k)
        mapping[x] = tt
        mapping[conj_name(x)] = Star(tt)
    internal = ratoms.from_scalar(g)

    def atom(a: Formula) -> Formula:
        if not isinstance(a, ratoms.PAtom):
            return a
        p = a.poly
        if coords.mode == COMPLEX:
            p = _complex_atom_poly(p, coords, a.signs)
        b = ratoms.make_atom(p, a.signs)
        if not isinstance(b, ratoms.PAtom):
            return b
        return _subst_vars(ratoms.atom_to_scalar(b), mapping)

    return _rebuild(internal, atom)


def _subst_vars(f: Formula, mapping: Dict[str, Term]) -> Formula:
    def st(t: Term) -> Term:
        if isinstance(t, Star) and isinstance(t.arg, Var) and t.arg.name in mapping \
                and conj_name(t.arg.name) in mapping:
            return mapping[conj_name(t.arg.name)]
        return subst_term(t, mapping)

    if isinstance(f, Eq):
        return Eq(st(f.left), st(f.right))
    if isinstance(f, Leq):
        return Leq(st(f.left), st(f.right))
    if isinstance(f, Not):
        return Not(_subst_vars(f.arg, mapping))
    return f


def _rebuild(f: Formula, atom: Callable[[Formula], Formula]) -> Formula:
    if isinstance(f, And):
        parts = [_rebuild(a, atom) for a in f.args]
        if any(isinstance(p, Bottom) for p in parts):
            return Bottom()
        parts = [p for p in parts if not isinstance(p, Top)]
        return TRUE if not parts else parts[0] if len(parts) == 1 else And(tuple(parts))
    if isinstance(f, Or):
        parts = [_rebuild(a, atom) for a in f.args]
        if any(isinstance(p, Top) for p in parts):
            return TRUE
        parts = [p for p in parts if not isinstance(p, Bottom)]
        return Bottom() if not parts else parts[0] if len(parts) == 1 else Or(tuple(parts))
    return atom(f)


# --- the pipeline ------------------------------------------------------------------

@dataclass
class TransferReport:
    input: Formula
    n: int
    mode: str
    scalarized: Optional[Formula] = None
    image: Optional[Formula] = None
    qe_result: Optional[QEResult] = None
    output: Optional[Formula] = None
    hermitian: List[str] = field(default_factory=list)
    entry_variables: int = 0
    coordinates: Optional[InvariantCoordinates] = None
    timings_ms: Dict[str, float] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        def txt(f):
            return None if f is None else to_text(f)

        return {
            "n": self.n,
            "mode": self.mode,
            "input": txt(self.input),
            "scalarized": txt(self.scalarized),
            "image": txt(self.image),
            "qe": txt(self.qe_result.formula) if self.qe_result else None,
            "output": txt(self.output),
            "hermitian": self.hermitian,
            "entry_variables": self.entry_variables,
            "coordinates": len(self.coordinates.names) if self.coordinates else 0,
            "timings_ms": self.timings_ms,
            "diagnostics": self.qe_result.diagnostics if self.qe_result else None,
            "notes": self.notes,
        }


def _ms(start: float) -> float:
    return round((time.monotonic() - start) * 1000, 3)


def qe_matrix(f: Formula, n: int, mode: str = REAL, dedup: bool = True,
              backend: str = "auto", max_degree: int = 8, max_atoms: int = 512,
              time_budget_ms: int = 60_000, symmetry: bool = True) -> TransferReport:
    """Quantifier-free matrix formula equivalent to f on Mat_n(k).

    Raises CapacityExceeded with the partial report attached as ``.report``.
    """
    report = TransferReport(f, n, mode)
    if n * n > max_degree and free_vars(f):
        # tr(X^(n^2)) has degree n^2 in the first diagonal entry of X
        var = sorted(free_vars(f))[0]
        exc = CapacityExceeded(
            f"trace words of length {n * n} have degree {n * n} in the entries of {var}, "
            f"beyond the cap of {max_degree}", f"{var}_1_1", n * n)
        report.notes.append(f"capacity exceeded: {exc}")
        exc.report = report
        raise exc
    t0 = time.monotonic()
    img, coords, info = image_formula(f, n, mode, dedup, None if symmetry else ())
    report.timings_ms["image"] = _ms(t0)
    report.scalarized = info["scalarized"]
    report.image = img
    report.hermitian = info["hermitian"]
    report.entry_variables = info["entry_variables"]
    report.coordinates = coords
    if report.hermitian:
        report.notes.append("hermitian restriction: " + ", ".join(report.hermitian))
    t1 = time.monotonic()
    try:
        res = qe(QERequest(img, backend, max_degree, max_atoms, time_budget_ms))
    except CapacityExceeded as exc:
        report.timings_ms["qe"] = _ms(t1)
        report.notes.append(f"capacity exceeded: {exc}")
        exc.report = report
        raise
    report.timings_ms["qe"] = _ms(t1)
    report.qe_result = res
    t2 = time.monotonic()
    g = simplify(res.formula)
    report.output = back_substitute(g, coords)
    report.timings_ms["back_substitute"] = _ms(t2)
    report.timings_ms["total"] = _ms(t0)
    return report


def entrywise_naming(f: Formula, n: int) -> EntryNaming:
    used = all_vars(f)
    return EntryNaming.avoiding(used, used, n)


def transfer_entrywise(f: Formula, n: int, mode: str = REAL, backend: str = "auto",
                       max_degree: int = 8, max_atoms: int = 512,
                       time_budget_ms: int = 60_000) -> Formula:
    """Quantifier-free scalar formula in the entry variables of f's free matrix variables.

    Entry names follow :func:`entrywise_naming`; in complex mode each entry
    is further split into ``_re`` and ``_im`` parts.
    """
    naming = entrywise_naming(f, n)
    scal = scalarize_formula(prenex(f), n, mode, naming)
    if mode == COMPLEX:
        scal = split_complex(scal)
    res = qe(QERequest(prenex(scal), backend, max_degree, max_atoms, time_budget_ms))
    return simplify(res.formula)


# --- invariant-map harness ------------------------------------------------------

@dataclass(frozen=True)
class InvariantMap:
    """A coordinate map on matrix tuples, compared for fiber coherence."""
    name: str
    coordinates: Callable[[Sequence[Mat]], tuple]


def specht_map(n: int, m: int, dedup: bool = True) -> InvariantMap:
    from .specht import invariants
    idx = enumerate_words(n, m, dedup_cyclic=dedup)
    return InvariantMap(f"specht(n={n}, m={m})", lambda mats: invariants(mats, idx).values)


def entrywise_map() -> InvariantMap:
    return InvariantMap("entrywise", lambda mats: tuple(
        tuple(tuple(row) for row in a.entries) for a in mats))


@dataclass
class InvariantMapReport:
    map_name: str
    fiber_pairs: int = 0
    orbit_checks: int = 0
    counterexamples: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def check_invariant_map(inv: InvariantMap, pairs: Sequence[Tuple[Sequence[Mat], Sequence[Mat]]],
                        formulas: Sequence[Formula], var_names: Sequence[str],
                        conjugators: Sequence[Mat] = ()) -> InvariantMapReport:
    """Fiber coherence and orbit closure on sampled tuples and formulas.

    For each pair with equal coordinates every formula must agree; for each
    conjugator Q every formula must agree on A and Q*AQ.
    """
    from .arith import conjugate_by
    from .oracle import eval_matrix_qf

    rep = InvariantMapReport(inv.name)
    for a, b in pairs:
        env_a = dict(zip(var_names, a))
        env_b = dict(zip(var_names, b))
        if inv.coordinates(a) == inv.coordinates(b):
            rep.fiber_pairs += 1
            for phi in formulas:
                if eval_matrix_qf(phi, env_a) != eval_matrix_qf(phi, env_b):
                    rep.counterexamples.append({"kind": "fiber", "formula": to_text(phi),
                                                "a": [m.to_json() for m in a],
                                                "b": [m.to_json() for m in b]})
        for q in conjugators:
            if q.n != a[0].n or q.mode != a[0].mode:
                continue
            moved = {k: conjugate_by(v, q) for k, v in env_a.items()}
            rep.orbit_checks += 1
            for phi in formulas:
                if eval_matrix_qf(phi, env_a) != eval_matrix_qf(phi, moved):
                    rep.counterexamples.append({"kind": "orbit", "formula": to_text(phi),
                                                "a": [m.to_json() for m in a],
                                                "q": q.to_json()})
    return rep
