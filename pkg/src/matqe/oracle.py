"""Exact evaluation, independent semantic oracles, samplers and sampled equivalence."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence

from .arith import (
    COMPLEX, GaussRational, Mat, REAL, cayley_orthogonal, conj, mat_mul, mat_star,
    principal_minors, to_scalar,
)
from .formula import (
    Add, And, Bottom, Eq, Formula, Implies, IntLit, Leq, Mul, Not, One, Or, Star, Term,
    Top, Tr, Var, Zero, free_vars, is_quantifier_free,
)
from .syntax import to_text

PROFILES = ("general", "symmetric", "psd", "nilpotent", "central", "boundary")


class MissingVariable(KeyError):
    pass


# --- scalar evaluation ------------------------------------------------------------

def _lookup(a: Mapping, name: str):
    try:
        return a[name]
    except KeyError:
        raise MissingVariable(f"no value for variable {name!r}") from None


def eval_scalar_term(t: Term, a: Mapping):
    if isinstance(t, Var):
        return _lookup(a, t.name)
    if isinstance(t, Zero):
        return Fraction(0)
    if isinstance(t, One):
        return Fraction(1)
    if isinstance(t, IntLit):
        return Fraction(t.value)
    if isinstance(t, Add):
        return eval_scalar_term(t.left, a) + eval_scalar_term(t.right, a)
    if isinstance(t, Mul):
        return eval_scalar_term(t.left, a) * eval_scalar_term(t.right, a)
    if isinstance(t, Star):
        return conj(eval_scalar_term(t.arg, a))
    raise TypeError(f"not a scalar term: {t!r}")


def _scalar_leq(x, y) -> bool:
    d = GaussRational.coerce(y) - GaussRational.coerce(x)
    return d.im == 0 and d.re >= 0


def eval_qf(f: Formula, a: Mapping) -> bool:
    """Truth of a quantifier-free scalar formula; x <= y means y - x is real and >= 0."""
    return _eval(f, a, eval_scalar_term,
                 lambda x, y: GaussRational.coerce(x) == GaussRational.coerce(y), _scalar_leq)


def _eval(f: Formula, a, term, eq, leq) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Eq):
        return eq(term(f.left, a), term(f.right, a))
    if isinstance(f, Leq):
        return leq(term(f.left, a), term(f.right, a))
    if isinstance(f, Not):
        return not _eval(f.arg, a, term, eq, leq)
    if isinstance(f, And):
        return all(_eval(g, a, term, eq, leq) for g in f.args)
    if isinstance(f, Or):
        return any(_eval(g, a, term, eq, leq) for g in f.args)
    if isinstance(f, Implies):
        return (not _eval(f.left, a, term, eq, leq)) or _eval(f.right, a, term, eq, leq)
    raise TypeError(f"not quantifier-free: {type(f).__name__}")


# --- matrix evaluation ------------------------------------------------------------

def psd_oracle(a: Mat) -> bool:
    """Hermitian with every principal minor nonnegative."""
    if not a.is_hermitian():
        return False
    for m in principal_minors(a):
        m = GaussRational.coerce(m)
        if m.im != 0 or m.re < 0:
            return False
    return True


def eval_matrix_term(t: Term, a: Mapping[str, Mat], n: int, mode: str) -> Mat:
    if isinstance(t, Var):
        m = _lookup(a, t.name)
        if m.n != n or m.mode != mode:
            from .arith import ShapeError
            raise ShapeError(f"{t.name} is {m.n}x{m.n} {m.mode}, expected {n}x{n} {mode}")
        return m
    if isinstance(t, Zero):
        return Mat.zero(n, mode)
    if isinstance(t, One):
        return Mat.identity(n, mode)
    if isinstance(t, IntLit):
        return Mat.scalar(n, t.value, mode)
    if isinstance(t, Add):
        return eval_matrix_term(t.left, a, n, mode) + eval_matrix_term(t.right, a, n, mode)
    if isinstance(t, Mul):
        return mat_mul(eval_matrix_term(t.left, a, n, mode), eval_matrix_term(t.right, a, n, mode))
    if isinstance(t, Star):
        return mat_star(eval_matrix_term(t.arg, a, n, mode))
    if isinstance(t, Tr):
        inner = eval_matrix_term(t.arg, a, n, mode)
        return Mat.scalar(n, inner.trace_scalar(), mode)
    raise TypeError(f"not a matrix term: {t!r}")


def eval_matrix_qf(f: Formula, a: Mapping[str, Mat], n: Optional[int] = None,
                   mode: Optional[str] = None) -> bool:
    """Truth of a quantifier-free matrix formula; <= is the positive semidefinite order."""
    if a:
        first = next(iter(a.values()))
        n = first.n if n is None else n
        mode = first.mode if mode is None else mode
    if n is None:
        n = 1
    mode = mode or REAL

    def term(t, env):
        return eval_matrix_term(t, env, n, mode)

    return _eval(f, a, term, lambda x, y: x == y, lambda x, y: psd_oracle(y - x))


# --- samplers -----------------------------------------------------------------------

def _rat(rng: random.Random, span: int = 3) -> Fraction:
    if rng.random() < 0.2:
        return Fraction(0)
    return Fraction(rng.randint(-span, span), rng.choice((1, 1, 1, 2, 3)))


def sample_scalar(rng: random.Random, mode: str = REAL, span: int = 3):
    if mode == REAL:
        return _rat(rng, span)
    im = _rat(rng, span) if rng.random() < 0.7 else Fraction(0)
    return GaussRational(_rat(rng, span), im)


def sample_scalars(count: int, seed: int = 0, mode: str = REAL, span: int = 3) -> list:
    rng = random.Random(seed)
    return [sample_scalar(rng, mode, span) for _ in range(count)]


def _general(rng, n, mode):
    return Mat(n, mode, tuple(tuple(sample_scalar(rng, mode) for _ in range(n)) for _ in range(n)))


def _hermitian(rng, n, mode):
    b = _general(rng, n, mode)
    rows = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                rows[i][j] = to_scalar(GaussRational.coerce(b.entries[i][i]).re, mode)
            elif i < j:
                rows[i][j] = b.entries[i][j]
            else:
                rows[i][j] = conj(b.entries[j][i])
    return Mat(n, mode, tuple(tuple(r) for r in rows))


def _psd(rng, n, mode):
    b = _general(rng, n, mode)
    return mat_mul(mat_star(b), b)


def _nilpotent(rng, n, mode):
    rows = [[to_scalar(0, mode)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] = sample_scalar(rng, mode)
    u = Mat(n, mode, tuple(tuple(r) for r in rows))
    if rng.random() < 0.5:
        q = sample_orthogonal(n, mode, 1, rng.randrange(1 << 30))[0]
        u = mat_mul(mat_mul(mat_star(q), u), q)
    return u


def _central(rng, n, mode):
    return Mat.scalar(n, sample_scalar(rng, mode), mode)


def _boundary(rng, n, mode):
    kind = rng.randrange(7)
    if kind == 0:
        return Mat.zero(n, mode)
    if kind == 1:
        return Mat.identity(n, mode)
    if kind == 2:
        v = [sample_scalar(rng, mode) for _ in range(n)]
        return Mat(n, mode, tuple(tuple(v[i] * conj(v[j]) for j in range(n)) for i in range(n)))
    if kind == 3:
        c = sample_scalar(rng, REAL)
        d = [c] * n
        if n > 1 and rng.random() < 0.5:
            d[-1] = Fraction(0)
        return Mat.diag(d, mode)
    if kind == 4:
        return -_psd(rng, n, mode)
    if kind == 5:
        h = _hermitian(rng, n, mode)
        return h - Mat.scalar(n, GaussRational.coerce(h.entries[0][0]).re, mode)
    d = [Fraction(rng.randint(-2, 2)) for _ in range(n)]
    return Mat.diag(d, mode)


_PROFILE_FUNS = {
    "general": _general,
    "symmetric": _hermitian,
    "hermitian": _hermitian,
    "psd": _psd,
    "nilpotent": _nilpotent,
    "central": _central,
    "boundary": _boundary,
}


def sample_matrix(rng: random.Random, n: int, mode: str = REAL, profile: str = "general") -> Mat:
    try:
        fn = _PROFILE_FUNS[profile]
    except KeyError:
        raise ValueError(f"unknown profile {profile!r}") from None
    return fn(rng, n, mode)


def sample_matrices(n: int, mode: str = REAL, count: int = 1, seed: int = 0,
                    profile: str = "general") -> List[Mat]:
    rng = random.Random(seed)
    return [sample_matrix(rng, n, mode, profile) for _ in range(count)]


def sample_orthogonal(n: int, mode: str = REAL, count: int = 1, seed: int = 0) -> List[Mat]:
    """Exact orthogonal (real) or unitary (complex) matrices via the Cayley transform."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        rows = [[to_scalar(0, mode)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                if i == j:
                    if mode == COMPLEX:
                        rows[i][i] = GaussRational(Fraction(0), _rat(rng))
                    continue
                x = sample_scalar(rng, mode)
                rows[i][j] = x
                rows[j][i] = -conj(x)
        s = Mat(n, mode, tuple(tuple(r) for r in rows))
        out.append(cayley_orthogonal(s))
    return out


# --- sampled equivalence --------------------------------------------------------------

@dataclass
class EquivVerdict:
    agree: bool
    trials: int
    seed: int
    counterexample: Optional[dict] = None

    def to_json(self) -> dict:
        return {"agree": self.agree, "trials": self.trials,
                "counterexample": self.counterexample, "seed": self.seed}


def _value_json(v):
    if isinstance(v, Mat):
        return v.to_json()
    from .arith import scalar_to_json
    return scalar_to_json(v)


def sample_assignment(rng: random.Random, names: Sequence[str], language: str, n: int,
                      mode: str, profile: str) -> Dict[str, object]:
    if language == "matrix":
        return {x: sample_matrix(rng, n, mode, profile) for x in names}
    out = {}
    for x in names:
        if profile == "boundary" and rng.random() < 0.5:
            out[x] = to_scalar(rng.choice((0, 0, 1, -1)), mode)
        else:
            out[x] = sample_scalar(rng, mode)
    return out


def equiv_sampled(f: Formula, g: Formula, language: str = "matrix", n: int = 2,
                  mode: str = REAL, trials: int = 1000, seed: int = 0,
                  profiles: Sequence[str] = PROFILES) -> EquivVerdict:
    """Compare f and g on sampled assignments (evidence, not proof)."""
    for h in (f, g):
        if not is_quantifier_free(h):
            raise ValueError("equiv_sampled expects quantifier-free formulas")
    names = sorted(free_vars(f) | free_vars(g))
    rng = random.Random(seed)
    ev = eval_matrix_qf if language == "matrix" else eval_qf
    for k in range(trials):
        profile = profiles[k % len(profiles)]
        a = sample_assignment(rng, names, language, n, mode, profile)
        if language == "matrix":
            vf, vg = ev(f, a, n, mode), ev(g, a, n, mode)
        else:
            vf, vg = ev(f, a), ev(g, a)
        if vf != vg:
            return EquivVerdict(False, k + 1, seed, {
                "assignment": {x: _value_json(v) for x, v in a.items()},
                "profile": profile, "left": vf, "right": vg})
    return EquivVerdict(True, trials, seed)


# --- formula generator -------------------------------------------------------------

def random_matrix_term(rng: random.Random, names: Sequence[str], depth: int = 2) -> Term:
    if depth <= 0 or rng.random() < 0.3:
        pick = rng.randrange(4)
        if pick == 0:
            return IntLit(rng.randint(-2, 2))
        if pick == 1:
            return One()
        return Var(rng.choice(list(names)))
    kind = rng.randrange(4)
    if kind == 0:
        return Add(random_matrix_term(rng, names, depth - 1), random_matrix_term(rng, names, depth - 1))
    if kind == 1:
        return Mul(random_matrix_term(rng, names, depth - 1), random_matrix_term(rng, names, depth - 1))
    if kind == 2:
        return Star(random_matrix_term(rng, names, depth - 1))
    return Tr(random_matrix_term(rng, names, depth - 1))


def random_matrix_formula(rng: random.Random, names: Sequence[str], depth: int = 2) -> Formula:
    """A random quantifier-free matrix formula over the given variables."""
    if depth <= 0 or rng.random() < 0.35:
        l = random_matrix_term(rng, names)
        r = random_matrix_term(rng, names)
        return Eq(l, r) if rng.random() < 0.5 else Leq(l, r)
    kind = rng.randrange(3)
    if kind == 0:
        return Not(random_matrix_formula(rng, names, depth - 1))
    parts = (random_matrix_formula(rng, names, depth - 1), random_matrix_formula(rng, names, depth - 1))
    return And(parts) if kind == 1 else Or(parts)


__all__ = [
    "PROFILES", "MissingVariable", "eval_qf", "eval_matrix_qf", "eval_scalar_term",
    "eval_matrix_term", "psd_oracle", "sample_matrices", "sample_matrix", "sample_orthogonal",
    "sample_scalars", "sample_assignment", "equiv_sampled", "EquivVerdict",
    "random_matrix_formula", "random_matrix_term", "to_text",
]
