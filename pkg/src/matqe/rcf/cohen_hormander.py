"""Complete elimination of one existential variable by parametric sign matrices.

For a list of polynomials in ``x`` (coefficients in the parameters) a sign
matrix lists, left to right, the sign vectors on the alternating intervals
and roots of the real line.  The matrix of a family is derived from the
matrix of a family of lower degree (derivative of the highest-degree member
plus pseudo-remainders), with case distinctions on the signs of parameter
polynomials whenever a leading coefficient's sign is needed.  Each case
yields a concrete matrix; the formula holds for some x iff some row
satisfies it.
"""
from __future__ import annotations

import time
from typing import Callable, Dict, List, Optional, Sequence

from ..formula import And, FALSE, Formula, Or, TRUE
from ..poly import Poly
from .atoms import EQ, GT, LT, NE, PAtom, make_atom, sign

NZ = 2  # sign known to be nonzero, polarity undecided


class Inconsistent(Exception):
    """The current case assumptions cannot all hold."""


class Deadline:
    def __init__(self, seconds: Optional[float]):
        self.end = None if seconds is None else time.monotonic() + seconds

    def check(self):
        if self.end is not None and time.monotonic() > self.end:
            raise TimeoutError("time budget exhausted")


class _Signs:
    """Assumed signs of parameter polynomials (immutable; extend returns a copy)."""

    def __init__(self, table: Optional[Dict[Poly, int]] = None):
        self.table = table or {}

    def find(self, p: Poly) -> Optional[int]:
        if p.is_constant():
            return sign(p.constant_value())
        c, q = p.primitive()
        s = self.table.get(q)
        if s is None or s == NZ:
            return s
        return s if c > 0 else -s

    def assume(self, p: Poly, s: int) -> "_Signs":
        c, q = p.primitive()
        if s != NZ and c < 0:
            s = -s
        t = dict(self.table)
        t[q] = s
        return _Signs(t)


def _branch(cond: Formula, thunk: Callable[[], Formula]) -> Formula:
    try:
        return And((cond, thunk()))
    except Inconsistent:
        return FALSE


def _split_zero(sg: _Signs, p: Poly, cont_z, cont_nz) -> Formula:
    s = sg.find(p)
    if s == 0:
        return cont_z(sg)
    if s is not None:
        return cont_nz(sg)
    return Or((_branch(make_atom(p, EQ), lambda: cont_z(sg.assume(p, 0))),
               _branch(make_atom(p, NE), lambda: cont_nz(sg.assume(p, NZ)))))


def _split_sign(sg: _Signs, p: Poly, cont) -> Formula:
    s = sg.find(p)
    if s == NZ:
        return Or((_branch(make_atom(p, GT), lambda: cont(sg.assume(p, 1))),
                   _branch(make_atom(p, LT), lambda: cont(sg.assume(p, -1)))))
    return cont(sg)


def _split_tri(sg: _Signs, p: Poly, cont_z, cont_pn) -> Formula:
    return _split_zero(sg, p, cont_z, lambda s2: _split_sign(s2, p, cont_pn))


class SignMatrixQE:
    def __init__(self, var: str, deadline: Optional[Deadline] = None):
        self.x = var
        self.deadline = deadline or Deadline(None)

    # polynomial helpers in the main variable
    def deg(self, p: Poly) -> int:
        return p.degree(self.x) if p else -1

    def head(self, p: Poly) -> Poly:
        cs = p.coeff_list(self.x)
        return cs[-1]

    def behead(self, p: Poly) -> Poly:
        d = self.deg(p)
        xd = Poly.var(self.x) ** d
        return p - self.head(p) * xd

    def pseudo_rem(self, sg: _Signs, s: Poly, p: Poly) -> Poly:
        """Remainder r with sign(r) = sign(s) at every root of p."""
        x = self.x
        dp = self.deg(p)
        a = self.head(p)
        r = s
        k = 0
        xpoly = Poly.var(x)
        while r and self.deg(r) >= dp:
            dr = self.deg(r)
            lr = self.head(r)
            r = r * a - lr * p * xpoly ** (dr - dp)
            k += 1
        sa = sg.find(a)
        if sa == 0 or sa is None:
            raise Inconsistent("pseudo-division by a polynomial with undetermined head")
        if k % 2 == 0 or sa == 1:
            return r
        if sa == -1:
            return -r
        return a * r

    # the procedure
    def casesplit(self, done: List[tuple], todo: List[tuple], consts: Dict[int, int],
                  cont, sg: _Signs) -> Formula:
        self.deadline.check()
        if not todo:
            return self.matrix([p for _, p in done], self._rebuild(done, consts, cont), sg)
        (pos, p), rest = todo[0], todo[1:]
        h = self.head(p)
        const = self.deg(p) <= 0

        def zero_case(s2):
            if const:
                return self.casesplit(done, rest, {**consts, pos: 0}, cont, s2)
            return self.casesplit(done, [(pos, self.behead(p))] + rest, consts, cont, s2)

        def nonzero_case(s2):
            if const:
                return self.casesplit(done, rest, {**consts, pos: s2.find(h)}, cont, s2)
            return self.casesplit(done + [(pos, p)], rest, consts, cont, s2)

        return _split_tri(sg, h, zero_case, nonzero_case)

    @staticmethod
    def _rebuild(done, consts, cont):
        positions = [pos for pos, _ in done]
        width = len(done) + len(consts)

        def wrapped(mat, sg):
            rows = []
            for row in mat:
                full = [0] * width
                for pos, s in zip(positions, row):
                    full[pos] = s
                for pos, s in consts.items():
                    full[pos] = s
                rows.append(full)
            return cont(rows, sg)

        return wrapped

    def matrix(self, pols: List[Poly], cont, sg: _Signs) -> Formula:
        if not pols:
            return cont([[]], sg)
        i = max(range(len(pols)), key=lambda k: (self.deg(pols[k]), -k))
        p = pols[i]
        others = pols[:i] + pols[i + 1:]
        qs = [p.derivative(self.x)] + others
        gs = [self.pseudo_rem(sg, p, q) for q in qs]
        nq = len(qs)

        def cont2(mat, sg2):
            rows = self._deduce(mat, nq)
            # rows have columns [p, p', others...]; drop p', put p back at i
            out = []
            for r in rows:
                rest = r[2:]
                out.append(rest[:i] + [r[0]] + rest[i:])
            return cont(_condense(out), sg2)

        todo = list(enumerate(qs + gs))
        return self.casesplit([], todo, {}, cont2, sg)

    def _deduce(self, mat, nq):
        rows = []
        for r in mat:
            qd, gd = r[:nq], r[nq:]
            ps = NZ
            for q_sign, g_sign in zip(qd, gd):
                if q_sign == 0:
                    ps = g_sign
                    break
            rows.append([ps] + qd)
        rows = _condense(rows)
        # signs of p at -inf / +inf from p' on the outer intervals
        left = -rows[0][1]
        right = rows[-1][1]
        if left == 0 or right == 0:
            raise Inconsistent("derivative vanishes on an unbounded interval")
        seq = [[left]] + rows + [[right]]
        out = [seq[0]]
        k = 1
        while k < len(seq) - 1:
            interval = seq[k]
            lsign = out[-1][0]
            rsign = seq[k + 1][0]
            if lsign == 0 and rsign == 0:
                raise Inconsistent("adjacent roots without a root of the derivative between")
            if lsign == NZ or rsign == NZ:
                raise Inconsistent("undetermined sign at a root")
            if lsign == 0:
                out.append([rsign] + interval[1:])
            elif rsign == 0 or lsign == rsign:
                out.append([lsign] + interval[1:])
            else:
                out.append([lsign] + interval[1:])
                out.append([0] + interval[1:])
                out.append([rsign] + interval[1:])
            out.append(seq[k + 1])
            k += 2
        return out[1:-1]


def _condense(rows):
    """Drop root rows where no polynomial vanishes (merging the two intervals)."""
    out = [rows[0]]
    k = 1
    while k < len(rows):
        point, interval = rows[k], rows[k + 1]
        if 0 in point:
            out.append(point)
            out.append(interval)
        k += 2
    return out


def eliminate(formula: Formula, atoms: Sequence[PAtom], var: str,
              deadline: Optional[Deadline] = None) -> Formula:
    """Equivalent of  exists var: formula,  where formula is built from atoms."""
    from .atoms import evaluate  # noqa: F401  (kept for symmetry with callers)

    pols = []
    index = {}
    for a in atoms:
        if a.poly not in index:
            index[a.poly] = len(pols)
            pols.append(a.poly)

    def holds(row) -> bool:
        return _eval_signs(formula, {p: row[index[p]] for p in pols})

    def cont(mat, sg):
        return TRUE if any(holds(r) for r in mat) else FALSE

    qe = SignMatrixQE(var, deadline)
    return qe.casesplit([], list(enumerate(pols)), {}, cont, _Signs())


def _eval_signs(f: Formula, signs: Dict[Poly, int]) -> bool:
    if isinstance(f, PAtom):
        return signs[f.poly] in f.signs
    if isinstance(f, And):
        return all(_eval_signs(a, signs) for a in f.args)
    if isinstance(f, Or):
        return any(_eval_signs(a, signs) for a in f.args)
    return f == TRUE
