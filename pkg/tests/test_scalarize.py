import random
from fractions import Fraction

import pytest

from matqe.arith import COMPLEX, REAL, GaussRational
from matqe.formula import Exists, Forall, Var, is_quantifier_free, split_prefix
from matqe.oracle import eval_matrix_qf, eval_qf, psd_oracle, random_matrix_formula, sample_matrices
from matqe.scalarize import (EntryNaming, im_name, licensed_hermitian, psd_encoding, re_name,
                             scalarize_formula, scalarize_term, split_complex)
from matqe.syntax import SCALAR, parse, parse_term
from matqe.terms import term_to_poly
from matqe.poly import Poly

NAMING = EntryNaming()


def entries_env(env, n):
    return {NAMING.name(v, r + 1, s + 1): m.entries[r][s]
            for v, m in env.items() for r in range(n) for s in range(n)}


def split_env(env):
    out = {}
    for k, v in env.items():
        v = v if isinstance(v, GaussRational) else GaussRational(v, 0)
        out[re_name(k)] = v.re
        out[im_name(k)] = v.im
    return out


def P(t):
    return term_to_poly(t)


def test_scalarize_term_examples():
    sm = scalarize_term(parse_term("X"), 2)
    assert [[P(t) for t in row] for row in sm.entries] == [
        [Poly.var("X_1_1"), Poly.var("X_1_2")], [Poly.var("X_2_1"), Poly.var("X_2_2")]]
    tr = scalarize_term(parse_term("tr(X)"), 2)
    s = Poly.var("X_1_1") + Poly.var("X_2_2")
    assert [[P(t) for t in row] for row in tr.entries] == [[s, Poly()], [Poly(), s]]
    xx = scalarize_term(parse_term("X*X^*"), 2)
    assert P(xx.entries[0][0]) == Poly.var("X_1_1") ** 2 + Poly.var("X_1_2") ** 2


def test_psd_encoding_n2_matches_classical_form():
    g = scalarize_formula(parse("0 <= X"), 2, hermitian={"X"})
    x, y, z = (Poly.var(v) for v in ("X_1_1", "X_1_2", "X_2_2"))
    polys = {P(a.right) for a in g.args if type(a).__name__ == "Leq"}
    assert polys == {x + z, x * z - y * y}


def test_symmetry_condition():
    g = scalarize_formula(parse("X = X^*"), 2)
    for r in range(-2, 3):
        env = {"X_1_1": Fraction(1), "X_2_2": Fraction(2), "X_1_2": Fraction(r), "X_2_1": Fraction(1)}
        assert eval_qf(g, env) == (r == 1)


def test_center_block():
    g = scalarize_formula(parse("forall Y: X*Y = Y*X"), 2)
    prefix, matrix = split_prefix(g)
    assert [k for k, _ in prefix] == [Forall] * 4
    assert len(matrix.args) == 4


def test_licensed_hermitian():
    assert licensed_hermitian(parse("X = X^* and 0 <= X")) == {"X"}
    assert licensed_hermitian(parse("0 <= X")) == {"X"}
    assert licensed_hermitian(parse("X = X^* or tr(X) = 0")) == set()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_psd_encoding_agrees_with_minor_oracle(n):
    f = parse("0 <= X")
    g = scalarize_formula(f, n)
    count = 1000 if n < 3 else 300
    profiles = ["general", "symmetric", "psd", "boundary", "central"]
    for k, profile in enumerate(profiles):
        for a in sample_matrices(n, REAL, count // len(profiles), seed=100 + k, profile=profile):
            assert eval_qf(g, entries_env({"X": a}, n)) == psd_oracle(a)


@pytest.mark.parametrize("mode", [REAL, COMPLEX])
def test_semantic_soundness_on_random_formulas(mode):
    rng = random.Random(21)
    for k in range(40):
        f = random_matrix_formula(rng, ["X", "Y"], depth=2)
        g = scalarize_formula(f, 2, mode, NAMING)
        h = split_complex(g) if mode == COMPLEX else None
        for s in range(5):
            a, b = sample_matrices(2, mode, 2, seed=1000 * k + s, profile=("general", "symmetric", "boundary")[s % 3])
            env = {"X": a, "Y": b}
            want = eval_matrix_qf(f, env, 2, mode)
            flat = entries_env(env, 2)
            assert eval_qf(g, flat) == want
            if h is not None:
                assert eval_qf(h, split_env(flat)) == want


def test_split_complex_examples():
    f = split_complex(parse("v = v^*", SCALAR))
    assert eval_qf(f, {"v_re": Fraction(3), "v_im": Fraction(0)})
    assert not eval_qf(f, {"v_re": Fraction(3), "v_im": Fraction(1)})
    g = split_complex(parse("exists v: v*v = -1 and v = -v^*", SCALAR))
    prefix, matrix = split_prefix(g)
    assert [k for k, _ in prefix] == [Exists, Exists]
    assert eval_qf(matrix, {"v_re": Fraction(0), "v_im": Fraction(1)})
    real_shaped = split_complex(parse("x*y <= 1", SCALAR))
    assert eval_qf(real_shaped, {"x_re": Fraction(2), "x_im": Fraction(0), "y_re": Fraction(1, 2), "y_im": Fraction(0)})
