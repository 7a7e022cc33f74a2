"""Acceptance criteria 1-10.

Each ``test_c<N>_...`` function checks one criterion; the terminal summary
prints one PASS/FAIL line per criterion.
"""
import itertools
import random
import time
from fractions import Fraction

import pytest

from matqe.arith import COMPLEX, REAL, GaussRational, Mat, charpoly_coeffs, conjugate_by
from matqe.cli import main
from matqe.oracle import (equiv_sampled, eval_matrix_qf, eval_qf, psd_oracle, random_matrix_formula,
                          sample_matrices, sample_orthogonal)
from matqe.rcf.qe import QERequest, qe
from matqe.specht import enumerate_words, invariants, letters, unitarily_similar, word_count
from matqe.syntax import SCALAR, parse, to_text
from matqe.transfer import entrywise_naming, qe_matrix, transfer_entrywise


def sampled(n, mode, profiles, per, seed):
    out = []
    for k, p in enumerate(profiles):
        out += sample_matrices(n, mode, per, seed=seed + 97 * k, profile=p)
    return out


# --- 1 ------------------------------------------------------------------------------

def test_c1_psd_round_trip():
    t = time.monotonic()
    rep = qe_matrix(parse("0 <= X"), 2)
    assert time.monotonic() - t < 600
    assert rep.hermitian == ["X"] and rep.entry_variables <= 4
    mats = sampled(2, REAL, ("general", "symmetric", "psd", "nilpotent", "boundary"), 200, 1)
    assert len(mats) >= 1000
    bad = [a for a in mats if eval_matrix_qf(rep.output, {"X": a}) != psd_oracle(a)]
    assert not bad


# --- 2 ------------------------------------------------------------------------------

def _seven_condition_block(quartic_last_term):
    def word(w, star):
        return "*".join("X^*" if (s and star) else "X" for s in w)
    lines = ["tr(X) >= 0", "tr(X)^2 - tr(X^2) >= 0", "tr(X)^2 - 2*tr(X^2) <= 0", "tr(X^2) >= 0",
             "tr(X)^3 - 3*tr(X)*tr(X^2) + 2*tr(X^3) = 0",
             f"tr(X)^4 - 2*tr(X)^2*tr(X^2) - {quartic_last_term} + 2*tr(X^4) = 0"]
    words = [w for length in range(1, 5) for w in itertools.product((False, True), repeat=length)]
    assert len(words) == 30
    lines += [f"tr({word(w, True)}) = tr({word(w, False)})" for w in words]
    return parse(" and ".join(lines))


def test_c2_seven_condition_formula():
    # the Newton identity for 2x2 needs "- tr(X^2)^2" in the quartic line
    block = _seven_condition_block("tr(X^2)^2")
    v = equiv_sampled(block, parse("X = X^* and 0 <= X"), "matrix", 2, REAL, 1000, seed=2)
    assert v.agree and v.trials == 1000


def test_c2_literal_quartic_is_a_typo():
    literal = _seven_condition_block("tr(X)^2")
    diag = {"X": Mat.diag([2, 0])}
    assert psd_oracle(diag["X"]) and not eval_matrix_qf(literal, diag)


# --- 3 ------------------------------------------------------------------------------

def test_c3_center():
    t = time.monotonic()
    psi = qe_matrix(parse("forall Y: X*Y = Y*X"), 2).output
    assert time.monotonic() - t < 300
    v = equiv_sampled(psi, parse("2*X = tr(X)"), "matrix", 2, REAL, 1000, seed=3)
    assert v.agree


# --- 4 ------------------------------------------------------------------------------

@pytest.mark.parametrize("mode", [REAL, COMPLEX])
def test_c4_specht_completeness(mode):
    t = time.monotonic()
    for m in (1, 2):
        idx = enumerate_words(2, m)
        qs = sample_orthogonal(2, mode, 100, seed=40 + m)
        tuples = [sample_matrices(2, mode, m, seed=400 + k, profile=("general", "symmetric", "nilpotent")[k % 3])
                  for k in range(100)]
        for q, tup in zip(qs, tuples):
            conj = [conjugate_by(a, q) for a in tup]
            assert invariants(tup, idx).values == invariants(conj, idx).values
        differing = 0
        k = 0
        while differing < 100:
            a = sample_matrices(2, mode, m, seed=9000 + k)
            b = sample_matrices(2, mode, m, seed=19000 + k)
            k += 1
            if [charpoly_coeffs(x) for x in a] == [charpoly_coeffs(x) for x in b]:
                continue
            differing += 1
            assert invariants(a, idx).values != invariants(b, idx).values
    assert time.monotonic() - t < 60


# --- 5 ------------------------------------------------------------------------------

def test_c5_conjugation_invariance():
    rng = random.Random(5)
    formulas = [random_matrix_formula(rng, ["X", "Y"], depth=2) for _ in range(100)]
    qs = sample_orthogonal(2, REAL, 50, seed=55)
    tuples = [sample_matrices(2, REAL, 2, seed=500 + k, profile=("general", "symmetric", "psd", "boundary")[k % 4])
              for k in range(50)]
    for f in formulas:
        for q, (a, b) in zip(qs, tuples):
            env = {"X": a, "Y": b}
            cenv = {"X": conjugate_by(a, q), "Y": conjugate_by(b, q)}
            assert eval_matrix_qf(f, env) == eval_matrix_qf(f, cenv), to_text(f)


# --- 6 ------------------------------------------------------------------------------

def test_c6_word_count_law():
    assert len(enumerate_words(2, 1, dedup_cyclic=False)) == 30
    for n in (1, 2):
        for m in (1, 2, 3):
            total = sum((2 * m) ** i for i in range(1, n * n + 1))
            assert word_count(n, m) == total
            assert len(enumerate_words(n, m, dedup_cyclic=False)) == total
            classes = {min(w[k:] + w[:k] for k in range(len(w)))
                       for length in range(1, n * n + 1)
                       for w in itertools.product(letters(m), repeat=length)}
            assert len(enumerate_words(n, m, dedup_cyclic=True)) == len(classes)


# --- 7 ------------------------------------------------------------------------------

GRID = [Fraction(k, 4) for k in range(-20, 21)]


def test_c7_rcf_battery():
    t = time.monotonic()
    disc = qe(QERequest(parse("exists x: x^2 + b*x + c = 0", SCALAR))).formula
    lin = qe(QERequest(parse("exists x: a*x + b = 0", SCALAR))).formula
    sq = qe(QERequest(parse("exists x: x^2 <= t", SCALAR))).formula
    boundary = [(Fraction(2 * k, 3), Fraction(k * k, 9)) for k in range(-9, 10)]
    for b, c in [(b, c) for b in GRID for c in GRID] + boundary:
        assert eval_qf(disc, {"b": b, "c": c}) == (b * b - 4 * c >= 0)
    for a, b in [(a, b) for a in GRID for b in GRID] + [(Fraction(0), Fraction(0))]:
        assert eval_qf(lin, {"a": a, "b": b}) == (a != 0 or b == 0)
    for t_ in [Fraction(k, 40) for k in range(-840, 841)]:
        assert eval_qf(sq, {"t": t_}) == (t_ >= 0)
    assert time.monotonic() - t < 10


# --- 8 ------------------------------------------------------------------------------

CROSS = [
    "0 <= X", "X = X^*", "X = X^* and tr(X) = 0", "X = X^* and tr(X) >= 0", "0 <= X and tr(X) = 1",
    "X <= 1", "0 <= X and X <= 1", "X = X^* and not 0 <= X", "X = X^* and X*X = 1",
    "X = X^* and (0 <= X or 0 <= -X)", "forall Y: X*Y = Y*X", "X = 0", "X = 1",
    "X = X^* and tr(X*X) <= 1", "X = X^* and X <= tr(X)", "X = -X^*", "X*X = 0",
    "X = X^* and X*X = X", "X = X^* and -1 <= X", "0 <= X and tr(X*X) = 1",
]


@pytest.mark.parametrize("text", CROSS)
def test_c8_cross_oracle(text):
    f = parse(text)
    psi = qe_matrix(f, 2).output
    g = transfer_entrywise(f, 2)
    nm = entrywise_naming(f, 2)
    mats = sampled(2, REAL, ("general", "symmetric", "psd", "nilpotent", "boundary", "central"), 15, 8)
    for a in mats:
        env = {nm.name("X", r + 1, s + 1): a.entries[r][s] for r in range(2) for s in range(2)}
        assert eval_matrix_qf(psi, {"X": a}) == eval_qf(g, env)


def test_c8_has_twenty_formulas():
    assert len(set(CROSS)) == 20


# --- 9 ------------------------------------------------------------------------------

def test_c9_complex_mode():
    psi = qe_matrix(parse("exists Y: Y*Y^* = X"), 1, COMPLEX).output
    rng = random.Random(9)
    for _ in range(500):
        re = Fraction(rng.randint(-6, 6), rng.choice((1, 2, 3)))
        im = Fraction(rng.choice((0, 0, 0, 1, -1, 2)), rng.choice((1, 2)))
        a = Mat.from_rows([[GaussRational(re, im)]], COMPLEX)
        assert eval_matrix_qf(psi, {"X": a}, 1, COMPLEX) == (im == 0 and re >= 0)


# --- 10 -----------------------------------------------------------------------------

def test_c10_n3_scope(capsys):
    t = time.monotonic()
    idx = enumerate_words(3, 1)
    qs = sample_orthogonal(3, REAL, 10, seed=10)
    mats = sample_matrices(3, REAL, 10, seed=11)
    for q, a in zip(qs, mats):
        assert invariants([a], idx).values == invariants([conjugate_by(a, q)], idx).values
        assert unitarily_similar([a], [conjugate_by(a, q)])
    assert not unitarily_similar([Mat.diag([1, 2, 3])], [Mat.diag([1, 2, 4])])
    assert time.monotonic() - t < 300
    assert main(["qe", "--n", "3", "0 <= X"]) == 2
    assert "capacity exceeded" in capsys.readouterr().err
