import random
from fractions import Fraction

import pytest

from matqe.arith import COMPLEX, REAL, GaussRational, Mat, conjugate_by
from matqe.formula import Var, free_vars, is_quantifier_free
from matqe.oracle import (eval_matrix_qf, eval_qf, psd_oracle, random_matrix_formula,
                          sample_matrices, sample_orthogonal)
from matqe.rcf.qe import CapacityExceeded
from matqe.scalarize import im_name, re_name
from matqe.syntax import SCALAR, parse, to_text
from matqe.transfer import (back_substitute, check_invariant_map, entrywise_map, entrywise_naming,
                            image_formula, qe_matrix, specht_map, transfer_entrywise)

PROFILES = ("general", "symmetric", "psd", "nilpotent", "boundary", "central")


def samples(n, mode, count, seed):
    rng_out = []
    per = max(1, count // len(PROFILES))
    for k, p in enumerate(PROFILES):
        rng_out += sample_matrices(n, mode, per, seed=seed + k, profile=p)
    return rng_out


def test_image_formula_n1():
    img, coords, info = image_formula(parse("X = 0"), 1)
    assert coords.names == ("tr_X", "tr_Xs")
    assert free_vars(img) == set(coords.names)
    assert info["entry_variables"] == 1
    rep = qe_matrix(parse("X = 0"), 1)
    assert to_text(rep.qe_result.formula) == "tr_X = 0 and tr_Xs = 0"


def test_image_free_vars_are_coordinates():
    img, coords, _ = image_formula(parse("0 <= X and tr(X) = 1"), 2)
    assert free_vars(img) == set(coords.names)
    assert len(coords.names) == 15


def test_back_substitute_examples():
    _, coords, _ = image_formula(parse("X = X"), 2, hermitian=())
    assert to_text(back_substitute(parse("tr_X >= 0", SCALAR), coords)) == "0 <= tr(X)"
    assert to_text(back_substitute(parse("true", SCALAR), coords)) == "true"
    g = back_substitute(parse("tr_X^2 - tr_X_X >= 0", SCALAR), coords)
    assert g == parse("0 <= tr(X)^2 - tr(X^2)") or all(
        eval_matrix_qf(g, {"X": a}) == eval_matrix_qf(parse("0 <= tr(X)^2 - tr(X^2)"), {"X": a})
        for a in samples(2, REAL, 60, 3))
    with pytest.raises(ValueError):
        back_substitute(parse("y = 0", SCALAR), coords)


def test_psd_pipeline():
    rep = qe_matrix(parse("0 <= X"), 2)
    psi = rep.output
    assert is_quantifier_free(psi) and free_vars(psi) <= {"X"}
    assert rep.entry_variables <= 4 and rep.hermitian == ["X"]
    for a in samples(2, REAL, 300, 40):
        assert eval_matrix_qf(psi, {"X": a}) == psd_oracle(a)


def test_center_pipeline():
    psi = qe_matrix(parse("forall Y: X*Y = Y*X"), 2).output
    center = parse("2*X = tr(X)")
    for a in samples(2, REAL, 300, 50):
        assert eval_matrix_qf(psi, {"X": a}) == eval_matrix_qf(center, {"X": a})


def test_quantifier_free_fixed_point():
    for text in ("X = X^* and tr(X) = 0", "X = 1"):
        f = parse(text)
        psi = qe_matrix(f, 2).output
        for a in samples(2, REAL, 120, 60):
            assert eval_matrix_qf(psi, {"X": a}) == eval_matrix_qf(f, {"X": a})


def test_orbit_invariance_of_output():
    psi = qe_matrix(parse("X = X^* and X*X = 1"), 2).output
    qs = sample_orthogonal(2, REAL, 40, seed=2)
    for q, a in zip(qs, samples(2, REAL, 40, 70)):
        assert eval_matrix_qf(psi, {"X": a}) == eval_matrix_qf(psi, {"X": conjugate_by(a, q)})


def test_report_json_and_capacity_report():
    rep = qe_matrix(parse("0 <= X"), 2)
    js = rep.to_json()
    assert js["entry_variables"] == 3 and js["output"] and js["diagnostics"]["steps"]
    with pytest.raises(CapacityExceeded) as exc:
        qe_matrix(parse("0 <= X"), 3)
    assert exc.value.report.n == 3 and exc.value.degree == 9


def test_transfer_entrywise_psd():
    f = parse("0 <= X")
    g = transfer_entrywise(f, 2)
    nm = entrywise_naming(f, 2)
    for a in samples(2, REAL, 300, 80):
        env = {nm.name("X", r + 1, s + 1): a.entries[r][s] for r in range(2) for s in range(2)}
        x, y, y2, z = env["X_1_1"], env["X_1_2"], env["X_2_1"], env["X_2_2"]
        classical = y == y2 and x + z >= 0 and x * z - y * y >= 0
        assert eval_qf(g, env) == classical


def test_transfer_entrywise_square_root():
    g = transfer_entrywise(parse("exists Y: Y*Y = X"), 1)
    for k in range(-5, 6):
        assert eval_qf(g, {"X_1_1": Fraction(k, 2)}) == (k >= 0)


def test_complex_n1_square_modulus():
    f = parse("exists Y: Y*Y^* = X")
    rep = qe_matrix(f, 1, COMPLEX)
    psi = rep.output
    assert free_vars(psi) <= {"X"}
    rng = random.Random(4)
    for _ in range(200):
        re = Fraction(rng.randint(-4, 4), rng.choice((1, 2)))
        im = Fraction(rng.choice((0, 0, 1, -2)))
        a = Mat.from_rows([[GaussRational(re, im)]], COMPLEX)
        assert eval_matrix_qf(psi, {"X": a}, 1, COMPLEX) == (im == 0 and re >= 0)


def test_invariant_map_harness():
    d12, d21, d13 = Mat.diag([1, 2]), Mat.diag([2, 1]), Mat.diag([1, 3])
    rng = random.Random(6)
    formulas = [random_matrix_formula(rng, ["X"]) for _ in range(30)]
    qs = sample_orthogonal(2, REAL, 5, seed=1)
    rep = check_invariant_map(specht_map(2, 1), [((d12,), (d21,)), ((d12,), (d13,))], formulas, ["X"], qs)
    assert rep.ok and rep.fiber_pairs == 1 and rep.orbit_checks > 0
    ent = check_invariant_map(entrywise_map(), [((d12,), (d21,))], formulas, ["X"])
    assert ent.ok and ent.fiber_pairs == 0
