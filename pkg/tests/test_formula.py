import pytest

from matqe.formula import (And, CaptureError, Eq, Exists, Forall, IntLit, Leq, Mul, Not, One,
                           Or, Tr, Var, Zero, count_quantifiers, free_vars, is_quantifier_free,
                           nnf, prenex, split_prefix, substitute)
from matqe.oracle import eval_qf
from matqe.syntax import SCALAR, parse, to_text


def S(text):
    return parse(text, SCALAR)


def test_free_vars():
    assert free_vars(S("exists x: x = y")) == {"y"}
    assert free_vars(parse("X <= 0")) == {"X"}
    assert free_vars(parse("forall Y: X*Y = Y*X")) == {"X"}


def test_substitute():
    f = substitute(parse("x >= 0"), {"x": Tr(Var("X"))})
    assert f == Leq(Zero(), Tr(Var("X")))
    assert substitute(S("x = y"), {"x": One(), "y": One()}) == Eq(One(), One())
    g = substitute(S("exists x: x = y"), {"y": Var("x")})
    assert isinstance(g, Exists) and g.var != "x"
    assert free_vars(g) == {"x"}


def test_substitute_capture_without_rename():
    with pytest.raises(CaptureError):
        substitute(S("exists x: x = y"), {"y": Var("x")}, rename=False)


def test_substitute_identity_and_free_vars_law():
    f = S("exists z: x * z = y and x <= 1")
    assert substitute(f, {}) == f
    assert substitute(f, {"x": Var("x")}) == f
    g = substitute(f, {"x": Mul(Var("u"), Var("v"))})
    assert free_vars(g) == (free_vars(f) - {"x"}) | {"u", "v"}


def test_prenex_examples():
    p = prenex(S("not exists x: x = y"))
    assert isinstance(p, Forall) and p.body == Not(Eq(Var("x"), Var("y")))
    qf = S("x <= 1 or y = 2")
    assert prenex(qf) == qf
    two = prenex(S("(exists x: x = y) and (exists x: x <= y)"))
    prefix, matrix = split_prefix(two)
    assert [k for k, _ in prefix] == [Exists, Exists]
    assert len({v for _, v in prefix}) == 2
    assert is_quantifier_free(matrix)


def test_prenex_deterministic_and_count():
    text = "forall x: (exists y: x*y = 1) -> not (exists y: y*y = x)"
    a, b = prenex(S(text)), prenex(S(text))
    assert a == b and to_text(a) == to_text(b)
    assert count_quantifiers(a) == count_quantifiers(S(text))


def test_nnf_keeps_semantics():
    from fractions import Fraction
    f = S("not (x <= y -> (y = 1 or not x <= 0))")
    g = nnf(f)
    for x in range(-2, 3):
        for y in range(-2, 3):
            env = {"x": Fraction(x), "y": Fraction(y)}
            assert eval_qf(f, env) == eval_qf(g, env)


def test_intlit_is_sugar():
    t = parse("3 = X").left
    assert t == IntLit(3)
