from hypothesis import given, settings, strategies as st

import pytest

from matqe.formula import (Add, And, Bottom, Eq, Exists, Forall, Implies, IntLit, Leq, Mul,
                           Not, One, Or, Star, Top, Tr, Var, Zero)
from matqe.syntax import MATRIX, SCALAR, ParseError, parse, parse_term, to_text


def test_examples():
    assert parse("X >= 0") == Leq(Zero(), Var("X"))
    assert parse("forall Y: X*Y = Y*X") == Forall("Y", Eq(Mul(Var("X"), Var("Y")), Mul(Var("Y"), Var("X"))))
    f = parse("tr(X)^2 - tr(X^2) >= 0")
    tx = Tr(Var("X"))
    assert f.left == Zero()
    assert f.right == Add(Mul(tx, tx), Mul(IntLit(-1), Tr(Mul(Var("X"), Var("X")))))


def test_print():
    assert to_text(Leq(Zero(), Var("X"))) == "0 <= X"


def test_unicode_and_prime_star():
    assert parse("∀Y: X·Y = Y·X") == parse("forall Y: X*Y = Y*X")
    assert parse("X' = X") == parse("X^* = X")
    assert parse("0 ⩽ X") == parse("0 <= X")


@pytest.mark.parametrize("bad", ["X + ", "X <= ", "forall : X = 0", "tr X = 0", "X = 0 and", "(X = 0"])
def test_errors_have_spans(bad):
    with pytest.raises(ParseError) as exc:
        parse(bad)
    span = exc.value.span
    assert 0 <= span.start <= span.end <= len(bad.encode())


def test_seven_condition_block_round_trips():
    text = ("tr(X) >= 0 and tr(X)^2 - tr(X^2) >= 0 and tr(X)^2 - 2*tr(X^2) <= 0 and tr(X^2) >= 0 "
            "and tr(X)^3 - 3*tr(X)*tr(X^2) + 2*tr(X^3) = 0 "
            "and tr(X)^4 - 2*tr(X)^2*tr(X^2) - tr(X^2)^2 + 2*tr(X^4) = 0")
    f = parse(text)
    assert parse(to_text(f)) == f


NAMES_M = ["X", "Y", "Z"]
NAMES_S = ["x", "y", "z"]


def terms(names, with_tr=True):
    leaves = st.one_of(st.sampled_from([Var(v) for v in names]), st.just(Zero()), st.just(One()),
                       st.integers(-5, 5).filter(lambda k: k not in (0, 1)).map(IntLit))
    return st.recursive(leaves, lambda t: st.one_of(
        st.tuples(t, t).map(lambda p: Add(*p)),
        st.tuples(t, t).map(lambda p: Mul(*p)),
        t.map(Tr) if with_tr else t.map(Star), t.map(Star)), max_leaves=8)


def formulas(names):
    ts = terms(names, with_tr=names is NAMES_M)
    atoms = st.one_of(st.tuples(ts, ts).map(lambda p: Eq(*p)), st.tuples(ts, ts).map(lambda p: Leq(*p)),
                      st.just(Top()), st.just(Bottom()))
    return st.recursive(atoms, lambda f: st.one_of(
        f.map(Not),
        st.lists(f, min_size=2, max_size=3).map(lambda a: And(tuple(a))),
        st.lists(f, min_size=2, max_size=3).map(lambda a: Or(tuple(a))),
        st.tuples(f, f).map(lambda p: Implies(*p)),
        st.tuples(st.sampled_from(names), f).map(lambda p: Exists(*p)),
        st.tuples(st.sampled_from(names), f).map(lambda p: Forall(*p))), max_leaves=6)


def _canon(text, lang):
    return to_text(parse(text, lang))


@settings(max_examples=150, deadline=None)
@given(formulas(NAMES_M))
def test_round_trip_matrix(f):
    text = to_text(f)
    g = parse(text, MATRIX)
    # printing is canonical after one pass and parse inverts print
    assert to_text(g) == _canon(to_text(g), MATRIX)
    assert parse(to_text(g), MATRIX) == g


@settings(max_examples=100, deadline=None)
@given(formulas(NAMES_S))
def test_round_trip_scalar(f):
    g = parse(to_text(f), SCALAR)
    assert parse(to_text(g), SCALAR) == g


@settings(max_examples=100, deadline=None)
@given(terms(NAMES_M))
def test_term_round_trip(t):
    from matqe.syntax import print_term
    u = parse_term(print_term(t))
    assert parse_term(print_term(u)) == u
