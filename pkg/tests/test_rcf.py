import random
from fractions import Fraction

import pytest

from matqe.oracle import eval_qf
from matqe.formula import Exists, Forall, free_vars, prenex, split_prefix
from matqe.rcf.atoms import evaluate, from_scalar, negate
from matqe.rcf.qe import CapacityExceeded, QERequest, qe, simplify
from matqe.rcf.sturm import exists_holds, isolate, squarefree, sturm_chain
from matqe.syntax import SCALAR, parse, to_text


def S(text):
    return parse(text, SCALAR)


def values(rng, names, zero_bias=0.3):
    out = {}
    for v in names:
        if rng.random() < zero_bias:
            out[v] = Fraction(rng.choice((0, 0, 1, -1)))
        else:
            out[v] = Fraction(rng.randint(-6, 6), rng.choice((1, 1, 2, 3)))
    return out


def single_block_oracle(f):
    """Truth of a one-quantifier formula via real-root isolation."""
    (kind, var), = split_prefix(prenex(f))[0]
    body = from_scalar(split_prefix(prenex(f))[1])

    def holds(env):
        if kind is Exists:
            return exists_holds(body, var, env)
        return not exists_holds(negate(body), var, env)
    return holds


# --- the oracle itself --------------------------------------------------------------

def test_sturm_basics():
    # x^2 - 2 has two real roots, x^2 + 1 none; coefficients lowest degree first
    assert len(isolate([Fraction(-2), Fraction(0), Fraction(1)])) == 2
    assert isolate([Fraction(1), Fraction(0), Fraction(1)]) == []
    # (x - 1)^2 (x + 2) squarefree part has degree 2
    p = [Fraction(2), Fraction(-3), Fraction(0), Fraction(1)]
    assert len(squarefree(p)) == 3
    assert len(sturm_chain([Fraction(-1), Fraction(0), Fraction(1)])) >= 2


def test_sturm_exists():
    f = from_scalar(S("x^2 = a"))
    assert exists_holds(f, "x", {"a": Fraction(2)})
    assert not exists_holds(f, "x", {"a": Fraction(-1)})
    g = from_scalar(S("x^3 - 3*x + 1 < 0 and x > 0"))
    assert exists_holds(g, "x", {})


# --- QE against the oracle -------------------------------------------------------------

SINGLE = [
    "exists x: a*x + b = 0",
    "exists x: x^2 + b*x + c = 0",
    "exists x: x^2 <= t",
    "exists x: a*x^2 + b*x + c = 0",
    "exists x: a*x^2 + b*x + c < 0",
    "forall x: x^2 + b*x + c > 0",
    "exists x: x > a and x < b",
    "exists x: a*x <= b and x >= 1",
    "exists x: x^3 + a*x + b = 0 and x > c",
    "exists x: x^4 + a*x^2 + b < 0",
    "forall x: x^4 - a*x^2 + 1 >= 0",
    "exists x: x^2 = a and x^3 = b",
]


@pytest.mark.parametrize("backend", ["auto", "generic"])
@pytest.mark.parametrize("text", SINGLE)
def test_qe_matches_oracle(text, backend):
    f = S(text)
    res = qe(QERequest(f, backend=backend))
    out = from_scalar(res.formula)
    assert free_vars(res.formula) <= free_vars(f)
    holds = single_block_oracle(f)
    rng = random.Random(hash(text) % 1000)
    for _ in range(150):
        env = values(rng, sorted(free_vars(f)))
        assert evaluate(out, env) == holds(env), (text, env)


def test_backend_recorded_in_diagnostics():
    res = qe(QERequest(S("exists x: x^2 + b*x + c = 0")))
    step, = res.diagnostics["steps"]
    assert step["variable"] == "x" and step["backend"] == "virtual-substitution"
    assert {"atoms_in", "atoms_out", "elapsed_ms"} <= set(res.diagnostics)


def test_linear_backend_rejects_quadratic():
    with pytest.raises(CapacityExceeded):
        qe(QERequest(S("exists x: x^2 + x = a"), backend="linear"))
    with pytest.raises(CapacityExceeded):
        qe(QERequest(S("exists x: x^3 + a*x + b = 0"), backend="virtual-substitution"))


def test_degree_cap():
    with pytest.raises(CapacityExceeded) as exc:
        qe(QERequest(S("exists x: x^9 + a = 0 and x^9 > b"), max_degree=8))
    assert exc.value.variable == "x" and exc.value.degree == 9


def test_multiple_blocks():
    cases = {
        "exists x: exists y: x^2 + y^2 <= r": "r >= 0",
        "forall x: exists y: y^2 = x^2 + a": "a >= 0",
        "exists x: forall y: x*y = 0": "true",
        "forall x: exists y: x*y = 1": "false",
        "exists x: exists y: x*y = 1 and x + y = s": "s^2 >= 4",
    }
    rng = random.Random(3)
    for text, want in cases.items():
        res = qe(QERequest(S(text)))
        g, h = from_scalar(res.formula), from_scalar(S(want))
        for _ in range(100):
            env = values(rng, sorted(free_vars(S(text))))
            assert evaluate(g, env) == evaluate(h, env), (text, env)


def test_deterministic_output():
    f = S("exists x: a*x^2 + b*x + c < 0")
    assert to_text(qe(QERequest(f)).formula) == to_text(qe(QERequest(f)).formula)


# --- simplifier -------------------------------------------------------------------

def test_simplify_examples():
    assert to_text(simplify(S("0 <= 1 and p = 0"))) == "p = 0"
    assert to_text(simplify(S("x + z >= 0 and x + z >= 0"))) == to_text(simplify(S("x + z >= 0")))
    assert to_text(simplify(S("not t = t"))) == "false"
    assert to_text(simplify(S("x <= 0 or 0 <= x"))) == "true"
    assert to_text(simplify(S("x < 0 and x > 0"))) == "false"


def test_simplify_uses_context():
    assert to_text(simplify(S("t = 1 and t^2 = 1"))) == to_text(simplify(S("t = 1")))
    g = simplify(S("t != 1 and (t - 1)^3 * y = 0"))
    assert eval_qf(g, {"t": Fraction(2), "y": Fraction(0)})
    assert not eval_qf(g, {"t": Fraction(2), "y": Fraction(1)})
    assert not eval_qf(g, {"t": Fraction(1), "y": Fraction(0)})


def test_simplify_idempotent_and_sound():
    rng = random.Random(8)
    texts = ["x*y <= 1 and (x = 0 or y < 2) and not x*y = 1",
             "(a <= b or b <= c) and (c < a or a = b) and a^2 >= 0",
             "x^2 + 1 > 0 -> y = 0"]
    for text in texts:
        f = S(text)
        g = simplify(f)
        assert simplify(g) == g
        for _ in range(200):
            env = values(rng, sorted(free_vars(f)))
            assert eval_qf(f, env) == eval_qf(g, env)
