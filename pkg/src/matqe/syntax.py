"""Concrete syntax for matrix and scalar formulas.

Grammar (loosest to tightest)::

    formula  := ("forall" | "exists") ident ("," ident)* ":" formula | iff
    iff      := implies ("<->" implies)?
    implies  := or ("->" implies)?
    or       := and (("or" | "|") and)*
    and      := unary (("and" | "&") unary)*
    unary    := ("not" | "~" | "!") unary | quant | atom
    atom     := "true" | "false" | sum rel sum | "(" formula ")"
    rel      := "=" | "!=" | "<=" | ">=" | "<" | ">"
    sum      := prod (("+" | "-") prod)*
    prod     := neg ("*" neg)*
    neg      := "-" neg | postfix
    postfix  := primary ("^" int | "^*" | "'")*
    primary  := ident | int | "tr" "(" sum ")" | "(" sum ")"

``>=`` and ``>`` (and ``<``, ``!=``, ``<->``) are parsed into the core
connectives; the printer emits ASCII only.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional

from .formula import (
    Add, And, Bottom, Eq, Exists, Forall, Formula, Implies, IntLit, Leq, Mul,
    Not, One, Or, Star, Term, Top, Tr, Var, Zero,
)

MATRIX = "matrix"
SCALAR = "scalar"

KEYWORDS = {"forall", "exists", "and", "or", "not", "true", "false", "tr"}

_UNICODE = {
    "∀": "forall", "∃": "exists", "∧": "and", "∨": "or", "¬": "not",
    "≤": "<=", "⩽": "<=", "≥": ">=", "⩾": ">=", "≠": "!=", "→": "->",
    "↔": "<->", "·": "*", "−": "-",
}

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><->|->|<=|>=|!=|\^\*|[=<>+\-*^'():,&|~!])
  | (?P<uni>[∀∃∧∨¬≤⩽≥⩾≠→↔·−])
""", re.VERBOSE)


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan, expected: tuple = ()):
        self.span = span
        self.expected = tuple(expected)
        detail = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{message} at bytes {span.start}..{span.end}{detail}")


@dataclass
class _Tok:
    kind: str
    text: str
    start: int
    end: int


def _tokenize(text: str) -> List[_Tok]:
    toks = []
    pos = 0
    # byte offsets for spans
    offsets = [0]
    for ch in text:
        offsets.append(offsets[-1] + len(ch.encode("utf-8")))
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}",
                             SourceSpan(offsets[pos], offsets[pos + 1]))
        kind = m.lastgroup
        s, e = m.start(), m.end()
        pos = e
        if kind == "ws":
            continue
        tok = m.group()
        if kind == "uni":
            tok = _UNICODE[tok]
            kind = "ident" if tok in KEYWORDS else "op"
        if kind == "ident" and tok in KEYWORDS:
            kind = "kw"
        toks.append(_Tok(kind, tok, offsets[s], offsets[e]))
    end = offsets[-1]
    toks.append(_Tok("eof", "", end, end))
    return toks


class _Parser:
    def __init__(self, text: str, language: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.language = language

    # helpers
    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def at(self, *texts) -> bool:
        t = self.cur
        return t.kind in ("op", "kw") and t.text in texts

    def take(self) -> _Tok:
        t = self.cur
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            self.fail(f"expected {text!r}", (text,))
        return self.take()

    def fail(self, msg: str, expected=()):
        t = self.cur
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"{msg}, found {found}", SourceSpan(t.start, t.end), expected)

    # formulas
    def formula(self) -> Formula:
        if self.at("forall", "exists"):
            return self.quant()
        return self.iff()

    def quant(self) -> Formula:
        kind = Forall if self.take().text == "forall" else Exists
        names = [self.ident()]
        while self.at(","):
            self.take()
            names.append(self.ident())
        self.expect(":")
        body = self.formula()
        for v in reversed(names):
            body = kind(v, body)
        return body

    def ident(self) -> str:
        if self.cur.kind != "ident":
            self.fail("expected a variable name", ("identifier",))
        return self.take().text

    def iff(self) -> Formula:
        left = self.implies()
        if self.at("<->"):
            self.take()
            right = self.implies()
            return And((Implies(left, right), Implies(right, left)))
        return left

    def implies(self) -> Formula:
        left = self.disjunction()
        if self.at("->"):
            self.take()
            if self.at("forall", "exists"):
                return Implies(left, self.quant())
            return Implies(left, self.implies())
        return left

    def disjunction(self) -> Formula:
        args = [self.conjunction()]
        while self.at("or", "|"):
            self.take()
            args.append(self.conjunction())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conjunction(self) -> Formula:
        args = [self.unary()]
        while self.at("and", "&"):
            self.take()
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def unary(self) -> Formula:
        if self.at("not", "~", "!"):
            self.take()
            return Not(self.unary())
        if self.at("forall", "exists"):
            return self.quant()
        return self.atom()

    def atom(self) -> Formula:
        if self.at("true"):
            self.take()
            return Top()
        if self.at("false"):
            self.take()
            return Bottom()
        if self.at("("):
            # parenthesized formula or parenthesized term starting a relation
            save = self.i
            self.take()
            try:
                f = self.formula()
                self.expect(")")
                if not self.at("=", "!=", "<=", ">=", "<", ">", "+", "-", "*", "^", "^*", "'"):
                    return f
            except ParseError:
                pass
            self.i = save
        left = self.sum()
        if not self.at("=", "!=", "<=", ">=", "<", ">"):
            self.fail("expected a relation", ("=", "!=", "<=", ">=", "<", ">"))
        op = self.take().text
        right = self.sum()
        if op == "=":
            return Eq(left, right)
        if op == "!=":
            return Not(Eq(left, right))
        if op == "<=":
            return Leq(left, right)
        if op == ">=":
            return Leq(right, left)
        if op == "<":
            return And((Leq(left, right), Not(Eq(left, right))))
        return And((Leq(right, left), Not(Eq(right, left))))

    # terms
    def sum(self) -> Term:
        t = self.prod()
        while self.at("+", "-"):
            op = self.take().text
            r = self.prod()
            t = Add(t, r) if op == "+" else Add(t, Mul(IntLit(-1), r))
        return t

    def prod(self) -> Term:
        t = self.neg()
        while self.at("*"):
            self.take()
            t = Mul(t, self.neg())
        return t

    def neg(self) -> Term:
        if self.at("-"):
            self.take()
            if self.cur.kind == "int" and not self._followed_by_postfix():
                k = int(self.take().text)
                if k == 0:
                    return Mul(IntLit(-1), Zero())
                return IntLit(-k)
            return Mul(IntLit(-1), self.neg())
        return self.postfix()

    def _followed_by_postfix(self) -> bool:
        nxt = self.toks[self.i + 1]
        return nxt.kind == "op" and nxt.text in ("^", "^*", "'")

    def postfix(self) -> Term:
        t = self.primary()
        while True:
            if self.at("^*", "'"):
                self.take()
                t = Star(t)
            elif self.at("^"):
                self.take()
                if self.cur.kind != "int":
                    self.fail("expected an exponent", ("integer", "*"))
                k = int(self.take().text)
                if k < 1:
                    self.fail("exponent must be positive")
                base = t
                for _ in range(k - 1):
                    t = Mul(t, base)
            else:
                return t

    def primary(self) -> Term:
        tok = self.cur
        if tok.kind == "int":
            self.take()
            k = int(tok.text)
            return Zero() if k == 0 else One() if k == 1 else IntLit(k)
        if self.at("tr"):
            self.take()
            if self.language == SCALAR:
                raise ParseError("tr is not available in the scalar language",
                                 SourceSpan(tok.start, tok.end))
            self.expect("(")
            arg = self.sum()
            self.expect(")")
            return Tr(arg)
        if tok.kind == "ident":
            self.take()
            if self.at("("):
                raise ParseError(f"{tok.text!r} is not a function symbol",
                                 SourceSpan(tok.start, self.cur.end))
            return Var(tok.text)
        if self.at("("):
            self.take()
            t = self.sum()
            self.expect(")")
            return t
        self.fail("expected a term", ("identifier", "integer", "tr", "("))


def parse(text: str, language: str = MATRIX) -> Formula:
    p = _Parser(text, language)
    f = p.formula()
    if p.cur.kind != "eof":
        p.fail("unexpected trailing input", ("end of input",))
    return f


def parse_term(text: str, language: str = MATRIX) -> Term:
    p = _Parser(text, language)
    t = p.sum()
    if p.cur.kind != "eof":
        p.fail("unexpected trailing input", ("end of input",))
    return t


# --- printer -----------------------------------------------------------------

def _is_neg(t: Term) -> bool:
    return isinstance(t, Mul) and t.left == IntLit(-1)


def _power(t: Term):
    """Return (base, k) if t is the left-nested product base*base*...*base."""
    if not isinstance(t, Mul):
        return t, 1
    base = t.right
    k = 1
    cur = t.left
    while isinstance(cur, Mul) and cur.right == base and cur != base:
        k += 1
        cur = cur.left
    if cur == base:
        return base, k + 1
    return t, 1


def print_term(t: Term) -> str:
    return _term(t, 0)


# precedence: 0 sum, 1 product, 2 unary minus, 3 postfix/primary
def _term(t: Term, ctx: int) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, One):
        return "1"
    if isinstance(t, IntLit):
        s = str(t.value)
        if t.value < 0 and ctx >= 2:
            return f"({s})"
        return s
    if isinstance(t, Tr):
        return f"tr({_term(t.arg, 0)})"
    if isinstance(t, Star):
        return f"{_term(t.arg, 3)}^*"
    if isinstance(t, Add):
        left = _term(t.left, 0)
        if _is_neg(t.right):
            s = f"{left} - {_term(t.right.right, 1)}"
        else:
            s = f"{left} + {_term(t.right, 1)}"
        return f"({s})" if ctx > 0 else s
    if isinstance(t, Mul):
        base, k = _power(t)
        if k > 1:
            return f"{_term(base, 3)}^{k}"
        s = f"{_term(t.left, 1)} * {_term(t.right, 2)}"
        return f"({s})" if ctx > 1 else s
    raise TypeError(f"not a term: {t!r}")


def _left_operand_of_mul(t):
    return t


def to_text(f) -> str:
    """Render a formula (or term) as ASCII text that parses back to the same AST."""
    if isinstance(f, Term):
        return print_term(f)
    return _formula(f, 0)


# formula precedence: 0 quantifier/implies, 1 or, 2 and, 3 not/atom
def _formula(f: Formula, ctx: int) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Eq):
        return f"{_term(f.left, 0)} = {_term(f.right, 0)}"
    if isinstance(f, Leq):
        return f"{_term(f.left, 0)} <= {_term(f.right, 0)}"
    if isinstance(f, Not):
        if isinstance(f.arg, Eq):
            # "a != b" parses back to Not(Eq(a, b))
            return f"{_term(f.arg.left, 0)} != {_term(f.arg.right, 0)}"
        return f"not {_formula(f.arg, 3)}"
    if isinstance(f, (And, Or)):
        if len(f.args) < 2:
            raise ValueError("And/Or nodes need at least two arguments to print")
        mine = 2 if isinstance(f, And) else 1
        word = " and " if mine == 2 else " or "
        s = word.join(_formula(a, mine + 1) for a in f.args)
        return f"({s})" if ctx > mine else s
    if isinstance(f, Implies):
        s = f"{_formula(f.left, 1)} -> {_formula(f.right, 0)}"
        return f"({s})" if ctx > 0 else s
    if isinstance(f, (Exists, Forall)):
        kw = "exists" if isinstance(f, Exists) else "forall"
        s = f"{kw} {f.var}: {_formula(f.body, 0)}"
        return f"({s})" if ctx > 0 else s
    raise TypeError(f"not a formula: {f!r}")
