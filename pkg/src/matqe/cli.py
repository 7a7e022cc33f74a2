"""Command-line interface: ``matqe {qe,invariants,similar,eval,equiv}``.

Exit status: 0 success, 1 parse or usage error, 2 capacity exceeded.
Formulas whose variables are all lowercase are read as scalar formulas;
anything with an uppercase variable is a matrix formula.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional, Sequence

from .arith import COMPLEX, MODES, Mat, REAL, ShapeError, scalar_from_json
from .formula import Formula, free_vars, is_quantifier_free
from .rcf.qe import BACKENDS, CapacityExceeded, QERequest, qe
from .specht import ResourceLimit, enumerate_words, first_difference, invariants, word_text
from .syntax import MATRIX, SCALAR, ParseError, parse, to_text

EXIT_OK, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def detect_language(text: str) -> str:
    """Matrix language iff some identifier starts with an uppercase letter."""
    import re
    names = re.findall(r"[A-Za-z_][A-Za-z0-9_]*", text)
    return MATRIX if any(n[0].isupper() for n in names) else SCALAR


def _read_formula_text(args) -> str:
    if getattr(args, "file", None):
        with open(args.file, encoding="utf-8") as fh:
            return fh.read()
    if args.formula in (None, "-"):
        return sys.stdin.read()
    return args.formula


def _json_arg(text: str):
    """Inline JSON, or @path to a JSON file."""
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            return json.load(fh)
    return json.loads(text)


def _tuple_from_json(obj) -> List[Mat]:
    if isinstance(obj, dict):
        obj = [obj]
    if not isinstance(obj, list) or not obj:
        raise ShapeError("expected a matrix or a nonempty list of matrices")
    return [Mat.from_json(m) for m in obj]


def _common(p: argparse.ArgumentParser):
    p.add_argument("--n", type=int, default=2, help="matrix size (default 2)")
    p.add_argument("--mode", choices=MODES, default=REAL)
    p.add_argument("--json", action="store_true", help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    budget = int(os.environ.get("MATQE_TIME_BUDGET_MS", "60000"))
    ap = _Parser(prog="matqe", description="Quantifier elimination for matrix formulas.")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    q = sub.add_parser("qe", help="eliminate quantifiers")
    q.add_argument("formula", nargs="?", help="formula text; '-' or omitted reads stdin")
    q.add_argument("--file")
    _common(q)
    q.add_argument("--backend", choices=BACKENDS, default="auto")
    q.add_argument("--max-degree", type=int, default=8)
    q.add_argument("--max-atoms", type=int, default=512)
    q.add_argument("--time-budget-ms", type=int, default=budget)
    q.add_argument("--dedup", dest="dedup", action="store_true", default=True)
    q.add_argument("--no-dedup", dest="dedup", action="store_false")
    q.add_argument("--report", action="store_true", help="include the stage report (JSON)")
    q.add_argument("--seed", type=int, default=0, help="accepted for uniformity; qe is deterministic")

    inv = sub.add_parser("invariants", help="trace-word invariant vector of a matrix tuple")
    inv.add_argument("matrices", help="JSON matrix or list of matrices (or @file)")
    inv.add_argument("--dedup", dest="dedup", action="store_true", default=True)
    inv.add_argument("--no-dedup", dest="dedup", action="store_false")

    sim = sub.add_parser("similar", help="decide simultaneous unitary similarity")
    sim.add_argument("a", help="JSON tuple (or @file)")
    sim.add_argument("b", help="JSON tuple (or @file)")
    sim.add_argument("--json", action="store_true")

    ev = sub.add_parser("eval", help="evaluate a quantifier-free formula")
    ev.add_argument("formula")
    ev.add_argument("--assign", required=True,
                    help='JSON object {"X": matrix, ...} or {"x": "1/2", ...} (or @file)')
    _common(ev)

    eq = sub.add_parser("equiv", help="sampled equivalence of two quantifier-free formulas")
    eq.add_argument("left")
    eq.add_argument("right")
    _common(eq)
    eq.add_argument("--seed", type=int, default=0)
    eq.add_argument("--trials", type=int, default=1000)
    return ap


def _emit(obj, as_json: bool, text: str):
    if as_json:
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        print(text)


def cmd_qe(args) -> int:
    if args.n < 1 or args.max_degree < 1 or args.max_atoms < 1 or args.time_budget_ms < 1:
        raise UsageError("--n and resource caps must be positive")
    text = _read_formula_text(args)
    lang = detect_language(text)
    f = parse(text, lang)
    try:
        if lang == SCALAR:
            res = qe(QERequest(_prenex_scalar(f), args.backend, args.max_degree,
                               args.max_atoms, args.time_budget_ms))
            out = to_text(res.formula)
            payload = {"formula": out, "language": "scalar"}
            if args.report:
                payload["diagnostics"] = res.diagnostics
        else:
            from .transfer import qe_matrix
            rep = qe_matrix(f, args.n, args.mode, args.dedup, args.backend, args.max_degree,
                            args.max_atoms, args.time_budget_ms)
            out = to_text(rep.output)
            payload = {"formula": out, "language": "matrix", "n": args.n, "mode": args.mode}
            if args.report:
                payload["report"] = rep.to_json()
    except CapacityExceeded as exc:
        print(f"capacity exceeded: {exc}", file=sys.stderr)
        if args.json:
            rep = getattr(exc, "report", None)
            print(json.dumps({"error": "capacity-exceeded", "message": str(exc),
                              "variable": exc.variable, "degree": exc.degree,
                              "report": rep.to_json() if rep else None}, indent=2, sort_keys=True))
        return EXIT_CAPACITY
    if args.json or args.report:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(out)
    return EXIT_OK


def _prenex_scalar(f: Formula) -> Formula:
    from .formula import prenex
    return prenex(f)


def cmd_invariants(args) -> int:
    mats = _tuple_from_json(_json_arg(args.matrices))
    idx = enumerate_words(mats[0].n, len(mats), dedup_cyclic=args.dedup)
    print(json.dumps(invariants(mats, idx).to_json(), indent=2))
    return EXIT_OK


def cmd_similar(args) -> int:
    a = _tuple_from_json(_json_arg(args.a))
    b = _tuple_from_json(_json_arg(args.b))
    w = first_difference(a, b)
    if args.json:
        print(json.dumps({"similar": w is None, "word": None if w is None else word_text(w)}))
    elif w is None:
        print("true")
    else:
        print(f"false\nfirst differing word: {word_text(w)}")
    return EXIT_OK


def _assignment(obj: dict, lang: str, mode: str):
    if not isinstance(obj, dict):
        raise UsageError("--assign must be a JSON object")
    if lang == MATRIX:
        return {k: Mat.from_json(v) for k, v in obj.items()}
    return {k: scalar_from_json(v, mode) for k, v in obj.items()}


def cmd_eval(args) -> int:
    from .oracle import eval_matrix_qf, eval_qf
    lang = detect_language(args.formula)
    f = parse(args.formula, lang)
    if not is_quantifier_free(f):
        raise UsageError("eval expects a quantifier-free formula")
    a = _assignment(_json_arg(args.assign), lang, args.mode)
    missing = free_vars(f) - set(a)
    if missing:
        raise UsageError(f"no value for {', '.join(sorted(missing))}")
    val = eval_matrix_qf(f, a, args.n, args.mode) if lang == MATRIX else eval_qf(f, a)
    _emit({"value": val}, args.json, "true" if val else "false")
    return EXIT_OK


def cmd_equiv(args) -> int:
    from .oracle import equiv_sampled
    lang = MATRIX if MATRIX in (detect_language(args.left), detect_language(args.right)) else SCALAR
    f, g = parse(args.left, lang), parse(args.right, lang)
    if not (is_quantifier_free(f) and is_quantifier_free(g)):
        raise UsageError("equiv expects quantifier-free formulas")
    v = equiv_sampled(f, g, lang, args.n, args.mode, args.trials, args.seed)
    if args.json:
        print(json.dumps(v.to_json(), indent=2, sort_keys=True))
    elif v.agree:
        print(f"agree ({v.trials} trials, seed {v.seed})")
    else:
        print(f"disagree after {v.trials} trials (seed {v.seed})")
        print(json.dumps(v.counterexample, sort_keys=True))
    return EXIT_OK


COMMANDS = {"qe": cmd_qe, "invariants": cmd_invariants, "similar": cmd_similar,
            "eval": cmd_eval, "equiv": cmd_equiv}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if not args.command:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        return COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ShapeError, ResourceLimit, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
