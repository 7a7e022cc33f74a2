"""Trace words, the trace-word invariant map, and the unitary similarity test.

A word is a tuple of letters ``(i, starred)`` with 1-based matrix index ``i``.
For n x n matrices, words of length <= n^2 over the 2m letters
X_1, X_1*, ..., X_m, X_m* suffice: two tuples are simultaneously unitarily
similar iff all these traces agree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .arith import Mat, ShapeError, mat_mul, mat_star, scalar_to_json

Letter = Tuple[int, bool]
Word = Tuple[Letter, ...]

DEFAULT_WORD_CAP = 2_000_000


class ResourceLimit(RuntimeError):
    """The requested enumeration exceeds the configured cap."""


def word_count(n: int, m: int) -> int:
    """Number of nonempty words of length <= n^2 over 2m letters."""
    return sum((2 * m) ** i for i in range(1, n * n + 1))


def letters(m: int) -> List[Letter]:
    return [(i, s) for i in range(1, m + 1) for s in (False, True)]


def rotations(w: Word) -> List[Word]:
    return [w[k:] + w[:k] for k in range(len(w))]


def canonical_rotation(w: Word) -> Word:
    return min(rotations(w))


def word_text(w: Word) -> str:
    return " ".join(f"x{i}{'*' if s else ''}" for i, s in w)


def parse_word(text: str) -> Word:
    out = []
    for tok in text.split():
        starred = tok.endswith("*")
        core = tok[:-1] if starred else tok
        if not core.startswith("x") or not core[1:].isdigit():
            raise ValueError(f"bad letter {tok!r}")
        out.append((int(core[1:]), starred))
    if not out:
        raise ValueError("empty word")
    return tuple(out)


def star_word(w: Word) -> Word:
    """The word whose evaluation is the conjugate transpose of w's."""
    return tuple((i, not s) for i, s in reversed(w))


@dataclass(frozen=True)
class WordIndex:
    n: int
    m: int
    dedup: bool
    words: Tuple[Word, ...]

    def __len__(self):
        return len(self.words)

    def position(self, w: Word) -> int:
        key = canonical_rotation(w) if self.dedup else w
        return self._positions()[key]

    def _positions(self) -> Dict[Word, int]:
        cache = self.__dict__.get("_pos")
        if cache is None:
            cache = {w: k for k, w in enumerate(self.words)}
            object.__setattr__(self, "_pos", cache)
        return cache


def enumerate_words(n: int, m: int, dedup_cyclic: bool = True,
                    cap: int = DEFAULT_WORD_CAP) -> WordIndex:
    """All nonempty words of length <= n^2 over 2m letters, ordered by length
    then lexicographically; with dedup, only the least rotation of each class."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    total = word_count(n, m)
    if total > cap:
        raise ResourceLimit(f"{total} words for n={n}, m={m} exceed the cap of {cap}")
    alphabet = letters(m)
    out: List[Word] = []
    layer: List[Word] = [()]
    for _ in range(n * n):
        layer = [w + (a,) for w in layer for a in alphabet]
        if dedup_cyclic:
            out.extend(w for w in layer if w == canonical_rotation(w))
        else:
            out.extend(layer)
    return WordIndex(n, m, dedup_cyclic, tuple(out))


def _check_tuple(mats: Sequence[Mat], n: Optional[int] = None):
    if not mats:
        raise ShapeError("empty matrix tuple")
    first = mats[0]
    for a in mats:
        if a.n != first.n or a.mode != first.mode:
            raise ShapeError("matrices in a tuple must share n and mode")
    if n is not None and first.n != n:
        raise ShapeError(f"tuple has n={first.n}, index has n={n}")


class _Evaluator:
    """Word products with a prefix cache (enumeration order shares prefixes)."""

    def __init__(self, mats: Sequence[Mat]):
        _check_tuple(mats)
        self.letters: Dict[Letter, Mat] = {}
        for i, a in enumerate(mats, start=1):
            self.letters[(i, False)] = a
            self.letters[(i, True)] = mat_star(a)
        self.cache: Dict[Word, Mat] = {}

    def value(self, w: Word) -> Mat:
        got = self.cache.get(w)
        if got is not None:
            return got
        if w[-1] not in self.letters:
            raise IndexError(f"letter x{w[-1][0]} out of range for a {len(self.letters) // 2}-tuple")
        if len(w) == 1:
            out = self.letters[w[0]]
        else:
            out = mat_mul(self.value(w[:-1]), self.letters[w[-1]])
        self.cache[w] = out
        return out


def eval_word(w: Word, mats: Sequence[Mat]) -> Mat:
    """Left-to-right product of the letters' matrices."""
    if not w:
        raise ValueError("empty word")
    for i, _ in w:
        if i < 1 or i > len(mats):
            raise IndexError(f"letter x{i} out of range for a {len(mats)}-tuple")
    return _Evaluator(mats).value(tuple(w))


@dataclass(frozen=True)
class InvariantVector:
    index: WordIndex
    values: tuple

    def to_json(self) -> dict:
        return {"n": self.index.n, "m": self.index.m, "dedup": self.index.dedup,
                "values": [{"word": word_text(w), "value": scalar_to_json(v)}
                           for w, v in zip(self.index.words, self.values)]}


def invariants(mats: Sequence[Mat], idx: WordIndex) -> InvariantVector:
    _check_tuple(mats, idx.n)
    if len(mats) != idx.m:
        raise ShapeError(f"tuple has {len(mats)} matrices, index expects {idx.m}")
    ev = _Evaluator(mats)
    return InvariantVector(idx, tuple(ev.value(w).trace_scalar() for w in idx.words))


def first_difference(a: Sequence[Mat], b: Sequence[Mat],
                     idx: Optional[WordIndex] = None) -> Optional[Word]:
    """First word (in index order) whose traces differ on a and b, or None."""
    _check_tuple(a)
    _check_tuple(b)
    if len(a) != len(b) or a[0].n != b[0].n or a[0].mode != b[0].mode:
        raise ShapeError("tuples differ in length, n or mode")
    if idx is None:
        idx = enumerate_words(a[0].n, len(a))
    ea, eb = _Evaluator(a), _Evaluator(b)
    for w in idx.words:
        if ea.value(w).trace_scalar() != eb.value(w).trace_scalar():
            return w
    return None


def unitarily_similar(a: Sequence[Mat], b: Sequence[Mat]) -> bool:
    """Decide simultaneous unitary (orthogonal in real mode) similarity."""
    return first_difference(a, b) is None
