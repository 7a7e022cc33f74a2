"""Exact scalars and dense square matrices over Q and Q[i].

Real-mode scalars are :class:`fractions.Fraction`; complex-mode scalars are
:class:`GaussRational`.  Matrices carry their mode so that mixing the two is
caught early.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

REAL = "real"
COMPLEX = "complex"
MODES = (REAL, COMPLEX)


class ShapeError(ValueError):
    """Dimension or mode mismatch between operands."""


@dataclass(frozen=True, slots=True)
class GaussRational:
    """An element re + im*i of Q[i]."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        if not isinstance(self.re, Fraction):
            object.__setattr__(self, "re", Fraction(self.re))
        if not isinstance(self.im, Fraction):
            object.__setattr__(self, "im", Fraction(self.im))

    @staticmethod
    def coerce(x) -> "GaussRational":
        if isinstance(x, GaussRational):
            return x
        return GaussRational(Fraction(x), Fraction(0))

    def __add__(self, other):
        o = GaussRational.coerce(other)
        return GaussRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = GaussRational.coerce(other)
        return GaussRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussRational.coerce(other) - self

    def __mul__(self, other):
        o = GaussRational.coerce(other)
        return GaussRational(self.re * o.re - self.im * o.im,
                             self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __truediv__(self, other):
        o = GaussRational.coerce(other)
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero in Q[i]")
        num = self * o.conjugate()
        return GaussRational(num.re / d, num.im / d)

    def __rtruediv__(self, other):
        return GaussRational.coerce(other) / self

    def __pow__(self, k: int):
        out = GaussRational(Fraction(1))
        for _ in range(k):
            out = out * self
        return out

    def conjugate(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def __eq__(self, other):
        if isinstance(other, GaussRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return self.im == 0

    def __repr__(self):
        return f"GaussRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"


Scalar = Union[Fraction, GaussRational]


def to_scalar(x, mode: str) -> Scalar:
    if mode == REAL:
        if isinstance(x, GaussRational):
            if x.im != 0:
                raise ShapeError("non-real scalar in real mode")
            return x.re
        return Fraction(x)
    return GaussRational.coerce(x)


def conj(x: Scalar) -> Scalar:
    if isinstance(x, GaussRational):
        return x.conjugate()
    return x


def real_part(x: Scalar) -> Fraction:
    return x.re if isinstance(x, GaussRational) else x


def imag_part(x: Scalar) -> Fraction:
    return x.im if isinstance(x, GaussRational) else Fraction(0)


# --- scalar text format: "p/q" or {"re": "p/q", "im": "p/q"} --------------

def scalar_to_json(x: Scalar):
    if isinstance(x, GaussRational):
        return {"re": str(x.re), "im": str(x.im)}
    return str(x)


def scalar_from_json(obj, mode: str) -> Scalar:
    if isinstance(obj, dict):
        value = GaussRational(Fraction(str(obj.get("re", "0"))),
                              Fraction(str(obj.get("im", "0"))))
    elif isinstance(obj, (int, str)):
        value = Fraction(str(obj))
    else:
        raise ValueError(f"bad scalar literal {obj!r}")
    return to_scalar(value, mode)


@dataclass(frozen=True)
class Mat:
    """Dense n x n matrix with exact entries, row-major."""

    n: int
    mode: str
    entries: tuple

    def __post_init__(self):
        if self.mode not in MODES:
            raise ShapeError(f"unknown mode {self.mode!r}")
        rows = tuple(tuple(to_scalar(x, self.mode) for x in row) for row in self.entries)
        if len(rows) != self.n or any(len(r) != self.n for r in rows):
            raise ShapeError(f"entries are not {self.n}x{self.n}")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], mode: str = REAL) -> "Mat":
        return cls(len(rows), mode, tuple(tuple(r) for r in rows))

    @classmethod
    def zero(cls, n: int, mode: str = REAL) -> "Mat":
        return cls(n, mode, tuple((0,) * n for _ in range(n)))

    @classmethod
    def identity(cls, n: int, mode: str = REAL) -> "Mat":
        return cls.scalar(n, 1, mode)

    @classmethod
    def scalar(cls, n: int, c, mode: str = REAL) -> "Mat":
        return cls(n, mode, tuple(tuple(c if i == j else 0 for j in range(n))
                                  for i in range(n)))

    @classmethod
    def diag(cls, values: Sequence, mode: str = REAL) -> "Mat":
        n = len(values)
        return cls(n, mode, tuple(tuple(values[i] if i == j else 0 for j in range(n))
                                  for i in range(n)))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def _check(self, other: "Mat"):
        if not isinstance(other, Mat):
            raise ShapeError("operand is not a matrix")
        if self.n != other.n or self.mode != other.mode:
            raise ShapeError(f"shape mismatch: {self.n}/{self.mode} vs {other.n}/{other.mode}")

    def __add__(self, other: "Mat") -> "Mat":
        return mat_add(self, other)

    def __sub__(self, other: "Mat") -> "Mat":
        self._check(other)
        return Mat(self.n, self.mode, tuple(
            tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)))

    def __neg__(self) -> "Mat":
        return Mat(self.n, self.mode, tuple(tuple(-a for a in r) for r in self.entries))

    def __mul__(self, other: "Mat") -> "Mat":
        return mat_mul(self, other)

    def scale(self, c) -> "Mat":
        c = to_scalar(c, self.mode)
        return Mat(self.n, self.mode, tuple(tuple(c * a for a in r) for r in self.entries))

    def star(self) -> "Mat":
        return mat_star(self)

    def trace_scalar(self) -> Scalar:
        total = to_scalar(0, self.mode)
        for i in range(self.n):
            total = total + self.entries[i][i]
        return total

    def is_hermitian(self) -> bool:
        return self == mat_star(self)

    def to_json(self) -> dict:
        return {"n": self.n, "mode": self.mode,
                "entries": [[scalar_to_json(x) for x in row] for row in self.entries]}

    @classmethod
    def from_json(cls, obj: dict) -> "Mat":
        mode = obj.get("mode", REAL)
        rows = obj["entries"]
        n = int(obj.get("n", len(rows)))
        return cls(n, mode, tuple(tuple(scalar_from_json(x, mode) for x in row) for row in rows))

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.entries) + "]"


def mat_add(a: Mat, b: Mat) -> Mat:
    a._check(b)
    return Mat(a.n, a.mode, tuple(
        tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a.entries, b.entries)))


def mat_mul(a: Mat, b: Mat) -> Mat:
    a._check(b)
    n = a.n
    cols = list(zip(*b.entries))
    zero = to_scalar(0, a.mode)
    rows = []
    for ra in a.entries:
        row = []
        for cb in cols:
            acc = zero
            for x, y in zip(ra, cb):
                if x and y:
                    acc = acc + x * y
            row.append(acc)
        rows.append(tuple(row))
    return Mat(n, a.mode, tuple(rows))


def mat_star(a: Mat) -> Mat:
    n = a.n
    return Mat(n, a.mode, tuple(tuple(conj(a.entries[j][i]) for j in range(n))
                                for i in range(n)))


def mat_trace(a: Mat) -> Mat:
    """Trace times the identity, i.e. the central matrix tr(a)*I."""
    return Mat.scalar(a.n, a.trace_scalar(), a.mode)


def charpoly_coeffs(a: Mat) -> list:
    """Return (e_1, ..., e_n) with det(tI - a) = t^n - e_1 t^(n-1) + e_2 t^(n-2) - ...

    Faddeev-LeVerrier: M_1 = I, c_k = -tr(a M_k)/k, M_{k+1} = a M_k + c_k I,
    where det(tI - a) = t^n + c_1 t^(n-1) + ... + c_n, so e_k = (-1)^k c_k.
    """
    n = a.n
    ident = Mat.identity(n, a.mode)
    m = ident
    out = []
    for k in range(1, n + 1):
        am = mat_mul(a, m)
        c = -am.trace_scalar() / k
        out.append(c if k % 2 == 0 else -c)
        m = mat_add(am, ident.scale(c))
    return out


def det(a: Mat) -> Scalar:
    return charpoly_coeffs(a)[-1]


def mat_inverse(a: Mat) -> Mat:
    """Gauss-Jordan inverse over the exact field."""
    n = a.n
    zero, one = to_scalar(0, a.mode), to_scalar(1, a.mode)
    aug = [list(a.entries[i]) + [one if i == j else zero for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return Mat(n, a.mode, tuple(tuple(row[n:]) for row in aug))


def cayley_orthogonal(s: Mat) -> Mat:
    """Cayley transform (I - s)(I + s)^{-1} of a skew-symmetric/skew-hermitian s."""
    if mat_star(s) != -s:
        raise ValueError("Cayley transform needs a skew-symmetric / skew-hermitian matrix")
    ident = Mat.identity(s.n, s.mode)
    try:
        inv = mat_inverse(ident + s)
    except ZeroDivisionError:
        raise ValueError("I + s is singular") from None
    return mat_mul(ident - s, inv)


def conjugate_by(a: Mat, q: Mat) -> Mat:
    """q* a q."""
    return mat_mul(mat_mul(mat_star(q), a), q)


def principal_minors(a: Mat) -> Iterable[Scalar]:
    from itertools import combinations
    for k in range(1, a.n + 1):
        for idx in combinations(range(a.n), k):
            sub = Mat(k, a.mode, tuple(tuple(a.entries[i][j] for j in idx) for i in idx))
            yield _det_cofactor(sub)


def _det_cofactor(a: Mat) -> Scalar:
    # Bareiss-free Laplace expansion; only used on small principal submatrices.
    n = a.n
    rows = [list(r) for r in a.entries]

    def rec(rs, cols):
        if len(cols) == 1:
            return rs[0][cols[0]]
        total = to_scalar(0, a.mode)
        for k, c in enumerate(cols):
            if not rs[0][c]:
                continue
            minor = rec(rs[1:], cols[:k] + cols[k + 1:])
            term = rs[0][c] * minor
            total = total + term if k % 2 == 0 else total - term
        return total

    return rec(rows, list(range(n)))
