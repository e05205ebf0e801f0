"""Exact scalars: Gaussian rationals, plus small exact linear-algebra helpers."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class QI:
    """A Gaussian rational ``re + im*i`` with exact Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("QI is immutable")

    @classmethod
    def coerce(cls, x) -> "QI":
        if isinstance(x, QI):
            return x
        if isinstance(x, complex):
            raise TypeError("floats are not exact; build QI from rationals")
        return cls(x)

    # arithmetic
    def __add__(self, other):
        try:
            o = QI.coerce(other)
        except TypeError:
            return NotImplemented
        return QI(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = QI.coerce(other)
        except TypeError:
            return NotImplemented
        return QI(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return QI.coerce(other) - self

    def __mul__(self, other):
        try:
            o = QI.coerce(other)
        except TypeError:
            return NotImplemented
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self) -> "QI":
        return QI(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "QI":
        d = self.norm2()
        if d == 0:
            raise ZeroDivisionError("QI division by zero")
        return QI(self.re / d, -self.im / d)

    def __truediv__(self, other):
        try:
            o = QI.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return QI.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out, base = QI(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # comparisons / hashing
    def __eq__(self, other):
        try:
            o = QI.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return self.im == 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"QI({self})"

    def __str__(self):
        return format_qi(self)


I = QI(0, 1)
ONE = QI(1)
ZERO = QI(0)


def format_qi(z: QI) -> str:
    """Render in the "a+bi" string convention, e.g. ``1/2-3i``."""
    if z.im == 0:
        return str(z.re)
    if z.re == 0:
        return f"{z.im}i"
    sign = "+" if z.im > 0 else "-"
    return f"{z.re}{sign}{abs(z.im)}i"


def parse_qi(text: str) -> QI:
    """Inverse of :func:`format_qi`."""
    t = text.strip().replace(" ", "")
    if not t:
        raise ValueError("empty Gaussian rational")
    if not t.endswith("i"):
        return QI(Fraction(t))
    body = t[:-1]
    # split at the last sign that is not the leading one
    cut = max(body.rfind("+"), body.rfind("-"))
    if cut > 0:
        re_txt, im_txt = body[:cut], body[cut:]
    else:
        re_txt, im_txt = "0", body
    if im_txt in ("", "+"):
        im_txt = "1"
    elif im_txt == "-":
        im_txt = "-1"
    return QI(Fraction(re_txt), Fraction(im_txt))


def frac_str(x: Fraction) -> str:
    """Always ``num/den`` (CSV and JSON encoding of exact rationals)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------- linear algebra

def rref(rows, ncols):
    """Row-reduce a dense matrix over an exact field in place.

    ``rows`` is a list of lists of Fraction or QI. Returns the pivot columns.
    """
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def solve_exact(columns, target, zero):
    """Find x with ``sum_k x_k * columns[k] == target``.

    ``columns`` and ``target`` are dicts mapping a row key to a nonzero entry.
    Returns a list of coefficients or None when the system is inconsistent.
    """
    keys = sorted({k for col in columns for k in col} | set(target), key=repr)
    index = {k: i for i, k in enumerate(keys)}
    n = len(columns)
    rows = [[zero] * (n + 1) for _ in keys]
    for j, col in enumerate(columns):
        for k, v in col.items():
            rows[index[k]][j] = v
    for k, v in target.items():
        rows[index[k]][n] = v
    pivots = rref(rows, n + 1)
    if n in pivots:
        return None
    x = [zero] * n
    for r, c in enumerate(pivots):
        x[c] = rows[r][n]
    return x


def nullspace(rows, ncols, zero, one):
    """Basis of the right nullspace of a dense exact matrix."""
    rows = [list(r) for r in rows]
    pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for r, c in enumerate(pivots):
            v[c] = -rows[r][f]
        basis.append(v)
    return basis


def rank(rows, ncols) -> int:
    rows = [list(r) for r in rows]
    return len(rref(rows, ncols))
