"""Truncated formal power series in three variables with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterator

from .errors import DomainError

VARS = ("lambda", "j", "hbar")


class FormalSeries:
    """Coefficients of ``λ^a j^b ℏ^c`` with caps ``(A, B, C)``.

    The middle slot doubles as ``φ`` for effective-action series.
    """

    __slots__ = ("coeffs", "caps")

    def __init__(self, coeffs: dict | None = None, caps=(4, 6, 0)):
        self.caps = tuple(int(c) for c in caps)
        A, B, C = self.caps
        self.coeffs = {}
        for k, v in (coeffs or {}).items():
            v = Fraction(v)
            if v and k[0] <= A and k[1] <= B and k[2] <= C:
                self.coeffs[tuple(k)] = v

    @classmethod
    def constant(cls, c, caps) -> "FormalSeries":
        return cls({(0, 0, 0): c}, caps)

    @classmethod
    def monomial(cls, key, c, caps) -> "FormalSeries":
        return cls({tuple(key): c}, caps)

    def __getitem__(self, key) -> Fraction:
        return self.coeffs.get(tuple(key), Fraction(0))

    def items(self) -> Iterator:
        return iter(sorted(self.coeffs.items()))

    def _caps_with(self, other) -> tuple:
        return tuple(min(a, b) for a, b in zip(self.caps, other.caps))

    def _coerce(self, other):
        if isinstance(other, FormalSeries):
            return other
        if isinstance(other, (int, Fraction)):
            return FormalSeries.constant(other, self.caps)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.coeffs)
        for k, v in o.coeffs.items():
            out[k] = out.get(k, 0) + v
        return FormalSeries(out, self._caps_with(o))

    __radd__ = __add__

    def __neg__(self):
        return FormalSeries({k: -v for k, v in self.coeffs.items()}, self.caps)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FormalSeries({k: v * other for k, v in self.coeffs.items()}, self.caps)
        if not isinstance(other, FormalSeries):
            return NotImplemented
        caps = self._caps_with(other)
        A, B, C = caps
        out: dict = {}
        for (a1, b1, c1), v1 in self.coeffs.items():
            for (a2, b2, c2), v2 in other.coeffs.items():
                a, b, c = a1 + a2, b1 + b2, c1 + c2
                if a <= A and b <= B and c <= C:
                    out[(a, b, c)] = out.get((a, b, c), 0) + v1 * v2
        return FormalSeries(out, caps)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = FormalSeries.constant(1, self.caps)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, FormalSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self):
        return f"FormalSeries({len(self.coeffs)} terms, caps={self.caps})"

    # -- calculus
    def d_j(self) -> "FormalSeries":
        A, B, C = self.caps
        out = {(a, b - 1, c): v * b for (a, b, c), v in self.coeffs.items() if b}
        return FormalSeries(out, (A, max(B - 1, 0), C))

    def truncate(self, caps) -> "FormalSeries":
        return FormalSeries(self.coeffs, caps)

    def _nilpotent_check(self):
        if any(k == (0, 0, 0) for k in self.coeffs):
            raise DomainError("series has a nonzero constant term")

    def log(self) -> "FormalSeries":
        if self[(0, 0, 0)] != 1:
            raise DomainError("log needs constant term 1")
        u = self - 1
        out = FormalSeries({}, self.caps)
        power = FormalSeries.constant(1, self.caps)
        for k in range(1, sum(self.caps) + 2):
            power = power * u
            if not power.coeffs:
                break
            out = out + power * Fraction((-1) ** (k + 1), k)
        return out

    def exp(self) -> "FormalSeries":
        if self[(0, 0, 0)] != 0:
            raise DomainError("exp needs constant term 0")
        out = FormalSeries.constant(1, self.caps)
        power = FormalSeries.constant(1, self.caps)
        for k in range(1, sum(self.caps) + 2):
            power = power * self
            if not power.coeffs:
                break
            out = out + power * Fraction(1, factorial(k))
        return out

    def compose(self, inner: "FormalSeries") -> "FormalSeries":
        """Substitute ``inner`` for the middle variable."""
        if inner[(0, 0, 0)] != 0:
            raise DomainError("substituted series must have no constant term")
        caps = tuple(min(a, b) for a, b in zip(self.caps[::2], inner.caps[::2]))
        caps = (caps[0], inner.caps[1], caps[1])
        by_b: dict = {}
        for (a, b, c), v in self.coeffs.items():
            by_b.setdefault(b, {})[(a, 0, c)] = v
        out = FormalSeries({}, caps)
        power = FormalSeries.constant(1, caps)
        for b in range(max(by_b, default=-1) + 1):
            if b:
                power = power * inner
            if b in by_b and power.coeffs:
                out = out + FormalSeries(by_b[b], caps) * power
        return out

    def at_hbar_one(self) -> "FormalSeries":
        out: dict = {}
        for (a, b, c), v in self.coeffs.items():
            out[(a, b, 0)] = out.get((a, b, 0), 0) + v
        return FormalSeries(out, (self.caps[0], self.caps[1], 0))

    def slice_hbar(self, c: int) -> "FormalSeries":
        return FormalSeries({(a, b, 0): v for (a, b, cc), v in self.coeffs.items() if cc == c},
                            (self.caps[0], self.caps[1], 0))

    def evaluate(self, lam: float, j: float = 0.0, hbar: float = 1.0) -> float:
        return sum(float(v) * lam ** a * j ** b * hbar ** c for (a, b, c), v in self.coeffs.items())

    def to_rows(self) -> list:
        return [(a, b, c, v) for (a, b, c), v in self.items()]
