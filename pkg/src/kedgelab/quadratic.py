"""Exact arithmetic in a real quadratic extension: numbers a + b*sqrt(d).

Coordinates of two-point boundary translations live in such an extension
(d is the squared height of the circle-circle intersection), so membership
and side-of-line tests stay exact without nested radicals.  All operands of
an arithmetic op must share the same d; comparisons reduce to an exact sign
computation over the rationals.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

from .geom import to_fraction


class QuadDomainError(ArithmeticError):
    """Mixed radicands: operands live in different extensions."""


class Quad:
    """a + b*sqrt(d) with rational a, b and fixed rational d >= 0."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d=0):
        self.a = to_fraction(a)
        self.b = to_fraction(b)
        self.d = to_fraction(d)
        if self.d < 0:
            raise ValueError("radicand must be nonnegative")
        if self.d == 0:
            self.b = Fraction(0)

    @classmethod
    def of(cls, v, d) -> "Quad":
        if isinstance(v, Quad):
            if v.b == 0:
                return cls(v.a, 0, d)
            if v.d != d:
                raise QuadDomainError(f"cannot view sqrt({v.d}) element in sqrt({d}) field")
            return v
        return cls(to_fraction(v), 0, d)

    def _pair(self, other) -> tuple:
        if isinstance(other, Quad):
            if self.b != 0 and other.b != 0 and self.d != other.d:
                raise QuadDomainError(f"mixed radicands {self.d} and {other.d}")
            d = self.d if self.b != 0 else (other.d if other.b != 0 else self.d)
            return Quad.of(self, d), Quad.of(other, d)
        return self, Quad(to_fraction(other), 0, self.d)

    def __add__(self, other):
        s, o = self._pair(other)
        return Quad(s.a + o.a, s.b + o.b, s.d)

    __radd__ = __add__

    def __sub__(self, other):
        s, o = self._pair(other)
        return Quad(s.a - o.a, s.b - o.b, s.d)

    def __rsub__(self, other):
        s, o = self._pair(other)
        return Quad(o.a - s.a, o.b - s.b, s.d)

    def __mul__(self, other):
        s, o = self._pair(other)
        return Quad(s.a * o.a + s.b * o.b * s.d, s.a * o.b + s.b * o.a, s.d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        s, o = self._pair(other)
        if o.sign() == 0:
            raise ZeroDivisionError("division by zero quadratic element")
        if o.b == 0:
            return Quad(s.a / o.a, s.b / o.a, s.d)
        den = o.a * o.a - o.b * o.b * o.d
        if den == 0:
            # divisor is rational in disguise: sqrt(d) = |a/b| exactly
            r = o.a + o.b * abs(o.a / o.b)
            return Quad(s.a / r, s.b / r, s.d)
        return s * Quad(o.a / den, -o.b / den, s.d)

    def __rtruediv__(self, other):
        return Quad.of(to_fraction(other), self.d) / self

    def __neg__(self):
        return Quad(-self.a, -self.b, self.d)

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(d): compare a^2 against b^2 d when the
        terms pull in opposite directions."""
        a, b, d = self.a, self.b, self.d
        if b == 0 or d == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        lhs, rhs = a * a, b * b * d
        if lhs == rhs:
            return 0
        dominant_a = lhs > rhs
        if dominant_a:
            return 1 if a > 0 else -1
        return 1 if b > 0 else -1

    def is_zero(self) -> bool:
        return self.sign() == 0

    def __eq__(self, other):
        try:
            s, o = self._pair(other)
        except (QuadDomainError, TypeError, ValueError):
            return NotImplemented
        return (s - o).sign() == 0

    def __lt__(self, other):
        s, o = self._pair(other)
        return (s - o).sign() < 0

    def __le__(self, other):
        s, o = self._pair(other)
        return (s - o).sign() <= 0

    def __gt__(self, other):
        s, o = self._pair(other)
        return (s - o).sign() > 0

    def __ge__(self, other):
        s, o = self._pair(other)
        return (s - o).sign() >= 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(float(self.d))

    def __repr__(self):
        if self.b == 0:
            return f"Quad({self.a})"
        return f"Quad({self.a} + {self.b}*sqrt({self.d}))"


Exact = Union[Fraction, Quad]


def exact_sign(v) -> int:
    if isinstance(v, Quad):
        return v.sign()
    v = to_fraction(v)
    return (v > 0) - (v < 0)
