"""Exact arithmetic in a real quadratic field.

A :class:`QuadraticNumber` is ``(a + b*sqrt(D)) / c`` with integer ``a, b``,
positive ``c`` and square-free ``D``.  Rationals carry ``b == 0`` and are
compatible with every field.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering
from numbers import Rational

__all__ = ["QuadraticNumber", "FieldMismatch", "squarefree_part"]


class FieldMismatch(ValueError):
    """Operands live in different quadratic fields."""


def squarefree_part(n: int) -> tuple[int, int]:
    """Return ``(s, d)`` with ``n == s*s*d`` and ``d`` square-free."""
    if n <= 0:
        raise ValueError("radicand must be positive")
    s, d = 1, n
    f = 2
    while f * f <= d:
        while d % (f * f) == 0:
            d //= f * f
            s *= f
        f += 1
    return s, d


def _sign(a: int, b: int, D: int) -> int:
    """Sign of ``a + b*sqrt(D)`` for square-free D > 1 (or b == 0)."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a >= 0 and b >= 0:
        return 1 if (a or b) else 0
    if a <= 0 and b <= 0:
        return -1
    # opposite signs: compare a^2 with b^2 D; equality impossible (irrational)
    if a > 0:
        return 1 if a * a > b * b * D else -1
    return 1 if b * b * D > a * a else -1


@total_ordering
class QuadraticNumber:
    __slots__ = ("a", "b", "c", "D")

    def __init__(self, a: int, b: int = 0, c: int = 1, D: int = 1) -> None:
        if c == 0:
            raise ZeroDivisionError("denominator is zero")
        if D <= 0:
            raise ValueError("D must be a positive integer")
        s, D = squarefree_part(D)
        b *= s
        if D == 1:
            a, b = a + b, 0
        if b == 0:
            D = 1
        if c < 0:
            a, b, c = -a, -b, -c
        g = math.gcd(math.gcd(a, b), c)
        self.a, self.b, self.c, self.D = a // g, b // g, c // g, D

    # construction -------------------------------------------------------
    @classmethod
    def sqrt(cls, n: int) -> QuadraticNumber:
        return cls(0, 1, 1, n)

    @classmethod
    def coerce(cls, x) -> QuadraticNumber:
        if isinstance(x, QuadraticNumber):
            return x
        if isinstance(x, int):
            return cls(x)
        if isinstance(x, Rational):
            return cls(x.numerator, 0, x.denominator)
        raise TypeError(f"cannot coerce {type(x).__name__} to QuadraticNumber")

    # inspection ---------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def to_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is irrational")
        return Fraction(self.a, self.c)

    def conjugate(self) -> QuadraticNumber:
        return QuadraticNumber(self.a, -self.b, self.c, self.D)

    def sign(self) -> int:
        return _sign(self.a, self.b, self.D)

    def __repr__(self) -> str:
        return f"QuadraticNumber({self.a}, {self.b}, {self.c}, {self.D})"

    def __str__(self) -> str:
        if self.is_rational:
            return str(self.a) if self.c == 1 else f"{self.a}/{self.c}"
        coef = {1: "", -1: "-"}.get(self.b, str(self.b))
        root = f"{coef}√{self.D}"
        num = f"{self.a}{'' if root.startswith('-') else '+'}{root}" if self.a else root
        return num if self.c == 1 else f"({num})/{self.c}"

    def literal(self) -> str:
        """Round-trippable ``quad:(a,b,c,D)`` form."""
        return f"quad:({self.a},{self.b},{self.c},{self.D})"

    def __hash__(self) -> int:
        if self.is_rational:
            return hash(Fraction(self.a, self.c))
        return hash((self.a, self.b, self.c, self.D))

    # arithmetic ---------------------------------------------------------
    def _field(self, other: QuadraticNumber) -> int:
        if self.D == 1:
            return other.D
        if other.D == 1 or other.D == self.D:
            return self.D
        raise FieldMismatch(f"sqrt({self.D}) vs sqrt({other.D})")

    def __add__(self, other) -> QuadraticNumber:
        try:
            o = QuadraticNumber.coerce(other)
        except TypeError:
            return NotImplemented
        D = self._field(o)
        return QuadraticNumber(
            self.a * o.c + o.a * self.c, self.b * o.c + o.b * self.c, self.c * o.c, D
        )

    __radd__ = __add__

    def __neg__(self) -> QuadraticNumber:
        return QuadraticNumber(-self.a, -self.b, self.c, self.D)

    def __pos__(self) -> QuadraticNumber:
        return self

    def __sub__(self, other) -> QuadraticNumber:
        try:
            o = QuadraticNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> QuadraticNumber:
        return (-self) + other

    def __mul__(self, other) -> QuadraticNumber:
        try:
            o = QuadraticNumber.coerce(other)
        except TypeError:
            return NotImplemented
        D = self._field(o)
        return QuadraticNumber(
            self.a * o.a + self.b * o.b * D,
            self.a * o.b + self.b * o.a,
            self.c * o.c,
            D,
        )

    __rmul__ = __mul__

    def inverse(self) -> QuadraticNumber:
        # 1/((a+b√D)/c) = c(a-b√D)/(a^2-b^2 D)
        norm = self.a * self.a - self.b * self.b * self.D
        if norm == 0:
            raise ZeroDivisionError("division by zero")
        return QuadraticNumber(self.c * self.a, -self.c * self.b, norm, self.D)

    def __truediv__(self, other) -> QuadraticNumber:
        try:
            o = QuadraticNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other) -> QuadraticNumber:
        return QuadraticNumber.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> QuadraticNumber:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = QuadraticNumber(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # comparison ---------------------------------------------------------
    def __eq__(self, other) -> bool:
        try:
            o = QuadraticNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return (self.a, self.b, self.c, self.D) == (o.a, o.b, o.c, o.D)

    def __lt__(self, other) -> bool:
        try:
            o = QuadraticNumber.coerce(other)
        except TypeError:
            return NotImplemented
        if self.D != o.D and not self.is_rational and not o.is_rational:
            return _cross_field_less(self, o)
        return (self - o).sign() < 0

    def __bool__(self) -> bool:
        return self.a != 0 or self.b != 0

    # rounding -----------------------------------------------------------
    def __floor__(self) -> int:
        if self.is_rational:
            return self.a // self.c
        r = math.isqrt(self.b * self.b * self.D)
        # b*sqrt(D) lies strictly between +-r and +-(r+1)
        lo = self.a + r if self.b > 0 else self.a - r - 1
        n = lo // self.c
        while QuadraticNumber(self.a - (n + 1) * self.c, self.b, 1, self.D).sign() >= 0:
            n += 1
        while QuadraticNumber(self.a - n * self.c, self.b, 1, self.D).sign() < 0:
            n -= 1
        return n

    def __ceil__(self) -> int:
        return -math.floor(-self)

    def __float__(self) -> float:
        return float(self.to_decimal_fraction(64))

    def to_decimal_fraction(self, bits: int) -> Fraction:
        """Rational approximation with error below ``2**-bits``."""
        if self.is_rational:
            return Fraction(self.a, self.c)
        scale = 1 << bits
        return Fraction(math.floor(self * scale), scale)

    def decimal(self, places: int = 6) -> str:
        """Correctly rounded decimal rendering."""
        scaled = self * (10**places)
        n = math.floor(scaled + Fraction(1, 2))
        sign = "-" if n < 0 else ""
        n = abs(n)
        whole, frac = divmod(n, 10**places)
        return f"{sign}{whole}.{frac:0{places}d}" if places else f"{sign}{whole}"


def _cross_field_less(x: QuadraticNumber, y: QuadraticNumber) -> bool:
    """Order irrationals from different fields (never equal) by refining bounds."""
    bits = 64
    while True:
        lo_x, lo_y = x.to_decimal_fraction(bits), y.to_decimal_fraction(bits)
        gap = Fraction(1, 1 << bits)
        if lo_x + gap <= lo_y:
            return True
        if lo_y + gap <= lo_x:
            return False
        bits *= 2


def parse_quadratic(text: str) -> QuadraticNumber:
    """Parse ``quad:(a,b,c,D)``, an integer, or a fraction ``p/q``."""
    text = text.strip()
    if text.startswith("quad:"):
        body = text[5:].strip()
        if not (body.startswith("(") and body.endswith(")")):
            raise ValueError(f"malformed quadratic literal {text!r}")
        parts = [int(p) for p in body[1:-1].split(",")]
        if len(parts) != 4:
            raise ValueError(f"quadratic literal needs 4 integers: {text!r}")
        return QuadraticNumber(*parts)
    return QuadraticNumber.coerce(Fraction(text))
