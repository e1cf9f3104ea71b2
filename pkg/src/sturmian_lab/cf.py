"""Continued fractions: expansions, convergents and the mirror liminf.

Partial quotients come from one of three sources: a finite list, an
eventually periodic ``(preperiod, period)`` pair, or a bounded generator.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator

from .quadratic import QuadraticNumber, parse_quadratic

__all__ = [
    "CFExpansion",
    "Convergent",
    "SourceExhausted",
    "NotIrrational",
    "UnsupportedSource",
    "SpectrumEstimate",
    "convergents",
    "eval_bracket",
    "quadratic_to_cf",
    "mirror_value",
    "mirror_limits",
    "min_spectrum",
    "cf_value",
    "parse_cf",
    "GOLDEN",
]


class SourceExhausted(IndexError):
    """The quotient source cannot supply the requested partial quotient."""


class NotIrrational(ValueError):
    pass


class UnsupportedSource(ValueError):
    pass


class CFExpansion:
    """``[a0; a1, a2, ...]`` with an immutable quotient source.

    The generator variant memoises emitted quotients; the memo only grows and
    is never observable as a change in value.
    """

    def __init__(
        self,
        a0: int = 0,
        quotients: Iterable[int] = (),
        period: Iterable[int] = (),
        *,
        generator: Callable[[], Iterator[int]] | None = None,
        bound: int | None = None,
    ) -> None:
        self.a0 = int(a0)
        self.preperiod = tuple(int(a) for a in quotients)
        self.period = tuple(int(a) for a in period)
        self._generator = generator
        self._bound = bound
        self._memo: list[int] = []
        self._iter: Iterator[int] | None = None
        if generator is not None:
            if self.preperiod or self.period:
                raise ValueError("generator source takes no explicit quotients")
            if bound is None or bound < 1:
                raise ValueError("generator source needs a declared bound >= 1")
        for a in self.preperiod + self.period:
            if a < 1:
                raise ValueError(f"partial quotients must be positive, got {a}")

    @classmethod
    def periodic(cls, a0: int, preperiod: Iterable[int], period: Iterable[int]) -> CFExpansion:
        period = tuple(period)
        if not period:
            raise ValueError("period must be non-empty")
        return cls(a0, preperiod, period)

    @classmethod
    def bounded(cls, a0: int, generator: Callable[[], Iterator[int]], bound: int) -> CFExpansion:
        return cls(a0, generator=generator, bound=bound)

    @property
    def is_periodic(self) -> bool:
        return bool(self.period)

    @property
    def is_finite(self) -> bool:
        return not self.period and self._generator is None

    @property
    def is_stream(self) -> bool:
        return self._generator is not None

    @property
    def bound(self) -> int | None:
        if self._generator is not None:
            return self._bound
        if self.period:
            return max(self.preperiod + self.period)
        return None

    @property
    def length(self) -> int | None:
        """Number of available partial quotients (``None`` if unbounded)."""
        return len(self.preperiod) if self.is_finite else None

    def quotient(self, n: int) -> int:
        """Partial quotient ``a_n`` (``a_0`` for ``n == 0``)."""
        if n == 0:
            return self.a0
        if n < 0:
            raise IndexError(f"no partial quotient a_{n}")
        if self._generator is not None:
            return self._from_generator(n)
        if n <= len(self.preperiod):
            return self.preperiod[n - 1]
        if not self.period:
            raise SourceExhausted(f"finite expansion has no a_{n}")
        return self.period[(n - 1 - len(self.preperiod)) % len(self.period)]

    def _from_generator(self, n: int) -> int:
        if self._iter is None:
            self._iter = iter(self._generator())
        while len(self._memo) < n:
            try:
                a = int(next(self._iter))
            except StopIteration:
                raise SourceExhausted(f"stream ended before a_{n}") from None
            if not 1 <= a <= self._bound:
                raise ValueError(f"stream emitted {a}, outside [1, {self._bound}]")
            self._memo.append(a)
        return self._memo[n - 1]

    def quotients(self, n: int) -> list[int]:
        """``[a_1, ..., a_n]``."""
        return [self.quotient(i) for i in range(1, n + 1)]

    def literal(self) -> str:
        if self.is_stream:
            raise UnsupportedSource("stream expansions have no literal form")
        body = ",".join(str(a) for a in self.preperiod)
        if self.period:
            per = "(" + ",".join(str(a) for a in self.period) + ")"
            body = f"{body},{per}" if body else per
        return f"[{self.a0};{body}]"

    def __repr__(self) -> str:
        if self.is_stream:
            return f"CFExpansion(a0={self.a0}, stream, bound={self._bound})"
        return f"CFExpansion({self.literal()})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, CFExpansion) or self.is_stream or other.is_stream:
            return NotImplemented
        return self.literal() == other.literal()

    def __hash__(self) -> int:
        return hash(self.literal()) if not self.is_stream else id(self)


GOLDEN = CFExpansion.periodic(0, (), (1,))

_CF_RE = re.compile(r"^\[\s*(-?\d+)\s*(?:;\s*(.*))?\]$")


def parse_cf(text: str) -> CFExpansion:
    """Parse ``[0;1,2,3]``, ``[0;1,(2,3)]`` or ``quad:(a,b,c,D)``."""
    text = text.strip()
    if text.startswith("quad:"):
        return quadratic_to_cf(parse_quadratic(text))
    m = _CF_RE.match(text)
    if not m:
        raise ValueError(f"malformed continued fraction literal {text!r}")
    a0 = int(m.group(1))
    body = (m.group(2) or "").strip()
    period: list[int] = []
    if "(" in body:
        head, _, tail = body.partition("(")
        if not tail.endswith(")") or ")" in tail[:-1]:
            raise ValueError(f"malformed period in {text!r}")
        period = [int(p) for p in tail[:-1].split(",") if p.strip()]
        if not period:
            raise ValueError("period must be non-empty")
        body = head.rstrip().rstrip(",")
    pre = [int(p) for p in body.split(",") if p.strip()]
    return CFExpansion(a0, pre, period)


@dataclass(frozen=True)
class Convergent:
    k: int
    p: int
    q: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


def convergents(cf: CFExpansion, k_max: int) -> list[Convergent]:
    """Convergents ``p_k/q_k`` for ``k = -1 .. k_max``."""
    if k_max < -1:
        raise ValueError("k_max must be >= -1")
    out = [Convergent(-1, 1, 0)]
    if k_max >= 0:
        out.append(Convergent(0, cf.a0, 1))
    for k in range(1, k_max + 1):
        a = cf.quotient(k)
        prev, cur = out[-2], out[-1]
        out.append(Convergent(k, a * cur.p + prev.p, a * cur.q + prev.q))
    return out


def eval_bracket(cf: CFExpansion, k: int) -> tuple[Fraction, Fraction]:
    """Consecutive convergents ``p_k/q_k`` and ``p_{k+1}/q_{k+1}``, ascending."""
    if k < 1:
        raise ValueError("k must be >= 1")
    cs = convergents(cf, k + 1)
    x, y = cs[-2].value, cs[-1].value
    return (x, y) if x < y else (y, x)


def quadratic_to_cf(x: QuadraticNumber) -> CFExpansion:
    """Eventually periodic expansion of a quadratic irrational in (0, 1)."""
    x = QuadraticNumber.coerce(x)
    if x.is_rational:
        raise NotIrrational(f"{x} is rational")
    if not 0 < x < 1:
        raise ValueError(f"{x} is outside (0, 1)")
    # complete quotient (P + sqrt(d)) / Q with Q | d - P^2
    if x.b > 0:
        P, Q = x.a, x.c
    else:
        P, Q = -x.a, -x.c
    d = x.b * x.b * x.D
    if (d - P * P) % Q:
        P, d, Q = P * abs(Q), d * Q * Q, Q * abs(Q)
    s = math.isqrt(d)
    seen: dict[tuple[int, int], int] = {}
    terms: list[int] = []
    while (P, Q) not in seen:
        seen[(P, Q)] = len(terms)
        a = (P + s) // Q if Q > 0 else (-P - s - 1) // (-Q)
        terms.append(a)
        P = a * Q - P
        Q = (d - P * P) // Q
    start = seen[(P, Q)]
    a0, rest = terms[0], terms[1:]
    if start == 0:
        # period begins at a0 itself; unroll one step so a0 stays outside
        per = terms[:]
        return CFExpansion.periodic(a0, (), per[1:] + per[:1])
    return CFExpansion.periodic(a0, rest[: start - 1], rest[start - 1 :])


def _evaluate(terms: list[int]) -> Fraction:
    value = Fraction(terms[-1])
    for a in reversed(terms[:-1]):
        value = a + 1 / value
    return value


def mirror_value(cf: CFExpansion, k: int) -> Fraction:
    """Exact value of ``[1; 1 + a_k, a_{k-1}, ..., a_1]``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    qs = cf.quotients(k)
    return _evaluate([1, 1 + qs[-1]] + qs[-2::-1])


def _purely_periodic(terms: tuple[int, ...]) -> QuadraticNumber:
    """Value of ``[c0; c1, ..., c_{P-1}, c0, c1, ...]`` (all c >= 1)."""
    p_prev, p = 1, terms[0]
    q_prev, q = 0, 1
    for c in terms[1:]:
        p_prev, p = p, c * p + p_prev
        q_prev, q = q, c * q + q_prev
    # y = (p y + p_prev) / (q y + q_prev)  =>  q y^2 + (q_prev - p) y - p_prev = 0
    disc = (q_prev - p) ** 2 + 4 * q * p_prev
    return QuadraticNumber(p - q_prev, 1, 2 * q, disc)


def mirror_limits(cf: CFExpansion) -> list[tuple[int, QuadraticNumber]]:
    """Limit of the mirror value along each residue class of the period.

    Returns ``(j, value)`` where ``a_k = period[j]``; the backward tail of the
    mirror expansion becomes the reversed period, repeated forever.
    """
    if not cf.is_periodic:
        raise UnsupportedSource("mirror limits need an eventually periodic expansion")
    per = cf.period
    P = len(per)
    out = []
    for j in range(P):
        tail = tuple(per[(j - 1 - i) % P] for i in range(P))
        y = _purely_periodic(tail)
        out.append((j, 1 + 1 / (1 + per[j] + 1 / y)))
    return out


@dataclass(frozen=True)
class SpectrumEstimate:
    """Window minimum of mirror values for a stream expansion (no exactness claim)."""

    value: Fraction
    window: tuple[int, int]
    argmin: int

    def decimal(self, places: int = 6) -> str:
        return f"{float(self.value):.{places}f}"


def min_spectrum(cf: CFExpansion, window: tuple[int, int] = (50, 100)):
    """Minimum of the repetition spectrum for the slope ``cf``.

    Exact :class:`QuadraticNumber` for eventually periodic expansions, a
    :class:`SpectrumEstimate` for bounded streams.
    """
    if cf.is_periodic:
        return min(v for _, v in mirror_limits(cf))
    if cf.is_stream:
        lo, hi = window
        values = [(mirror_value(cf, k), k) for k in range(lo, hi + 1)]
        v, k = min(values)
        return SpectrumEstimate(v, (lo, hi), k)
    raise UnsupportedSource("finite expansions are rational slopes; no spectrum")


def cf_value(cf: CFExpansion):
    """Exact value: Fraction for finite, QuadraticNumber for periodic."""
    if cf.is_finite:
        if not cf.preperiod:
            return Fraction(cf.a0)
        return cf.a0 + 1 / _evaluate(list(cf.preperiod))
    if not cf.is_periodic:
        raise UnsupportedSource("stream expansions have no closed form")
    y = _purely_periodic(cf.period)
    for a in reversed(cf.preperiod):
        y = a + 1 / y
    return cf.a0 + 1 / y
