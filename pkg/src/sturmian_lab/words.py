"""Standard, characteristic and mechanical words over {0, 1}."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .cf import CFExpansion, convergents
from .quadratic import QuadraticNumber

__all__ = [
    "StandardLevel",
    "StandardWordTable",
    "WordStream",
    "StreamExhausted",
    "standard_words",
    "mechanical_prefix",
    "characteristic_prefix",
    "subword_complexity",
    "sturmian_number",
]


class StreamExhausted(IndexError):
    """A word source cannot supply the requested number of letters."""


@dataclass(frozen=True)
class StandardLevel:
    k: int
    M: str
    q: int
    M_tilde: str | None = None
    D: str | None = None
    D_prime: str | None = None


@dataclass(frozen=True)
class StandardWordTable:
    cf: CFExpansion
    entries: tuple[StandardLevel, ...]

    @property
    def K(self) -> int:
        return len(self.entries) - 1

    def M(self, k: int) -> str:
        return self.entries[k].M

    def q(self, k: int) -> int:
        return self.entries[k].q

    def M_tilde(self, k: int) -> str:
        return self.entries[k].M_tilde

    def __getitem__(self, k: int) -> StandardLevel:
        return self.entries[k]


def standard_words(cf: CFExpansion, K: int) -> StandardWordTable:
    """``M_0 .. M_K`` with ``M~_k``, ``D_k``, ``D'_k`` for ``k >= 1``."""
    if K < 1:
        raise ValueError("K must be >= 1")
    a = cf.quotients(K)
    words = ["0", "0" * (a[0] - 1) + "1"]
    for k in range(1, K):
        words.append(words[k] * a[k] + words[k - 1])
    entries = [StandardLevel(0, words[0], 1)]
    for k in range(1, K + 1):
        fwd = words[k] + words[k - 1]
        entries.append(
            StandardLevel(
                k,
                words[k],
                len(words[k]),
                M_tilde=fwd[:-2],
                D=fwd[-2:],
                D_prime=(words[k - 1] + words[k])[-2:],
            )
        )
    return StandardWordTable(cf, tuple(entries))


class WordStream:
    """Grow-on-demand prefix of one infinite word.

    ``generator(L)`` must return a prefix of length at least ``L`` (or a shorter
    string if the source ends).  Growth doubles, so amortised cost is linear.
    """

    def __init__(self, generator: Callable[[int], str], descriptor: dict) -> None:
        self._generator = generator
        self.descriptor = dict(descriptor)
        self._cache = ""

    @property
    def cached_length(self) -> int:
        return len(self._cache)

    def prefix(self, L: int) -> str:
        if L > len(self._cache):
            want = max(L, 2 * len(self._cache))
            grown = self._generator(want)
            if not grown.startswith(self._cache):
                raise RuntimeError("word source is not deterministic")
            self._cache = grown
            if len(grown) < L:
                raise StreamExhausted(f"source supplies {len(grown)} < {L} letters")
        return self._cache[:L]

    def to_json(self) -> dict:
        return {"source": self.descriptor, "cached_length": len(self._cache)}

    # constructors -------------------------------------------------------
    @classmethod
    def literal(cls, word: str) -> WordStream:
        _check_binary(word)
        return cls(lambda L: word, {"kind": "literal", "word": word})

    @classmethod
    def characteristic(cls, cf: CFExpansion) -> WordStream:
        desc = {"kind": "characteristic", "slope": _cf_desc(cf)}
        return cls(lambda L: characteristic_prefix(cf, L), desc)

    @classmethod
    def mechanical(cls, theta, rho=0, variant: str = "floor") -> WordStream:
        theta, rho = QuadraticNumber.coerce(theta), QuadraticNumber.coerce(rho)
        desc = {"kind": "mechanical", "theta": theta.literal(), "rho": rho.literal(), "variant": variant}
        return cls(lambda L: mechanical_prefix(theta, rho, variant, L), desc)

    def prepend(self, word: str) -> WordStream:
        """The word ``word + self``."""
        _check_binary(word)
        desc = {"kind": "prepend", "word": word, "base": self.descriptor}
        return WordStream(lambda L: word + self.prefix(max(L - len(word), 1)), desc)


def _cf_desc(cf: CFExpansion) -> str:
    try:
        return cf.literal()
    except ValueError:
        return repr(cf)


def _check_binary(word: str) -> None:
    if word.strip("01"):
        raise ValueError("words are over the alphabet {0, 1}")


def _floors(theta: QuadraticNumber, rho: QuadraticNumber, count: int) -> np.ndarray:
    """``floor(n*theta + rho)`` for ``n = 1..count``, exact.

    Float evaluation with an explicit error bound; values too close to an
    integer are recomputed in exact arithmetic.
    """
    t = float(theta.to_decimal_fraction(80))
    r = float(rho.to_decimal_fraction(80))
    n = np.arange(1, count + 1, dtype=np.float64)
    v = n * t + r
    fl = np.floor(v)
    frac = v - fl
    # |n*t - n*theta| <= n*2^-53*|theta|+..., plus rounding in the product/sum
    err = (n * (abs(t) + 1) + abs(r) + np.abs(v) + 4) * 2.0**-50
    risky = np.nonzero((frac < err) | (frac > 1 - err))[0]
    out = fl.astype(np.int64)
    for i in risky:
        out[i] = math.floor((int(i) + 1) * theta + rho)
    return out


def mechanical_prefix(theta, rho, variant: str, L: int) -> str:
    """Length-``L`` prefix of the lower (``floor``) or upper (``ceil``) mechanical word."""
    theta, rho = QuadraticNumber.coerce(theta), QuadraticNumber.coerce(rho)
    if theta.is_rational or not 0 < theta < 1:
        raise ValueError("slope must be irrational in (0, 1)")
    if rho.D not in (1, theta.D):
        raise ValueError("intercept must lie in the field of the slope")
    if L < 1:
        raise ValueError("L must be >= 1")
    if L + 1 >= 2**52:
        raise ValueError("prefix too long")
    if variant == "floor":
        f = _floors(theta, rho, L + 1)
    elif variant == "ceil":
        f = -_floors(-theta, -rho, L + 1)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    bits = np.diff(f)
    return (bits + ord("0")).astype(np.uint8).tobytes().decode("ascii")


def characteristic_prefix(cf: CFExpansion, L: int) -> str:
    """Prefix of ``lim M_k`` using the least ``k >= 1`` with ``q_k >= L``."""
    if L < 1:
        raise ValueError("L must be >= 1")
    k = 1
    while True:
        qk = convergents(cf, k)[-1].q
        if qk >= L:
            break
        k += 1
    return standard_words(cf, k).M(k)[:L]


def subword_complexity(w: str, n: int) -> int:
    """Number of distinct length-``n`` factors of ``w``."""
    if n < 1 or n > len(w):
        raise ValueError("need 1 <= n <= len(w)")
    return len({w[i : i + n] for i in range(len(w) - n + 1)})


def sturmian_number(w, b: int, terms: int) -> tuple[Fraction, Fraction]:
    """Partial sum of ``x_k / b^k`` and the tail bound ``1/(b^terms (b-1))``."""
    if b < 2 or terms < 1:
        raise ValueError("need b >= 2 and terms >= 1")
    word = w.prefix(terms) if isinstance(w, WordStream) else w[:terms]
    if len(word) < terms:
        raise StreamExhausted("word shorter than requested terms")
    total = Fraction(int(word, b) if b <= 36 else sum(int(c) * b ** (terms - 1 - i) for i, c in enumerate(word)), b**terms)
    return total, Fraction(1, b**terms * (b - 1))
