"""The repetition function r(n, x), the set Lambda(x) and rep estimates.

``r(n) = min{m : ell(m) >= n}`` where ``ell(m)`` is the length of the longest
suffix of ``x[1..m]`` that already occurs in ``x[1..m-1]``.  ``ell`` is read off
an online suffix automaton, so a whole profile costs one left-to-right pass.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from numba import njit

from .words import StreamExhausted, WordStream

__all__ = [
    "InsufficientPrefix",
    "InsufficientData",
    "RepeatIndex",
    "RepProfile",
    "RepEstimate",
    "r_naive",
    "r_naive_profile",
    "longest_repeated_suffixes",
    "r_profile",
    "lambda_of",
    "rep_estimate",
    "profile_csv",
    "sawtooth_csv",
]


class InsufficientPrefix(ValueError):
    """The word is too short to contain a repeat of the requested length."""


class InsufficientData(ValueError):
    """Too few Lambda elements for a tail-window estimate."""


# -- oracle ----------------------------------------------------------------


def r_naive(w: str, n: int, start: int | None = None) -> int:
    """Smallest ``m`` whose length-``n`` suffix occurs starting at some ``j <= m - n``.

    Direct scan; ``start`` optionally skips ``m`` values known to fail.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    m = max(n + 1, start or 0)
    while m <= len(w):
        # occurrence starting at j <= m-n means it ends at or before m-1
        if w.find(w[m - n : m], 0, m - 1) != -1:
            return m
        m += 1
    raise InsufficientPrefix(f"no repeat of length {n} within {len(w)} letters")


def r_naive_profile(w: str, N: int) -> list[int]:
    """``[0, r(1), ..., r(N)]`` by the direct scan, using ``r(n) > r(n-1)``."""
    r = [0]
    for n in range(1, N + 1):
        r.append(r_naive(w, n, start=r[-1] + 1))
    return r


# -- fast engine -----------------------------------------------------------


class RepeatIndex:
    """Online suffix automaton over {0, 1} reporting ``ell(m)`` per letter."""

    __slots__ = ("length", "link", "nxt0", "nxt1", "last", "size")

    def __init__(self) -> None:
        self.length = [0]
        self.link = [-1]
        self.nxt0 = [-1]
        self.nxt1 = [-1]
        self.last = 0
        self.size = 0

    def extend(self, letter: str) -> int:
        """Append one letter; return the longest earlier-occurring suffix length."""
        if letter == "0":
            nxt = self.nxt0
        elif letter == "1":
            nxt = self.nxt1
        else:
            raise ValueError(f"letter {letter!r} not in {{0, 1}}")
        length, link = self.length, self.link
        cur = len(length)
        length.append(length[self.last] + 1)
        link.append(-1)
        self.nxt0.append(-1)
        self.nxt1.append(-1)
        p = self.last
        while p != -1 and nxt[p] == -1:
            nxt[p] = cur
            p = link[p]
        if p == -1:
            link[cur] = 0
            ell = 0
        else:
            ell = length[p] + 1
            q = nxt[p]
            if length[p] + 1 == length[q]:
                link[cur] = q
            else:
                clone = len(length)
                length.append(length[p] + 1)
                link.append(link[q])
                self.nxt0.append(self.nxt0[q])
                self.nxt1.append(self.nxt1[q])
                while p != -1 and nxt[p] == q:
                    nxt[p] = clone
                    p = link[p]
                link[q] = clone
                link[cur] = clone
        self.last = cur
        self.size += 1
        return ell


@njit(cache=True)
def _ell_kernel(bits):  # pragma: no cover - compiled
    """Batch suffix-automaton pass; same recurrences as :class:`RepeatIndex`."""
    n = bits.shape[0]
    cap = 2 * n + 2
    length = np.zeros(cap, np.int32)
    link = np.full(cap, -1, np.int32)
    nxt = np.full((cap, 2), -1, np.int32)
    ell = np.zeros(n, np.int32)
    size = 1
    last = 0
    for m in range(n):
        c = bits[m]
        cur = size
        size += 1
        length[cur] = length[last] + 1
        p = last
        while p != -1 and nxt[p, c] == -1:
            nxt[p, c] = cur
            p = link[p]
        if p == -1:
            link[cur] = 0
        else:
            ell[m] = length[p] + 1
            q = nxt[p, c]
            if length[p] + 1 == length[q]:
                link[cur] = q
            else:
                clone = size
                size += 1
                length[clone] = length[p] + 1
                link[clone] = link[q]
                nxt[clone, 0] = nxt[q, 0]
                nxt[clone, 1] = nxt[q, 1]
                while p != -1 and nxt[p, c] == q:
                    nxt[p, c] = clone
                    p = link[p]
                link[q] = clone
                link[cur] = clone
        last = cur
    return ell


def _bits(w: str) -> np.ndarray:
    arr = np.frombuffer(w.encode("ascii"), dtype=np.uint8) - ord("0")
    if arr.size and arr.max() > 1:
        raise ValueError("words are over the alphabet {0, 1}")
    return arr.astype(np.int64)


def longest_repeated_suffixes(w: str) -> np.ndarray:
    """``[ell(1), ..., ell(|w|)]`` as an integer array."""
    if not w:
        return np.zeros(0, np.int32)
    return _ell_kernel(_bits(w))


def _first_reach(ell: np.ndarray, N: int) -> np.ndarray:
    """``r[n] = 1 + min{m0 : ell[m0] >= n}`` for ``n = 0..N`` (``-1`` if unreached)."""
    best = np.maximum.accumulate(ell) if ell.size else ell
    # best is non-decreasing, so searchsorted gives the first index reaching n
    r = np.searchsorted(best, np.arange(N + 1), side="left") + 1
    r[r > ell.size] = -1
    r[0] = 0
    return r


@dataclass(frozen=True)
class RepProfile:
    """``r[n]`` for ``1 <= n <= N`` (``r[0]`` is a placeholder 0)."""

    N: int
    r: tuple[int, ...]
    prefix_len: int
    lambda_: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "lambda_", tuple(n for n in range(1, self.N + 1) if self.r[n] == 2 * n + 1))

    @property
    def ratios(self) -> list[Fraction]:
        lam = self.lambda_
        return [Fraction(lam[i], lam[i + 1]) for i in range(len(lam) - 1)]


def r_profile(x: WordStream | str, N: int, cap_factor: int = 64) -> RepProfile:
    """Repetition profile up to ``N``, growing the prefix lazily (capped at ``cap_factor*N``)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if isinstance(x, str):
        x = WordStream.literal(x)
    cap = cap_factor * N
    want = min(2 * N + 2, cap)
    while True:
        try:
            w = x.prefix(want)
        except StreamExhausted:
            w = x.prefix(x.cached_length)
        r = _first_reach(longest_repeated_suffixes(w), N)
        if r[N] != -1:
            return RepProfile(N, tuple(int(v) for v in r), int(r[N]))
        if len(w) < want:
            raise InsufficientPrefix(f"stream ended at {len(w)} letters before r({N}) resolved")
        if want >= cap:
            raise InsufficientPrefix(f"r({N}) unresolved within {cap} letters")
        want = min(2 * want, cap)


def lambda_of(profile: RepProfile) -> tuple[int, ...]:
    return profile.lambda_


# -- estimates -------------------------------------------------------------


@dataclass(frozen=True)
class RepEstimate:
    """Tail-window minimum of ``1 + n_i/n_{i+1}`` with a heuristic error bar.

    ``spread`` is the range of the last five tail values; the bar is
    ``value +- spread``.
    """

    value: Fraction
    detail: tuple[Fraction, ...]
    window_start: int
    spread: Fraction

    def decimal(self, places: int = 6) -> str:
        return _decimal(self.value, places)

    @property
    def bar(self) -> tuple[Fraction, Fraction]:
        return (self.value - self.spread, self.value + self.spread)


def _decimal(x: Fraction, places: int) -> str:
    n = math.floor(x * 10**places + Fraction(1, 2))
    whole, frac = divmod(n, 10**places)
    return f"{whole}.{frac:0{places}d}"


def rep_estimate(source: RepProfile | Sequence[int], window: float = 0.5) -> RepEstimate:
    """Minimum of ``1 + n_i/n_{i+1}`` over the tail of Lambda (drop the first ``window``)."""
    lam = list(source.lambda_ if isinstance(source, RepProfile) else source)
    if not 0 <= window < 1:
        raise ValueError("window must be in [0, 1)")
    start = int(len(lam) * window)
    tail = lam[start:]
    if len(tail) < 3:
        raise InsufficientData(f"only {len(tail)} Lambda elements in the tail window")
    detail = tuple(1 + Fraction(tail[i], tail[i + 1]) for i in range(len(tail) - 1))
    last = detail[-5:]
    return RepEstimate(min(detail), detail, start, max(last) - min(last))


def profile_csv(profile: RepProfile) -> str:
    """CSV rows ``n, r(n), r(n)/n, in_lambda``."""
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["n", "r(n)", "r(n)/n", "in_lambda"])
    lam = set(profile.lambda_)
    for n in range(1, profile.N + 1):
        out.writerow([n, profile.r[n], f"{profile.r[n] / n:.6f}", int(n in lam)])
    return buf.getvalue()


def sawtooth_csv(profile: RepProfile) -> str:
    """Plot data: two columns ``n, r(n)/n``."""
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["n", "r(n)/n"])
    for n in range(1, profile.N + 1):
        out.writerow([n, f"{profile.r[n] / n:.6f}"])
    return buf.getvalue()
