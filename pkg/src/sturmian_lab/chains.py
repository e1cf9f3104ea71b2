"""Locating chains: per-level classification, synthesis and Lambda prediction.

At level ``k`` a Sturmian word of the given slope starts in exactly one way:

* case ``i``:   ``W M_k M~_k ...``          with ``W`` a suffix of ``M_k``
* case ``ii``:  ``W M_{k-1} M_k M~_k ...``  with ``W`` a suffix of ``M_k``
* case ``iii``: ``W M_k M~_k ...``          with ``W`` a suffix of ``M_{k-1}``

Consecutive levels are linked by the transition table below (``w`` is ``|W|``)::

    i   -> i/ii : w' = w + t q_k + q_{k-1}   (1 <= t <= a_{k+1} - 1)
    i   -> iii  : w' = w
    ii  -> i/ii : w' = w + q_{k-1}
    iii -> i/ii : w' = w

For the golden slope only ``i -> iii`` is possible after ``i``, so a chain is a
word over ``a = (i)(iii)`` and ``b = (ii)``, optionally led by one ``iii``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .cf import GOLDEN, CFExpansion, convergents
from .quadratic import QuadraticNumber
from .words import StandardWordTable, StreamExhausted, WordStream, standard_words

__all__ = [
    "CASES",
    "ChainError",
    "NotSturmianError",
    "ConsistencyError",
    "NeedsMoreLevels",
    "LevelState",
    "Chain",
    "GoldenChain",
    "GoldenChainStats",
    "PredictedLambda",
    "parse_chain",
    "parse_golden_chain",
    "classify_level",
    "chain_of",
    "chain_states",
    "validate_chain",
    "synthesize",
    "synthesize_prefix",
    "predict_lambda",
    "chain_stats",
    "rep_exact_periodic_golden",
    "golden_ratio_limits",
    "PHI",
    "characteristic_chain",
    "equality_chain",
    "ConstructionChain",
    "random_chain",
    "random_golden_chain",
    "required_prefix",
]

CASES = ("i", "ii", "iii")
PHI = QuadraticNumber(-1, 1, 2, 5)


class ChainError(ValueError):
    """Invalid chain, transition or annotation."""


class NotSturmianError(ValueError):
    """No (or more than one) case matches at some level."""


class ConsistencyError(RuntimeError):
    """Classified levels violate the transition table."""


class NeedsMoreLevels(ValueError):
    """The chain does not determine the requested number of letters."""


# -- data -------------------------------------------------------------------


@dataclass(frozen=True)
class LevelState:
    k: int
    case: str
    w_len: int
    q_k: int
    q_km1: int
    t: int | None = None

    def __post_init__(self) -> None:
        if self.case not in CASES:
            raise ChainError(f"unknown case {self.case!r}")
        hi = self.q_km1 if self.case == "iii" else self.q_k
        if not 1 <= self.w_len <= hi:
            raise ChainError(f"level {self.k}: |W| = {self.w_len} outside [1, {hi}]")

    @property
    def eta(self) -> Fraction:
        return Fraction(self.q_km1, self.q_k)

    @property
    def t_ratio(self) -> Fraction:
        return Fraction(self.w_len, self.q_k)


@dataclass(frozen=True)
class Chain:
    """Finite locating chain for levels ``1..len(cases)``.

    ``t`` maps a level ``k`` to the multiplicity of an ``i -> i/ii`` step from
    ``k`` to ``k+1``; ``w1`` is ``|W_1|`` (forced to 1 when ``a_1 == 1`` or the
    first case is ``iii``).
    """

    cases: tuple[str, ...]
    t: tuple[tuple[int, int], ...] = ()
    w1: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "cases", tuple(self.cases))
        t = self.t.items() if isinstance(self.t, dict) else self.t
        object.__setattr__(self, "t", tuple(sorted((int(k), int(v)) for k, v in t)))
        for c in self.cases:
            if c not in CASES:
                raise ChainError(f"unknown case {c!r}")

    @property
    def levels(self) -> int:
        return len(self.cases)

    @property
    def t_map(self) -> dict[int, int]:
        return dict(self.t)

    def case(self, k: int) -> str:
        return self.cases[k - 1]

    def truncate(self, K: int) -> Chain:
        return Chain(self.cases[:K], tuple((k, v) for k, v in self.t if k < K), self.w1)

    def to_json(self) -> dict:
        return {"cases": list(self.cases), "t": {str(k): v for k, v in self.t}, "w1": self.w1}

    @classmethod
    def from_json(cls, obj: dict | str) -> Chain:
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(tuple(obj["cases"]), {int(k): v for k, v in obj.get("t", {}).items()}, obj.get("w1"))

    def golden_letters(self) -> str:
        """Rewrite as ``[(iii)] a/b`` letters (golden chains only)."""
        out, i = [], 0
        if self.cases and self.cases[0] == "iii":
            out.append("(iii)")
            i = 1
        while i < len(self.cases):
            c = self.cases[i]
            if c == "ii":
                out.append("b")
                i += 1
            elif c == "i" and (i + 1 == len(self.cases) or self.cases[i + 1] == "iii"):
                out.append("a")
                i += 2
            else:
                raise ChainError("not a golden-slope chain")
        return "".join(out)


@dataclass(frozen=True)
class GoldenChain:
    """Eventually periodic (or finite) golden chain ``[(iii)] head (period)``."""

    head: str = ""
    period: str = ""
    leading_iii: bool = False

    def __post_init__(self) -> None:
        if (self.head + self.period).strip("ab"):
            raise ChainError("golden chains are words over {a, b}")
        if not self.head and not self.period:
            raise ChainError("empty chain")

    @property
    def is_periodic(self) -> bool:
        return bool(self.period)

    def letters(self, n: int) -> str:
        """First ``n`` letters (fewer if the chain is finite)."""
        if not self.period or n <= len(self.head):
            return self.head[:n]
        reps = (n - len(self.head)) // len(self.period) + 1
        return (self.head + self.period * reps)[:n]

    def cases(self, K: int) -> tuple[str, ...]:
        """Case tags for levels ``1..K`` (raises if a finite chain is too short)."""
        out = ["iii"] if self.leading_iii else []
        i = 0
        while len(out) < K:
            if self.period:
                letter = self.letters(i + 1)[-1]
            elif i < len(self.head):
                letter = self.head[i]
            else:
                raise NeedsMoreLevels(f"chain has only {len(out)} levels, need {K}")
            out.extend(("i", "iii") if letter == "a" else ("ii",))
            i += 1
        return tuple(out[:K])

    @property
    def levels(self) -> int | None:
        if self.period:
            return None
        return int(self.leading_iii) + sum(2 if c == "a" else 1 for c in self.head)

    def to_chain(self, K: int) -> Chain:
        return Chain(self.cases(K), (), 1)

    def literal(self) -> str:
        s = "(iii)" if self.leading_iii else ""
        s += self.head
        if self.period:
            s += f"({self.period})"
        return s

    def __str__(self) -> str:
        return self.literal()


_GOLDEN_RE = re.compile(r"^(?:\(iii\)|\[iii\]|iii)?((?:[ab]\d*)*)(?:\(((?:[ab]\d*)+)\))?$")


def _expand_powers(text: str) -> str:
    return "".join(letter * int(power or 1) for letter, power in re.findall(r"([ab])(\d*)", text))


def parse_golden_chain(text: str) -> GoldenChain:
    """Parse ``[(iii)] head (period)`` with exponent sugar, e.g. ``bab(b2a2)``."""
    s = re.sub(r"\s+", "", text)
    m = _GOLDEN_RE.match(s)
    if not m or not (m.group(1) or m.group(2)):
        raise ChainError(f"malformed chain literal {text!r}")
    leading = s.startswith(("(iii)", "[iii]", "iii"))
    return GoldenChain(_expand_powers(m.group(1)), _expand_powers(m.group(2) or ""), leading)


def parse_chain(text: str) -> GoldenChain | Chain:
    """Golden literal or general-slope JSON ``{"cases", "t", "w1"}``."""
    s = text.strip()
    if s.startswith("{"):
        return Chain.from_json(s)
    return parse_golden_chain(s)


# -- classification --------------------------------------------------------


def _text(x: WordStream | str, L: int) -> str:
    if isinstance(x, str):
        return x
    try:
        return x.prefix(L)
    except StreamExhausted:
        return x.prefix(x.cached_length)


def required_prefix(table: StandardWordTable, k: int) -> int:
    """Letters needed to decide the case at level ``k``."""
    return 3 * table.q(k) + 2 * table.q(k - 1) - 2


def classify_level(x: WordStream | str, table: StandardWordTable, k: int, *, all_matches: bool = False):
    """Case and ``|W_k|`` at level ``k``, by testing every candidate ``W``.

    Occurrences of the continuation pattern are located with substring search
    and each is then checked against the suffix condition, which is equivalent
    to testing the ``2 q_k + q_{k-1}`` candidates one by one.
    """
    if not 1 <= k <= table.K:
        raise ValueError(f"level {k} outside table range 1..{table.K}")
    Mk, Mkm1, Mt = table.M(k), table.M(k - 1), table.M_tilde(k)
    qk, qkm1 = len(Mk), len(Mkm1)
    need = required_prefix(table, k)
    s = _text(x, need)
    if len(s) < need:
        raise StreamExhausted(f"level {k} needs {need} letters, have {len(s)}")
    matches = []
    for case, pattern, suffix_of in (("i", Mk + Mt, Mk), ("ii", Mkm1 + Mk + Mt, Mk), ("iii", Mk + Mt, Mkm1)):
        wmax = len(suffix_of)
        pos = s.find(pattern, 1, wmax + len(pattern))
        while pos != -1:
            if s[:pos] == suffix_of[len(suffix_of) - pos :]:
                matches.append((case, pos))
            pos = s.find(pattern, pos + 1, wmax + len(pattern))
    if all_matches:
        return matches
    if len(matches) != 1:
        raise NotSturmianError(f"level {k}: {len(matches)} matching cases {matches[:4]}")
    case, w = matches[0]
    return LevelState(k, case, w, qk, qkm1)


def _step(cf: CFExpansion, prev: LevelState, case: str, q: list[int], t: int | None) -> int:
    """``|W_{k+1}|`` from level ``k`` per the transition table."""
    k = prev.k
    a_next = cf.quotient(k + 1)
    if prev.case == "i":
        if case == "iii":
            if t is not None:
                raise ChainError(f"level {k}: i -> iii takes no t")
            return prev.w_len
        if t is None or not 1 <= t <= a_next - 1:
            raise ChainError(f"level {k}: i -> {case} needs 1 <= t <= {a_next - 1}, got {t}")
        return prev.w_len + t * q[k] + q[k - 1]
    if case == "iii":
        raise ChainError(f"level {k}: {prev.case} -> iii is not allowed")
    if t is not None:
        raise ChainError(f"level {k}: {prev.case} -> {case} takes no t")
    return prev.w_len + (q[k - 1] if prev.case == "ii" else 0)


def _denominators(cf: CFExpansion, K: int) -> list[int]:
    """``[q_0, ..., q_K]`` (index = level)."""
    return [c.q for c in convergents(cf, K)[1:]]


def chain_of(x: WordStream | str, cf: CFExpansion, K: int) -> tuple[Chain, list[LevelState]]:
    """Classify levels ``1..K`` and check every transition."""
    if K < 1:
        raise ValueError("K must be >= 1")
    table = standard_words(cf, K)
    q = _denominators(cf, K)
    raw = [classify_level(x, table, k) for k in range(1, K + 1)]
    states = [raw[0]]
    ts: dict[int, int] = {}
    for cur in raw[1:]:
        prev = states[-1]
        t = None
        if prev.case == "i" and cur.case != "iii":
            num = cur.w_len - prev.w_len - q[prev.k - 1]
            if num % q[prev.k]:
                raise ConsistencyError(f"level {prev.k}: |W| jump {cur.w_len - prev.w_len} not of the form t q_k + q_(k-1)")
            t = num // q[prev.k]
            ts[prev.k] = t
            states[-1] = LevelState(prev.k, prev.case, prev.w_len, prev.q_k, prev.q_km1, t)
        try:
            expected = _step(cf, prev, cur.case, q, t)
        except ChainError as exc:
            raise ConsistencyError(str(exc)) from None
        if expected != cur.w_len:
            raise ConsistencyError(f"level {cur.k}: |W| = {cur.w_len}, transition table gives {expected}")
        states.append(cur)
    return Chain(tuple(s.case for s in states), ts, states[0].w_len), states


def _default_w1(cf: CFExpansion, chain: Chain) -> int:
    if chain.w1 is not None:
        return chain.w1
    if chain.cases[0] == "iii" or cf.quotient(1) == 1:
        return 1
    raise ChainError("w1 must be given when a_1 > 1")


def chain_states(cf: CFExpansion, chain: Chain | GoldenChain, K: int | None = None) -> list[LevelState]:
    """Symbolic level states from the transition table (no word needed)."""
    if isinstance(chain, GoldenChain):
        if K is None:
            K = chain.levels
            if K is None:
                raise ValueError("K is required for periodic chains")
        chain = chain.to_chain(K)
    K = chain.levels if K is None else K
    if K > chain.levels:
        raise NeedsMoreLevels(f"chain has {chain.levels} levels, need {K}")
    q = _denominators(cf, K)
    ts = chain.t_map
    w = _default_w1(cf, chain)
    states = [LevelState(1, chain.cases[0], w, q[1], q[0], ts.get(1))]
    for k in range(2, K + 1):
        prev = states[-1]
        w = _step(cf, prev, chain.cases[k - 1], q, ts.get(k - 1))
        states.append(LevelState(k, chain.cases[k - 1], w, q[k], q[k - 1], ts.get(k)))
    return states


def validate_chain(cf: CFExpansion, chain: Chain | GoldenChain, K: int | None = None) -> list[LevelState]:
    """Raise :class:`ChainError` unless every step obeys the transition table."""
    return chain_states(cf, chain, K)


# -- synthesis -------------------------------------------------------------


def _determined_prefixes(cf: CFExpansion, chain: Chain, K: int) -> str:
    states = chain_states(cf, chain, K)
    table = standard_words(cf, K)
    ts = chain.t_map
    if states[0].case == "iii":
        W = table.M(0)[-states[0].w_len :]
    else:
        W = table.M(1)[-states[0].w_len :]
    best = ""
    for st in states:
        k = st.k
        if k > 1:
            prev = states[k - 2]
            if prev.case == "i" and st.case != "iii":
                W = W + table.M(k - 1) * ts[k - 1] + table.M(k - 2)
            elif prev.case == "ii":
                W = W + table.M(k - 2)
        assert len(W) == st.w_len
        cont = table.M(k) + table.M_tilde(k)
        if st.case == "ii":
            cont = table.M(k - 1) + cont
        det = W + cont
        if not det.startswith(best[: len(det)]) or not best.startswith(det[: len(best)]):
            raise ChainError(f"chain is not realizable: level {k} contradicts level {k - 1}")
        if len(det) > len(best):
            best = det
    return best


def synthesize_prefix(cf: CFExpansion, chain: Chain | GoldenChain, L: int, K: int | None = None) -> str:
    """The length-``L`` prefix determined by the chain (levels up to ``K``)."""
    if isinstance(chain, GoldenChain):
        if K is None:
            # fewest levels whose determined prefix is long enough
            top = chain.levels
            K = 2 if top is None else min(2, top)
            while _determined_length(cf, K) < L and (top is None or K < top):
                K += 1
        chain = chain.to_chain(K)
    K = chain.levels if K is None else K
    word = _determined_prefixes(cf, chain.truncate(K), K)
    if len(word) < L:
        raise NeedsMoreLevels(f"{K} levels determine {len(word)} letters, asked for {L}")
    return word[:L]


def _determined_length(cf: CFExpansion, K: int) -> int:
    q = _denominators(cf, K)
    # shortest continuation at level K: M_K M~_K
    return 2 * q[K] + q[K - 1] - 2


def synthesize(cf: CFExpansion, chain: Chain | GoldenChain, L: int) -> WordStream:
    """Word stream realizing the chain; asking beyond ``L`` letters may need more levels."""
    word = synthesize_prefix(cf, chain, L)
    desc = {"kind": "chain", "slope": cf.literal(), "chain": str(chain) if isinstance(chain, GoldenChain) else chain.to_json()}

    def gen(n: int, _w=word) -> str:
        if n <= len(_w):
            return _w
        return synthesize_prefix(cf, chain, n)

    stream = WordStream(gen, desc)
    stream.prefix(L)
    return stream


# -- Lambda prediction -----------------------------------------------------

_GOLDEN_TAG = {"L3": "L'1", "L4": "L'2", "L5": "L'3", "L6": "L'4"}


@dataclass(frozen=True)
class PredictedLambda:
    """Predicted ``Lambda`` on ``[lo, hi]`` with the case tag of each element."""

    elements: tuple[tuple[object, str, int], ...]  # (n, tag, level)
    lo: object
    hi: object

    @property
    def values(self) -> list:
        return [n for n, _, _ in self.elements]

    def tagged(self, *tags: str) -> list:
        return [n for n, tag, _ in self.elements if tag in tags]


def _predict_core(
    cases: Callable[[int], str | None],
    t_at: Callable[[int], int | None],
    a: Callable[[int], int],
    q: Callable[[int], object],
    w: Callable[[int], object],
    one,
    k_first: int,
    k_last: int,
    golden: bool,
) -> PredictedLambda:
    """Generic over the number type so exact limits can reuse the same rules."""

    def fpg(k):
        return q(k) + q(k - 1) - one

    out: list[tuple[object, str, int]] = []

    def emit(items, tag, k, lo, hi):
        if golden:
            tag = _GOLDEN_TAG.get(tag, tag)
        seen = set()
        for n in sorted(items):
            if lo <= n <= hi and n not in seen:
                seen.add(n)
                out.append((n, tag, k))

    k = k_first
    lo = fpg(k)
    hi = None
    if k == 1 and cases(1) == "iii":
        nxt = cases(2)
        if nxt is None or k_last < 2:
            return PredictedLambda((), lo, lo - one)
        items = [q(1)] + ([q(2) - one] if nxt == "i" else [])
        hi = fpg(2) - one
        emit(items, "R1", 1, lo, hi)
        k = 2
    while k <= k_last:
        c, nxt = cases(k), cases(k + 1)
        if nxt is None or k + 1 > k_last:
            break
        start = fpg(k)
        if c == "i":
            if nxt == "iii":
                nn = cases(k + 2)
                if nn is None or k + 2 > k_last:
                    break
                end = fpg(k + 2) - one
                vp = w(k) + q(k + 1) - one
                if nn == "i":
                    emit([vp, q(k + 2) - one], "L3", k, start, end)
                else:
                    emit([vp], "L4", k, start, end)
                hi, k = end, k + 2
                continue
            t = t_at(k)
            end = fpg(k + 1) - one
            v_t = w(k) + t * q(k) + q(k - 1) - one
            u_t1 = (t + 1) * q(k) + q(k - 1) - one
            v_t1 = w(k) + (t + 1) * q(k) + q(k - 1) - one
            u_p = q(k + 1) - one
            if nxt == "i":
                items = [v_t, u_p] if t == a(k + 1) - 1 else [v_t, u_t1, v_t1, u_p]
                emit(items, "L1", k, start, end)
            else:
                emit([v_t, u_t1, v_t1], "L2", k, start, end)
        elif c == "ii":
            end = fpg(k + 1) - one
            u1 = q(k) + q(k - 1) - one
            v1 = w(k) + q(k) + q(k - 1) - one
            if nxt == "i":
                items = [u1] if a(k + 1) == 1 else [u1, v1, q(k + 1) - one]
                emit(items, "L5", k, start, end)
            else:
                emit([u1, v1], "L6", k, start, end)
        else:
            raise ChainError(f"level {k}: case iii must follow case i")
        hi, k = end, k + 1
    if hi is None:
        hi = lo - one
    return PredictedLambda(tuple(out), lo, hi)


def predict_lambda(states: Sequence[LevelState], cf: CFExpansion) -> PredictedLambda:
    """Exact ``Lambda`` on ``[q_1 + q_0 - 1, hi]`` from consecutive level states.

    ``hi`` is the end of the last interval fully determined by ``states``.
    """
    if not states:
        raise ValueError("no states")
    k0 = states[0].k
    for i, st in enumerate(states):
        if st.k != k0 + i:
            raise ChainError(f"gap in level states at {st.k}")
    if k0 != 1:
        raise ChainError("states must start at level 1")
    K = states[-1].k
    q = _denominators(cf, K + 1)
    by_k = {s.k: s for s in states}
    golden = all(cf.quotient(j) == 1 for j in range(1, K + 2))
    return _predict_core(
        lambda k: by_k[k].case if k in by_k else None,
        lambda k: by_k[k].t,
        cf.quotient,
        lambda k: q[k],
        lambda k: by_k[k].w_len,
        1,
        1,
        K,
        golden,
    )


# -- golden chain statistics -------------------------------------------------


@dataclass(frozen=True)
class GoldenChainStats:
    c_prefix: str
    m: tuple[int, ...]
    l: tuple[int, ...]
    e: tuple[int, ...] | None = None


def _runs(s: str) -> list[tuple[str, int]]:
    return [(m.group(0)[0], len(m.group(0))) for m in re.finditer(r"a+|b+", s)]


def chain_stats(chain: GoldenChain | str, horizon: int = 200) -> GoldenChainStats:
    """a-chain lengths ``m_i``, b-chain lengths ``l_j`` and the ``c`` prefix.

    The final (possibly unfinished) block of a finite horizon is not counted.
    """
    if isinstance(chain, str):
        chain = parse_golden_chain(chain)
    letters = chain.letters(horizon)
    lead = "(iii)" if chain.leading_iii else ""
    runs = _runs(letters)
    if chain.period and len(set(chain.period)) < 2:
        raise ChainError("chain tail uses a single letter; statistics are undefined")
    if len(runs) < 3:
        raise ChainError("chain tail uses a single letter; statistics are undefined")
    # first a-run preceded by a b-run starts the decomposition
    first = next((i for i, (c, _) in enumerate(runs) if c == "a" and i > 0), None)
    if first is None:
        raise ChainError("no a-chain within the horizon")
    c_prefix = lead + "".join(c * n for c, n in runs[:first])
    body = runs[first:-1]  # drop the unfinished final block
    m = tuple(n for c, n in body if c == "a")
    l = tuple(n for c, n in body if c == "b")
    return GoldenChainStats(c_prefix, m, l, _e_decomposition(letters))


def _e_decomposition(letters: str) -> tuple[int, ...] | None:
    """``(e_1, e_2, ...)`` if some tail reads ``(b2a2)^e1 ba (b2a2)^e2 ba ...``."""
    unit = re.compile(r"((?:bbaa)+)ba")
    for s in range(len(letters)):
        pos, es = s, []
        while True:
            m = unit.match(letters, pos)
            if not m:
                break
            es.append(len(m.group(1)) // 4)
            pos = m.end()
        rest = letters[pos:]
        # the leftover must be a prefix of a further (b2a2)^e ba group
        if len(es) >= 2 and re.fullmatch(r"(?:bbaa)*(?:b{0,2}a{0,2}|bb?|ba?)", rest):
            return tuple(es)
    return None


# -- exact rep for eventually periodic golden chains -------------------------


class _Tracked:
    """Integer value at a concrete level paired with its scaled limit."""

    __slots__ = ("v", "lim")

    def __init__(self, v: int, lim: QuadraticNumber) -> None:
        self.v, self.lim = v, lim

    def __add__(self, o):
        return _Tracked(self.v + o.v, self.lim + o.lim)

    def __sub__(self, o):
        return _Tracked(self.v - o.v, self.lim - o.lim)

    def __rmul__(self, n: int):
        return _Tracked(n * self.v, n * self.lim)

    def __lt__(self, o):
        return self.v < o.v

    def __le__(self, o):
        return self.v <= o.v

    def __eq__(self, o):
        return self.v == o.v

    def __hash__(self):
        return hash(self.v)


def _w_limits(cases: Sequence[str], k0: int, P: int) -> dict[int, QuadraticNumber]:
    """``lim |W_k| / q_k`` along each level ``k0 <= k < k0 + P`` of the period.

    Golden ``q_j`` scales like ``phi^-j``; with ``tau_k = lim |W_k| phi^k`` the
    transition table gives ``tau_{k+1} = phi tau_k + [case_k = ii] phi^2``.
    """
    phi = PHI
    # tau_{k0+P} = phi^P tau_{k0} + C
    C = QuadraticNumber(0)
    for j in range(k0, k0 + P):
        C = phi * C + (phi**2 if cases[j - 1] == "ii" else 0)
    tau = C / (1 - phi**P)
    out = {}
    for j in range(k0, k0 + P):
        out[j] = tau
        tau = phi * tau + (phi**2 if cases[j - 1] == "ii" else 0)
    assert tau == out[k0]
    return out


def golden_ratio_limits(chain: GoldenChain) -> list[tuple[QuadraticNumber, str]]:
    """Limits of ``n_i / n_{i+1}`` over one period, with the tag of ``n_i``."""
    if not chain.is_periodic:
        raise ChainError("chain is not eventually periodic")
    P = sum(2 if c == "a" else 1 for c in chain.period)
    base = int(chain.leading_iii) + sum(2 if c == "a" else 1 for c in chain.head)
    k0 = base + P  # a period boundary at least one full period deep
    cases = chain.cases(k0 + 4 * P + 4)
    K = k0 + 4 * P
    tau = _w_limits(cases, k0, P)
    phi_inv = 1 / PHI
    q = _denominators(GOLDEN, K + 2)
    states = chain_states(GOLDEN, Chain(cases[: K + 2], (), 1))
    ws = {s.k: s.w_len for s in states}

    def qt(j: int) -> _Tracked:
        return _Tracked(q[j], phi_inv**j)

    def wt(k: int) -> _Tracked:
        lim = tau[k0 + (k - k0) % P] * phi_inv**k if k >= k0 else QuadraticNumber(0)
        return _Tracked(ws[k], lim)

    pred = _predict_core(
        lambda k: cases[k - 1] if 1 <= k <= len(cases) else None,
        lambda k: None,
        lambda k: 1,
        qt,
        wt,
        _Tracked(1, QuadraticNumber(0)),
        1,
        K + 2,
        True,
    )
    elems = pred.elements
    out = []
    for (n, tag, k), (n2, _, _) in zip(elems, elems[1:]):
        if k0 + P <= k < k0 + 2 * P:
            out.append((n.lim / n2.lim, tag))
    return out


def rep_exact_periodic_golden(chain: GoldenChain | str, *, check: bool = True) -> QuadraticNumber:
    """Exact ``rep`` of the golden word with an eventually periodic chain."""
    if isinstance(chain, str):
        chain = parse_golden_chain(chain)
    if not chain.is_periodic:
        raise ChainError("chain is not eventually periodic")
    if len(set(chain.period)) == 1:
        return 1 + PHI
    limits = golden_ratio_limits(chain)
    best = min(v for v, tag in limits if tag in ("L'2", "L'3"))
    if check:
        overall = min(v for v, _ in limits)
        if overall != best:
            raise ConsistencyError(f"minimum ratio {overall} is not attained on L'2/L'3 ({best})")
    return 1 + best


# -- chain builders ----------------------------------------------------------


def characteristic_chain(cf: CFExpansion, K: int) -> Chain:
    """Chain of the characteristic word: ``W_k = M_k`` at every level.

    Case ``ii`` when ``a_{k+1} = 1``, otherwise case ``i`` with
    ``t = a_{k+1} - 1`` (so that ``|W_{k+1}| = q_{k+1}``).
    """
    cases, ts = [], {}
    for k in range(1, K + 1):
        a = cf.quotient(k + 1)
        if a == 1:
            cases.append("ii")
        else:
            cases.append("i")
            if k < K:
                ts[k] = a - 1
    return Chain(tuple(cases), ts, cf.quotient(1))


@dataclass(frozen=True)
class ConstructionChain:
    chain: Chain
    peaks: tuple[int, ...]  # levels k_j carrying case ii
    all_in_class: bool  # every k_j lies in the minimizing residue class


def equality_chain(cf: CFExpansion, K: int) -> ConstructionChain:
    """Chain whose rep tends to the minimum of the spectrum.

    Case ``ii`` at levels ``k_1 < k_2 < ...`` and ``(i)(iii)`` pairs in between;
    gaps ``k_{j+1} - k_j`` are odd and default to ``2j + 1``, stretched to the
    next level of the residue class where the mirror limit is smallest.  For an
    even period odd gaps cannot stay in one class; the builder then alternates
    through another class so every other peak is in the minimizing class
    (``all_in_class`` is False).
    """
    from .cf import mirror_limits

    if not cf.is_periodic:
        raise ChainError("equality construction needs an eventually periodic slope")
    pre, P = len(cf.preperiod), len(cf.period)
    j_best = min(mirror_limits(cf), key=lambda jv: jv[1])[0]

    def in_best(k: int) -> bool:
        return k > pre and (k - 1 - pre) % P == j_best

    k = next(k for k in range(1, pre + P + 2) if in_best(k))
    peaks = [k]
    all_in_class = True
    j = 1
    while peaks[-1] <= K:
        base = peaks[-1] + 2 * j + 1
        cand = next((c for c in range(base, base + 2 * P + 1, 2) if in_best(c)), None)
        if cand is None:
            cand, all_in_class = base, False
        peaks.append(cand)
        j += 1
    cases = ["ii"] * (peaks[0])
    for a, b in zip(peaks, peaks[1:]):
        cases.extend(["i", "iii"] * ((b - a - 1) // 2))
        cases.append("ii")
    return ConstructionChain(Chain(tuple(cases[:K]), (), cf.quotient(1)), tuple(p for p in peaks if p <= K), all_in_class)


def random_chain(cf: CFExpansion, K: int, rng) -> Chain:
    """A uniformly stepped valid chain for levels ``1..K`` (general slopes)."""
    cases = [rng.choice(CASES)]
    w1 = 1 if cases[0] == "iii" else rng.randint(1, cf.quotient(1))
    ts = {}
    for k in range(1, K):
        a_next = cf.quotient(k + 1)
        if cases[-1] == "i":
            options = ["iii"] + (["i", "ii"] if a_next >= 2 else [])
        else:
            options = ["i", "ii"]
        nxt = rng.choice(options)
        if cases[-1] == "i" and nxt != "iii":
            ts[k] = rng.randint(1, a_next - 1)
        cases.append(nxt)
    return Chain(tuple(cases), ts, w1)


def random_golden_chain(rng, letters: int, leading_iii: bool | None = None) -> GoldenChain:
    """Finite golden chain with i.i.d. fair letters."""
    lead = rng.random() < 0.5 if leading_iii is None else leading_iii
    return GoldenChain("".join(rng.choice("ab") for _ in range(letters)), "", lead)
