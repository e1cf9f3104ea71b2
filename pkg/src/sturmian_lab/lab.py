"""Experiments: constants, Lambda verification, gap scans and run records."""

from __future__ import annotations

import csv
import io
import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .cf import GOLDEN, CFExpansion, min_spectrum
from .chains import (
    PHI,
    Chain,
    GoldenChain,
    _denominators,
    _determined_prefixes,
    chain_of,
    chain_states,
    equality_chain,
    parse_golden_chain,
    predict_lambda,
    random_chain,
    random_golden_chain,
    rep_exact_periodic_golden,
    synthesize_prefix,
)
from .quadratic import QuadraticNumber
from .rep import RepEstimate, longest_repeated_suffixes, rep_estimate
from .words import StreamExhausted, WordStream

__all__ = [
    "MuEntry",
    "mu_table",
    "mu4_family_value",
    "irrationality_exponent",
    "LambdaReport",
    "verify_lambda",
    "RunRecord",
    "ScanResult",
    "gap_scan",
    "sample_chains",
    "estimate_chain",
    "MinSpectrumReport",
    "min_spectrum_check",
    "summary_csv",
    "GAP_NAMES",
]


# -- constants ----------------------------------------------------------------


@dataclass(frozen=True)
class MuEntry:
    name: str
    value: QuadraticNumber
    family: str

    @property
    def decimal(self) -> str:
        return self.value.decimal(6)


def mu4_family_value(d: int) -> QuadraticNumber:
    """Closed form of rep for the periodic chain ``((b2a2)^d ba)``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    p = PHI
    inner = 1 / p + p + p**6 / (1 - p ** (6 * d + 3)) + p**10 * (1 - p ** (6 * d)) / ((1 - p**6) * (1 - p ** (6 * d + 3)))
    return 1 + 1 / inner


def mu_table() -> dict[str, MuEntry]:
    p = PHI
    entries = [
        MuEntry("r_max", QuadraticNumber(-3, 2, 2, 10), "slopes [0;a_1,...,a_K,(2,1,1)]"),
        MuEntry("r_1", QuadraticNumber(48, 1, 31, 10), "second largest rep over all Sturmian words"),
        MuEntry("mu_max", 1 + p, "golden chains u(a) or v(b)"),
        MuEntry("mu_2", 1 + 2 * p**3, "golden chains u(ab)"),
        MuEntry("mu_3", 1 + p**2 * (p**4 + p**2 + 1) / (p**5 + p**3 + 1), "golden chains v(b2a2)"),
        MuEntry("mu_4", 1 + (1 - p**6) / (1 + 2 * p - 2 * p**7 + p**11), "limit of ((b2a2)^d ba) as d grows"),
        MuEntry("mu_min", 1 + p**2, "golden chains with arbitrarily long a- or b-chains"),
    ]
    return {e.name: e for e in entries}


def irrationality_exponent(rep):
    """``rep / (rep - 1)``; exact for exact input."""
    if not rep > 1:
        raise ValueError("rep must exceed 1")
    return rep / (rep - 1)


# -- Lambda verification ------------------------------------------------------


@dataclass
class LambdaReport:
    lo: int
    hi: int
    brute: list[int]
    predicted: list[tuple[int, str]]
    mismatches: list[tuple[int, bool, bool]]  # (n, in_brute, in_predicted)
    boundary: list[int] = field(default_factory=list)  # brute elements below lo (unverified)
    chain_ok: bool = True

    @property
    def ok(self) -> bool:
        return not self.mismatches and self.chain_ok

    def to_json(self) -> dict:
        return {
            "interval": [self.lo, self.hi],
            "brute": self.brute,
            "predicted": [[n, t] for n, t in self.predicted],
            "mismatches": [list(m) for m in self.mismatches],
            "level1_boundary_unverified": self.boundary,
            "chain_consistent": self.chain_ok,
        }


def _full_prefix(cf: CFExpansion, chain: Chain) -> str:
    return _determined_prefixes(cf, chain, chain.levels)


def verify_lambda(subject, cf: CFExpansion, K: int, n_cap: int | None = None) -> LambdaReport:
    """Brute-force Lambda against the prediction from level states ``1..K``.

    ``subject`` is a binary word or stream, a golden chain (object or literal),
    or an annotated :class:`Chain`.  The comparison runs over the predicted
    interval, cut at ``n_cap`` and at what the available prefix decides.
    """
    if n_cap is not None:
        K = _levels_for(cf, K, n_cap)
    if isinstance(subject, Chain):
        states = chain_states(cf, subject, K)
        word, chain = _full_prefix(cf, subject.truncate(min(subject.levels, K + 1))), subject.truncate(K)
    else:
        if isinstance(subject, str) and not subject.strip("01"):
            subject = WordStream.literal(subject)
        if isinstance(subject, str):
            subject = parse_golden_chain(subject)
        if isinstance(subject, GoldenChain):
            states = chain_states(cf, subject, K)
            hi0 = predict_lambda(states, cf).hi
            hi0 = hi0 if n_cap is None else min(hi0, n_cap)
            q = _denominators(cf, K)
            word = synthesize_prefix(cf, subject, max(2 * hi0 + 2, 3 * q[K] + 2 * q[K - 1]))
            chain = subject.to_chain(K)
        else:
            states = chain_of(subject, cf, K)[1]
            word, chain = subject, None
    pred = predict_lambda(states, cf)
    hi = pred.hi if n_cap is None else min(pred.hi, n_cap)
    if isinstance(word, WordStream):
        try:
            text = word.prefix(2 * hi + 1)
        except StreamExhausted:
            text = word.prefix(word.cached_length)
    else:
        text = word
    # r(n) = 2n+1 is decided once 2n+1 letters are known
    hi = min(hi, (len(text) - 1) // 2)
    best = np.maximum.accumulate(longest_repeated_suffixes(text[: 2 * hi + 1]))
    lam = [n for n in range(1, hi + 1) if best[2 * n] >= n > best[2 * n - 1]]
    brute = [n for n in lam if n >= pred.lo]
    predicted = [(n, tag) for n, tag, _ in pred.elements if n <= hi]
    bset, pset = set(brute), {n for n, _ in predicted}
    mism = sorted((n, n in bset, n in pset) for n in bset ^ pset)
    chain_ok = True
    levels = _classifiable_levels(cf, len(text), K) if chain is not None else 0
    if levels:
        got = chain_of(text, cf, levels)[0]
        want = chain.truncate(levels)
        chain_ok = got.cases == want.cases and got.t_map == want.t_map and (want.w1 is None or got.w1 == want.w1)
    return LambdaReport(pred.lo, hi, brute, predicted, mism, [n for n in lam if n < pred.lo], chain_ok)


def _levels_for(cf: CFExpansion, K: int, n_cap: int) -> int:
    """Fewest levels whose prediction reaches ``n_cap`` (two extra for lookahead)."""
    k = 1
    while k < K:
        q = _denominators(cf, k)
        if q[k] + q[k - 1] - 1 > n_cap:
            break
        k += 1
    return min(K, k + 2)


def _classifiable_levels(cf: CFExpansion, length: int, K: int) -> int:
    q = _denominators(cf, K + 1)
    k = 0
    while k < K and 3 * q[k + 1] + 2 * q[k] - 2 <= length:
        k += 1
    return k


# -- scans ----------------------------------------------------------------------

GAP_NAMES = ("(mu_2, mu_max)", "(mu_3, mu_2)", "(mu_4, mu_3)")


def _gaps(tol: Fraction) -> list[tuple[str, Fraction, Fraction]]:
    t = mu_table()
    f = {k: v.value.to_decimal_fraction(80) for k, v in t.items()}
    return [
        (GAP_NAMES[0], f["mu_2"] + tol, f["mu_max"] - tol),
        (GAP_NAMES[1], f["mu_3"] + tol, f["mu_2"] - tol),
        (GAP_NAMES[2], f["mu_4"] + tol, f["mu_3"] - tol),
    ]


@dataclass
class RunRecord:
    id: str
    seed: int
    subject: str
    depth: int
    rep_estimate: str
    rep_exact: str | None
    lambda_head: list[int]
    violations: list[str]
    bar: tuple[str, str] | None = None

    def to_json(self) -> str:
        d = asdict(self)
        d.pop("bar")
        d["error_bar"] = list(self.bar) if self.bar else None
        return json.dumps(d, sort_keys=False)

    @classmethod
    def from_json(cls, line: str) -> RunRecord:
        d = json.loads(line)
        bar = d.pop("error_bar", None)
        return cls(**d, bar=tuple(bar) if bar else None)


def estimate_chain(chain: GoldenChain, depth: int, window: float = 0.5) -> tuple[RepEstimate, list[int]]:
    """Depth-``depth`` rep estimate of a golden chain from predicted Lambda."""
    states = chain_states(GOLDEN, chain, depth)
    pred = predict_lambda(states, GOLDEN)
    return rep_estimate(pred.values, window), pred.values


def sample_chains(sampler: str, count: int, depth: int, rng: random.Random) -> list[GoldenChain]:
    """Golden chains from a named sampler.

    ``iid``: fair i.i.d. letters, long enough for ``depth`` levels.
    ``periodic``: ``u (v)`` with i.i.d. letters, ``|u| <= 8``, ``1 <= |v| <= 6``.
    ``mu4``: ``((b2a2)^d ba)`` cycling ``d = 1..6``.
    ``pinned:<literal>``: the same chain ``count`` times.
    """
    out: list[GoldenChain] = []
    for i in range(count):
        if sampler == "iid":
            out.append(random_golden_chain(rng, depth))
        elif sampler == "periodic":
            u = "".join(rng.choice("ab") for _ in range(rng.randint(0, 8)))
            v = "".join(rng.choice("ab") for _ in range(rng.randint(1, 6)))
            out.append(GoldenChain(u, v, rng.random() < 0.5))
        elif sampler == "mu4":
            d = i % 6 + 1
            out.append(GoldenChain("", "bbaa" * d + "ba"))
        elif sampler.startswith("pinned:"):
            out.append(parse_golden_chain(sampler[7:]))
        else:
            raise ValueError(f"unknown sampler {sampler!r}")
    return out


def _scan_one(args) -> RunRecord:
    idx, seed, chain, depth, tol, window = args
    est, lam = estimate_chain(chain, depth, window)
    exact = rep_exact_periodic_golden(chain).decimal(12) if chain.is_periodic else None
    lo, hi = est.bar
    viol = [name for name, g0, g1 in _gaps(tol) if g0 < lo and hi < g1]
    return RunRecord(
        f"{seed}-{idx}", seed, chain.literal(), depth, _dec(est.value), exact, lam[:8], viol, (_dec(lo), _dec(hi))
    )


def _dec(x: Fraction, places: int = 12) -> str:
    from .rep import _decimal

    if x < 0:
        return "-" + _decimal(-x, places)
    return _decimal(x, places)


@dataclass
class ScanResult:
    records: list[RunRecord]
    histogram: dict[str, int]
    violations: list[RunRecord]

    def jsonl(self) -> str:
        return "".join(r.to_json() + "\n" for r in self.records)


def gap_scan(
    count: int = 500,
    depth: int = 40,
    tolerance: Fraction | float = Fraction(1, 500),
    seed: int = 0,
    sampler: str = "iid",
    window: float = 0.5,
    workers: int = 1,
) -> ScanResult:
    """Rep estimates for sampled golden chains and the gap-violation tally.

    A violation is an estimate whose whole error bar lies inside a gap shrunk
    by ``tolerance`` on both sides.
    """
    tol = Fraction(tolerance).limit_denominator(10**12)
    rng = random.Random(seed)
    chains = sample_chains(sampler, count, depth, rng)
    jobs = [(i, seed, c, depth, tol, window) for i, c in enumerate(chains)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            records = list(pool.map(_scan_one, jobs, chunksize=16))
    else:
        records = [_scan_one(j) for j in jobs]
    hist = {name: 0 for name in GAP_NAMES}
    gaps = _gaps(tol)
    for r in records:
        v = Fraction(r.rep_estimate)
        for name, g0, g1 in gaps:
            if g0 < v < g1:
                hist[name] += 1
    return ScanResult(records, hist, [r for r in records if r.violations])


def summary_csv(records: Iterable[RunRecord]) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["subject", "depth", "estimate", "exact", "abs_err"])
    for r in records:
        err = "" if r.rep_exact is None else _dec(abs(Fraction(r.rep_estimate) - Fraction(r.rep_exact)))
        out.writerow([r.subject, r.depth, r.rep_estimate, r.rep_exact or "", err])
    return buf.getvalue()


# -- minimum of the spectrum --------------------------------------------------


@dataclass
class MinSpectrumReport:
    exact: QuadraticNumber
    construction_estimate: Fraction
    construction_peaks: tuple[int, ...]
    sampled_min: Fraction | None
    tolerance: Fraction

    @property
    def construction_error(self) -> Fraction:
        return abs(self.construction_estimate - self.exact.to_decimal_fraction(80))

    @property
    def sampled_ok(self) -> bool:
        return self.sampled_min is None or self.sampled_min >= self.exact.to_decimal_fraction(80) - self.tolerance

    def to_json(self) -> dict:
        return {
            "exact": self.exact.literal(),
            "exact_decimal": self.exact.decimal(6),
            "construction_estimate": _dec(self.construction_estimate, 6),
            "construction_peaks": list(self.construction_peaks),
            "sampled_min": None if self.sampled_min is None else _dec(self.sampled_min, 6),
            "sampled_ok": self.sampled_ok,
        }


def min_spectrum_check(
    cf: CFExpansion, sample_count: int = 20, depth: int = 40, seed: int = 0, tolerance: Fraction = Fraction(1, 200)
) -> MinSpectrumReport:
    """Exact minimum versus the equality construction and random chains of the slope."""
    exact = min_spectrum(cf)
    cons = equality_chain(cf, depth)
    est = rep_estimate(predict_lambda(chain_states(cf, cons.chain), cf).values).value
    rng = random.Random(seed)
    sampled = []
    for _ in range(sample_count):
        ch = random_chain(cf, depth, rng)
        try:
            sampled.append(rep_estimate(predict_lambda(chain_states(cf, ch), cf).values).value)
        except ValueError:
            continue
    return MinSpectrumReport(exact, est, cons.peaks, min(sampled) if sampled else None, tolerance)
