"""``sturmian-lab`` command line.

Exit codes: 0 success, 2 usage error, 3 domain error (non-Sturmian subject,
invalid chain, insufficient data), 4 verification mismatch.

Defaults may come from a ``key=value`` file (``--config`` or
``$STURMIAN_LAB_CONFIG``); ``$STURMIAN_LAB_OUTDIR`` sets the default output
directory for files.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import click

from .cf import CFExpansion, NotIrrational, SourceExhausted, UnsupportedSource, cf_value, min_spectrum, parse_cf
from .chains import (
    ChainError,
    ConsistencyError,
    GoldenChain,
    NeedsMoreLevels,
    NotSturmianError,
    chain_of,
    chain_states,
    parse_chain,
    predict_lambda,
    rep_exact_periodic_golden,
    synthesize_prefix,
)
from .lab import gap_scan, irrationality_exponent, min_spectrum_check, mu_table, summary_csv, verify_lambda
from .quadratic import FieldMismatch, QuadraticNumber, parse_quadratic
from .rep import InsufficientData, InsufficientPrefix, profile_csv, r_profile, rep_estimate, sawtooth_csv
from .words import StreamExhausted, WordStream, subword_complexity

OUTDIR_ENV = "STURMIAN_LAB_OUTDIR"
CONFIG_ENV = "STURMIAN_LAB_CONFIG"
STREAM_THRESHOLD = 10**6

DOMAIN_ERRORS = (
    ChainError,
    NotSturmianError,
    ConsistencyError,
    NeedsMoreLevels,
    NotIrrational,
    UnsupportedSource,
    SourceExhausted,
    InsufficientPrefix,
    InsufficientData,
    StreamExhausted,
    FieldMismatch,
)


class Mismatch(click.ClickException):
    exit_code = 4


class DomainError(click.ClickException):
    exit_code = 3


# -- shared options --------------------------------------------------------

FORMAT = click.option("--format", "fmt", type=click.Choice(["json", "csv", "plain"]), default="plain", show_default=True)
OUT = click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Write to a file instead of stdout.")


def _slope(text: str) -> CFExpansion:
    try:
        return parse_cf(text)
    except (ValueError, FieldMismatch) as exc:
        raise click.BadParameter(str(exc), param_hint="--slope") from None


def _quad(text: str, hint: str) -> QuadraticNumber:
    try:
        if text.startswith("quad:"):
            return parse_quadratic(text)
        return QuadraticNumber.coerce(Fraction(text))
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint=hint) from None


def _chain(text: str):
    try:
        return parse_chain(text)
    except (ValueError, KeyError) as exc:
        raise click.BadParameter(str(exc), param_hint="--chain") from None


def subject_options(f):
    f = click.option("--word", default=None, help="Literal binary word.")(f)
    f = click.option("--chain", "chain_text", default=None, help="Chain literal, e.g. '(ab)' or JSON for general slopes.")(f)
    f = click.option("--variant", type=click.Choice(["floor", "ceil"]), default="floor", show_default=True)(f)
    f = click.option("--rho", default=None, help="Intercept (fraction or quad:(a,b,c,D)); selects the mechanical word.")(f)
    f = click.option("--slope", default="[0;(1)]", show_default=True, help="CF literal or quad:(a,b,c,D).")(f)
    return f


def _subject(slope: str, rho, variant, chain_text, word, *, levels: int | None = None):
    """(cf, stream or None, chain or None); exactly one of word/chain/rho, else characteristic."""
    given = [x for x in (rho, chain_text, word) if x is not None]
    if len(given) > 1:
        raise click.UsageError("give at most one of --rho, --chain, --word")
    cf = _slope(slope)
    if word is not None:
        if word.strip("01") or not word:
            raise click.BadParameter("words are over {0, 1}", param_hint="--word")
        return cf, WordStream.literal(word), None
    if chain_text is not None:
        return cf, None, _chain(chain_text)
    if rho is not None:
        theta = cf_value(cf)
        return cf, WordStream.mechanical(theta, _quad(rho, "--rho"), variant), None
    return cf, WordStream.characteristic(cf), None


def _chain_stream(cf: CFExpansion, chain, L: int) -> WordStream:
    text = synthesize_prefix(cf, chain, L)
    desc = {"kind": "chain", "slope": cf.literal(), "chain": str(chain) if isinstance(chain, GoldenChain) else chain.to_json()}
    return WordStream(lambda n: text, desc)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        click.echo(text, nl=not text.endswith("\n"))
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)


def _outdir(value: str | None) -> Path:
    return Path(value or os.environ.get(OUTDIR_ENV) or ".")


def _rows_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _exact(x) -> dict:
    if isinstance(x, QuadraticNumber):
        return {"exact": x.literal(), "decimal": x.decimal(6)}
    return {"exact": str(x), "decimal": f"{float(x):.6f}"}


# -- config ----------------------------------------------------------------


def _load_config(path: str | None) -> dict[str, str]:
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    parser = configparser.ConfigParser()
    parser.optionxform = str
    try:
        parser.read_string("[defaults]\n" + Path(path).read_text())
    except (OSError, configparser.Error) as exc:
        raise click.UsageError(f"cannot read config {path}: {exc}") from None
    return dict(parser["defaults"])


class LabGroup(click.Group):
    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except DOMAIN_ERRORS as exc:
            raise DomainError(str(exc)) from None


@click.group(cls=LabGroup)
@click.option("--config", "config_path", default=None, help="key=value file overriding option defaults.")
@click.version_option(package_name="artifact")
@click.pass_context
def main(ctx: click.Context, config_path: str | None) -> None:
    """Repetition exponents of Sturmian words."""
    values = _load_config(config_path)
    if values:
        dm = {}
        for name, cmd in main.commands.items():
            names = {p.name for p in cmd.params}
            # config keys use the option spelling, e.g. "format" or "tolerance"
            sub = {("fmt" if k == "format" else k.replace("-", "_")): v for k, v in values.items()}
            dm[name] = {k: v for k, v in sub.items() if k in names}
        ctx.default_map = dm


# -- commands --------------------------------------------------------------


@main.command()
@subject_options
@click.option("--length", "-L", type=click.IntRange(min=1), default=100, show_default=True)
@FORMAT
@OUT
@click.option("--outdir", default=None, help="Directory for prefixes longer than 10^6 letters.")
def generate(slope, rho, variant, chain_text, word, length, fmt, out, outdir):
    """Prefix of a Sturmian word."""
    cf, stream, chain = _subject(slope, rho, variant, chain_text, word)
    if chain is not None:
        stream = _chain_stream(cf, chain, length)
    text = stream.prefix(length)
    if out is None and length > STREAM_THRESHOLD:
        digest = hashlib.sha256(json.dumps(stream.descriptor, sort_keys=True).encode()).hexdigest()[:12]
        out = _outdir(outdir) / f"prefix-{digest}-{length}.txt"
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        click.echo(str(out))
        return
    if fmt == "json":
        payload = json.dumps({"source": stream.descriptor, "length": length, "prefix": text})
    elif fmt == "csv":
        payload = _rows_csv(["length", "prefix"], [[length, text]])
    else:
        payload = text
    _emit(payload, out)


@main.command()
@subject_options
@click.option("--max-n", type=click.IntRange(min=1), default=20, show_default=True)
@click.option("--length", "-L", type=click.IntRange(min=1), default=None, help="Prefix length (default 20*max-n).")
@FORMAT
@OUT
def complexity(slope, rho, variant, chain_text, word, max_n, length, fmt, out):
    """Subword complexity p(n) of a prefix."""
    cf, stream, chain = _subject(slope, rho, variant, chain_text, word)
    L = length or 20 * max_n
    if chain is not None:
        stream = _chain_stream(cf, chain, L)
    try:
        text = stream.prefix(L)
    except StreamExhausted:
        text = stream.prefix(stream.cached_length)
    rows = [(n, subword_complexity(text, n)) for n in range(1, min(max_n, len(text)) + 1)]
    if fmt == "json":
        payload = json.dumps({"prefix_length": len(text), "p": {str(n): c for n, c in rows}, "sturmian": all(c == n + 1 for n, c in rows)})
    elif fmt == "csv":
        payload = _rows_csv(["n", "p(n)"], rows)
    else:
        payload = "\n".join(f"{n}\t{c}" for n, c in rows)
    _emit(payload, out)


@main.command()
@subject_options
@click.option("--n", "N", type=click.IntRange(min=1), default=10_000, show_default=True, help="Profile bound for word subjects.")
@click.option("--depth", type=click.IntRange(min=2), default=40, show_default=True, help="Chain levels for chain subjects.")
@click.option("--window", type=click.FloatRange(0, 1, max_open=True), default=0.5, show_default=True)
@click.option("--profile", is_flag=True, help="Emit the r(n) profile (CSV) instead of the estimate.")
@click.option("--plot-data", is_flag=True, help="Emit (n, r(n)/n) sawtooth plot data (CSV).")
@FORMAT
@OUT
def rep(slope, rho, variant, chain_text, word, N, depth, window, profile, plot_data, fmt, out):
    """Rep estimate from Lambda (brute force for words, predicted for chains)."""
    cf, stream, chain = _subject(slope, rho, variant, chain_text, word)
    profile = profile or plot_data
    if chain is not None and not profile:
        lam = predict_lambda(chain_states(cf, chain, depth), cf).values
        source = {"chain": str(chain) if isinstance(chain, GoldenChain) else chain.to_json(), "depth": depth}
    else:
        if chain is not None:
            stream = _chain_stream(cf, chain, 64 * N)
        prof = r_profile(stream, N)
        if profile:
            _emit(sawtooth_csv(prof) if plot_data else profile_csv(prof), out)
            return
        lam = list(prof.lambda_)
        source = {"source": stream.descriptor, "N": N}
    est = rep_estimate(lam, window)
    lo, hi = est.bar
    data = {
        **source,
        "estimate": est.decimal(6),
        "estimate_exact": str(est.value),
        "error_bar": [f"{float(lo):.6f}", f"{float(hi):.6f}"],
        "lambda_size": len(lam),
    }
    if isinstance(chain, GoldenChain) and chain.is_periodic:
        data["exact"] = rep_exact_periodic_golden(chain).literal()
    if fmt == "json":
        payload = json.dumps(data)
    elif fmt == "csv":
        payload = _rows_csv(["estimate", "bar_lo", "bar_hi", "lambda_size"], [[data["estimate"], *data["error_bar"], len(lam)]])
    else:
        payload = f"rep ~ {data['estimate']}  (bar {data['error_bar'][0]} .. {data['error_bar'][1]})"
    _emit(payload, out)


@main.command("lambda")
@subject_options
@click.option("--levels", "-K", type=click.IntRange(min=1), default=12, show_default=True)
@click.option("--n-cap", type=click.IntRange(min=1), default=None)
@click.option("--diff", is_flag=True, help="Only report the brute/predicted difference.")
@FORMAT
@OUT
def lambda_(slope, rho, variant, chain_text, word, levels, n_cap, diff, fmt, out):
    """Lambda by brute force versus prediction from the locating chain."""
    cf, stream, chain = _subject(slope, rho, variant, chain_text, word)
    report = verify_lambda(chain if chain is not None else stream, cf, levels, n_cap)
    if fmt == "json":
        payload = json.dumps(report.to_json())
    elif fmt == "csv":
        rows = sorted({n for n in report.brute} | {n for n, _ in report.predicted})
        tags = dict(report.predicted)
        bset = set(report.brute)
        payload = _rows_csv(["n", "brute", "predicted", "tag"], [[n, int(n in bset), int(n in tags), tags.get(n, "")] for n in rows])
    else:
        lines = [f"{len(report.mismatches)} mismatches on [{report.lo}, {report.hi}]"]
        if not diff:
            lines.append("brute:     " + " ".join(map(str, report.brute)))
            lines.append("predicted: " + " ".join(f"{n}:{t}" for n, t in report.predicted))
        for n, b, p in report.mismatches:
            lines.append(f"  n={n} brute={int(b)} predicted={int(p)}")
        if report.boundary:
            lines.append("below interval (unverified): " + " ".join(map(str, report.boundary)))
        payload = "\n".join(lines)
    _emit(payload, out)
    if not report.ok:
        raise Mismatch(f"{len(report.mismatches)} Lambda mismatches" + ("" if report.chain_ok else "; chain round trip failed"))


@main.command("chain")
@subject_options
@click.option("--levels", "-K", type=click.IntRange(min=1), default=10, show_default=True)
@FORMAT
@OUT
def chain_cmd(slope, rho, variant, chain_text, word, levels, fmt, out):
    """Locating chain of a word (levels 1..K)."""
    cf, stream, chain = _subject(slope, rho, variant, chain_text, word)
    if chain is not None:
        raise click.UsageError("chain classifies a word; give --word, --rho or nothing")
    found, states = chain_of(stream, cf, levels)
    try:
        golden = found.golden_letters()
    except ChainError:
        golden = None
    if fmt == "json":
        payload = json.dumps({**found.to_json(), "golden": golden, "w_len": [s.w_len for s in states]})
    elif fmt == "csv":
        payload = _rows_csv(["k", "case", "w_len", "t"], [[s.k, s.case, s.w_len, "" if s.t is None else s.t] for s in states])
    else:
        payload = golden if golden is not None else " ".join(
            s.case + (f"[t={s.t}]" if s.t is not None else "") for s in states
        )
    _emit(payload, out)


@main.command()
@click.option("--slope", default="[0;(1)]", show_default=True)
@click.option("--chain", "chain_text", required=True)
@click.option("--length", "-L", type=click.IntRange(min=1), default=100, show_default=True)
@FORMAT
@OUT
def synth(slope, chain_text, length, fmt, out):
    """Word prefix realizing a locating chain."""
    cf, chain = _slope(slope), _chain(chain_text)
    text = synthesize_prefix(cf, chain, length)
    if fmt == "json":
        payload = json.dumps({"slope": cf.literal(), "chain": chain_text, "length": length, "prefix": text})
    elif fmt == "csv":
        payload = _rows_csv(["length", "prefix"], [[length, text]])
    else:
        payload = text
    _emit(payload, out)


@main.command()
@click.option("--chain", "chain_text", required=True, help="Periodic golden chain, e.g. '(b2a2)'.")
@FORMAT
@OUT
def repx(chain_text, fmt, out):
    """Exact rep of an eventually periodic golden chain."""
    chain = _chain(chain_text)
    if not isinstance(chain, GoldenChain) or not chain.is_periodic:
        raise DomainError("repx needs an eventually periodic golden chain")
    value = rep_exact_periodic_golden(chain)
    expo = irrationality_exponent(value)
    data = {"chain": chain.literal(), "rep": _exact(value), "irrationality_exponent": _exact(expo)}
    if fmt == "json":
        payload = json.dumps(data)
    elif fmt == "csv":
        payload = _rows_csv(["chain", "exact", "decimal"], [[chain.literal(), value.literal(), value.decimal(6)]])
    else:
        payload = f"{chain.literal()}  rep = {value} = {value.decimal(6)}"
    _emit(payload, out)


@main.command()
@FORMAT
@OUT
def mu(fmt, out):
    """The seven distinguished constants."""
    table = mu_table()
    if fmt == "json":
        payload = json.dumps({k: {"exact": e.value.literal(), "decimal": e.decimal, "family": e.family} for k, e in table.items()})
    elif fmt == "csv":
        payload = _rows_csv(["name", "exact", "decimal", "family"], [[k, e.value.literal(), e.decimal, e.family] for k, e in table.items()])
    else:
        payload = "\n".join(f"{k:7s} {e.decimal}  {e.value}   [{e.family}]" for k, e in table.items())
    _emit(payload, out)


@main.command()
@click.option("--slope", default="[0;(1)]", show_default=True)
@click.option("--depth", type=click.IntRange(min=2), default=40, show_default=True)
@click.option("--samples", type=click.IntRange(min=0), default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@FORMAT
@OUT
def minspec(slope, depth, samples, seed, fmt, out):
    """Minimum of the repetition spectrum of a slope."""
    cf = _slope(slope)
    if not cf.is_periodic:
        value = min_spectrum(cf)
        data = {"estimate": value.decimal(6), "window": list(value.window), "argmin": value.argmin}
    else:
        data = min_spectrum_check(cf, samples, depth, seed).to_json()
    if fmt == "json":
        payload = json.dumps(data)
    elif fmt == "csv":
        payload = _rows_csv(list(data), [[json.dumps(v) if isinstance(v, list) else v for v in data.values()]])
    else:
        payload = "\n".join(f"{k}: {v}" for k, v in data.items())
    _emit(payload, out)


@main.command()
@click.option("--count", type=click.IntRange(min=1), default=500, show_default=True)
@click.option("--depth", type=click.IntRange(min=4), default=40, show_default=True)
@click.option("--tolerance", default="0.002", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--sampler", default="iid", show_default=True, help="iid, periodic, mu4 or pinned:<chain>.")
@click.option("--window", type=click.FloatRange(0, 1, max_open=True), default=0.5, show_default=True)
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--outdir", default=None, help="Where runs.jsonl and summary.csv go.")
@FORMAT
def scan(count, depth, tolerance, seed, sampler, window, workers, outdir, fmt):
    """Sample golden chains and tally rep estimates inside the three gaps."""
    try:
        tol = Fraction(tolerance)
    except ValueError:
        raise click.BadParameter("not a number", param_hint="--tolerance") from None
    if sampler not in ("iid", "periodic", "mu4") and not sampler.startswith("pinned:"):
        raise click.BadParameter(f"unknown sampler {sampler!r}", param_hint="--sampler")
    result = gap_scan(count, depth, tol, seed, sampler, window, workers)
    d = _outdir(outdir)
    d.mkdir(parents=True, exist_ok=True)
    (d / "runs.jsonl").write_text(result.jsonl())
    (d / "summary.csv").write_text(summary_csv(result.records))
    data = {"count": count, "seed": seed, "sampler": sampler, "histogram": result.histogram, "violations": len(result.violations)}
    if fmt == "json":
        payload = json.dumps(data)
    elif fmt == "csv":
        payload = _rows_csv(["gap", "estimates_inside"], list(result.histogram.items()))
    else:
        payload = "\n".join([f"{k}: {v}" for k, v in result.histogram.items()] + [f"violations: {len(result.violations)}"])
    _emit(payload, None)
    if result.violations:
        raise Mismatch(f"{len(result.violations)} error bars inside a gap")


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
