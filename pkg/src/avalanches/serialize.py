"""JSON and CSV renderings of the shared value types.

All JSON is emitted with sorted keys and a trailing newline so identical
inputs give byte-identical files; big integers travel as decimal strings,
exact probabilities as "num/den".  CSV uses LF line endings and always
carries a header row.
"""

from __future__ import annotations

import decimal
import json
import re
from fractions import Fraction

from .combinatorics import TreeCensus
from .distributions import Pmf
from .errors import DomainError
from .sampling import SimResult
from .stats import GofReport

DEFAULT_SIG_DIGITS = 17

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def rational_str(x: Fraction) -> str:
    """Render a Fraction as 'num/den', denominator always present."""
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse 'num/den' or a bare integer; decimals are rejected on purpose
    (a decimal literal would silently stop being exact)."""
    text = text.strip()
    if not _RATIONAL_RE.match(text):
        raise DomainError(f"expected an exact rational like 3/40, got {text!r}")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise DomainError(f"zero denominator in {text!r}")


def decimal_str(x, sig_digits: int = DEFAULT_SIG_DIGITS) -> str:
    """Decimal rendering of an exact rational or float at the given precision."""
    if sig_digits < 1:
        raise DomainError(f"precision must be >= 1, got {sig_digits}")
    if isinstance(x, Fraction):
        with decimal.localcontext() as ctx:
            ctx.prec = sig_digits
            d = decimal.Decimal(x.numerator) / decimal.Decimal(x.denominator)
        return str(d)
    return repr(float(x))


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def csv_lines(header: str, rows, comments: list[str] | None = None) -> str:
    lines = [header]
    lines.extend(rows)
    lines.extend(comments or [])
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- pmf

def pmf_to_json_dict(pmf: Pmf) -> dict:
    out = {
        "label": pmf.label,
        "exact": pmf.exact,
        "support": list(pmf.support),
        "probs": [rational_str(p) if pmf.exact else float(p) for p in pmf.probs],
    }
    if pmf.deficit is not None:
        out["deficit"] = pmf.deficit
    return out


def pmf_from_json_dict(d: dict) -> Pmf:
    exact = bool(d["exact"])
    if exact:
        probs = tuple(parse_rational(str(p)) for p in d["probs"])
    else:
        probs = tuple(float(p) for p in d["probs"])
    return Pmf(
        support=tuple(int(a) for a in d["support"]),
        probs=probs,
        exact=exact,
        label=str(d["label"]),
        deficit=float(d["deficit"]) if "deficit" in d else None,
    )


def pmf_to_csv(pmf: Pmf, sig_digits: int = DEFAULT_SIG_DIGITS) -> str:
    rows = [f"{a},{decimal_str(p, sig_digits)}" for a, p in pmf.items()]
    return csv_lines("a,prob", rows)


# ---------------------------------------------------------------- simulation

def simresult_to_json_dict(res: SimResult) -> dict:
    out = {
        "model": res.model,
        "trials": res.trials,
        "seed": res.seed,
        "shards": res.shards,
        "histogram": {str(a): c for a, c in sorted(res.histogram.items())},
    }
    out.update(res.params)
    return out


def simresult_from_json_dict(d: dict) -> SimResult:
    known = {"model", "trials", "seed", "shards", "histogram"}
    return SimResult(
        histogram={int(a): int(c) for a, c in d["histogram"].items()},
        trials=int(d["trials"]),
        seed=int(d["seed"]),
        shards=int(d["shards"]),
        model=str(d["model"]),
        params={k: v for k, v in d.items() if k not in known},
    )


def simresult_to_csv(res: SimResult) -> str:
    rows = [f"{a},{c}" for a, c in sorted(res.histogram.items())]
    return csv_lines("a,count", rows)


# ---------------------------------------------------------------- census

def census_to_json_dict(census: TreeCensus) -> dict:
    ordered = sorted(census.profiles.items(), key=lambda kv: (kv[0].r, kv[0].parts))
    return {
        "n": census.n,
        "total": str(census.total),
        "profiles": [
            {"parts": list(c.parts), "count": str(count)} for c, count in ordered
        ],
    }


def census_to_csv(census: TreeCensus) -> str:
    ordered = sorted(census.profiles.items(), key=lambda kv: (kv[0].r, kv[0].parts))
    rows = [f"{' '.join(map(str, c.parts))},{count}" for c, count in ordered]
    return csv_lines("parts,count", rows)


# ---------------------------------------------------------------- gof

def gof_to_json_dict(report: GofReport) -> dict:
    return {
        "tv": report.tv_distance,
        "chi2": report.chi_square,
        "dof": report.dof,
        "p": report.approx_p_value,
        "trials": report.trials,
    }


def gof_to_csv(report: GofReport) -> str:
    d = gof_to_json_dict(report)
    rows = [f"{k},{d[k]}" for k in ("tv", "chi2", "dof", "p", "trials")]
    return csv_lines("field,value", rows)
