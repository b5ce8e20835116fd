# MIT License

# Copyright (c) 2026 The radix authors

# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.

# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.


"""
Finite-horizon convergence diagnostics.

The criteria implemented here are statements about limsups; no finite
computation proves them. Reports therefore carry a verdict that is a
heuristic reading of the first N terms, plus a fixed caveat. Certified
statements come from `radix.bounds.tail_bound`.

Indicators are computed in the log2 domain, exactly when the inputs allow
it, so terms such as 2^(2^n*n) never have to be materialized.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Tuple

import mpmath

from radix import bounds
from radix.evalcore import DEFAULT_PRECISION, check_precision
from radix.seqspec import Kind, RadicalSpec, SequenceError, to_mpf


log = logging.getLogger(__name__)


MIN_HORIZON = 8
DEFAULT_WINDOW_FRACTION = 0.25
DEFAULT_FLATNESS = 1e-3

CAVEAT = (
    "finite-horizon heuristic: limsup criteria cannot be decided from "
    "finitely many terms; use a certified tail bound for proof-grade claims"
)

# Herschfeld's criterion for a_n = exp(exp(alpha n)) puts the threshold at log 2.
ALPHA_CAVEAT = (
    CAVEAT + "; alpha is read against log 2 ~ 0.693 (a_n = e^(e^(alpha n)) "
    "converges for alpha < log 2 and diverges for alpha > log 2), not against "
    "the threshold 'alpha > 2' sometimes quoted for this criterion"
)


class DiagnosticError(Exception):
    pass


class Verdict(str, Enum):
    LOOKS_CONVERGENT = "looks_convergent"
    LOOKS_DIVERGENT = "looks_divergent"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ConvergenceReport:
    horizon: int
    criterion: str
    verdict: Verdict
    herschfeld_indicator: Tuple[mpmath.mpf, ...] = ()
    running_sup: Optional[mpmath.mpf] = None
    running_sup_sequence: Tuple[mpmath.mpf, ...] = ()
    alpha_sequence: Tuple[mpmath.mpf, ...] = ()
    alpha_limsup_estimate: Optional[mpmath.mpf] = None
    ps_series_partial: Tuple[mpmath.mpf, ...] = ()
    exponent_series_partial: Tuple[object, ...] = ()
    series_S_partial: Tuple[mpmath.mpf, ...] = ()
    caveat: str = CAVEAT

    def rows(self):
        """One dict per index n, for tabular rendering."""
        columns = {
            "indicator": self.herschfeld_indicator,
            "running_sup": self.running_sup_sequence,
            "alpha": self.alpha_sequence,
            "ps_series": self.ps_series_partial,
            "exponent_series": self.exponent_series_partial,
            "series_S": self.series_S_partial,
        }
        columns = {k: v for k, v in columns.items() if v}
        return [
            {"n": n, **{k: v[n - 1] for k, v in columns.items()}}
            for n in range(1, self.horizon + 1)
        ]


def _check_args(spec, horizon, window_fraction, flatness, precision_bits):
    if not isinstance(spec, RadicalSpec):
        raise DiagnosticError("diagnostics operate on the original (unnormalized) spec")
    if not isinstance(horizon, int) or horizon < MIN_HORIZON:
        raise DiagnosticError(f"horizon must be an integer >= {MIN_HORIZON}, got {horizon!r}")
    if not 0 < window_fraction < 1:
        raise DiagnosticError(f"window fraction must lie in (0, 1), got {window_fraction}")
    if flatness <= 0:
        raise DiagnosticError(f"flatness threshold must be positive, got {flatness}")
    check_precision(precision_bits)


def _window(horizon, window_fraction):
    return max(2, math.ceil(horizon * window_fraction))


def _lift(x):
    return to_mpf(x) if isinstance(x, Fraction) else x


def _is_ninf(x):
    return not isinstance(x, Fraction) and x == mpmath.ninf


def _add(x, y):
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x + y
    return _lift(x) + _lift(y)


def _mul(x, y):
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x * y
    return _lift(x) * _lift(y)


def log2_term(rule, n):
    """log2 of a non-negative term; -inf for a zero term."""
    try:
        return rule.log2(n)
    except SequenceError:
        if rule.is_rational and rule.term(n) == 0:
            return mpmath.ninf
        raise


def ln_term(rule, n):
    """Natural log of a positive term; -inf for a zero term."""
    try:
        return rule.ln(n)
    except SequenceError:
        if rule.is_rational and rule.term(n) == 0:
            return mpmath.ninf
        raise


def _is_unit(rule, horizon):
    if rule is None:
        return True
    return all(rule.value(n) == 1 for n in range(1, horizon + 1))


def _square_root_case(spec, horizon):
    return spec.kind == Kind.RADICAL and all(
        spec.r.term(n) == 2 for n in range(1, horizon + 1)
    )


def _exponents(spec, horizon):
    """Per-level exponents as Fractions: 1/r_n or p_n."""
    exps = []
    for n in range(1, horizon + 1):
        if spec.kind == Kind.POWER:
            p = spec.p.term(n)
            if not 0 < p <= 1:
                raise DiagnosticError(
                    f"power-form criterion needs p_n in (0, 1]; p_{n} = {p}"
                )
            exps.append(p)
        else:
            r = spec.r.term(n)
            if r.denominator != 1 or r < 1:
                raise DiagnosticError(f"root index r_{n} must be a positive integer")
            exps.append(1 / r)
    return exps


def _folded_log2_radicands(spec, horizon):
    """
    log2 c_n for the folded radicands c_n = a_n B_n, B_n = (B_{n-1} b_n)^{r_n},
    i.e. log2 B_n = r_n (log2 B_{n-1} + log2 b_n).
    """
    weighted = spec.kind == Kind.RADICAL and not _is_unit(spec.b, horizon)
    acc = Fraction(0)
    out = []
    for n in range(1, horizon + 1):
        la = log2_term(spec.a, n)
        if weighted:
            lb = log2_term(spec.b, n)
            if _is_ninf(lb):
                raise DiagnosticError(f"weight b_{n} must be positive")
            acc = _mul(spec.r.term(n), _add(acc, lb))
            out.append(la if _is_ninf(la) else _add(la, acc))
        else:
            out.append(la)
    return out


def _sup_sequence(values):
    out, best = [], mpmath.ninf
    for v in values:
        if v > best:
            best = v
        out.append(best)
    return out


def _relatively_flat(partials, window, flatness):
    last, earlier = _lift(partials[-1]), _lift(partials[-1 - window])
    if last == 0:
        return earlier == 0
    return abs(last - earlier) <= flatness * abs(last)


def herschfeld_diagnostic(
    spec,
    horizon,
    window_fraction=DEFAULT_WINDOW_FRACTION,
    flatness=DEFAULT_FLATNESS,
    precision_bits=DEFAULT_PRECISION,
):
    """
    Indicator a_n^{E_n}, E_n = e_1 ... e_n (2^-n for square roots), on the
    folded radicands of weighted specs. Applies to square-root radicals, to
    integer-root radicals read as power forms with p_n = 1/r_n, and to power
    forms with p_n in (0, 1].
    """
    _check_args(spec, horizon, window_fraction, flatness, precision_bits)
    criterion = "herschfeld" if _square_root_case(spec, horizon) else "power_form"

    with mpmath.workprec(precision_bits):
        exps = _exponents(spec, horizon)
        log2_c = _folded_log2_radicands(spec, horizon)

        e_prod = Fraction(1)
        log2_ind, exp_partial = [], []
        e_sum = Fraction(0)
        for n in range(1, horizon + 1):
            e_prod *= exps[n - 1]
            e_sum += e_prod
            exp_partial.append(e_sum)
            lc = log2_c[n - 1]
            log2_ind.append(lc if _is_ninf(lc) else _mul(lc, e_prod))

        indicator = tuple(
            mpmath.mpf(0) if _is_ninf(v) else mpmath.ldexp(1, v.numerator)
            if isinstance(v, Fraction) and v.denominator == 1
            else mpmath.power(2, _lift(v))
            for v in log2_ind
        )
        sup_log2 = _sup_sequence([_lift(v) for v in log2_ind])

        w = _window(horizon, window_fraction)
        growth = sup_log2[-1] - sup_log2[-1 - w]
        prev_start = max(0, horizon - 1 - 2 * w)
        prev_growth = sup_log2[-1 - w] - sup_log2[prev_start]
        stable = _is_ninf(sup_log2[-1]) or growth <= math.log2(1 + flatness)
        series_flat = _relatively_flat(exp_partial, w, flatness)

        if stable and series_flat:
            verdict = Verdict.LOOKS_CONVERGENT
        elif not stable and growth >= prev_growth:
            verdict = Verdict.LOOKS_DIVERGENT
        else:
            verdict = Verdict.INCONCLUSIVE

        running = tuple(
            mpmath.mpf(0) if _is_ninf(v) else mpmath.power(2, v) for v in sup_log2
        )

    log.info(
        "herschfeld diagnostic (%s) to N=%s: %s", criterion, horizon, verdict.value
    )
    return ConvergenceReport(
        horizon=horizon,
        criterion=criterion,
        verdict=verdict,
        herschfeld_indicator=indicator,
        running_sup=running[-1],
        running_sup_sequence=running,
        exponent_series_partial=tuple(exp_partial),
    )


def polya_szego_diagnostic(
    spec,
    horizon,
    alpha_band=None,
    window_fraction=DEFAULT_WINDOW_FRACTION,
    flatness=DEFAULT_FLATNESS,
    precision_bits=DEFAULT_PRECISION,
):
    """
    alpha_n = log(log a_n) / n, with -inf whenever a_n <= 1, and the partial
    sums of sum 2^-n a_n (a_1 ... a_n)^(-1/2).

    The alpha estimate (largest alpha_n over the last window) is read against
    log 2: below it the square root converges, above it it diverges. Within
    `alpha_band` (default 1/N) of log 2 the verdict defers to the series.
    """
    _check_args(spec, horizon, window_fraction, flatness, precision_bits)
    if not _square_root_case(spec, horizon) or not _is_unit(spec.b, horizon):
        raise DiagnosticError("the alpha criterion applies to plain square-root radicals")
    if alpha_band is None:
        alpha_band = 1 / horizon

    with mpmath.workprec(precision_bits):
        alphas, partials = [], []
        ln_prod = mpmath.mpf(0)
        total = mpmath.mpf(0)
        for n in range(1, horizon + 1):
            la = ln_term(spec.a, n)
            if _is_ninf(la):
                raise DiagnosticError(f"the alpha criterion needs a_n > 0; a_{n} = 0")
            la = _lift(la)
            alphas.append(mpmath.ninf if la <= 0 else mpmath.log(la) / n)
            ln_prod += la
            total += mpmath.exp(-n * mpmath.ln2 + la - ln_prod / 2)
            partials.append(+total)

        w = _window(horizon, window_fraction)
        alpha_est = max(alphas[-w:])
        threshold = mpmath.ln2
        if alpha_est < threshold - alpha_band:
            verdict = Verdict.LOOKS_CONVERGENT
        elif alpha_est > threshold + alpha_band:
            verdict = Verdict.LOOKS_DIVERGENT
        elif _relatively_flat(partials, w, flatness):
            verdict = Verdict.LOOKS_CONVERGENT
        else:
            verdict = Verdict.INCONCLUSIVE

    log.info("alpha diagnostic to N=%s: %s", horizon, verdict.value)
    return ConvergenceReport(
        horizon=horizon,
        criterion="polya_szego",
        verdict=verdict,
        alpha_sequence=tuple(alphas),
        alpha_limsup_estimate=alpha_est,
        ps_series_partial=tuple(partials),
        caveat=ALPHA_CAVEAT,
    )


def series_S_partial(spec, horizon, precision_bits=DEFAULT_PRECISION):
    """
    Partial sums S_1 .. S_N of the mean-value gap-bound series, indexed by
    original depth; a level followed by a zero radicand repeats the sum.
    """
    terms = bounds.series_S_terms(spec, horizon, precision_bits)
    by_depth = {g.n: g.value for g in terms}
    out, total = [], mpmath.mpf(0)
    with mpmath.workprec(precision_bits):
        for n in range(1, horizon + 1):
            total += by_depth.get(n, 0)
            out.append(+total)
    return out


def series_S_diagnostic(
    spec,
    horizon,
    window_fraction=DEFAULT_WINDOW_FRACTION,
    flatness=DEFAULT_FLATNESS,
    precision_bits=DEFAULT_PRECISION,
):
    """
    Sufficient condition only: flat partial sums read as convergent, anything
    else as inconclusive.
    """
    _check_args(spec, horizon, window_fraction, flatness, precision_bits)
    partials = series_S_partial(spec, horizon, precision_bits)
    w = _window(horizon, window_fraction)
    if _relatively_flat(partials, w, flatness):
        verdict = Verdict.LOOKS_CONVERGENT
    else:
        verdict = Verdict.INCONCLUSIVE
    log.info("series diagnostic to N=%s: %s", horizon, verdict.value)
    return ConvergenceReport(
        horizon=horizon,
        criterion="series_S",
        verdict=verdict,
        series_S_partial=tuple(partials),
    )


CRITERIA = {
    "herschfeld": herschfeld_diagnostic,
    "polya_szego": polya_szego_diagnostic,
    "series_S": series_S_diagnostic,
}
