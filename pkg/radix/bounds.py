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
Gap and tail bounds for continued radicals and power forms.

Gap bounds majorize v_{n+1} - v_n. All of them share the shape

    numerator(n) / prod_{i<=n} q_i Z_i^(q_i - 1)

with q_i = 1/e_i (r_i for radicals, 1/p_i for power forms) and Z_i a lower
estimate of f_{i-1} at the approximant: the tail entry itself for the
general forms, a_i^{e_i} (times b_i) for the Polya-Szego forms. The identity
replaces each factor by the exact sum sum_j X_i^j Y_i^(q_i-1-j).

Tail bounds add a window of gap bounds and majorize the remainder
geometrically, certified only when the observed ratio stays below one.
"""

import functools
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Tuple

import mpmath

from radix.denest import denest_from_tail
from radix.evalcore import (
    DEFAULT_PRECISION,
    check_precision,
    power,
    tail_table,
    ulp,
)
from radix.seqspec import RadicalSpec, normalize_to_depth, to_mpf


log = logging.getLogger(__name__)


METHODS = (
    "identity",
    "herschfeld_general",
    "polya_szego",
    "weighted_general",
    "weighted_ps",
    "power_form",
    "power_form_ps",
)

STRATEGIES = ("geometric_majorization", "series_S", "summed_partial")

# Above this root index the identity sums switch from Horner to a closed form.
HORNER_MAX_ROOT = 4096


class BoundsError(Exception):
    pass


@dataclass(frozen=True)
class GapBound:
    n: int
    value: mpmath.mpf
    method: str
    inputs_precision_bits: int
    notes: Tuple[str, ...] = ()
    # Set when the bound was evaluated in exact rational arithmetic.
    exact: Optional[Fraction] = None
    rounding: mpmath.mpf = field(default_factory=lambda: mpmath.mpf(0))

    @property
    def advisory(self):
        return "advisory" in self.notes


@dataclass(frozen=True)
class TailBound:
    from_n: int
    value: mpmath.mpf
    strategy: str
    certified: bool
    ratio_witness: Optional[mpmath.mpf] = None
    method: Optional[str] = None
    terms: Tuple[mpmath.mpf, ...] = ()


class _Rows:
    """Tail tables of one spec at one precision, computed on demand."""

    def __init__(self, spec, precision_bits):
        self.spec = spec
        self.precision_bits = precision_bits
        self._tables = {}

    def __getitem__(self, n):
        if n not in self._tables:
            self._tables[n] = tail_table(self.spec, n, self.precision_bits)
        return self._tables[n]


def _prepare(spec, n, precision_bits):
    check_precision(precision_bits)
    if not isinstance(n, int) or n < 1:
        raise BoundsError(f"depth must be an integer >= 1, got {n!r}")
    if n + 1 > spec.horizon:
        raise BoundsError(
            f"gap at depth {n} needs term {n + 1}; spec horizon is {spec.horizon}"
        )
    return spec


def _normalized_depth(spec, n, lookahead):
    """Normalize a RadicalSpec for original depth n; returns (spec, depth)."""
    if not isinstance(n, int) or n < 1:
        raise BoundsError(f"depth must be an integer >= 1, got {n!r}")
    norm, m = normalize_to_depth(spec, n, lookahead)
    if m == 0:
        raise BoundsError(f"a_1 .. a_{n} all vanish; nothing to bound at depth {n}")
    return norm, m


def _original_depths(gap_fn):
    """
    Let a gap function take a RadicalSpec, n being an original depth. The
    bound is evaluated at the normalized depth of v_n. When a_{n+1} = 0,
    v_{n+1} = v_n and the gap is exactly 0.
    """

    @functools.wraps(gap_fn)
    def wrapper(spec, n, precision_bits=DEFAULT_PRECISION):
        if not isinstance(spec, RadicalSpec):
            return gap_fn(spec, n, precision_bits)
        check_precision(precision_bits)
        norm, m = _normalized_depth(spec, n, 1)
        gap = gap_fn(norm, m, precision_bits)
        if norm.depth_for(n + 1) == m:
            return replace(
                gap,
                n=n,
                value=mpmath.mpf(0),
                exact=Fraction(0),
                rounding=mpmath.mpf(0),
                notes=gap.notes + ("zero_next_radicand",),
            )
        return replace(gap, n=n)

    return wrapper


def _require(spec, kinds, method):
    if spec.kind not in kinds:
        raise BoundsError(
            f"method {method} applies to {'/'.join(kinds)} specs, got {spec.kind}"
        )


def _term_eps(spec, x, u):
    return u if isinstance(x, Fraction) else max(u, ulp(spec.term_bits))


def _exact_root(q, k):
    """k-th root of a non-negative integer if it is one, else None."""
    if q < 2:
        return q
    with mpmath.workprec(q.bit_length() // k + 32):
        guess = int(mpmath.nint(mpmath.root(q, k)))
    for c in (guess - 1, guess, guess + 1):
        if c >= 0 and c ** k == q:
            return c
    return None


def _exact_power(x, e):
    """x**e as a Fraction when it is rational and cheap to see, else None."""
    if not isinstance(x, Fraction):
        return None
    if e.denominator == 1:
        if x == 0 and e < 0:
            return None
        return x ** e.numerator
    if x == 1:
        return Fraction(1)
    if x <= 0:
        return None
    num = _exact_root(x.numerator, e.denominator)
    den = _exact_root(x.denominator, e.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den) ** e.numerator


def _numerator(spec, n, weights):
    """(b_{n+1}) a_{n+1}^{e_{n+1}} (prod b_i^{w_i}), weights w_i per level."""
    a = spec.radicand(n + 1)
    value = power(to_mpf(a), spec.exponent(n + 1))
    if spec.kind == "weighted":
        value = to_mpf(spec.weight(n + 1)) * value
        for i in range(1, n + 1):
            value = value * to_mpf(spec.weight(i) ** weights(i))
    return value


def _finish(spec, n, method, precision_bits, numerator, denominator, rel, notes=()):
    with mpmath.workprec(precision_bits):
        value = numerator / denominator
        u = ulp(precision_bits)
        rounding = abs(value) * (rel + 2 * (n + 2) * u)
    return GapBound(
        n=n,
        value=value,
        method=method,
        inputs_precision_bits=precision_bits,
        notes=tuple(notes),
        rounding=rounding,
    )


def _identity_sum(x, y, r):
    """sum_{j<r} x^j y^(r-1-j) for x >= y > 0."""
    if r <= HORNER_MAX_ROOT:
        h, ym = mpmath.mpf(1), mpmath.mpf(1)
        for _ in range(r - 1):
            ym = ym * y
            h = h * x + ym
        return h
    # y^(r-1) ((x/y)^r - 1) / (x/y - 1)
    with mpmath.extraprec(2 * r.bit_length() + 16):
        q = x / y
        if q == 1:
            return r * y ** (r - 1)
        lq = mpmath.log(q)
        return y ** (r - 1) * mpmath.expm1(r * lq) / mpmath.expm1(lq)


def _gap_identity(spec, n, precision_bits, rows):
    _require(spec, ("plain", "weighted"), "identity")
    lo, hi = rows[n], rows[n + 1]
    notes = []
    with mpmath.workprec(precision_bits):
        u = ulp(precision_bits)
        numerator = _numerator(spec, n, spec.root)
        denominator = mpmath.mpf(1)
        rel = _term_eps(spec, spec.radicand(n + 1), u)
        for i in range(1, n + 1):
            r = spec.root(i)
            x = denest_from_tail(hi, i - 1)
            y = denest_from_tail(lo, i - 1)
            denominator = denominator * _identity_sum(x, y, r)
            rel += (r - 1) * (hi.errors[n - i + 1] + lo.errors[n - i]) + 2 * r * u
        gap = _finish(spec, n, "identity", precision_bits, numerator, denominator, rel)

        direct = hi.approximant - lo.approximant
        budget = 4 * (
            gap.rounding
            + 2 * hi.errors[-1] * abs(hi.approximant)
            + 2 * lo.errors[-1] * abs(lo.approximant)
        )
        if abs(gap.value - direct) > budget:
            log.warning(
                "gap identity at n=%s: residual %s exceeds the rounding budget %s",
                n,
                mpmath.nstr(abs(gap.value - direct), 5),
                mpmath.nstr(budget, 5),
            )
            notes.append("residual_exceeds_rounding_budget")
    if notes:
        return replace(gap, notes=tuple(notes))
    return gap


@_original_depths
def gap_identity(spec, n, precision_bits=DEFAULT_PRECISION):
    """Exact expression for v_{n+1} - v_n (plain or weighted), from tail rows."""
    spec = _prepare(spec, n, precision_bits)
    return _gap_identity(spec, n, precision_bits, _Rows(spec, precision_bits))


def _mean_value_bound(spec, n, precision_bits, rows, method, weighted):
    """numerator / prod q_i Z_i^(q_i-1), Z_i from row n (row n+1 when q_i < 1)."""
    lo = rows[n]
    hi = None
    notes = []
    with mpmath.workprec(precision_bits):
        u = ulp(precision_bits)
        if weighted:
            numerator = _numerator(spec, n, spec.root)
        else:
            numerator = power(to_mpf(spec.radicand(n + 1)), spec.exponent(n + 1))
        rel = _term_eps(spec, spec.radicand(n + 1), u)
        denominator = mpmath.mpf(1)
        for i in range(1, n + 1):
            q = 1 / spec.exponent(i)
            if q < 1:
                if hi is None:
                    hi = rows[n + 1]
                    notes.append("advisory")
                z = denest_from_tail(hi, i - 1)
                eps_z = hi.errors[n - i + 1]
            else:
                z = denest_from_tail(lo, i - 1)
                eps_z = lo.errors[n - i]
            denominator = denominator * (to_mpf(q) * power(z, q - 1))
            rel += abs(q - 1) * eps_z + 2 * u
    return _finish(spec, n, method, precision_bits, numerator, denominator, rel, notes)


def _exact_ps(spec, n, weighted):
    a_next = _exact_power(spec.radicand(n + 1), spec.exponent(n + 1))
    if a_next is None:
        return None
    value = a_next
    if weighted:
        if not isinstance(spec.weight(n + 1), Fraction):
            return None
        value *= spec.weight(n + 1)
    for i in range(1, n + 1):
        e = spec.exponent(i)
        ai = _exact_power(spec.radicand(i), 1 - e)
        if ai is None or ai == 0:
            return None
        factor = (1 / e) * ai
        if weighted:
            b = spec.weight(i)
            if not isinstance(b, Fraction):
                return None
            value *= b
        value /= factor
    return value


def _polya_szego_form(spec, n, precision_bits, method, weighted):
    """numerator / prod q_i a_i^(1 - e_i), the bound with Z_i at its floor."""
    exact = _exact_ps(spec, n, weighted)
    with mpmath.workprec(precision_bits):
        u = ulp(precision_bits)
        if exact is not None:
            value = to_mpf(exact)
            return GapBound(
                n=n,
                value=value,
                method=method,
                inputs_precision_bits=precision_bits,
                exact=exact,
                rounding=abs(value) * u,
            )
        numerator = power(to_mpf(spec.radicand(n + 1)), spec.exponent(n + 1))
        rel = _term_eps(spec, spec.radicand(n + 1), u)
        if weighted:
            numerator = numerator * to_mpf(spec.weight(n + 1))
            for i in range(1, n + 1):
                numerator = numerator * to_mpf(spec.weight(i))
                rel += _term_eps(spec, spec.weight(i), u)
        denominator = mpmath.mpf(1)
        for i in range(1, n + 1):
            e = spec.exponent(i)
            ai = spec.radicand(i)
            denominator = denominator * (to_mpf(1 / e) * power(to_mpf(ai), 1 - e))
            rel += abs(1 - e) * _term_eps(spec, ai, u) + 3 * u
    return _finish(spec, n, method, precision_bits, numerator, denominator, rel)


@_original_depths
def gap_bound_herschfeld_general(spec, n, precision_bits=DEFAULT_PRECISION):
    """a_{n+1}^{1/r_{n+1}} / prod r_i f_{i-1}(v_n)^(r_i-1)."""
    spec = _prepare(spec, n, precision_bits)
    _require(spec, ("plain",), "herschfeld_general")
    rows = _Rows(spec, precision_bits)
    return _mean_value_bound(spec, n, precision_bits, rows, "herschfeld_general", False)


@_original_depths
def gap_bound_polya_szego(spec, n, precision_bits=DEFAULT_PRECISION):
    """a_{n+1}^{1/r_{n+1}} / prod r_i a_i^((r_i-1)/r_i); needs no tail table."""
    spec = _prepare(spec, n, precision_bits)
    _require(spec, ("plain",), "polya_szego")
    return _polya_szego_form(spec, n, precision_bits, "polya_szego", False)


@_original_depths
def gap_bound_weighted(spec, n, precision_bits=DEFAULT_PRECISION):
    spec = _prepare(spec, n, precision_bits)
    _require(spec, ("plain", "weighted"), "weighted_general")
    rows = _Rows(spec, precision_bits)
    return _mean_value_bound(
        spec, n, precision_bits, rows, "weighted_general", spec.kind == "weighted"
    )


@_original_depths
def gap_bound_weighted_ps(spec, n, precision_bits=DEFAULT_PRECISION):
    spec = _prepare(spec, n, precision_bits)
    _require(spec, ("plain", "weighted"), "weighted_ps")
    return _polya_szego_form(
        spec, n, precision_bits, "weighted_ps", spec.kind == "weighted"
    )


@_original_depths
def gap_bound_powerform(spec, n, precision_bits=DEFAULT_PRECISION):
    """
    a_{n+1}^{p_{n+1}} prod p_i Z_i^(1-1/p_i) with Z_i = f_{i-1}(t_n) for
    p_i <= 1 and f_{i-1}(t_{n+1}) for p_i > 1. The latter makes the bound
    depend on the next approximant; it is marked advisory.
    """
    spec = _prepare(spec, n, precision_bits)
    _require(spec, ("power",), "power_form")
    rows = _Rows(spec, precision_bits)
    return _mean_value_bound(spec, n, precision_bits, rows, "power_form", False)


@_original_depths
def gap_bound_powerform_ps(spec, n, precision_bits=DEFAULT_PRECISION):
    """a_{n+1}^{p_{n+1}} prod p_i a_i^(p_i-1), valid when every p_i <= 1."""
    spec = _prepare(spec, n, precision_bits)
    _require(spec, ("power",), "power_form_ps")
    for i in range(1, n + 1):
        if spec.exponent(i) > 1:
            raise BoundsError(f"power_form_ps needs p_i <= 1; p_{i} = {spec.exponent(i)}")
    return _polya_szego_form(spec, n, precision_bits, "power_form_ps", False)


_DISPATCH = {
    "identity": gap_identity,
    "herschfeld_general": gap_bound_herschfeld_general,
    "polya_szego": gap_bound_polya_szego,
    "weighted_general": gap_bound_weighted,
    "weighted_ps": gap_bound_weighted_ps,
    "power_form": gap_bound_powerform,
    "power_form_ps": gap_bound_powerform_ps,
}


def default_method(spec):
    """Strongest inequality (not the identity) applicable to the spec kind."""
    if isinstance(spec, RadicalSpec):
        if spec.kind == "power":
            return "power_form"
        return "herschfeld_general" if spec.b is None else "weighted_general"
    return {
        "plain": "herschfeld_general",
        "weighted": "weighted_general",
        "power": "power_form",
    }[spec.kind]


def gap_bound(spec, n, method=None, precision_bits=DEFAULT_PRECISION):
    method = method or default_method(spec)
    if method not in _DISPATCH:
        raise BoundsError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    return _DISPATCH[method](spec, n, precision_bits)


def _series_method(spec):
    return default_method(spec)


def series_S_terms(spec, n_max, precision_bits=DEFAULT_PRECISION, n_min=1):
    """
    Terms g_n, n_min <= n <= n_max, of the series whose tail sums bound
    v - v_n: the general mean-value gap bounds.

    For a RadicalSpec the terms are those of the normalized radical covering
    original depths n_min .. n_max; each term's `n` is the original depth of
    the approximant it starts from, at least n_min. Zero gaps (a_{n+1} = 0)
    are left out.
    """
    check_precision(precision_bits)
    if isinstance(spec, RadicalSpec):
        norm, _ = normalize_to_depth(spec, n_max, lookahead=1)
        k_min = max(1, norm.depth_for(n_min))
        k_max = norm.depth_for(n_max + 1) - 1
        method = _series_method(norm)
        return [
            replace(
                gap_bound(norm, k, method, precision_bits),
                n=max(n_min, norm.original_depth(k)),
            )
            for k in range(k_min, k_max + 1)
        ]
    _prepare(spec, n_max, precision_bits)
    method = _series_method(spec)
    return [
        gap_bound(spec, n, method, precision_bits) for n in range(n_min, n_max + 1)
    ]


def _check_window(spec, from_n, budget):
    if from_n + budget + 1 > spec.horizon:
        raise BoundsError(
            f"tail window {from_n}..{from_n + budget} needs horizon "
            f"{from_n + budget + 1}; spec horizon is {spec.horizon}"
        )


def _window(spec, from_n, budget, method, precision_bits):
    _check_window(spec, from_n, budget)
    return [
        gap_bound(spec, k, method, precision_bits)
        for k in range(from_n, from_n + budget + 1)
    ]


def _ratio_witness(values):
    s = mpmath.mpf(0)
    for g0, g1 in zip(values, values[1:]):
        if g0 == 0:
            if g1 > 0:
                return mpmath.inf
            continue
        s = max(s, g1 / g0)
    return s


def tail_bound(
    spec,
    from_n,
    strategy="geometric_majorization",
    precision_bits=DEFAULT_PRECISION,
    budget=8,
    method=None,
):
    """
    Upper bound on v - v_{from_n}.

    geometric_majorization adds the gap bounds g_k of `method` over
    k = from_n .. from_n+budget and majorizes the rest by g_last s/(1-s),
    s being the largest successive ratio in the window; it is certified only
    when s < 1. series_S does the same with the window taken from
    `series_S_terms` (the general mean-value terms, whatever `method` says).
    summed_partial is the window sum alone and never certified.

    For a RadicalSpec from_n is an original depth; the window runs over the
    normalized levels that follow it.
    """
    check_precision(precision_bits)
    if strategy not in STRATEGIES:
        raise BoundsError(
            f"unknown strategy {strategy!r}; choose from {', '.join(STRATEGIES)}"
        )
    if not isinstance(from_n, int) or from_n < 1:
        raise BoundsError(f"from_n must be an integer >= 1, got {from_n!r}")
    if not isinstance(budget, int) or budget < 1:
        raise BoundsError(f"budget must be an integer >= 1, got {budget!r}")
    if isinstance(spec, RadicalSpec):
        norm, m = _normalized_depth(spec, from_n, budget + 1)
        tb = tail_bound(norm, m, strategy, precision_bits, budget, method)
        return replace(tb, from_n=from_n)

    if strategy == "series_S":
        method = _series_method(spec)
        _check_window(spec, from_n, budget)
        gaps = series_S_terms(spec, from_n + budget, precision_bits, n_min=from_n)
    else:
        method = method or default_method(spec)
        gaps = _window(spec, from_n, budget, method, precision_bits)
    terms = tuple(g.value for g in gaps)
    with mpmath.workprec(precision_bits):
        partial = mpmath.fsum(terms) + mpmath.fsum(g.rounding for g in gaps)
        if strategy == "summed_partial":
            return TailBound(
                from_n=from_n,
                value=partial,
                strategy=strategy,
                certified=False,
                method=method,
                terms=terms,
            )

        s = _ratio_witness(terms)
        if s >= 1:
            log.debug(
                "tail_bound: no certificate at from_n=%s (ratio %s)",
                from_n,
                mpmath.nstr(s, 5),
            )
            return TailBound(
                from_n=from_n,
                value=mpmath.inf,
                strategy=strategy,
                certified=False,
                ratio_witness=s,
                method=method,
                terms=terms,
            )
        last = terms[-1] + gaps[-1].rounding
        value = partial + last * s / (1 - s)
    return TailBound(
        from_n=from_n,
        value=value,
        strategy=strategy,
        certified=True,
        ratio_witness=s,
        method=method,
        terms=terms,
    )
