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
Tail-first evaluation of continued radical approximants.

Right radicals have an end but no beginning: the depth-n approximant is
computed from the innermost term outward,

    t_{1,n} = b_n a_n^{e_n},    t_{i,n} = b_k (a_k + t_{i-1,n})^{e_k},  k = n+1-i,

with e_k = 1/r_k (radicals) or p_k (power forms) and b_k = 1 unless weighted.
The row t_{1,n} ... t_{n,n} is the n-th row of the triangular array; its last
entry is the approximant.

Rounding model. With u = 2^(1-P) (one ulp, relative) at working precision P,
every stored term carries relative error <= u, the addition adds u/2, the
power adds u (it is evaluated with guard bits and rounded once), and a weight
multiplication adds 3u/2. A relative error eps of the base becomes |e| eps
after x -> x^e, so the error of row entry i obeys

    eps_i <= |e_k| (eps_{i-1} + 3u/2) + u  (+ 3u/2 if weighted).

The reported rounding bound is 2 eps_n |value|.
"""

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Tuple

import mpmath

from radix.seqspec import RadicalSpec, normalize_to_depth, to_mpf


log = logging.getLogger(__name__)


MIN_PRECISION = 32
DEFAULT_PRECISION = 128
MAX_PRECISION = 1 << 16

# mpf exponents beyond this magnitude are treated as overflow.
MAX_EXPONENT_BITS = 1 << 62


class EvaluationError(Exception):
    pass


class PrecisionError(EvaluationError):
    pass


@dataclass(frozen=True)
class TailTable:
    n: int
    values: Tuple[mpmath.mpf, ...]
    precision_bits: int
    spec_kind: str
    # Relative error bound of each entry.
    errors: Tuple[mpmath.mpf, ...] = ()

    def t(self, i):
        """Entry t_{i,n}, 1 <= i <= n."""
        return self.values[i - 1]

    @property
    def approximant(self):
        return self.values[-1]


@dataclass(frozen=True)
class Approximant:
    n: int
    value: mpmath.mpf
    precision_bits: int
    rounding_bound: mpmath.mpf


def check_precision(precision_bits):
    if not isinstance(precision_bits, int) or precision_bits < MIN_PRECISION:
        raise PrecisionError(
            f"precision must be an integer >= {MIN_PRECISION} bits, "
            f"got {precision_bits!r}"
        )


def ulp(precision_bits):
    return mpmath.ldexp(1, 1 - precision_bits)


def power(x, e):
    """
    x**e for x > 0 and rational e, at the current working precision.

    Unit-numerator exponents are roots: exp(log(x)/r) at extra precision,
    one Newton correction, one final rounding. Integer exponents use mpmath's
    integer power. Everything else goes through exp(e log x).
    """
    e = Fraction(e)
    if e == 0:
        return mpmath.mpf(1)
    if e == 1:
        return +x
    if e.denominator == 1:
        return x ** e.numerator

    mag = mpmath.mag(x)
    if abs(mag) > MAX_EXPONENT_BITS:
        raise EvaluationError(f"exponent of {mpmath.nstr(x, 5)} out of range")
    guard = (
        24
        + abs(int(mag)).bit_length()
        + e.numerator.bit_length()
        + e.denominator.bit_length()
    )
    with mpmath.extraprec(guard):
        if e.numerator == 1:
            r = e.denominator
            y = mpmath.exp(mpmath.log(x) / r)
            y = y - (y ** r - x) / (r * y ** (r - 1))
        else:
            y = mpmath.exp(mpmath.log(x) * e.numerator / e.denominator)
    return +y


def scaled_power(coef, x, e):
    """coef * x**e with an exact rational coefficient."""
    return to_mpf(Fraction(coef)) * power(x, e)


def _at_depth(spec, n, lookahead=0):
    """(normalized spec, normalized depth) for depth n of either spec type."""
    if not isinstance(n, int) or n < 1:
        raise EvaluationError(f"depth must be an integer >= 1, got {n!r}")
    if isinstance(spec, RadicalSpec):
        return normalize_to_depth(spec, n, lookahead)
    return spec, n


def tail_table(spec, n, precision_bits=DEFAULT_PRECISION):
    """
    Row n of the triangular array {t_{i,n}} at `precision_bits` bits.

    A RadicalSpec is normalized first and n is read as an original depth; the
    returned row is the normalized one evaluating it.
    """
    check_precision(precision_bits)
    spec, n = _at_depth(spec, n)
    if n < 1:
        raise EvaluationError("all radicands up to the requested depth vanish")
    if n > spec.horizon:
        raise EvaluationError(f"depth {n} exceeds the spec horizon {spec.horizon}")

    weighted = spec.kind == "weighted"
    values, errors = [], []
    with mpmath.workprec(precision_bits):
        u = ulp(precision_bits)
        t_prev, eps_prev = None, mpmath.mpf(0)
        for i in range(1, n + 1):
            k = n + 1 - i
            ak = spec.radicand(k)
            e = spec.exponent(k)
            eps_a = u if isinstance(ak, Fraction) else max(u, ulp(spec.term_bits))

            if t_prev is None:
                x = to_mpf(ak)
                eps_x = eps_a
            else:
                x = to_mpf(ak) + t_prev
                eps_x = max(eps_a, eps_prev) + u / 2
            if x <= 0:
                raise EvaluationError(
                    f"non-positive radicand {mpmath.nstr(x, 8)} at level {k} "
                    f"(row {n})"
                )

            t = power(x, e)
            eps = abs(e) * eps_x + (0 if e == 1 else u)
            if weighted:
                t = to_mpf(spec.weight(k)) * t
                eps += 3 * u / 2

            values.append(t)
            errors.append(eps)
            t_prev, eps_prev = t, eps

    return TailTable(
        n=n,
        values=tuple(values),
        precision_bits=precision_bits,
        spec_kind=spec.kind,
        errors=tuple(errors),
    )


def _approximant_from_table(table):
    value = table.approximant
    with mpmath.workprec(table.precision_bits):
        bound = 2 * table.errors[-1] * abs(value)
    return Approximant(
        n=table.n,
        value=value,
        precision_bits=table.precision_bits,
        rounding_bound=bound,
    )


def approximant(spec, n, precision_bits=DEFAULT_PRECISION):
    """
    Depth-n approximant (v_n, w_n or t_n) with a rounding bound. For a
    RadicalSpec n is the original depth; it is 0 when a_1 .. a_n all vanish.
    """
    check_precision(precision_bits)
    norm, m = _at_depth(spec, n)
    if m == 0:
        return Approximant(
            n=n,
            value=mpmath.mpf(0),
            precision_bits=precision_bits,
            rounding_bound=mpmath.mpf(0),
        )
    return replace(_approximant_from_table(tail_table(norm, m, precision_bits)), n=n)


def power_form_approximant(spec, n, precision_bits=DEFAULT_PRECISION):
    """Depth-n approximant t_n of a continued power form."""
    norm, m = _at_depth(spec, n)
    if norm.kind != "power":
        raise EvaluationError(f"expected a power-form spec, got kind {norm.kind}")
    for i in range(1, min(m, norm.horizon) + 1):
        if norm.exponent(i) <= 0:
            raise EvaluationError(f"exponent p_{i} must be positive")
    return approximant(spec, n, precision_bits)


@dataclass(frozen=True)
class LimitEstimate:
    value: mpmath.mpf
    # Original depth of the reported approximant.
    n_used: int
    certified: bool
    tail_bound: object
    precision_bits: int
    rounding_bound: mpmath.mpf


def limit_estimate(
    spec,
    tol,
    n_max=200,
    precision_bits=DEFAULT_PRECISION,
    strategy="geometric_majorization",
    budget=8,
    method=None,
    n_start=4,
):
    """
    Increase the depth until a tail bound certifies |v - v_n| <= tol, or
    n_max is reached. Non-certification is reported, not raised: this covers
    depths whose terms leave the mpf exponent range, in which case the last
    depth that evaluated is reported.
    """
    # bounds depends on this module.
    from radix import bounds

    check_precision(precision_bits)
    if tol <= 0:
        raise EvaluationError(f"tolerance must be positive, got {tol}")

    if isinstance(spec, RadicalSpec):
        spec, n_max = normalize_to_depth(spec, n_max, lookahead=budget + 1)
    n_max = min(n_max, spec.horizon - budget - 1)
    if n_max < 1:
        raise EvaluationError(
            f"spec horizon {spec.horizon} too short for a tail window of {budget}"
        )

    bits = precision_bits
    tol = mpmath.mpf(tol)
    n = min(n_start, n_max)
    tb = None
    while True:
        try:
            candidate = bounds.tail_bound(
                spec, n, strategy, bits, budget=budget, method=method
            )
        except EvaluationError as exc:
            if tb is None:
                raise
            log.warning(
                "limit_estimate: tail window from n=%s does not evaluate (%s); "
                "stop at n=%s",
                n,
                exc,
                tb.from_n,
            )
            n = tb.from_n
            break
        tb = candidate
        if tb.certified and tb.value <= tol:
            break
        if n >= n_max:
            log.warning(
                "limit_estimate: no certified tail bound below %s up to n=%s",
                mpmath.nstr(tol, 5),
                n,
            )
            break
        n = min(n_max, n + max(1, n // 2))

    approx = approximant(spec, n, bits)
    while approx.rounding_bound > tol / 10 and bits < MAX_PRECISION:
        bits *= 2
        log.info("limit_estimate: raise precision to %s bits", bits)
        approx = approximant(spec, n, bits)

    n_used = spec.original_depth(n)
    return LimitEstimate(
        value=approx.value,
        n_used=n_used,
        certified=bool(tb.certified and tb.value <= tol),
        tail_bound=replace(tb, from_n=n_used),
        precision_bits=bits,
        rounding_bound=approx.rounding_bound,
    )
