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
Denesting functions.

f_0 is the identity and

    f_k(y) = (f_{k-1}(y) / b_k)^(1/e_k) - a_k

where e_k is the exponent applied at level k (1/r_k for radicals, p_k for
power forms) and b_k = 1 unless the spec is weighted. f_j maps the
approximant of depth n to the tail entry t_{n-j,n}. Bounds read f values
from tail tables (`denest_from_tail`); the forward recursion raises values
to a power and then subtracts, and loses precision quickly with depth.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from radix.evalcore import approximant, check_precision, power, ulp
from radix.seqspec import to_mpf


log = logging.getLogger(__name__)


class DenestError(Exception):
    pass


@dataclass(frozen=True)
class DenestFamily:
    spec: object

    @property
    def kind(self):
        return self.spec.kind

    @property
    def horizon(self):
        return self.spec.horizon


@dataclass(frozen=True)
class DenestValue:
    value: mpmath.mpf
    # First-order relative error bound of `value`.
    relative_error: mpmath.mpf
    warning: bool = False
    lost_bits: float = 0.0


def _domain_floor(fam, k, precision_bits):
    # f_k is strictly increasing on (v_{k-1}, inf), with v_0 = 0.
    if k < 2:
        return mpmath.mpf(0)
    return approximant(fam.spec, k - 1, precision_bits).value


def denest_forward(fam, k, y, precision_bits, y_error=None):
    """Evaluate f_k(y) by direct recursion, tracking cancellation."""
    check_precision(precision_bits)
    if not isinstance(k, int) or k < 0:
        raise DenestError(f"denesting index must be a non-negative integer, got {k!r}")
    if k > fam.horizon:
        raise DenestError(f"denesting index {k} exceeds the spec horizon {fam.horizon}")

    with mpmath.workprec(precision_bits):
        u = ulp(precision_bits)
        y = mpmath.mpf(y)
        eps = u if y_error is None else mpmath.mpf(y_error)
        if k == 0:
            return DenestValue(value=+y, relative_error=eps)

        floor = _domain_floor(fam, k, precision_bits)
        if not y > floor:
            raise DenestError(
                f"f_{k} is only increasing above v_{k - 1} = "
                f"{mpmath.nstr(floor, 10)}; got y = {mpmath.nstr(y, 10)}"
            )

        spec = fam.spec
        weighted = spec.kind == "weighted"
        lost = 0.0
        x = y
        for j in range(1, k + 1):
            if x <= 0:
                raise DenestError(
                    f"f_{j - 1}(y) = {mpmath.nstr(x, 10)} is not positive"
                )
            if weighted:
                x = x / to_mpf(spec.weight(j))
                eps += u
            inv = 1 / spec.exponent(j)
            x = power(x, inv)
            eps = abs(inv) * eps + (0 if inv == 1 else u)

            aj = spec.radicand(j)
            diff = x - to_mpf(aj)
            if diff == 0:
                raise DenestError(f"total cancellation at step {j}")
            amplification = abs(x / diff)
            if amplification > 1:
                lost += float(mpmath.log(amplification, 2))
            eps_a = u if isinstance(aj, Fraction) else max(u, ulp(spec.term_bits))
            eps = (abs(x) * eps + abs(to_mpf(aj)) * eps_a) / abs(diff) + u / 2
            x = diff

        warning = lost > precision_bits / 2
        if warning:
            log.warning(
                "denest_forward: f_%s lost %.1f of %s bits to cancellation",
                k,
                lost,
                precision_bits,
            )
        return DenestValue(value=x, relative_error=eps, warning=warning, lost_bits=lost)


def denest_from_tail(table, j):
    """f_j(t_{n,n}) = t_{n-j,n}, read from the stored row."""
    if not isinstance(j, int) or j < 0 or j > table.n - 1:
        raise DenestError(f"denesting index {j!r} outside 0..{table.n - 1}")
    return table.values[table.n - 1 - j]
