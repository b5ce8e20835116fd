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
Named radicals that ship with radix.

Leading constants are part of the nesting where a level with r = 1 expresses
them (`ex-nested-n` is 1 + sqrt(2 + cbrt(3 + ...)) with a_1 = r_1 = 1), so
every entry has offset 0; `--offset` exists for radicals written with a
constant in front of the outermost root.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from radix.seqspec import (
    Kind,
    RadicalSpec,
    SpecError,
    constant_rule,
    parse_sequence_expr,
    to_mpf,
)


log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BuiltinEntry:
    name: str
    spec: RadicalSpec
    description: str
    offset: Fraction = Fraction(0)
    # Closed-form limit, where one is known.
    limit: object = None


def _radical(a, r="2", b=None, label=None):
    return RadicalSpec(
        kind=Kind.RADICAL,
        a=parse_sequence_expr(a),
        b=parse_sequence_expr(b) if b is not None else None,
        r=parse_sequence_expr(r),
        label=label,
    )


def _golden_ratio():
    return (1 + mpmath.sqrt(5)) / 2


BUILTINS = {
    e.name: e
    for e in (
        BuiltinEntry(
            "golden",
            _radical("1", label="golden"),
            "sqrt(1 + sqrt(1 + ...)) = (1 + sqrt(5))/2",
            limit=_golden_ratio,
        ),
        BuiltinEntry(
            "sqrt2plus",
            _radical("2", label="sqrt2plus"),
            "sqrt(2 + sqrt(2 + ...)) = 2",
            limit=lambda: mpmath.mpf(2),
        ),
        BuiltinEntry(
            "ex-nested-n",
            _radical("n", r="n", label="ex-nested-n"),
            "1 + sqrt(2 + cbrt(3 + ...)), a_n = r_n = n",
        ),
        BuiltinEntry(
            "ex-weighted-n",
            _radical("n", r="n", b="n", label="ex-weighted-n"),
            "1 + 2 sqrt(2 + 3 cbrt(3 + ...)), a_n = b_n = r_n = n",
        ),
        BuiltinEntry(
            "ramanujan",
            _radical("1", b="n", label="ramanujan"),
            "sqrt(1 + 2 sqrt(1 + 3 sqrt(1 + ...))) = 3",
            limit=lambda: mpmath.mpf(3),
        ),
    )
}

_CONSTANT_RE = re.compile(r"^constant\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*,\s*([^,()]+?)\s*\)$")


def _rational(text, what):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise SpecError(f"constant(): bad {what} {text!r}")


def constant_entry(a, b, r):
    """b (a + b (a + ...)^(1/r))^(1/r) with constant inputs."""
    a, b, r = Fraction(a), Fraction(b), Fraction(r)
    if a <= 0 or b <= 0:
        raise SpecError("constant(): a and b must be positive")
    if r.denominator != 1 or r < 1:
        raise SpecError("constant(): r must be a positive integer")
    name = f"constant({a},{b},{r})"
    spec = RadicalSpec(
        kind=Kind.RADICAL,
        a=constant_rule(a),
        b=constant_rule(b) if b != 1 else None,
        r=constant_rule(r),
        label=name,
    )
    return BuiltinEntry(name, spec, "constant inputs, geometric rate")


def get_builtin(name):
    m = _CONSTANT_RE.match(name.strip())
    if m:
        a, b, r = (_rational(t, w) for t, w in zip(m.groups(), ("a", "b", "r")))
        return constant_entry(a, b, r)
    try:
        return BUILTINS[name]
    except KeyError:
        raise SpecError(
            f"unknown builtin {name!r}; choose from "
            f"{', '.join(sorted(BUILTINS))} or constant(a,b,r)"
        )


def geometric_rate(a, b, r, precision_bits=128):
    """
    (c, s) for constant inputs: the gap after depth n is at most c s^n, so
    the tail is at most c s^n / (1 - s) when s < 1. c = b a^(1/r),
    s = b / (r a^((r-1)/r)).
    """
    with mpmath.workprec(precision_bits):
        a, b = to_mpf(Fraction(a)), to_mpf(Fraction(b))
        r = int(r)
        c = b * mpmath.root(a, r)
        s = b / (r * mpmath.power(a, mpmath.mpf(r - 1) / r))
    return c, s
