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
Sequence rules and continued radical specifications.

A sequence rule produces term n (n >= 1) of one of the input sequences of a
continued radical: the radicands a_n, the weights b_n, the integer roots r_n or
the exponents p_n of a continued power form. Rules are written in a small
expression language over the single free variable `n`:

    n*(n+1)      2^n      1/2      (n+1)^-2      2^(2^n*n)

Terms evaluate in exact rational arithmetic. Conversion to working-precision
reals only happens at the evaluation boundary (see `SequenceRule.value()`).

This module also performs the two normalization transforms applied before
evaluation: zero elimination (drop a zero radicand and multiply the adjacent
roots) and weight folding (move the weights b_i inside the radicals).
"""

import json
import logging
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Tuple, Union

import mpmath


log = logging.getLogger(__name__)


# Exact terms (and folded radicands) larger than this many decimal digits are
# not materialized as rationals.
DIGIT_BUDGET = 10 ** 5

# Largest root index (or exponent denominator) zero elimination may produce.
MAX_ROOT = 2 ** 63 - 1

# Precision of terms that cannot be stored exactly.
DEFAULT_TERM_BITS = 1024

# How many original levels past the requested ones `normalize_to_depth` reads
# while looking for further positive radicands.
ZERO_RUN_LIMIT = 4096

_LOG2_10 = 3.3219280948873626

Real = Union[Fraction, mpmath.mpf]


class SpecError(Exception):
    """Invalid specification text, rule or term."""


class ParseError(SpecError):
    def __init__(self, msg, offset):
        super().__init__(f"{msg} (at byte offset {offset})")
        self.offset = offset


class SequenceError(SpecError):
    pass


class TermOverflow(SequenceError):
    """The exact term would exceed the digit budget."""


class ZeroTailError(SpecError):
    """The horizon ends in zero radicands."""


def _budget_bits(digit_budget=DIGIT_BUDGET):
    return int(digit_budget * _LOG2_10)


def _fraction_bits(q):
    return q.numerator.bit_length() + q.denominator.bit_length()


def _is_power_of_two(k):
    return k > 0 and k & (k - 1) == 0


def _exact_log2(q):
    """Return log2(q) as a Fraction if q is an integral power of two."""
    if q <= 0:
        return None
    if _is_power_of_two(q.numerator) and _is_power_of_two(q.denominator):
        return Fraction(q.numerator.bit_length() - q.denominator.bit_length())
    return None


def to_mpf(x):
    """Convert an exact rational (or mpf) to an mpf at the current precision."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return mpmath.mpf(x.numerator)
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


# Expression tree. Nodes are immutable and compare structurally.


@dataclass(frozen=True)
class Num:
    value: Fraction
    text: str

    def __str__(self):
        return self.text

    def exact(self, n, budget):
        return self.value

    def real(self, n):
        return to_mpf(self.value)

    def log2_exact(self, n):
        return _exact_log2(self.value)


@dataclass(frozen=True)
class Var:
    def __str__(self):
        return "n"

    def exact(self, n, budget):
        return Fraction(n)

    def real(self, n):
        return mpmath.mpf(n)

    def log2_exact(self, n):
        return _exact_log2(Fraction(n))


@dataclass(frozen=True)
class Neg:
    operand: object

    def __str__(self):
        return f"(-{self.operand})"

    def exact(self, n, budget):
        return -self.operand.exact(n, budget)

    def real(self, n):
        return -self.operand.real(n)

    def log2_exact(self, n):
        return None


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"

    def _exponent(self, n, budget):
        e = self.right.exact(n, budget)
        if e.denominator != 1:
            raise SequenceError(
                f"non-integer exponent {e} in '{self}' at n={n}"
            )
        return e.numerator

    def exact(self, n, budget):
        if self.op == "^":
            base = self.left.exact(n, budget)
            e = self._exponent(n, budget)
            if base == 0 and e < 0:
                raise SequenceError(f"division by zero in '{self}' at n={n}")
            if base not in (0, 1, -1) and _fraction_bits(base) * abs(e) > budget:
                raise TermOverflow(
                    f"exact value of '{self}' at n={n} exceeds the digit budget"
                )
            return base ** e

        lhs = self.left.exact(n, budget)
        rhs = self.right.exact(n, budget)
        if self.op == "+":
            return lhs + rhs
        if self.op == "-":
            return lhs - rhs
        if self.op == "*":
            return lhs * rhs
        if rhs == 0:
            raise SequenceError(f"division by zero in '{self}' at n={n}")
        return lhs / rhs

    def real(self, n):
        if self.op == "^":
            base = self.left.real(n)
            e = self._exponent(n, _budget_bits())
            if base == 0 and e < 0:
                raise SequenceError(f"division by zero in '{self}' at n={n}")
            return base ** e

        lhs = self.left.real(n)
        rhs = self.right.real(n)
        if self.op == "+":
            return lhs + rhs
        if self.op == "-":
            return lhs - rhs
        if self.op == "*":
            return lhs * rhs
        if rhs == 0:
            raise SequenceError(f"division by zero in '{self}' at n={n}")
        return lhs / rhs

    def log2_exact(self, n):
        if self.op == "^":
            lb = self.left.log2_exact(n)
            if lb is None:
                return None
            return lb * self._exponent(n, _budget_bits())
        if self.op in ("*", "/"):
            lhs = self.left.log2_exact(n)
            rhs = self.right.log2_exact(n)
            if lhs is None or rhs is None:
                return None
            return lhs + rhs if self.op == "*" else lhs - rhs
        return None


# Tokenizer and recursive descent parser.
#
#   expr   := term (('+' | '-') term)*
#   term   := unary (('*' | '/') unary)*
#   unary  := ('-' | '+') unary | power
#   power  := atom (('^' | '**') unary)?
#   atom   := NUMBER | 'n' | '(' expr ')'

_TOKEN_RE = re.compile(
    r"(?P<num>\d+(?:\.\d+)?)|(?P<op>\*\*|[-+*/^()])|(?P<ident>[A-Za-z_]\w*)"
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        offset = len(text[:pos].encode("utf-8"))
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", offset)
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(kind), offset))
        pos = m.end()
    tokens.append(_Token("end", "", len(text.encode("utf-8"))))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text):
        tok = self.peek()
        if tok.text != text:
            found = tok.text or "end of input"
            raise ParseError(f"expected '{text}', found '{found}'", tok.offset)
        return self.advance()

    def parse(self):
        if self.peek().kind == "end":
            raise ParseError("empty expression", 0)
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected '{tok.text}'", tok.offset)
        return node

    def expr(self):
        node = self.term()
        while self.peek().text in ("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek().text in ("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        tok = self.peek()
        if tok.text == "-":
            self.advance()
            return Neg(self.unary())
        if tok.text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().text in ("^", "**"):
            self.advance()
            # Right-associative: 2^3^2 == 2^(3^2).
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        tok = self.advance()
        if tok.kind == "num":
            return Num(Fraction(tok.text), tok.text)
        if tok.kind == "ident":
            if tok.text != "n":
                raise ParseError(f"unknown identifier '{tok.text}'", tok.offset)
            return Var()
        if tok.text == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "end of input"
        raise ParseError(f"unexpected '{found}'", tok.offset)


# Sequence rules.


class SequenceRule:
    """
    Base class. Subclasses implement `_exact()`, `real()`, `ln()` and
    `log2_exact()`; all take the 1-based index n.
    """

    def _check_index(self, n):
        if not isinstance(n, int) or n < 1:
            raise SequenceError(f"sequence index must be an integer >= 1, got {n!r}")

    def term(self, n, digit_budget=DIGIT_BUDGET):
        """Exact rational value of the rule at n."""
        self._check_index(n)
        return self._exact(n, _budget_bits(digit_budget))

    def value(self, n, precision_bits=DEFAULT_TERM_BITS, digit_budget=DIGIT_BUDGET):
        """
        Exact value if it fits the digit budget, else an mpf with
        `precision_bits` bits.
        """
        self._check_index(n)
        try:
            return self._exact(n, _budget_bits(digit_budget))
        except TermOverflow:
            pass
        except SequenceError:
            if self.is_rational:
                raise
        with mpmath.workprec(precision_bits):
            return +self.real(n)

    is_rational = True

    def ln(self, n):
        """Natural logarithm of a positive term at the current precision."""
        self._check_index(n)
        try:
            q = self._exact(n, _budget_bits())
        except TermOverflow:
            q = None
        if q is not None:
            if q <= 0:
                raise SequenceError(f"log of non-positive term {q} at n={n}")
            return mpmath.log(to_mpf(q))
        x = self.real(n)
        if x <= 0:
            raise SequenceError(f"log of non-positive term at n={n}")
        return mpmath.log(x)

    def log2(self, n):
        """log2 of a positive term: a Fraction when exact, else an mpf."""
        lb = self.log2_exact(n)
        if lb is not None:
            return lb
        return self.ln(n) / mpmath.ln2


@dataclass(frozen=True)
class ExprRule(SequenceRule):
    tree: object
    text: str

    def __str__(self):
        return str(self.tree)

    def _exact(self, n, budget):
        return self.tree.exact(n, budget)

    def real(self, n):
        return self.tree.real(n)

    def log2_exact(self, n):
        self._check_index(n)
        return self.tree.log2_exact(n)

    def to_json(self):
        return self.text


@dataclass(frozen=True)
class ListRule(SequenceRule):
    """Explicit leading terms, then an optional continuation."""

    values: Tuple[Fraction, ...]
    then: Optional[ExprRule] = None
    periodic: bool = False

    def _pick(self, n):
        if n <= len(self.values):
            return self.values[n - 1]
        if self.periodic:
            return self.values[(n - 1) % len(self.values)]
        if self.then is None:
            raise SequenceError(
                f"list rule has {len(self.values)} terms and no continuation, "
                f"index {n} requested"
            )
        return None

    def _exact(self, n, budget):
        q = self._pick(n)
        return q if q is not None else self.then._exact(n, budget)

    def real(self, n):
        q = self._pick(n)
        return to_mpf(q) if q is not None else self.then.real(n)

    def log2_exact(self, n):
        self._check_index(n)
        q = self._pick(n)
        return _exact_log2(q) if q is not None else self.then.log2_exact(n)

    def __str__(self):
        head = ", ".join(str(v) for v in self.values)
        if self.periodic:
            return f"[{head}, ...]"
        return f"[{head}] then {self.then}" if self.then else f"[{head}]"

    def to_json(self):
        obj = {"list": [str(v) for v in self.values]}
        if self.then is not None:
            obj["then"] = self.then.text
        if self.periodic:
            obj["periodic"] = True
        return obj


@dataclass(frozen=True)
class TowerRule(SequenceRule):
    """a_n = exp(exp(...exp(inner(n)))), `levels` exponentials deep."""

    inner: ExprRule
    levels: int

    is_rational = False

    def _exact(self, n, budget):
        raise SequenceError(f"tower rule '{self}' has no rational terms")

    def real(self, n):
        x = self.inner.real(n)
        for _ in range(self.levels):
            x = mpmath.exp(x)
        return x

    def ln(self, n):
        self._check_index(n)
        x = self.inner.real(n)
        for _ in range(self.levels - 1):
            x = mpmath.exp(x)
        return x

    def log2_exact(self, n):
        return None

    def __str__(self):
        return "exp(" * self.levels + str(self.inner) + ")" * self.levels

    def to_json(self):
        return {"tower": self.inner.text, "levels": self.levels}


def parse_sequence_expr(text):
    """Parse an expression in n into a SequenceRule."""
    if text is None or not text.strip():
        raise ParseError("empty expression", 0)
    return ExprRule(_Parser(text).parse(), text)


def term(rule, n):
    """Exact rational value of `rule` at index n >= 1."""
    return rule.term(n)


def constant_rule(value):
    value = Fraction(value)
    return parse_sequence_expr(str(value))


def rule_from_json(obj):
    if isinstance(obj, (int, Fraction)):
        return constant_rule(obj)
    if isinstance(obj, str):
        return parse_sequence_expr(obj)
    if not isinstance(obj, dict):
        raise SpecError(f"cannot interpret sequence rule: {obj!r}")

    if "list" in obj:
        try:
            values = tuple(Fraction(str(v)) for v in obj["list"])
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecError(f"bad list entry: {exc}")
        if not values:
            raise SpecError("list rule needs at least one term")
        then = obj.get("then")
        return ListRule(
            values=values,
            then=parse_sequence_expr(then) if then is not None else None,
            periodic=bool(obj.get("periodic", False)),
        )

    if "tower" in obj:
        levels = obj.get("levels", 1)
        if not isinstance(levels, int) or levels < 1:
            raise SpecError(f"tower levels must be a positive integer: {levels!r}")
        return TowerRule(parse_sequence_expr(obj["tower"]), levels)

    raise SpecError(f"unknown sequence rule object, keys: {sorted(obj)}")


# Radical specifications.


class Kind(str, Enum):
    RADICAL = "radical"
    POWER = "power"


@dataclass(frozen=True)
class RadicalSpec:
    kind: Kind
    a: SequenceRule
    b: Optional[SequenceRule] = None
    r: Optional[SequenceRule] = None
    p: Optional[SequenceRule] = None
    label: Optional[str] = None

    def __post_init__(self):
        if self.kind == Kind.RADICAL:
            if self.r is None:
                raise SpecError("a radical spec needs root indices r")
            if self.p is not None:
                raise SpecError("a radical spec takes r, not p")
        else:
            if self.p is None:
                raise SpecError("a power spec needs exponents p")
            if self.r is not None or self.b is not None:
                raise SpecError("a power spec takes only a and p")

    def to_json(self):
        obj = {"kind": self.kind.value, "a": self.a.to_json()}
        for name in ("b", "r", "p"):
            rule = getattr(self, name)
            if rule is not None:
                obj[name] = rule.to_json()
        if self.label:
            obj["label"] = self.label
        return obj


def spec_from_json(obj):
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.pos)
    if not isinstance(obj, dict):
        raise SpecError("spec must be a JSON object")

    try:
        kind = Kind(obj.get("kind", "radical"))
    except ValueError:
        raise SpecError(f"unknown spec kind: {obj.get('kind')!r}")
    if "a" not in obj:
        raise SpecError("spec needs radicands 'a'")

    rules = {}
    for name in ("a", "b", "r", "p"):
        if obj.get(name) is not None:
            rules[name] = rule_from_json(obj[name])
    if kind == Kind.RADICAL and "r" not in rules:
        rules["r"] = constant_rule(2)
    return RadicalSpec(kind=kind, label=obj.get("label"), **rules)


def load_spec(path):
    log.info("load spec from file: %s", path)
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as exc:
        raise SpecError(f"cannot read spec file: {exc}")
    return spec_from_json(data.decode("utf-8"))


# Normalized specifications.


@dataclass(frozen=True)
class FoldLog:
    approximate: bool = False
    first_approximate_index: Optional[int] = None
    digit_budget: int = DIGIT_BUDGET
    precision_bits: int = DEFAULT_TERM_BITS


@dataclass(frozen=True)
class NormalizedSpec:
    """
    Finite (horizon-long) view of a radical with strictly positive radicands.

    kind is "plain" (a, r), "weighted" (a, b, r) or "power" (a, p). Terms are
    Fractions, or mpfs of `term_bits` bits when not stored exactly.
    `index_map[j-1]` is the original index of normalized term j.
    """

    kind: str
    a: Tuple[Real, ...]
    r: Optional[Tuple[int, ...]] = None
    p: Optional[Tuple[Fraction, ...]] = None
    b: Optional[Tuple[Real, ...]] = None
    index_map: Tuple[int, ...] = ()
    fold_log: Optional[FoldLog] = None
    label: Optional[str] = None
    term_bits: int = DEFAULT_TERM_BITS
    # Original levels read; exceeds index_map[-1] when a zero tail was dropped.
    source_horizon: Optional[int] = None

    @property
    def horizon(self):
        return len(self.a)

    def exponent(self, i):
        """Exponent applied at level i: 1/r_i or p_i."""
        if self.kind == "power":
            return self.p[i - 1]
        return Fraction(1, self.r[i - 1])

    def root(self, i):
        return self.r[i - 1]

    def weight(self, i):
        if self.b is None:
            return Fraction(1)
        return self.b[i - 1]

    def radicand(self, i):
        return self.a[i - 1]

    def is_exact(self, i):
        return isinstance(self.a[i - 1], Fraction)

    def depth_for(self, original_depth):
        """
        Normalized depth whose approximant equals the original one. This is 0
        when a_1 .. a_{original_depth} all vanish (the approximant is 0).
        """
        upper = self.source_horizon
        if upper is None:
            upper = self.index_map[-1] if self.index_map else 0
        if original_depth < 1 or original_depth > upper:
            raise SpecError(
                f"original depth {original_depth} is outside the normalized "
                f"range 1..{upper}"
            )
        return sum(1 for k in self.index_map if k <= original_depth)

    def original_depth(self, depth):
        """Smallest original depth whose approximant is the normalized one."""
        if depth < 1 or depth > self.horizon:
            raise SpecError(f"normalized depth {depth} is outside 1..{self.horizon}")
        if not self.index_map:
            return depth
        return self.index_map[depth - 1]


def _read_terms(rule, name, horizon, term_bits):
    values = []
    for n in range(1, horizon + 1):
        try:
            values.append(rule.value(n, precision_bits=term_bits))
        except SequenceError as exc:
            raise SequenceError(f"rule {name}: {exc}") from exc
    return values


def _read_roots(rule, horizon):
    roots = []
    for n in range(1, horizon + 1):
        q = rule.term(n)
        if q.denominator != 1 or q < 1:
            raise SpecError(f"root index r_{n} must be an integer >= 1, got {q}")
        roots.append(q.numerator)
    return roots


def _read_exponents(rule, horizon):
    exps = []
    for n in range(1, horizon + 1):
        q = rule.term(n)
        if q <= 0:
            raise SpecError(f"exponent p_{n} must be positive, got {q}")
        exps.append(q)
    return exps


def _check_nonnegative(values, name):
    for n, v in enumerate(values, start=1):
        if v < 0:
            raise SpecError(f"{name}_{n} must be non-negative, got {v}")


def _merge_zeros(a, exps, kind, drop_zero_tail=False):
    """
    Drop zero radicands; the exponent of a zero level multiplies into the next
    level: (0 + x^{e_{k+1}})^{e_k} == x^{e_k e_{k+1}}.

    Zeros at the end of the horizon have no next level. They contribute
    nothing to the approximant at that depth, so with `drop_zero_tail` they
    are discarded; otherwise ZeroTailError is raised.
    """
    out_a, out_e, index_map = [], [], []
    pending = None
    for k, (ak, ek) in enumerate(zip(a, exps), start=1):
        merged = ek if pending is None else pending * ek
        if ak == 0:
            pending = merged
            continue
        if pending is not None:
            log.info("zero elimination: merge into level %s, exponent %s", k, merged)
        pending = None
        out_a.append(ak)
        out_e.append(merged)
        index_map.append(k)

    if pending is not None and not drop_zero_tail:
        raise ZeroTailError(
            f"horizon {len(a)} exhausted with trailing zero radicands; "
            "cannot certify a next positive term"
        )
    if kind != "power":
        for k, r in zip(index_map, out_e):
            if r > MAX_ROOT:
                raise SpecError(f"merged root index at level {k} overflows: {r}")
    return out_a, out_e, index_map


def _unit_weights(spec, horizon):
    if spec.b is None:
        return True
    return all(spec.b.value(n) == 1 for n in range(1, horizon + 1))


def eliminate_zeros(spec, horizon, term_bits=DEFAULT_TERM_BITS, drop_zero_tail=False):
    """
    Remove zero radicands from the first `horizon` levels of `spec`.

    Integer-root specs (with unit weights) and power forms are accepted; for
    weighted radicals use `fold_weights()` (which eliminates zeros too).
    """
    if horizon < 1:
        raise SpecError(f"horizon must be >= 1, got {horizon}")
    if spec.kind == Kind.RADICAL and not _unit_weights(spec, horizon):
        raise SpecError("zero elimination needs unit weights; fold weights first")

    a = _read_terms(spec.a, "a", horizon, term_bits)
    _check_nonnegative(a, "a")
    if spec.kind == Kind.POWER:
        exps = _read_exponents(spec.p, horizon)
        a, p, index_map = _merge_zeros(a, exps, "power", drop_zero_tail)
        return NormalizedSpec(
            kind="power",
            a=tuple(a),
            p=tuple(p),
            index_map=tuple(index_map),
            label=spec.label,
            term_bits=term_bits,
            source_horizon=horizon,
        )

    roots = _read_roots(spec.r, horizon)
    a, r, index_map = _merge_zeros(a, roots, "plain", drop_zero_tail)
    return NormalizedSpec(
        kind="plain",
        a=tuple(a),
        r=tuple(r),
        index_map=tuple(index_map),
        label=spec.label,
        term_bits=term_bits,
        source_horizon=horizon,
    )


def _real_bits(x):
    if isinstance(x, Fraction):
        return _fraction_bits(x)
    return None


def fold_weights(
    spec,
    horizon,
    digit_budget=DIGIT_BUDGET,
    term_bits=DEFAULT_TERM_BITS,
    drop_zero_tail=False,
):
    """
    Rewrite b_1 (a_1 + b_2 (a_2 + ...)^(1/r_2))^(1/r_1) as a plain radical with
    radicands c_i = a_i B_i, where B_0 = 1 and B_i = (B_{i-1} b_i)^{r_i}. This
    equals the recurrence c_i = a_i (c_{i-1} b_i / a_{i-1})^{r_i} with
    a_0 = b_0 = 1, and is also defined when some a_i vanish.
    """
    if spec.kind != Kind.RADICAL:
        raise SpecError("weight folding applies to integer-root radicals")
    if horizon < 1:
        raise SpecError(f"horizon must be >= 1, got {horizon}")

    a = _read_terms(spec.a, "a", horizon, term_bits)
    _check_nonnegative(a, "a")
    roots = _read_roots(spec.r, horizon)
    if spec.b is None:
        b = [Fraction(1)] * horizon
    else:
        b = _read_terms(spec.b, "b", horizon, term_bits)
        for n, bn in enumerate(b, start=1):
            if bn <= 0:
                raise SpecError(f"weight b_{n} must be positive, got {bn}")

    budget = _budget_bits(digit_budget)
    acc = Fraction(1)
    exact = True
    first_approx = None
    c = []
    for i in range(horizon):
        if exact and isinstance(b[i], Fraction):
            base = acc * b[i]
            if _fraction_bits(base) * roots[i] <= budget:
                acc = base ** roots[i]
                if isinstance(a[i], Fraction) and _fraction_bits(acc) <= budget:
                    c.append(a[i] * acc)
                    continue
                first_approx = first_approx or i + 1
                with mpmath.workprec(term_bits):
                    c.append(+(to_mpf(a[i]) * to_mpf(acc)))
                continue

        if exact:
            exact = False
            first_approx = first_approx or i + 1
            log.warning(
                "fold_weights: exact radicand c_%s exceeds %s digits, "
                "continue with %s-bit reals",
                i + 1,
                digit_budget,
                term_bits,
            )
        with mpmath.workprec(term_bits):
            acc = (to_mpf(acc) * to_mpf(b[i])) ** roots[i]
            c.append(+(to_mpf(a[i]) * acc))

    fold_log = FoldLog(
        approximate=first_approx is not None,
        first_approximate_index=first_approx,
        digit_budget=digit_budget,
        precision_bits=term_bits,
    )
    c, r, index_map = _merge_zeros(c, roots, "plain", drop_zero_tail)
    return NormalizedSpec(
        kind="plain",
        a=tuple(c),
        r=tuple(r),
        index_map=tuple(index_map),
        fold_log=fold_log,
        label=spec.label,
        term_bits=term_bits,
        source_horizon=horizon,
    )


def normalize(spec, horizon, term_bits=DEFAULT_TERM_BITS, drop_zero_tail=False):
    """
    Normalized view of `spec` through `horizon`: zero-free plain radical,
    weighted radical (kept weighted when all radicands are positive, so the
    weighted bounds apply) or power form.
    """
    if spec.kind == Kind.POWER or _unit_weights(spec, horizon):
        return eliminate_zeros(
            spec, horizon, term_bits=term_bits, drop_zero_tail=drop_zero_tail
        )

    a = _read_terms(spec.a, "a", horizon, term_bits)
    _check_nonnegative(a, "a")
    if any(v == 0 for v in a):
        log.info("weighted spec has zero radicands: fold weights, then eliminate")
        return fold_weights(
            spec, horizon, term_bits=term_bits, drop_zero_tail=drop_zero_tail
        )

    b = _read_terms(spec.b, "b", horizon, term_bits)
    for n, bn in enumerate(b, start=1):
        if bn <= 0:
            raise SpecError(f"weight b_{n} must be positive, got {bn}")
    return NormalizedSpec(
        kind="weighted",
        a=tuple(a),
        b=tuple(b),
        r=tuple(_read_roots(spec.r, horizon)),
        index_map=tuple(range(1, horizon + 1)),
        label=spec.label,
        term_bits=term_bits,
        source_horizon=horizon,
    )


def normalize_to_depth(spec, depth, lookahead=0, term_bits=DEFAULT_TERM_BITS):
    """
    Normalize `spec` so that original depth `depth` can be evaluated, with
    `lookahead` further normalized levels available past it (gap and tail
    bounds read the next levels). Returns (normalized spec, normalized depth).

    The normalized depth is 0 when a_1 .. a_depth all vanish. Zero runs past
    `depth` are read through until enough positive levels are found, at most
    ZERO_RUN_LIMIT original levels beyond `depth + lookahead`.
    """
    if depth < 1:
        raise SpecError(f"depth must be >= 1, got {depth}")
    if lookahead == 0:
        norm = normalize(spec, depth, term_bits=term_bits, drop_zero_tail=True)
        return norm, norm.depth_for(depth)

    horizon = depth + lookahead
    limit = horizon + ZERO_RUN_LIMIT
    while True:
        try:
            norm = normalize(spec, horizon, term_bits=term_bits)
        except ZeroTailError:
            norm = None
        if norm is not None:
            m = norm.depth_for(depth)
            if norm.horizon >= m + lookahead:
                return norm, m
        if horizon >= limit:
            raise ZeroTailError(
                f"no {lookahead} positive radicand(s) within {ZERO_RUN_LIMIT} "
                f"levels past depth {depth}"
            )
        log.info("zero run past level %s: extend the horizon", horizon)
        horizon = min(limit, horizon + max(lookahead, horizon // 2))
