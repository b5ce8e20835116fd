import logging
from fractions import Fraction

import mpmath
import pytest

from radix.evalcore import approximant, tail_table, ulp
from radix.seqspec import (
    Kind,
    ParseError,
    RadicalSpec,
    SequenceError,
    SpecError,
    TermOverflow,
    ZeroTailError,
    eliminate_zeros,
    fold_weights,
    load_spec,
    normalize,
    normalize_to_depth,
    parse_sequence_expr,
    rule_from_json,
    spec_from_json,
    term,
)


def test_parse_and_evaluate_exactly():
    rule = parse_sequence_expr("n^2 + 1")
    assert term(rule, 3) == 10
    assert parse_sequence_expr("1/3 + n/6").term(2) == Fraction(2, 3)
    assert parse_sequence_expr("0.25*n").term(2) == Fraction(1, 2)


def test_power_is_right_associative():
    assert parse_sequence_expr("2^3^2").term(1) == 512
    assert parse_sequence_expr("2**3**2").term(1) == 512
    assert parse_sequence_expr("(2^3)^2").term(1) == 64


def test_unary_minus_binds_looser_than_power():
    assert parse_sequence_expr("-2^2").term(1) == -4
    assert parse_sequence_expr("2^-1").term(1) == Fraction(1, 2)
    assert parse_sequence_expr("--n").term(5) == 5


@pytest.mark.parametrize(
    "text, offset",
    [
        ("", 0),
        ("   ", 0),
        ("n + $", 4),
        ("n + m", 4),
        ("(n + 1", 6),
        ("n 2", 2),
        ("n * * 2", 4),
    ],
)
def test_parse_errors_report_byte_offsets(text, offset):
    with pytest.raises(ParseError) as excinfo:
        parse_sequence_expr(text)
    assert excinfo.value.offset == offset


def test_parse_error_offset_counts_bytes():
    with pytest.raises(ParseError) as excinfo:
        parse_sequence_expr("(é)")
    assert excinfo.value.offset == 1
    # A no-break space is skipped as whitespace but still counts two bytes.
    with pytest.raises(ParseError) as excinfo:
        parse_sequence_expr("n\u00a0$")
    assert excinfo.value.offset == 3


def test_term_errors():
    with pytest.raises(SequenceError, match="division by zero"):
        parse_sequence_expr("1/(n-1)").term(1)
    with pytest.raises(SequenceError, match="non-integer exponent"):
        parse_sequence_expr("2^(1/2)").term(1)
    with pytest.raises(SequenceError):
        parse_sequence_expr("n").term(0)


def test_digit_budget_overflow_falls_back_to_reals():
    rule = parse_sequence_expr("2^(2^n*n)")
    with pytest.raises(TermOverflow):
        rule.term(20)
    x = rule.value(20)
    assert isinstance(x, mpmath.mpf)
    assert x == mpmath.ldexp(1, 20 * 2 ** 20)
    # Small terms stay exact.
    assert rule.value(3) == Fraction(2 ** 24)


def test_log2_is_exact_for_powers_of_two():
    rule = parse_sequence_expr("2^(2^n*n)")
    assert rule.log2(30) == Fraction(30 * 2 ** 30)
    assert parse_sequence_expr("n/4").log2(2) == Fraction(-1)
    lb = parse_sequence_expr("3").log2(1)
    assert isinstance(lb, mpmath.mpf)
    assert abs(lb - mpmath.log(3, 2)) < 1e-15


def test_list_rules():
    rule = rule_from_json({"list": [1, 0, "1/2"], "then": "n"})
    assert [rule.term(n) for n in range(1, 6)] == [1, 0, Fraction(1, 2), 4, 5]

    periodic = rule_from_json({"list": [1, 2], "periodic": True})
    assert [periodic.term(n) for n in range(1, 6)] == [1, 2, 1, 2, 1]

    finite = rule_from_json({"list": [1, 2, 3]})
    with pytest.raises(SequenceError, match="no continuation"):
        finite.term(4)


def test_tower_rules():
    rule = rule_from_json({"tower": "3*n", "levels": 2})
    with pytest.raises(SequenceError):
        rule.term(1)
    assert abs(rule.ln(1) - mpmath.exp(3)) < 1e-12
    assert abs(rule_from_json({"tower": "n", "levels": 1}).value(2) - mpmath.exp(2)) < 1e-12
    with pytest.raises(SpecError):
        rule_from_json({"tower": "n", "levels": 0})


def test_spec_from_json_defaults_and_validation():
    spec = spec_from_json('{"a": "n"}')
    assert spec.kind == Kind.RADICAL
    assert spec.r.term(7) == 2

    power = spec_from_json({"kind": "power", "a": 1, "p": "1/2"})
    assert power.p.term(3) == Fraction(1, 2)

    with pytest.raises(SpecError):
        spec_from_json({"kind": "power", "a": 1, "p": 1, "r": 2})
    with pytest.raises(SpecError):
        spec_from_json({"kind": "continued_fraction", "a": 1})
    with pytest.raises(SpecError):
        spec_from_json({"r": 2})
    with pytest.raises(ParseError):
        spec_from_json("{not json")


def test_spec_json_round_trip(tmp_path):
    spec = spec_from_json(
        {"a": {"list": [1, 0], "then": "n"}, "b": "n", "r": "2", "label": "x"}
    )
    path = tmp_path / "spec.json"
    path.write_text(__import__("json").dumps(spec.to_json()))
    again = load_spec(str(path))
    assert again.to_json() == spec.to_json()
    assert [again.a.term(n) for n in range(1, 5)] == [1, 0, 3, 4]


def test_load_spec_missing_file(tmp_path):
    with pytest.raises(SpecError, match="cannot read"):
        load_spec(str(tmp_path / "nope.json"))


def test_eliminate_zeros_merges_roots():
    spec = spec_from_json({"a": {"list": [1, 0, 4], "then": "1"}, "r": "2"})
    norm = eliminate_zeros(spec, 6)
    assert norm.kind == "plain"
    assert norm.a == (1, 4, 1, 1, 1)
    assert norm.r == (2, 4, 2, 2, 2)
    assert norm.index_map == (1, 3, 4, 5, 6)
    assert norm.depth_for(2) == 1
    assert norm.depth_for(3) == 2


def test_eliminate_zeros_rejects_trailing_zeros():
    spec = spec_from_json({"a": {"list": [1, 0, 0]}, "r": "2"})
    with pytest.raises(SpecError, match="trailing zero"):
        eliminate_zeros(spec, 3)


def test_eliminate_zeros_power_form_multiplies_exponents():
    spec = spec_from_json(
        {"kind": "power", "a": {"list": [2, 0, 0, 3], "then": "1"}, "p": "1/2"}
    )
    norm = eliminate_zeros(spec, 5)
    assert norm.kind == "power"
    assert norm.a == (2, 3, 1)
    assert norm.p == (Fraction(1, 2), Fraction(1, 8), Fraction(1, 2))
    assert norm.index_map == (1, 4, 5)


def test_fold_weights_ramanujan():
    spec = spec_from_json({"a": "1", "b": "n", "r": "2"})
    norm = fold_weights(spec, 3)
    assert norm.kind == "plain"
    assert norm.a == (1, 4, 144)
    assert not norm.fold_log.approximate


def test_fold_weights_then_eliminate_zeros():
    spec = spec_from_json({"a": {"list": [1, 0], "then": "1"}, "b": "n", "r": "2"})
    norm = fold_weights(spec, 3)
    assert norm.a == (1, 144)
    assert norm.r == (2, 4)
    assert norm.index_map == (1, 3)


def test_fold_weights_switches_to_reals_over_budget(caplog):
    spec = spec_from_json({"a": "1", "b": "n+1", "r": "3"})
    with caplog.at_level(logging.WARNING):
        norm = fold_weights(spec, 6, digit_budget=20)
    assert norm.fold_log.approximate
    assert norm.fold_log.first_approximate_index is not None
    assert any(isinstance(c, mpmath.mpf) for c in norm.a)
    assert "fold_weights" in caplog.text


def test_normalize_picks_the_kind():
    assert normalize(spec_from_json({"a": "n", "b": "1"}), 5).kind == "plain"
    assert normalize(spec_from_json({"a": "1", "b": "n"}), 5).kind == "weighted"
    assert normalize(spec_from_json({"kind": "power", "a": 1, "p": 1}), 5).kind == "power"
    folded = normalize(spec_from_json({"a": {"list": [0], "then": "1"}, "b": "n"}), 5)
    assert folded.kind == "plain"
    assert folded.index_map[0] == 2


def test_radical_spec_needs_roots():
    with pytest.raises(SpecError):
        RadicalSpec(kind=Kind.RADICAL, a=parse_sequence_expr("1"))
    with pytest.raises(SpecError):
        normalize(spec_from_json({"a": "n", "r": "1/2"}), 3)
    with pytest.raises(SpecError):
        normalize(spec_from_json({"a": "n-2"}), 3)


@pytest.mark.parametrize(
    "text",
    [
        "n^2 + 1",
        "2^3^2",
        "(2^3)^2",
        "-2^2",
        "2^-1",
        "--n",
        "+n",
        "1/3 + n/6",
        "0.25*n - 3",
        "2**n*n",
        "(n+1)*(n-1)/7",
        "2^(2^n*n)",
        "(-n)^2 - -1",
    ],
)
def test_printed_expression_parses_to_the_same_tree(text):
    rule = parse_sequence_expr(text)
    again = parse_sequence_expr(str(rule))
    assert again.tree == rule.tree
    assert str(again) == str(rule)


def test_eliminate_zeros_multiplies_mixed_roots():
    spec = spec_from_json(
        {"a": {"list": [1, 0], "then": "n"}, "r": {"list": [2, 3, 5, 7, 11, 13]}}
    )
    norm = eliminate_zeros(spec, 5)
    assert norm.a == (1, 3, 4, 5)
    assert norm.r == (2, 15, 7, 11)
    assert norm.index_map == (1, 3, 4, 5)


def test_leading_zeros_merge_into_one_root():
    spec = spec_from_json({"a": {"list": [0, 0, 2], "then": "2"}, "r": "2"})
    norm = eliminate_zeros(spec, 4)
    assert norm.a == (2, 2)
    assert norm.r == (8, 2)
    assert norm.index_map == (3, 4)

    approx = approximant(spec, 3, 128)
    with mpmath.workdps(60):
        expected = mpmath.sqrt(mpmath.sqrt(mpmath.sqrt(2)))
        assert abs(approx.value - expected) <= 2 * ulp(128) * expected
        assert tail_table(norm, 1, 128).approximant == approx.value


def _nested_value(a, r):
    """Innermost-first evaluation with the zero radicands left in."""
    with mpmath.workdps(60):
        t = mpmath.mpf(0)
        for ak, rk in zip(reversed(a), reversed(r)):
            t = mpmath.root(mpmath.mpf(ak.numerator) / ak.denominator + t, rk)
        return t


def test_normalization_preserves_approximants(rng):
    for _ in range(100):
        depth = rng.randint(2, 12)
        a = [Fraction(rng.randint(1, 1000), 100) for _ in range(depth + 1)]
        for k in rng.sample(range(1, depth), rng.randint(1, depth - 1)):
            a[k] = Fraction(0)
        r = [rng.randint(1, 4) for _ in range(depth + 1)]
        spec = spec_from_json(
            {"a": {"list": [str(x) for x in a]}, "r": {"list": r}}
        )

        norm = normalize(spec, depth + 1)
        m = norm.depth_for(depth)
        assert m == sum(1 for x in a[:depth] if x > 0)
        table = tail_table(norm, m, 128)
        expected = _nested_value(a[:depth], r[:depth])
        with mpmath.workdps(60):
            bound = 2 * table.errors[-1] * expected + 2 * ulp(128) * expected
            assert abs(table.approximant - expected) <= bound
        assert approximant(spec, depth, 128).value == table.approximant


def test_zero_tail_is_dropped_for_evaluation():
    spec = spec_from_json({"a": {"list": [1, 0], "periodic": True}, "r": "2"})
    with pytest.raises(ZeroTailError):
        normalize(spec, 2)
    norm = normalize(spec, 2, drop_zero_tail=True)
    assert norm.a == (1,)
    assert norm.source_horizon == 2
    assert norm.depth_for(2) == 1
    with pytest.raises(SpecError):
        norm.depth_for(3)


def test_normalize_to_depth_reads_through_zero_runs():
    spec = spec_from_json({"a": {"list": [1, 0, 0, 0, 0, 0], "then": "1"}, "r": "2"})
    norm, m = normalize_to_depth(spec, 1, lookahead=1)
    assert m == 1
    assert norm.index_map[:2] == (1, 7)
    assert norm.r[1] == 64
    assert norm.original_depth(2) == 7

    norm, m = normalize_to_depth(spec, 4)
    assert m == 1
    assert norm.a == (1,)


def test_normalize_to_depth_all_zero_prefix():
    spec = spec_from_json({"a": "n-1", "r": "2"})
    norm, m = normalize_to_depth(spec, 1)
    assert m == 0
    assert norm.horizon == 0
    norm, m = normalize_to_depth(spec, 3, lookahead=2)
    assert m == 2
    assert norm.index_map[:4] == (2, 3, 4, 5)


def test_normalize_to_depth_gives_up_on_endless_zeros():
    spec = spec_from_json({"a": {"list": [1, 0], "then": "0"}, "r": "2"})
    with pytest.raises(ZeroTailError, match="positive radicand"):
        normalize_to_depth(spec, 1, lookahead=1)
