import json
from io import StringIO

import mpmath
import pandas as pd
import pytest

from radix.radix import main


@pytest.fixture(autouse=True)
def _high_precision_oracles():
    with mpmath.workdps(60):
        yield


def run(capsys, *argv):
    main(list(argv))
    return capsys.readouterr().out


def exit_code(*argv):
    with pytest.raises(SystemExit) as exc:
        main(list(argv))
    return exc.value.code


def test_eval_ramanujan(capsys):
    out = run(capsys, "eval", "--builtin", "ramanujan", "-n", "3")
    # sqrt(1 + 2 sqrt(1 + 3)) = sqrt(5)
    assert "2.2360679" in out
    assert "rounding_bound" in out


def test_eval_json(capsys):
    out = run(capsys, "eval", "--builtin", "golden", "-n", "1", "--format", "json")
    record = json.loads(out)
    assert record["value"] == "1.0@128"
    assert record["n"] == 1
    assert record["precision_bits"] == 128


def test_eval_inline_with_offset(capsys):
    out = run(
        capsys, "eval", "--a", "2", "-n", "1", "--offset", "1", "--format", "json"
    )
    value = json.loads(out)["value"]
    assert value.endswith("@128")
    assert abs(mpmath.mpf(value.split("@")[0]) - (1 + mpmath.sqrt(2))) < 1e-30


def test_eval_spec_file(capsys, tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps({"kind": "radical", "a": "1", "r": "2"}))
    out = run(capsys, "eval", "--spec", str(path), "-n", "2", "--format", "csv")
    df = pd.read_csv(StringIO(out), dtype=str)
    assert abs(mpmath.mpf(df["value"][0]) - mpmath.sqrt(2)) < 1e-30


def test_eval_power_form(capsys):
    out = run(capsys, "eval", "--a", "1", "--p", "1", "-n", "5", "--format", "json")
    assert json.loads(out)["value"] == "5.0@128"


def _csv(out):
    return pd.read_csv(StringIO(out), dtype=str)


def test_gaps_golden(capsys):
    out = run(
        capsys,
        "gaps",
        "--builtin",
        "golden",
        "--n-max",
        "6",
        "--methods",
        "identity,herschfeld_general,polya_szego",
        "--format",
        "csv",
    )
    df = _csv(out)
    assert list(df["n"]) == ["1", "2", "3", "4", "5", "6"]
    assert df["polya_szego"][2] == "0.125"
    assert "polya_szego/true_gap" in df.columns
    for ratio in df["identity/true_gap"]:
        assert abs(mpmath.mpf(ratio) - 1) < 1e-25


def test_gaps_ramanujan_default_and_ps(capsys):
    out = run(
        capsys,
        "gaps",
        "--builtin",
        "ramanujan",
        "--n-min",
        "5",
        "--n-max",
        "5",
        "--methods",
        "weighted_ps",
        "--format",
        "csv",
    )
    assert _csv(out)["weighted_ps"][0] == "22.5"

    out = run(capsys, "gaps", "--builtin", "ramanujan", "--n-max", "4", "--format", "csv")
    assert "weighted_general" in _csv(out).columns


def test_gaps_plain_table(capsys):
    out = run(capsys, "gaps", "--builtin", "golden", "--n-max", "3")
    assert out.startswith("|")
    assert "herschfeld_general" in out


def test_gaps_unknown_method():
    assert exit_code("gaps", "--builtin", "golden", "--methods", "magic") == 2


def test_gaps_method_kind_mismatch():
    code = exit_code("gaps", "--builtin", "ramanujan", "--methods", "polya_szego")
    assert code == 3


def test_limit_ramanujan(capsys):
    out = run(
        capsys, "limit", "--builtin", "ramanujan", "--tol", "1e-9", "--format", "json"
    )
    record = json.loads(out)
    assert record["certified"] is True
    assert record["strategy"] == "geometric_majorization"
    value = mpmath.mpf(record["value"].split("@")[0])
    assert abs(value - 3) < 1e-9
    assert mpmath.mpf(record["tail_bound"].split("@")[0]) <= mpmath.mpf("1e-9")


def test_limit_divergent_exits_not_certified(capsys):
    code = exit_code("limit", "--a", "2^(2^n*n)", "--tol", "1e-3", "--n-max", "30")
    assert code == 4
    record = capsys.readouterr().out
    assert "False" in record


def test_limit_divergent_default_depth_exits_not_certified(capsys):
    code = exit_code("limit", "--a", "2^(2^n*n)", "--r", "2", "--tol", "1e-3")
    assert code == 4
    assert "False" in capsys.readouterr().out


def test_limit_divergent_without_requirement(capsys):
    out = run(
        capsys,
        "limit",
        "--a",
        "2^(2^n*n)",
        "--n-max",
        "12",
        "--no-require-certified",
        "--format",
        "json",
    )
    assert json.loads(out)["certified"] is False


def test_bad_expression_exits_2():
    assert exit_code("eval", "--a", "n+", "-n", "3") == 2


def test_missing_spec_file_exits_2(tmp_path):
    assert exit_code("eval", "--spec", str(tmp_path / "nope.json"), "-n", "3") == 2


def test_low_precision_exits_3():
    assert exit_code("eval", "--builtin", "golden", "-n", "3", "--precision", "16") == 3


def test_precision_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("RADIX_PRECISION_BITS", "256")
    out = run(capsys, "eval", "--builtin", "golden", "-n", "1", "--format", "json")
    assert json.loads(out)["value"] == "1.0@256"


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--builtin", "golden", "--a", "1", "-n", "3"],
        ["eval", "-n", "3"],
        ["eval", "--builtin", "golden", "--r", "3", "-n", "3"],
    ],
)
def test_spec_source_errors(argv):
    assert exit_code(*argv) == 2


def test_diagnose_json(capsys):
    out = run(
        capsys, "diagnose", "--builtin", "golden", "--horizon", "30", "--format", "json"
    )
    record = json.loads(out)
    assert record["verdict"] == "looks_convergent"
    assert record["criterion"] == "herschfeld"
    assert len(record["rows"]) == 30
    assert "caveat" in record


def test_diagnose_alpha_plain(capsys):
    out = run(
        capsys,
        "diagnose",
        "--a",
        "1",
        "--criterion",
        "polya_szego",
        "--horizon",
        "20",
    )
    assert "verdict" in out
    assert "looks_convergent" in out


def test_diagnose_short_horizon_exits_3():
    assert exit_code("diagnose", "--builtin", "golden", "--horizon", "4") == 3


def test_diagnose_alpha_caveat_names_log2(capsys):
    out = run(
        capsys,
        "diagnose",
        "--a",
        "1",
        "--criterion",
        "polya_szego",
        "--horizon",
        "20",
        "--format",
        "json",
    )
    caveat = json.loads(out)["caveat"]
    assert "log 2" in caveat
    assert "alpha > 2" in caveat


def _spec_file(tmp_path, obj):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(obj))
    return str(path)


def test_eval_trailing_zero_at_the_requested_depth(capsys, tmp_path):
    path = _spec_file(
        tmp_path, {"a": {"list": ["1", "0"], "periodic": True}, "r": "2"}
    )
    for depth in ("1", "2"):
        out = run(capsys, "eval", "--spec", path, "-n", depth, "--format", "json")
        assert json.loads(out)["value"] == "1.0@128"


def test_eval_all_zero_prefix_is_zero(capsys):
    out = run(capsys, "eval", "--a", "n-1", "-n", "1", "--format", "json")
    record = json.loads(out)
    assert record["value"] == "0.0@128"
    assert record["rounding_bound"] == "0.0@128"


def test_eval_reports_original_depth(capsys, tmp_path):
    path = _spec_file(tmp_path, {"a": {"list": ["1", "0", "3"], "then": "n"}, "r": "2"})
    out = run(capsys, "eval", "--spec", path, "-n", "3", "--format", "json")
    record = json.loads(out)
    assert record["n"] == 3
    value = mpmath.mpf(record["value"].split("@")[0])
    assert abs(value - mpmath.mpf("1.52186530709932")) < 1e-14


def test_gaps_over_zero_radicands(capsys, tmp_path):
    path = _spec_file(tmp_path, {"a": {"list": ["1", "0", "3"], "then": "n"}, "r": "2"})
    out = run(
        capsys,
        "gaps",
        "--spec",
        path,
        "--n-max",
        "4",
        "--methods",
        "identity,herschfeld_general",
        "--format",
        "csv",
    )
    df = _csv(out)
    assert list(df["n"]) == ["1", "2", "3", "4"]
    # a_2 = 0: v_2 = v_1.
    assert df["true_gap"][0] == "0.0"
    assert df["herschfeld_general"][0] == "0.0"
    gap = mpmath.mpf(df["true_gap"][1])
    assert abs(gap - (mpmath.sqrt(1 + mpmath.root(3, 4)) - 1)) < 1e-30
    assert abs(mpmath.mpf(df["identity/true_gap"][1]) - 1) < 1e-25


def test_gaps_skip_depths_before_the_first_positive_radicand(capsys):
    out = run(capsys, "gaps", "--a", "n-1", "--n-max", "3", "--format", "csv")
    assert list(_csv(out)["n"]) == ["2", "3"]


def test_limit_over_zero_radicands_reports_original_depth(capsys, tmp_path):
    path = _spec_file(
        tmp_path, {"a": {"list": ["1", "0"], "periodic": True}, "r": "2"}
    )
    out = run(capsys, "limit", "--spec", path, "--tol", "1e-12", "--format", "json")
    record = json.loads(out)
    assert record["certified"] is True
    assert record["n_used"] % 2 == 1


@pytest.mark.parametrize(
    "source",
    [
        ["--builtin", "golden"],
        ["--builtin", "ramanujan"],
        ["--a", "n", "--r", "n+1"],
    ],
)
def test_gaps_workers_match_serial(capsys, source):
    argv = ["gaps", *source, "--n-max", "8", "--format", "csv"]
    serial = run(capsys, *argv, "--workers", "1")
    pooled = run(capsys, *argv, "--workers", "2")
    assert pooled == serial
