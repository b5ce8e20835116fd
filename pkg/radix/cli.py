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
Command implementations. These are the only functions that read `CFG()`.
"""

import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import partial

import mpmath
import pandas as pd

from radix import bounds
from radix.catalog import get_builtin
from radix.cfg import CFG
from radix.convergence import CRITERIA
from radix.evalcore import approximant, limit_estimate, tail_table
from radix.seqspec import (
    Kind,
    RadicalSpec,
    SpecError,
    load_spec,
    normalize_to_depth,
    parse_sequence_expr,
    to_mpf,
)
from radix.utils import emit_record, emit_table, render_real


log = logging.getLogger(__name__)


EXIT_NOT_CERTIFIED = 4


def spec_from_args(args):
    """(RadicalSpec, offset) from --spec, --builtin or inline expressions."""
    try:
        offset = Fraction(args.offset)
    except (ValueError, ZeroDivisionError):
        raise SpecError(f"bad --offset: {args.offset!r}")

    if args.spec is not None:
        return load_spec(args.spec), offset
    if args.builtin is not None:
        entry = get_builtin(args.builtin)
        return entry.spec, offset + entry.offset

    if args.p is not None:
        if args.b is not None or args.r is not None:
            raise SpecError("a power form takes --a and --p only")
        spec = RadicalSpec(
            kind=Kind.POWER,
            a=parse_sequence_expr(args.a),
            p=parse_sequence_expr(args.p),
            label="inline",
        )
    else:
        b = args.b if args.b is not None else "1"
        spec = RadicalSpec(
            kind=Kind.RADICAL,
            a=parse_sequence_expr(args.a),
            b=parse_sequence_expr(b) if b.strip() != "1" else None,
            r=parse_sequence_expr(args.r if args.r is not None else "2"),
            label="inline",
        )
    return spec, offset


def _shifted(x, offset, precision_bits):
    if offset == 0:
        return x
    with mpmath.workprec(precision_bits):
        return x + to_mpf(offset)


def _write(text):
    sys.stdout.write(text)
    sys.stdout.flush()


def cmd_eval():
    args = CFG().args
    spec, offset = spec_from_args(args)
    if args.depth < 1:
        raise SpecError(f"depth must be >= 1, got {args.depth}")

    approx = approximant(spec, args.depth, args.precision)
    bits = approx.precision_bits
    log.info("evaluated depth %s at %s bits", args.depth, bits)
    record = {
        "label": spec.label or "",
        "n": args.depth,
        "value": render_real(_shifted(approx.value, offset, bits), bits, args.format),
        "precision_bits": bits,
        "rounding_bound": render_real(approx.rounding_bound, bits, args.format),
    }
    _write(emit_record(record, args.format))


def gap_row(spec, methods, precision_bits, depths):
    """
    True gap and gap bounds at original depth n. `depths` is (n, m, m_next):
    v_n and v_{n+1} are the normalized approximants at m and m_next. Runs in
    worker processes.
    """
    n, m, m_next = depths
    lo = tail_table(spec, m, precision_bits)
    row = {"n": n, "approximant": lo.approximant}
    if m_next == m:
        # a_{n+1} = 0
        row["true_gap"] = mpmath.mpf(0)
        for method in methods:
            row[method] = mpmath.mpf(0)
        return row

    hi = tail_table(spec, m_next, precision_bits)
    with mpmath.workprec(precision_bits):
        row["true_gap"] = hi.approximant - lo.approximant
    for method in methods:
        row[method] = bounds.gap_bound(spec, m, method, precision_bits).value
    return row


def cmd_gaps():
    args = CFG().args
    spec, offset = spec_from_args(args)
    if args.n_min < 1 or args.n_max < args.n_min:
        raise SpecError(f"bad depth range {args.n_min}..{args.n_max}")
    norm, _ = normalize_to_depth(spec, args.n_max, lookahead=1)
    methods = args.methods or [bounds.default_method(norm)]
    for m in methods:
        if m not in bounds.METHODS:
            raise SpecError(f"unknown method {m!r}; choose from {', '.join(bounds.METHODS)}")

    depths = [
        (n, norm.depth_for(n), norm.depth_for(n + 1))
        for n in range(args.n_min, args.n_max + 1)
    ]
    skipped = [d for d in depths if d[1] == 0]
    if skipped:
        log.info(
            "a_1 .. a_%s vanish: no gaps for depths %s..%s",
            skipped[-1][0],
            skipped[0][0],
            skipped[-1][0],
        )
        depths = [d for d in depths if d[1] > 0]

    bits = args.precision
    work = partial(gap_row, norm, methods, bits)
    if args.workers > 1:
        log.info("compute %s rows with %s worker processes", len(depths), args.workers)
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(work, depths))
    else:
        rows = [work(d) for d in depths]

    df = pd.DataFrame(rows, columns=["n", "approximant", "true_gap"] + methods)
    with mpmath.workprec(bits):
        for m in methods:
            # Empty where the gap is exactly 0.
            df[f"{m}/true_gap"] = [
                r[m] / r["true_gap"] if r["true_gap"] > 0 else None for r in rows
            ]
    df["approximant"] = [_shifted(x, offset, bits) for x in df["approximant"]]
    for col in df.columns:
        if col != "n":
            df[col] = [render_real(x, bits, args.format) for x in df[col]]
    _write(emit_table(df, args.format))


def cmd_limit():
    args = CFG().args
    spec, offset = spec_from_args(args)
    try:
        tol = mpmath.mpf(args.tol)
    except ValueError:
        raise SpecError(f"bad --tol: {args.tol!r}")

    est = limit_estimate(
        spec,
        tol,
        n_max=args.n_max,
        precision_bits=args.precision,
        strategy=args.strategy,
        budget=args.budget,
        method=args.method,
    )
    bits = est.precision_bits
    tb = est.tail_bound
    record = {
        "label": spec.label or "",
        "value": render_real(_shifted(est.value, offset, bits), bits, args.format),
        "n_used": est.n_used,
        "tail_bound": render_real(tb.value, bits, args.format),
        "certified": est.certified,
        "strategy": tb.strategy,
        "method": tb.method,
        "ratio_witness": render_real(tb.ratio_witness, bits, args.format),
        "precision_bits": bits,
        "rounding_bound": render_real(est.rounding_bound, bits, args.format),
    }
    _write(emit_record(record, args.format))

    if args.require_certified and not est.certified:
        log.error("no certified tail bound below %s up to n=%s", args.tol, est.n_used)
        sys.exit(EXIT_NOT_CERTIFIED)


def cmd_diagnose():
    args = CFG().args
    spec, _ = spec_from_args(args)
    kwargs = dict(
        window_fraction=args.window_fraction,
        flatness=args.flatness,
        precision_bits=args.precision,
    )
    if args.criterion == "polya_szego":
        kwargs["alpha_band"] = args.alpha_band
    report = CRITERIA[args.criterion](spec, args.horizon, **kwargs)

    bits = args.precision
    df = pd.DataFrame(report.rows())
    for col in df.columns:
        if col != "n":
            df[col] = [
                str(x) if isinstance(x, Fraction) else render_real(x, bits, args.format)
                for x in df[col]
            ]

    summary = {
        "criterion": report.criterion,
        "horizon": report.horizon,
        "verdict": report.verdict.value,
        "running_sup": render_real(report.running_sup, bits, args.format),
        "alpha_limsup_estimate": render_real(
            report.alpha_limsup_estimate, bits, args.format
        ),
        "caveat": report.caveat,
    }
    if args.format == "csv":
        _write(emit_table(df, "csv"))
    elif args.format == "json":
        _write(
            emit_record({**summary, "rows": df.to_dict(orient="records")}, "json")
        )
    else:
        _write(emit_table(df, "plain"))
        _write("\n" + emit_record(summary, "plain"))


COMMANDS = {
    "eval": cmd_eval,
    "gaps": cmd_gaps,
    "limit": cmd_limit,
    "diagnose": cmd_diagnose,
}
