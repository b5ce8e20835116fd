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


import argparse
import json
import logging
import os
import textwrap
from types import SimpleNamespace

from radix.bounds import METHODS, STRATEGIES
from radix.convergence import CRITERIA, DEFAULT_FLATNESS, DEFAULT_WINDOW_FRACTION
from radix.evalcore import DEFAULT_PRECISION


log = logging.getLogger(__name__)

_CFG = SimpleNamespace()

_EPILOG = """
Spec sources (one of):
  --spec FILE.json     JSON spec, e.g. {"kind": "radical", "a": "n", "r": "2"}
  --builtin NAME       golden, sqrt2plus, ex-nested-n, ex-weighted-n,
                       ramanujan, constant(a,b,r)
  --a EXPR [--b EXPR] [--r EXPR] [--p EXPR]
                       inline sequence expressions in n

Exit codes: 0 ok, 2 bad spec, 3 evaluation failure, 4 not certified.
"""


def CFG():
    return _CFG


def _default_precision(parser):
    value = os.environ.get("RADIX_PRECISION_BITS")
    if value is None:
        return DEFAULT_PRECISION
    try:
        return int(value)
    except ValueError:
        parser.error(f"bad RADIX_PRECISION_BITS: {value!r}")


def _common_parser(default_precision):
    common = argparse.ArgumentParser(add_help=False)

    source = common.add_argument_group("spec source")
    source.add_argument("--spec", metavar="FILE.json", help="Path to a JSON spec")
    source.add_argument("--builtin", metavar="NAME", help="Name of a builtin radical")
    source.add_argument("--a", metavar="EXPR", help="Radicands a_n")
    source.add_argument("--b", metavar="EXPR", help="Weights b_n (default: 1)")
    source.add_argument("--r", metavar="EXPR", help="Root indices r_n (default: 2)")
    source.add_argument(
        "--p", metavar="EXPR", help="Exponents p_n; makes the spec a power form"
    )

    common.add_argument(
        "--precision",
        type=int,
        default=default_precision,
        metavar="BITS",
        help=f"Working precision in bits (default: {default_precision})",
    )
    common.add_argument("--format", choices=("plain", "csv", "json"), default="plain")
    common.add_argument(
        "--offset",
        default="0",
        metavar="RATIONAL",
        help="Constant added to rendered approximants and limits",
    )
    return common


def parse_args(argv=None):
    parser = argparse.ArgumentParser(
        prog="radix",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description="Evaluates continued radicals and bounds their truncation error",
        epilog=textwrap.dedent(_EPILOG).strip(),
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Log debug output")

    common = _common_parser(_default_precision(parser))
    subparsers = parser.add_subparsers(
        help="what to compute", dest="command", metavar="command"
    )
    subparsers.required = True

    p_eval = subparsers.add_parser("eval", parents=[common], help="Evaluate v_n")
    p_eval.add_argument("-n", "--depth", type=int, required=True, help="Depth n")

    p_gaps = subparsers.add_parser(
        "gaps", parents=[common], help="Tabulate gaps and gap bounds"
    )
    p_gaps.add_argument("--n-min", type=int, default=1)
    p_gaps.add_argument("--n-max", type=int, default=20)
    p_gaps.add_argument(
        "--methods",
        type=lambda s: [m.strip() for m in s.split(",") if m.strip()],
        help=f"Comma-separated list from: {', '.join(METHODS)}",
    )
    p_gaps.add_argument(
        "--workers", type=int, default=1, help="Process pool size (default: 1)"
    )

    p_limit = subparsers.add_parser(
        "limit", parents=[common], help="Estimate the limit with a tail bound"
    )
    p_limit.add_argument("--tol", default="1e-12", help="Target tolerance")
    p_limit.add_argument("--n-max", type=int, default=200)
    p_limit.add_argument(
        "--strategy", choices=STRATEGIES, default="geometric_majorization"
    )
    p_limit.add_argument("--budget", type=int, default=8, help="Tail window length")
    p_limit.add_argument("--method", choices=METHODS, help="Gap bound for the window")
    p_limit.add_argument(
        "--require-certified",
        dest="require_certified",
        action="store_true",
        default=True,
        help="Exit with code 4 unless the tail bound is certified (default)",
    )
    p_limit.add_argument(
        "--no-require-certified", dest="require_certified", action="store_false"
    )

    p_diag = subparsers.add_parser(
        "diagnose", parents=[common], help="Finite-horizon convergence diagnostics"
    )
    p_diag.add_argument("--horizon", type=int, default=40)
    p_diag.add_argument("--criterion", choices=sorted(CRITERIA), default="herschfeld")
    p_diag.add_argument(
        "--window-fraction", type=float, default=DEFAULT_WINDOW_FRACTION
    )
    p_diag.add_argument("--flatness", type=float, default=DEFAULT_FLATNESS)
    p_diag.add_argument(
        "--alpha-band",
        type=float,
        default=None,
        help="Indecision band around log 2 (default: 1/horizon)",
    )

    args = parser.parse_args(argv)

    n_sources = sum(x is not None for x in (args.spec, args.builtin, args.a))
    if n_sources != 1:
        parser.error("give exactly one spec source: --spec, --builtin or --a")
    if args.a is None and any(x is not None for x in (args.b, args.r, args.p)):
        parser.error("--b, --r and --p need --a")

    log.info("command line args: %s", json.dumps(vars(args), indent=2))

    _CFG.args = args
    return args
