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
Evaluates continued radicals and power forms to arbitrary precision and
bounds their truncation error.
"""

__version__ = "0.1.0"


import logging
import sys

import radix.cfg as cfg
import radix.cli as cli
from radix.bounds import BoundsError
from radix.convergence import DiagnosticError
from radix.denest import DenestError
from radix.evalcore import EvaluationError
from radix.seqspec import ParseError, SpecError


log = logging.getLogger()
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s.%(msecs)03d %(levelname)s: %(message)s",
    datefmt="%y%m%d-%H:%M:%S",
)

EXIT_BAD_SPEC = 2
EXIT_EVALUATION = 3


def main(argv=None):
    args = cfg.parse_args(argv)
    if args.verbose:
        log.setLevel(logging.DEBUG)

    try:
        cli.COMMANDS[args.command]()
    except ParseError as exc:
        log.error("cannot parse spec: %s", exc)
        sys.exit(EXIT_BAD_SPEC)
    except SpecError as exc:
        log.error("bad spec: %s", exc)
        sys.exit(EXIT_BAD_SPEC)
    except (EvaluationError, DenestError, BoundsError, DiagnosticError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        sys.exit(EXIT_EVALUATION)
