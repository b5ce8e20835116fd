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


import json
import logging
from io import StringIO

import mpmath
import pandas as pd
import pytablewriter
from mpmath.libmp import prec_to_dps

log = logging.getLogger(__name__)


def repr_dps(precision_bits):
    """Decimal digits that round-trip a `precision_bits`-bit float."""
    return prec_to_dps(precision_bits) + 3


def render_real(x, precision_bits, fmt="plain"):
    """
    Decimal string for a working-precision real; json mode appends the
    precision, e.g. "1.4142135623730950488016887242096980786@128".
    """
    if x is None:
        return ""
    text = mpmath.nstr(mpmath.mpf(x), repr_dps(precision_bits))
    if fmt == "json":
        return f"{text}@{precision_bits}"
    return text


def get_mdtable(header_list, value_matrix):
    """
    Generate table text in Markdown.
    """
    if not value_matrix:
        return ""

    tw = pytablewriter.MarkdownTableWriter()
    tw.stream = StringIO()
    tw.headers = header_list
    tw.value_matrix = value_matrix
    tw.margin = 1
    tw.write_table()
    return tw.stream.getvalue()


def emit_table(df, fmt):
    """Render a DataFrame of pre-rendered cells as csv, json or Markdown."""
    if fmt == "csv":
        return df.to_csv(index=False)
    if fmt == "json":
        return json.dumps(df.to_dict(orient="records"), indent=2) + "\n"
    return get_mdtable(list(df.columns), df.values.tolist())


def emit_record(record, fmt):
    """Render one flat dict of pre-rendered fields."""
    if fmt == "json":
        return json.dumps(record, indent=2) + "\n"
    if fmt == "csv":
        return pd.DataFrame([record]).to_csv(index=False)
    width = max(len(k) for k in record)
    return "".join(f"{k:<{width}}  {v}\n" for k, v in record.items())
