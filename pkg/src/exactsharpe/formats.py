"""Reading and writing the moments document, return CSVs and solver output.

Documents are JSON. Floats are written with ``repr``, the shortest string
that round-trips a 64-bit float, so a document written and read back gives
bit-identical numbers.
"""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .errors import DimensionMismatch, ParseError
from .estimation import ReturnSeries
from .moments import AssetMoments


def _floats(values, what):
    try:
        out = [float(x) for x in values]
    except (TypeError, ValueError):
        raise ParseError(f"{what} must be a list of numbers") from None
    if not all(math.isfinite(x) for x in out):
        raise ParseError(f"{what} contains non-finite values")
    return out


def moments_from_dict(doc, symmetrize: bool = False) -> AssetMoments:
    """Build moments from a parsed document.

    ``omega`` must be exactly symmetric unless ``symmetrize`` is set, in
    which case ``(omega + omega') / 2`` is used.
    """
    if not isinstance(doc, dict):
        raise ParseError("moments document must be a JSON object")
    missing = [k for k in ("mu", "omega") if k not in doc]
    if missing:
        raise ParseError(f"moments document is missing {', '.join(missing)}")
    mu = _floats(doc["mu"], "mu")
    if not isinstance(doc["omega"], list):
        raise ParseError("omega must be a list of rows")
    omega = [_floats(row, "omega row") for row in doc["omega"]]
    n = len(mu)
    if "n" in doc and doc["n"] != n:
        raise ParseError(f"n = {doc['n']!r} but mu has {n} entries")
    if len(omega) != n or any(len(row) != n for row in omega):
        raise ParseError(f"omega must be {n} x {n}")
    labels = doc.get("labels") or ()
    if labels and (len(labels) != n or not all(isinstance(x, str) for x in labels)):
        raise ParseError(f"labels must be {n} strings")
    omega = np.array(omega)
    if symmetrize:
        omega = (omega + omega.T) / 2.0
    elif not np.array_equal(omega, omega.T):
        i, j = np.argwhere(omega != omega.T)[0]
        raise ParseError(
            f"omega is not exactly symmetric at ({i}, {j}); pass --symmetrize to average"
        )
    try:
        return AssetMoments(np.array(mu), omega, tuple(labels))
    except DimensionMismatch as exc:
        raise ParseError(str(exc)) from None


def load_moments(text: str, symmetrize: bool = False) -> AssetMoments:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return moments_from_dict(doc, symmetrize)


def moments_to_dict(m: AssetMoments) -> dict:
    return {
        "n": m.n,
        "labels": list(m.labels),
        "mu": [float(x) for x in m.mu],
        "omega": [[float(x) for x in row] for row in m.omega],
    }


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def read_returns_csv(text: str) -> ReturnSeries:
    """Parse a header row of asset names followed by one row of decimal returns per period."""
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r]
    if len(rows) < 2:
        raise ParseError("CSV needs a header row and at least one data row")
    header = [h.strip() for h in rows[0]]
    if any(not h for h in header):
        raise ParseError("empty asset name in header")
    if len(set(header)) != len(header):
        raise ParseError("asset names in header must be unique")
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(f"line {lineno}: expected {len(header)} cells, got {len(row)}")
        try:
            values = [float(cell) for cell in row]
        except ValueError:
            raise ParseError(f"line {lineno}: missing or non-numeric cell") from None
        if not all(math.isfinite(v) for v in values):
            raise ParseError(f"line {lineno}: non-finite value")
        data.append(values)
    try:
        return ReturnSeries(tuple(header), np.array(data))
    except DimensionMismatch as exc:
        raise ParseError(str(exc)) from None


def report_to_dict(report) -> dict:
    return {"f": report.f, "g": report.g, "q": report.q}


def weights_csv(labels, weights) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["asset", "weight"])
    for label, w in zip(labels, weights):
        writer.writerow([label, repr(float(w))])
    return buf.getvalue()

