"""Rendering of analysis results: stable JSON, readable text, delimited B tables.

JSON output is deterministic byte for byte for a given analysis: keys are
sorted, floats are rendered through ``repr`` as strings (numeric leaves that
carry precision are strings throughout), and no timing or environment data is
included.  The top-level keys are ``expression``, ``start``, ``tests`` (list
of ``{id, outcome, confidence, witness}``), ``fused``, and ``kummer``.

Text output targets human readers: ten significant digits, with a ``≈``
marker in front of values that are approximations rather than exact
rationals.

CSV output streams the diagnostic sequence as ``n, a_n, B_n`` rows with
thirty significant digits, or exact ``p/q`` strings under ``rational=True``.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Optional

from kummertest import engine as eng
from kummertest import numeric
from kummertest import series as ser
from kummertest.classical import AnalysisReport, Confidence, TestVerdict

__all__ = [
    "report_to_dict",
    "render_json",
    "render_text",
    "render_csv",
]


def _clean(value):
    """Make a witness value JSON-stable: floats become repr strings."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return value
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    return str(value)


def report_to_dict(report: AnalysisReport) -> dict:
    """Plain-data form of an analysis report (the stable JSON schema)."""
    return {
        "expression": report.expression,
        "start": report.start,
        "tests": [
            {
                "id": v.test_id,
                "outcome": v.outcome.value,
                "confidence": v.confidence.value if v.confidence else None,
                "witness": _clean(v.witness),
            }
            for v in report.verdicts
        ],
        "fused": {
            "outcome": report.fused_outcome.value,
            "confidence": (report.fused_confidence.value
                           if report.fused_confidence else None),
            "source": report.fused_source,
        },
        "kummer": _clean(report.kummer) if report.kummer is not None else None,
    }


def render_json(report: AnalysisReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"


def _witness_line(verdict: TestVerdict) -> str:
    w = verdict.witness
    parts = []
    if w.get("estimate") is not None:
        parts.append("estimate=%.10g" % w["estimate"])
        if "stability" in w:
            parts.append("stability=%.3g" % w["stability"])
        if "band" in w:
            parts.append("band=%.3g" % w["band"])
    cert = w.get("margin_certificate")
    if cert:
        parts.append("margins[%d..%d]=%s@rho=%s" % (
            cert["window"][0], cert["window"][1], cert["outcome"], cert["rho"]))
    if "ratio_bound" in w:
        parts.append("ratio_bound=%.6g" % w["ratio_bound"])
    if "ratio_floor" in w:
        parts.append("ratio_floor=%.6g" % w["ratio_floor"])
    if w.get("origin"):
        parts.append("origin=%s" % w["origin"])
    if w.get("oracle"):
        parts.append("oracle=%s" % w["oracle"]["kind"])
    if w.get("condition"):
        parts.append("condition=%s" % w["condition"]["outcome"])
    if w.get("first_nonpositive") is not None:
        parts.append("first_nonpositive=%d" % w["first_nonpositive"])
    if w.get("crossings"):
        parts.append("crossings=%s" % ";".join(
            "%s@%s" % (seed, idx) for seed, idx in w["crossings"]))
    if w.get("reason"):
        parts.append("(%s)" % w["reason"])
    return " ".join(parts)


def render_text(report: AnalysisReport) -> str:
    """Human-readable report, one block per test plus the fused verdict."""
    exact_mode = ser.make_series(report.expression, report.start).exact_mode
    out = []
    out.append("series: %s  (from n=%d, %s evaluation)" % (
        report.expression, report.start, "exact" if exact_mode else "approximate"))
    fused = report.fused_outcome.value
    conf = report.fused_confidence.value if report.fused_confidence else "no confidence"
    src = (" via %s" % report.fused_source) if report.fused_source else ""
    out.append("fused verdict: %s (%s%s)" % (fused, conf, src))
    out.append("")
    for verdict in report.verdicts:
        head = "%-8s %-13s %s" % (
            verdict.test_id, verdict.outcome.value,
            verdict.confidence.value if verdict.confidence else "-")
        line = _witness_line(verdict)
        out.append(head if not line else head + "  " + line)
    if report.kummer:
        k = report.kummer
        out.append("")
        fnp = k["first_nonpositive"]
        out.append("kummer sequence: N=%d seed=%s first_nonpositive=%s" % (
            k["N"], k["seed"], fnp if fnp is not None else "none"))
        if k["values_preview"]:
            # Fractions are exact by construction; bare decimals on an
            # approximate series carry the approximation marker.
            shown = ", ".join(
                v if exact_mode or "/" in v else "≈" + v
                for v in k["values_preview"])
            out.append("  B preview: %s" % shown)
    return "\n".join(out) + "\n"


def render_csv(s: ser.Series, seq: eng.KummerSequence, rational: bool = False,
               significant: int = 30) -> str:
    """The diagnostic table as ``n, a_n, B_n`` rows (header included)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "a_n", "B_n"])
    mode = seq.eval_mode
    for n in range(seq.start, seq.last + 1):
        a_n = ser.cached_term(s, n, mode)
        b_n = seq.value_at(n)
        writer.writerow([
            n,
            _csv_value(a_n, rational, significant),
            _csv_value(b_n, rational, significant),
        ])
    return buf.getvalue()


def _csv_value(value: numeric.NumericValue, rational: bool, significant: int) -> str:
    if rational and value.is_exact:
        return numeric.format_rational(value)
    return numeric.format_value(value, significant)
