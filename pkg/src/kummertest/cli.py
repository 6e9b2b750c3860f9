"""Command line interface: ``analyze`` one series or run a labeled ``corpus``.

Exit codes are part of the contract:

* 0: analysis completed (any verdict), or every corpus entry matched or was
  undecided;
* 1: at least one corpus entry definitely contradicted its label;
* 2: input errors (expression syntax, domain violations, bad parameter
  values, malformed corpus files);
* 64: usage errors (unknown flags, missing arguments, bad flag shapes).

Parse errors print a caret diagnostic pointing at the offending character.
"""

from __future__ import annotations

import argparse
import sys

from kummertest import classical as cls
from kummertest import corpus as corp
from kummertest import engine as eng
from kummertest import expr as ex
from kummertest import numeric
from kummertest import report as rpt
from kummertest import series as ser

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage failures exit with the usage code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("%s: error: %s\n" % (self.prog, message))
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="kummertest",
        description="Convergence analysis of positive series via Kummer "
                    "sequences and classical tests.")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser(
        "analyze", help="analyze one series term expression",
        description="Run the test battery on one series and report verdicts.")
    analyze.add_argument("expression", help="term expression, e.g. '1/n^2'")
    analyze.add_argument("--start", type=int, default=1, metavar="N",
                         help="first index of the series (default 1)")
    analyze.add_argument("--tests", default=",".join(cls.TEST_ORDER), metavar="LIST",
                         help="comma list from: %s" % ",".join(cls.TEST_ORDER))
    analyze.add_argument("--window", type=int, default=1000, metavar="M",
                         help="sampling and margin-check window (default 1000)")
    analyze.add_argument("--probe-window", type=int, default=10000, metavar="M",
                         help="positivity probing window (default 10000)")
    analyze.add_argument("--precision", type=int, default=128, metavar="BITS",
                         help="significand bits for approximate arithmetic "
                              "(default 128)")
    analyze.add_argument("--b1", metavar="V",
                         help="seed the diagnostic sequence with B_N = V "
                              "(integer, fraction p/q, or decimal)")
    analyze.add_argument("--rho", metavar="V",
                         help="margin threshold for condition checks "
                              "(default: adaptive)")
    analyze.add_argument("--seeds", default="1,2,4,8", metavar="LIST",
                         help="comma list of sweep seeds (default 1,2,4,8)")
    analyze.add_argument("--sum-cap", metavar="V",
                         help="certify divergence if partial sums provably "
                              "exceed this bound")
    analyze.add_argument("--format", choices=("text", "json", "csv"),
                         default="text", help="output format (default text)")
    analyze.add_argument("--emit-b", action="store_true",
                         help="stream the diagnostic sequence as CSV rows "
                              "n, a_n, B_n (requires --format csv)")
    analyze.add_argument("--rational", action="store_true",
                         help="render exact values as fractions in CSV output")
    analyze.set_defaults(func=cmd_analyze)

    corpus = sub.add_parser(
        "corpus", help="evaluate a labeled corpus file",
        description="Analyze every series in a corpus file and compare fused "
                    "verdicts against the labels.")
    corpus.add_argument("path", nargs="?",
                        help="corpus file (see --bundled for the packaged one)")
    corpus.add_argument("--bundled", action="store_true",
                        help="use the corpus bundled with the package")
    corpus.add_argument("--format", choices=("text", "json"), default="text",
                        help="output format (default text)")
    corpus.add_argument("--jobs", type=int, default=1, metavar="K",
                        help="worker processes (default 1)")
    corpus.add_argument("--window", type=int, default=1000, metavar="M",
                        help="sampling and margin-check window (default 1000)")
    corpus.add_argument("--probe-window", type=int, default=10000, metavar="M",
                        help="positivity probing window (default 10000)")
    corpus.add_argument("--precision", type=int, default=128, metavar="BITS",
                        help="significand bits (default 128)")
    corpus.set_defaults(func=cmd_corpus)
    return parser


def _input_error(message: str) -> int:
    sys.stderr.write("error: %s\n" % message)
    return EXIT_INPUT


def _usage_error(message: str) -> int:
    sys.stderr.write("usage error: %s\n" % message)
    return EXIT_USAGE


def _print_parse_error(text: str, err: ex.ParseError) -> None:
    sys.stderr.write("error: %s\n" % err.message)
    sys.stderr.write("  %s\n" % text)
    sys.stderr.write("  %s^\n" % (" " * err.offset))


def _parse_rational_arg(value, name: str):
    if value is None:
        return None
    try:
        return numeric.parse_rational(value)
    except ValueError:
        raise ValueError("%s must be an integer, fraction p/q, or decimal; "
                         "got %r" % (name, value))


def _analysis_config(args) -> cls.AnalysisConfig:
    tests = tuple(t.strip() for t in args.tests.split(",") if t.strip()) \
        if getattr(args, "tests", None) else cls.TEST_ORDER
    seeds_text = getattr(args, "seeds", None)
    if seeds_text:
        seeds = tuple(numeric.parse_rational(v) for v in seeds_text.split(","))
    else:
        seeds = (numeric.exact(1), numeric.exact(2), numeric.exact(4), numeric.exact(8))
    return cls.AnalysisConfig(
        window=args.window,
        probe_window=args.probe_window,
        precision=args.precision,
        seeds=seeds,
        tests=tests,
        rho=_parse_rational_arg(getattr(args, "rho", None), "--rho"),
        b1=_parse_rational_arg(getattr(args, "b1", None), "--b1"),
        sum_cap=_parse_rational_arg(getattr(args, "sum_cap", None), "--sum-cap"),
    )


def cmd_analyze(args) -> int:
    try:
        tree = ex.parse(args.expression)
    except ex.ParseError as err:
        _print_parse_error(args.expression, err)
        return EXIT_INPUT

    if args.emit_b and args.format != "csv":
        return _usage_error("--emit-b requires --format csv")
    if args.format == "csv" and not args.emit_b:
        return _usage_error("--format csv is the delimited sequence table; "
                            "pass --emit-b to request it")

    try:
        config = _analysis_config(args)
        s = ser.make_series(tree, args.start)
    except ValueError as err:
        return _input_error(str(err))

    try:
        if args.emit_b:
            numeric.set_precision(config.precision)
            seq = cls.diagnostic_sequence(s, config)
            sys.stdout.write(rpt.render_csv(s, seq, rational=args.rational))
            return EXIT_OK
        analysis = cls.full_analysis(s, config)
    except ser.PositivityViolation as err:
        return _input_error(str(err))
    except numeric.DomainError as err:
        return _input_error("domain error while evaluating %s: %s" % (s.text, err))
    except numeric.ResourceError as err:
        return _input_error(str(err))

    if args.format == "json":
        sys.stdout.write(rpt.render_json(analysis))
    else:
        sys.stdout.write(rpt.render_text(analysis))
    return EXIT_OK


def _corpus_text(results) -> str:
    lines = []
    width = max((len(r.entry.expression) for r in results), default=10)
    for r in results:
        if r.matched is None:
            status = "undecided"
        elif r.matched:
            status = "ok"
        else:
            status = "MISMATCH"
        fused = r.report["fused"]
        conf = fused["confidence"] or "-"
        lines.append("%-9s %-*s  start=%-3d label=%-9s fused=%-12s (%s)" % (
            status, width, r.entry.expression, r.entry.start, r.entry.label,
            fused["outcome"], conf))
    matched = sum(1 for r in results if r.matched is True)
    undecided = sum(1 for r in results if r.matched is None)
    mismatched = sum(1 for r in results if r.matched is False)
    lines.append("%d entries: %d matched, %d undecided, %d mismatched" % (
        len(results), matched, undecided, mismatched))
    return "\n".join(lines) + "\n"


def _corpus_json(results) -> str:
    import json

    payload = {
        "entries": [
            {
                "expression": r.entry.expression,
                "start": r.entry.start,
                "label": r.entry.label,
                "matched": r.matched,
                "report": r.report,
            }
            for r in results
        ],
        "summary": {
            "total": len(results),
            "matched": sum(1 for r in results if r.matched is True),
            "undecided": sum(1 for r in results if r.matched is None),
            "mismatched": sum(1 for r in results if r.matched is False),
        },
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def cmd_corpus(args) -> int:
    if args.bundled and args.path:
        return _usage_error("give either a corpus path or --bundled, not both")
    if args.bundled:
        path = corp.bundled_corpus_path()
    elif args.path:
        path = args.path
    else:
        return _usage_error("a corpus path (or --bundled) is required")

    try:
        entries = corp.load_corpus(path)
    except OSError as err:
        return _input_error("cannot read corpus: %s" % err)
    except corp.CorpusError as err:
        return _input_error("malformed corpus: %s" % err)

    if not entries:
        if args.format == "json":
            sys.stdout.write('{\n  "entries": [],\n  "summary": {"total": 0}\n}\n')
        else:
            sys.stdout.write("0 entries\n")
        return EXIT_OK

    try:
        config = cls.AnalysisConfig(window=args.window,
                                    probe_window=args.probe_window,
                                    precision=args.precision)
    except ValueError as err:
        return _input_error(str(err))
    if args.jobs < 1:
        return _input_error("--jobs must be at least 1")

    try:
        results = corp.run_corpus(entries, config, jobs=args.jobs)
    except ser.PositivityViolation as err:
        return _input_error(str(err))
    except (numeric.DomainError, numeric.ResourceError) as err:
        return _input_error(str(err))

    if args.format == "json":
        sys.stdout.write(_corpus_json(results))
    else:
        sys.stdout.write(_corpus_text(results))
    return EXIT_MISMATCH if any(r.matched is False for r in results) else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
