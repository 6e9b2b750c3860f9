"""Labeled series corpus: loading, validation, and batch evaluation.

A corpus file holds one labeled series per line:

.. code-block:: text

    <expression> | <start> | converges|diverges | <comment>

``#`` starts a comment line; blank lines are skipped; the trailing comment
field is optional.  Loading validates eagerly (expression syntax, integer
start at least 1, known label) and reports the first bad line by number.

Batch runs evaluate every entry with one shared configuration and compare
the fused verdict against the label.  An inconclusive verdict never counts
as a mismatch; it is reported as undecided.  Entries can be evaluated in
parallel worker processes; workers receive only plain data and return plain
dictionaries, and results always come back in corpus order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from typing import Optional

from kummertest import classical as cls
from kummertest import expr as ex
from kummertest import report as rpt
from kummertest import series as ser

__all__ = [
    "CorpusEntry",
    "CorpusError",
    "CorpusResult",
    "load_corpus",
    "parse_corpus_text",
    "bundled_corpus_path",
    "run_corpus",
]

_LABELS = ("converges", "diverges")


class CorpusError(ValueError):
    """A corpus file could not be parsed; carries the 1-based line number."""

    def __init__(self, message: str, line_number: int):
        self.line_number = line_number
        super().__init__("line %d: %s" % (line_number, message))


@dataclass(frozen=True)
class CorpusEntry:
    expression: str
    start: int
    label: str
    comment: str
    line_number: int


@dataclass
class CorpusResult:
    """One evaluated entry: the report dictionary plus the label comparison.

    ``matched`` is True/False for a definite fused verdict, None when the
    analysis was inconclusive.
    """

    entry: CorpusEntry
    report: dict

    @property
    def outcome(self) -> str:
        return self.report["fused"]["outcome"]

    @property
    def matched(self) -> Optional[bool]:
        if self.outcome == "inconclusive":
            return None
        return self.outcome == self.entry.label


def parse_corpus_text(text: str) -> list[CorpusEntry]:
    """Parse corpus file content; raises :class:`CorpusError` on the first bad line."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split("|")]
        if len(fields) < 3:
            raise CorpusError(
                "expected 'expression | start | label | comment', got %r" % line,
                lineno)
        expression, start_text, label = fields[0], fields[1], fields[2]
        comment = fields[3] if len(fields) > 3 else ""
        try:
            tree = ex.parse(expression)
        except ex.ParseError as err:
            raise CorpusError("bad expression %r: %s" % (expression, err), lineno)
        try:
            start = int(start_text)
        except ValueError:
            raise CorpusError("start %r is not an integer" % start_text, lineno)
        if start < 1:
            raise CorpusError("start must be at least 1, got %d" % start, lineno)
        if label not in _LABELS:
            raise CorpusError(
                "label must be 'converges' or 'diverges', got %r" % label, lineno)
        entries.append(CorpusEntry(expression=ex.to_text(tree), start=start,
                                   label=label, comment=comment,
                                   line_number=lineno))
    return entries


def load_corpus(path) -> list[CorpusEntry]:
    """Load and validate a corpus file from disk."""
    with open(path, "r", encoding="utf-8") as handle:
        return parse_corpus_text(handle.read())


def bundled_corpus_path() -> str:
    """Filesystem path of the corpus that ships with the package."""
    return str(resources.files("kummertest").joinpath("data/corpus.txt"))


def _config_to_plain(config: cls.AnalysisConfig) -> dict:
    def opt(v):
        return None if v is None else str(v.q)

    return {
        "window": config.window,
        "probe_window": config.probe_window,
        "precision": config.precision,
        "seeds": [str(s.q) for s in config.seeds],
        "tests": list(config.tests),
        "rho": opt(config.rho),
        "b1": opt(config.b1),
        "sum_cap": opt(config.sum_cap),
    }


def _config_from_plain(plain: dict) -> cls.AnalysisConfig:
    from kummertest import numeric

    def opt(text):
        return None if text is None else numeric.parse_rational(text)

    return cls.AnalysisConfig(
        window=plain["window"],
        probe_window=plain["probe_window"],
        precision=plain["precision"],
        seeds=tuple(numeric.parse_rational(s) for s in plain["seeds"]),
        tests=tuple(plain["tests"]),
        rho=opt(plain["rho"]),
        b1=opt(plain["b1"]),
        sum_cap=opt(plain["sum_cap"]),
    )


def _evaluate_entry(job: tuple) -> dict:
    """Worker body: plain data in, plain report dictionary out."""
    expression, start, plain_config = job
    config = _config_from_plain(plain_config)
    s = ser.make_series(expression, start)
    report = cls.full_analysis(s, config)
    return rpt.report_to_dict(report)


def run_corpus(entries: list[CorpusEntry],
               config: Optional[cls.AnalysisConfig] = None,
               jobs: int = 1) -> list[CorpusResult]:
    """Evaluate every entry and compare fused verdicts against labels.

    With ``jobs > 1`` entries run in that many worker processes.  Results are
    returned in corpus order either way.
    """
    if config is None:
        config = cls.AnalysisConfig()
    plain = _config_to_plain(config)
    payload = [(e.expression, e.start, plain) for e in entries]
    if jobs > 1 and len(entries) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_evaluate_entry, payload))
    else:
        reports = [_evaluate_entry(job) for job in payload]
    return [CorpusResult(entry=e, report=r) for e, r in zip(entries, reports)]
