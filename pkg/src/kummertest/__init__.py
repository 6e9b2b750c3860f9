"""Convergence analysis of positive series via Kummer sequences and classical tests."""

from kummertest.numeric import (
    NumericValue,
    TriBool,
    DomainError,
    ResourceError,
    exact,
    approx,
    set_precision,
    get_precision,
)
from kummertest.expr import ParseError, parse, to_text, evaluate, EvalMode
from kummertest.series import (
    Series,
    PositivityViolation,
    make_series,
    term,
    partial_sum,
    oracle_tail_bounds,
)
from kummertest.engine import (
    KummerSequence,
    ConditionReport,
    ConditionOutcome,
    build_recursive,
    build_closed_form,
    construct_from_sum,
    check_condition,
    check_rate_form,
    scale_margin,
    sufficiency_bound,
    seed_sweep,
)
from kummertest.classical import AnalysisConfig, Outcome, Confidence, full_analysis

__version__ = "0.1.0"

__all__ = [
    "NumericValue",
    "TriBool",
    "DomainError",
    "ResourceError",
    "exact",
    "approx",
    "set_precision",
    "get_precision",
    "ParseError",
    "parse",
    "to_text",
    "evaluate",
    "EvalMode",
    "Series",
    "PositivityViolation",
    "make_series",
    "term",
    "partial_sum",
    "oracle_tail_bounds",
    "KummerSequence",
    "ConditionReport",
    "ConditionOutcome",
    "build_recursive",
    "build_closed_form",
    "construct_from_sum",
    "check_condition",
    "check_rate_form",
    "scale_margin",
    "sufficiency_bound",
    "seed_sweep",
    "AnalysisConfig",
    "Outcome",
    "Confidence",
    "full_analysis",
    "__version__",
]
