"""Classical convergence tests, the Kummer probe, and verdict fusion.

Each test produces a :class:`TestVerdict` with an outcome (converges,
diverges, inconclusive), a confidence level, and a witness dictionary of
plain data.  The two confidence levels mean different things:

* ``certified``: every load-bearing inequality was checked in exact rational
  arithmetic over an explicit window, and a majorant certificate bounds the
  tail (for convergence) or the terms provably fail to vanish or the partial
  sums provably exceed a stated cap (for divergence).
* ``numerical``: the verdict extrapolates sampled statistics; the witness
  records the estimate and its stability so the reader can judge it.

Limit statistics are extrapolated with two Richardson levels over doubling
nodes: with ``x(n)`` sampled at ``b, 2b, 4b, 8b, 16b``, first differences
``2 x(2b) - x(b)`` cancel the ``1/n`` term and the second level cancels
``1/n^2``.  For p-series statistics this is exact (the estimator returns the
limit with zero spread); for logarithmically drifting statistics the spread
of the three second-level extrapolants stays visibly wide, which feeds the
decision band ``max(1e-6, 10 * stability)`` so that slow drifts are never
mistaken for clean limits.

The tests disagree on sensitivity, not on direction: the ratio and root
tests resolve geometric behavior, the Raabe statistic ``n (a_n/a_{n+1} - 1)``
resolves power-law behavior, the Gauss variant adds a ``1/n`` model residual
diagnostic and defers near the boundary, and the Bertrand statistic
``ln n * (Raabe - 1)`` resolves logarithmic refinements.  At the Bertrand
boundary there is one extra asymmetric rule: when the sampled statistic is
provably below 1 at every probe (its sound upper bounds are below 1), the
series is reported as a numerical divergence, since the corresponding Kummer
condition with the ``n ln n`` family cannot hold; approaching 1 from above
carries no such implication and stays inconclusive.

The Kummer probe ties the engine in: with a certified sum enclosure it
builds the sequence seeded just above the tail sum and verifies positivity
and margins; without one it sweeps seeds and reads uniform crossings as
divergence evidence.  Fusion is deterministic: the first certified verdict
in fixed test order wins; otherwise the majority direction among numerical
verdicts; otherwise inconclusive.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from gmpy2 import mpq

from kummertest import engine as eng
from kummertest import expr as ex
from kummertest import numeric
from kummertest import series as ser
from kummertest.numeric import NumericValue, ResourceError, TriBool, exact

__all__ = [
    "Outcome",
    "Confidence",
    "TestVerdict",
    "LimitEstimate",
    "AnalysisConfig",
    "AnalysisReport",
    "TEST_ORDER",
    "estimate_limit",
    "root_test",
    "ratio_test",
    "raabe_test",
    "gauss_test",
    "bertrand_test",
    "kummer_probe",
    "diagnostic_sequence",
    "full_analysis",
]

TEST_ORDER = ("root", "ratio", "raabe", "gauss", "bertrand", "kummer")

_TOL = 1e-6


class Outcome(enum.Enum):
    CONVERGES = "converges"
    DIVERGES = "diverges"
    INCONCLUSIVE = "inconclusive"


class Confidence(enum.Enum):
    CERTIFIED = "certified"
    NUMERICAL = "numerical"


@dataclass
class TestVerdict:
    test_id: str
    outcome: Outcome
    confidence: Optional[Confidence]
    witness: dict = field(default_factory=dict)


@dataclass
class LimitEstimate:
    """Richardson-extrapolated limit of a statistic sampled at doubling nodes."""

    nodes: list[int]
    raw: list[float]
    extrapolants: list[float]
    estimate: float
    stability: float

    @property
    def band(self) -> float:
        return max(_TOL, 10.0 * self.stability)


@dataclass
class AnalysisConfig:
    """Knobs for :func:`full_analysis`; validated on construction.

    ``window`` bounds the sampling and margin-check range, ``probe_window``
    the positivity probing range.  ``rho`` (optional) overrides the adaptive
    margin threshold used by certificates; ``b1`` (optional) pins the seed of
    the reported Kummer diagnostic instead of letting the probe choose;
    ``sum_cap`` (optional) is a user bound on partial sums whose exact
    exceedance certifies divergence.
    """

    window: int = 1000
    probe_window: int = 10000
    precision: int = 128
    seeds: tuple = (1, 2, 4, 8)
    tests: tuple = TEST_ORDER
    rho: Optional[NumericValue] = None
    b1: Optional[NumericValue] = None
    sum_cap: Optional[NumericValue] = None

    def __post_init__(self):
        if self.window < 2:
            raise ValueError("window must be at least 2")
        if self.probe_window < 2:
            raise ValueError("probe window must be at least 2")
        if self.precision < 64:
            raise ValueError("precision must be at least 64 bits")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        seeds = []
        for seed in self.seeds:
            value = seed if isinstance(seed, NumericValue) else exact(seed)
            if numeric.is_positive(value) is not TriBool.TRUE:
                raise ValueError("seeds must be positive, got %r" % (seed,))
            seeds.append(value)
        self.seeds = tuple(seeds)
        unknown = set(self.tests) - set(TEST_ORDER)
        if unknown:
            raise ValueError("unknown tests: %s" % ", ".join(sorted(unknown)))
        if self.rho is not None and numeric.is_positive(self.rho) is not TriBool.TRUE:
            raise ValueError("rho must be positive")


@dataclass
class AnalysisReport:
    expression: str
    start: int
    verdicts: list[TestVerdict]
    fused_outcome: Outcome
    fused_confidence: Optional[Confidence]
    fused_source: Optional[str]
    kummer: Optional[dict]

    def verdict_for(self, test_id: str) -> Optional[TestVerdict]:
        for verdict in self.verdicts:
            if verdict.test_id == test_id:
                return verdict
        return None


# -- limit estimation ---------------------------------------------------------------


def estimate_limit(stat: Callable[[int], float], window: int,
                   start: int = 1) -> Optional[LimitEstimate]:
    """Extrapolate ``lim stat(n)`` from five doubling nodes within the window.

    Returns None when the window cannot host the node ladder (below 32) or a
    sampled value is not finite.
    """
    if window < 32:
        return None
    base = max(start, window // 16, 2)
    nodes = [base * (1 << i) for i in range(5)]
    raw = [stat(n) for n in nodes]
    if not all(math.isfinite(v) for v in raw):
        return None
    r1 = [2.0 * raw[i + 1] - raw[i] for i in range(4)]
    r2 = [(4.0 * r1[i + 1] - r1[i]) / 3.0 for i in range(3)]
    spread = max(r2) - min(r2)
    drift = abs(r2[-1] - r1[-1])
    return LimitEstimate(nodes=nodes, raw=raw, extrapolants=r2,
                         estimate=r2[-1], stability=max(spread, drift))


def _estimate_witness(est: Optional[LimitEstimate]) -> dict:
    if est is None:
        return {"estimate": None, "reason": "window below 32 or non-finite statistic"}
    return {
        "estimate": est.estimate,
        "stability": est.stability,
        "band": est.band,
        "nodes": est.nodes,
        "raw": est.raw,
        "extrapolants": est.extrapolants,
    }


# -- statistics ----------------------------------------------------------------------


def _ratio_stat(s: ser.Series, mode: ex.EvalMode) -> Callable[[int], float]:
    def stat(n: int) -> float:
        return numeric.to_float(ser.term(s, n + 1, mode) / ser.term(s, n, mode))
    return stat


def _raabe_stat_value(s: ser.Series, n: int, mode: ex.EvalMode) -> NumericValue:
    r = ser.term(s, n, mode) / ser.term(s, n + 1, mode)
    return exact(n) * (r - 1)


def _raabe_stat(s: ser.Series, mode: ex.EvalMode) -> Callable[[int], float]:
    def stat(n: int) -> float:
        return numeric.to_float(_raabe_stat_value(s, n, mode))
    return stat


def _bertrand_stat_value(s: ser.Series, n: int, mode: ex.EvalMode) -> NumericValue:
    return numeric.ln(exact(n)) * (_raabe_stat_value(s, n, mode) - 1)


def _bertrand_stat(s: ser.Series, mode: ex.EvalMode) -> Callable[[int], float]:
    def stat(n: int) -> float:
        return numeric.to_float(_bertrand_stat_value(s, n, mode))
    return stat


def _root_stat(s: ser.Series, mode: ex.EvalMode) -> Callable[[int], float]:
    def stat(n: int) -> float:
        value = ser.term(s, n, mode)
        return numeric.to_float(numeric.exp(numeric.ln(value) / exact(n)))
    return stat


# -- certificate helpers --------------------------------------------------------------


def _dyadic(x: float) -> NumericValue:
    """Snap a float to a nearby exact dyadic rational (20 fractional bits)."""
    return exact(mpq(round(x * (1 << 20)), 1 << 20))


def _family_sequence(s: ser.Series, values: list[NumericValue], lo: int,
                     mode: ex.EvalMode, origin: str) -> eng.KummerSequence:
    return eng.KummerSequence(series=s, start=lo, seed=values[0], mode=None,
                              eval_mode=mode, values=values, origin=origin)


def _late_window(start: int, window: int) -> tuple[int, int]:
    lo = max(start, window // 2)
    hi = max(lo + 8, window)
    return lo, hi


def _margin_certificate(s: ser.Series, values: list[NumericValue], lo: int, hi: int,
                        rho: NumericValue, mode: ex.EvalMode, origin: str) -> dict:
    """Run an exact margin check for a family ``B_lo..B_hi`` held to rho."""
    seq = _family_sequence(s, values, lo, mode, origin)
    report = eng.check_condition(s, seq, rho)
    return {
        "family": origin,
        "rho": str(rho.q) if rho.is_exact else numeric.format_value(rho),
        "window": [lo, hi],
        "outcome": report.overall.value,
        "fail_index": report.fail_index,
    }


def _tail_certificate(s: ser.Series, window: int) -> Optional[ser.SumEnclosure]:
    horizon = max(window, s.start + 64)
    try:
        return ser.oracle_tail_bounds(s, s.start, horizon)
    except (ser.PositivityViolation, ResourceError):
        return None


# -- individual tests -------------------------------------------------------------------


def root_test(s: ser.Series, config: AnalysisConfig) -> TestVerdict:
    """Limit of ``a_n ** (1/n)``; below 1 converges, above 1 diverges.

    Root statistics are inherently approximate (n-th roots), so this test
    never certifies; it exists for corroboration.
    """
    mode = ser.default_mode(s)
    est = estimate_limit(_root_stat(s, mode), config.window, s.start)
    witness = _estimate_witness(est)
    if est is None:
        return TestVerdict("root", Outcome.INCONCLUSIVE, None, witness)
    if est.estimate < 1.0 - est.band:
        return TestVerdict("root", Outcome.CONVERGES, Confidence.NUMERICAL, witness)
    if est.estimate > 1.0 + est.band:
        return TestVerdict("root", Outcome.DIVERGES, Confidence.NUMERICAL, witness)
    return TestVerdict("root", Outcome.INCONCLUSIVE, None, witness)


def ratio_test(s: ser.Series, config: AnalysisConfig) -> TestVerdict:
    """Limit of ``a_{n+1}/a_n`` with exact window certificates at the extremes.

    A sub-1 sampled ratio bound over the late window yields the constant
    Kummer family ``B = 1/(1 - q)`` whose margins are at least ``1/q > 1``;
    with exact arithmetic and a tail certificate this is a certified
    convergence.  A late-window ratio floor at or above 1 certifies
    divergence, because positive terms with nondecreasing tails cannot
    vanish.
    """
    mode = ser.default_mode(s)
    est = estimate_limit(_ratio_stat(s, mode), config.window, s.start)
    witness = _estimate_witness(est)
    if est is None:
        return TestVerdict("ratio", Outcome.INCONCLUSIVE, None, witness)
    lo, hi = _late_window(s.start, config.window)

    if est.estimate < 1.0 - est.band:
        q_bar = None
        for k in range(lo, hi):
            bound = (ser.cached_term(s, k + 1, mode) / ser.cached_term(s, k, mode)).bounds()[1]
            if q_bar is None or bound > q_bar:
                q_bar = bound
        confidence = Confidence.NUMERICAL
        if q_bar is not None and q_bar < 1:
            witness["ratio_bound"] = numeric.to_float(exact(q_bar))
            b_const = exact(1) / (exact(1) - exact(q_bar))
            values = [b_const for _ in range(lo, hi + 1)]
            rho = config.rho if config.rho is not None else exact(1)
            cert = _margin_certificate(s, values, lo, hi, rho, mode, "constant")
            witness["margin_certificate"] = cert
            if (s.exact_mode and cert["outcome"] == "all-hold"
                    and _tail_certificate(s, config.window) is not None):
                confidence = Confidence.CERTIFIED
        return TestVerdict("ratio", Outcome.CONVERGES, confidence, witness)

    if est.estimate > 1.0 + est.band:
        floor = None
        for k in range(lo, hi):
            bound = (ser.cached_term(s, k + 1, mode) / ser.cached_term(s, k, mode)).bounds()[0]
            if floor is None or bound < floor:
                floor = bound
        confidence = Confidence.NUMERICAL
        if floor is not None and floor >= 1:
            witness["ratio_floor"] = numeric.to_float(exact(floor))
            witness["terms_do_not_vanish"] = True
            if s.exact_mode:
                confidence = Confidence.CERTIFIED
        return TestVerdict("ratio", Outcome.DIVERGES, confidence, witness)

    return TestVerdict("ratio", Outcome.INCONCLUSIVE, None, witness)


def raabe_test(s: ser.Series, config: AnalysisConfig) -> TestVerdict:
    """Limit of ``n (a_n/a_{n+1} - 1)``; above 1 converges, below 1 diverges.

    On a convergent call the linear family ``B_n = n`` is checked exactly over
    the late window at an adaptive threshold ``rho = (estimate - 1) / 2`` (or
    the configured rho); together with a tail certificate that upgrades the
    verdict to certified.
    """
    mode = ser.default_mode(s)
    est = estimate_limit(_raabe_stat(s, mode), config.window, s.start)
    witness = _estimate_witness(est)
    if est is None:
        return TestVerdict("raabe", Outcome.INCONCLUSIVE, None, witness)

    if est.estimate > 1.0 + est.band:
        lo, hi = _late_window(s.start, config.window)
        if config.rho is not None:
            rho = config.rho
        else:
            rho = _dyadic((est.estimate - 1.0) / 2.0)
            if not (numeric.is_positive(rho) is TriBool.TRUE):
                rho = exact(1, 1024)
        values = [exact(k) for k in range(lo, hi + 1)]
        cert = _margin_certificate(s, values, lo, hi, rho, mode, "linear")
        witness["margin_certificate"] = cert
        confidence = Confidence.NUMERICAL
        if (s.exact_mode and cert["outcome"] == "all-hold"
                and _tail_certificate(s, config.window) is not None):
            confidence = Confidence.CERTIFIED
        return TestVerdict("raabe", Outcome.CONVERGES, confidence, witness)

    if est.estimate < 1.0 - est.band:
        return TestVerdict("raabe", Outcome.DIVERGES, Confidence.NUMERICAL, witness)

    return TestVerdict("raabe", Outcome.INCONCLUSIVE, None, witness)


def gauss_test(s: ser.Series, config: AnalysisConfig) -> TestVerdict:
    """Raabe statistic with a ``h + c/n`` model fit and residual diagnostics.

    The fitted ``h`` is read like the Raabe limit, but a boundary value defers
    to the Bertrand refinement instead of guessing: expansions with ``h = 1``
    are exactly the ones the plain statistic cannot decide.
    """
    mode = ser.default_mode(s)
    est = estimate_limit(_raabe_stat(s, mode), config.window, s.start)
    witness = _estimate_witness(est)
    if est is None:
        return TestVerdict("gauss", Outcome.INCONCLUSIVE, None, witness)
    n1, n2 = est.nodes[-2], est.nodes[-1]
    x1, x2 = est.raw[-2], est.raw[-1]
    c = (x1 - x2) / (1.0 / n1 - 1.0 / n2)
    h = x2 - c / n2
    residuals = [est.raw[i] - (h + c / est.nodes[i]) for i in range(len(est.nodes) - 2)]
    witness.update({"h": h, "slope": c,
                    "residuals": residuals,
                    "max_residual": max(abs(r) for r in residuals)})
    if est.estimate > 1.0 + est.band:
        return TestVerdict("gauss", Outcome.CONVERGES, Confidence.NUMERICAL, witness)
    if est.estimate < 1.0 - est.band:
        return TestVerdict("gauss", Outcome.DIVERGES, Confidence.NUMERICAL, witness)
    witness["deferred"] = "statistic within band of 1; logarithmic refinement needed"
    return TestVerdict("gauss", Outcome.INCONCLUSIVE, None, witness)


def bertrand_test(s: ser.Series, config: AnalysisConfig) -> TestVerdict:
    """Limit of ``ln n * (Raabe - 1)``; above 1 converges, below 1 diverges.

    Near the boundary one asymmetric refinement applies: when every sampled
    statistic is provably below 1 (sound upper bounds), the series is reported
    as a numerical divergence; the matching Kummer family ``B_n = n ln n``
    then has no room for a positive margin.  Statistics above 1 near the
    boundary stay inconclusive.
    """
    mode = ser.default_mode(s)
    est = estimate_limit(_bertrand_stat(s, mode), config.window, s.start)
    witness = _estimate_witness(est)
    if est is None:
        return TestVerdict("bertrand", Outcome.INCONCLUSIVE, None, witness)
    if est.estimate > 1.0 + est.band:
        return TestVerdict("bertrand", Outcome.CONVERGES, Confidence.NUMERICAL, witness)
    if est.estimate < 1.0 - est.band:
        return TestVerdict("bertrand", Outcome.DIVERGES, Confidence.NUMERICAL, witness)
    if est.estimate <= 1.0 + est.band:
        all_below = True
        lo = max(s.start, config.window // 4)
        step = max(1, (config.window - lo) // 16)
        samples = list(range(lo, config.window + 1, step))
        for n in samples:
            hi_bound = _bertrand_stat_value(s, n, mode).bounds()[1]
            if hi_bound >= 1:
                all_below = False
                break
        witness["upper_bounds_below_one"] = all_below
        witness["sampled"] = samples
        if all_below:
            witness["reason"] = ("statistic provably below 1 at every sample; "
                                 "the n*ln(n) family admits no positive margin")
            return TestVerdict("bertrand", Outcome.DIVERGES, Confidence.NUMERICAL, witness)
    return TestVerdict("bertrand", Outcome.INCONCLUSIVE, None, witness)


def kummer_probe(s: ser.Series, config: AnalysisConfig) -> TestVerdict:
    """Construct-and-verify probe for the Kummer condition itself.

    With a sum enclosure: seed just above the tail, verify positivity through
    the probe window and margins over the check window; exact all-hold margins
    plus the enclosure certify convergence.  Without one: sweep seeds; if every
    seed crosses to nonpositive within the probe window, report numerical
    divergence.  An exact partial-sum cap exceedance certifies divergence.
    """
    mode = ser.default_mode(s)
    witness: dict = {}

    if config.sum_cap is not None:
        total = ser.partial_sum(s, s.start, config.probe_window, mode)
        if numeric.cmp_gt(total, config.sum_cap) is TriBool.TRUE:
            first_over = config.probe_window
            for m in range(s.start, config.probe_window + 1):
                part = ser.partial_sum(s, s.start, m, mode)
                if numeric.cmp_gt(part, config.sum_cap) is TriBool.TRUE:
                    first_over = m
                    break
            witness["partial_sum_exceeds_cap"] = numeric.format_value(config.sum_cap)
            witness["cap_exceeded_at"] = first_over
            confidence = Confidence.CERTIFIED if s.exact_mode else Confidence.NUMERICAL
            return TestVerdict("kummer", Outcome.DIVERGES, confidence, witness)

    enclosure = _tail_certificate(s, config.window)
    if enclosure is not None:
        witness["oracle"] = dict(enclosure.certificate)
        try:
            seq = eng.construct_from_sum(s, enclosure.upper, s.start,
                                         config.probe_window, eval_mode=mode)
        except ResourceError as err:
            witness["resource"] = str(err)
            return TestVerdict("kummer", Outcome.INCONCLUSIVE, None, witness)
        witness["origin"] = seq.origin
        witness["seed"] = _format_seed(seq.seed)
        witness["first_nonpositive"] = seq.first_nonpositive
        witness["positive_through"] = seq.last if seq.positivity is TriBool.TRUE else None
        check_end = min(seq.last, max(config.window, s.start + 1))
        slice_values = seq.values[: check_end - seq.start + 1]
        check_seq = eng.KummerSequence(
            series=s, start=seq.start, seed=seq.seed, mode=seq.mode,
            eval_mode=seq.eval_mode, values=slice_values,
            first_nonpositive=None, first_undecided=None, origin=seq.origin)
        rho = config.rho if config.rho is not None else exact(1)
        report = eng.check_condition(s, check_seq, rho)
        witness["condition"] = {"window": [report.start, report.end],
                                "outcome": report.overall.value,
                                "fail_index": report.fail_index}
        if seq.positivity is TriBool.TRUE and report.overall is eng.ConditionOutcome.ALL_HOLD:
            confidence = Confidence.CERTIFIED if s.exact_mode else Confidence.NUMERICAL
            return TestVerdict("kummer", Outcome.CONVERGES, confidence, witness)
        if seq.positivity is not TriBool.FALSE and report.overall is not eng.ConditionOutcome.FAILS_AT:
            return TestVerdict("kummer", Outcome.CONVERGES, Confidence.NUMERICAL, witness)
        return TestVerdict("kummer", Outcome.INCONCLUSIVE, None, witness)

    try:
        results = eng.seed_sweep(s, config.seeds, s.start, config.probe_window,
                                 eval_mode=mode)
    except ResourceError as err:
        witness["resource"] = str(err)
        return TestVerdict("kummer", Outcome.INCONCLUSIVE, None, witness)
    witness["origin"] = "sweep"
    witness["crossings"] = [
        [numeric.format_value(r.seed, rational=r.seed.is_exact), r.first_nonpositive]
        for r in results
    ]
    if all(r.crossed for r in results):
        witness["reason"] = ("every tested seed was driven nonpositive within "
                             "the probe window")
        return TestVerdict("kummer", Outcome.DIVERGES, Confidence.NUMERICAL, witness)
    return TestVerdict("kummer", Outcome.INCONCLUSIVE, None, witness)


_TEST_FUNCS = {
    "root": root_test,
    "ratio": ratio_test,
    "raabe": raabe_test,
    "gauss": gauss_test,
    "bertrand": bertrand_test,
    "kummer": kummer_probe,
}


def _fuse(verdicts: list[TestVerdict]) -> tuple[Outcome, Optional[Confidence], Optional[str]]:
    for verdict in verdicts:
        if verdict.confidence is Confidence.CERTIFIED:
            return verdict.outcome, verdict.confidence, verdict.test_id
    votes = {"converges": 0, "diverges": 0}
    for verdict in verdicts:
        if verdict.confidence is Confidence.NUMERICAL and verdict.outcome is not Outcome.INCONCLUSIVE:
            votes[verdict.outcome.value] += 1
    if votes["converges"] > votes["diverges"]:
        return Outcome.CONVERGES, Confidence.NUMERICAL, "majority"
    if votes["diverges"] > votes["converges"]:
        return Outcome.DIVERGES, Confidence.NUMERICAL, "majority"
    return Outcome.INCONCLUSIVE, None, None


def diagnostic_sequence(s: ser.Series, config: AnalysisConfig) -> eng.KummerSequence:
    """The sequence shown in reports and streamed by the delimited output.

    A configured ``b1`` pins a recursion build with that seed.  Otherwise a
    certified sum enclosure seeds the always-positive construction; falling
    back to a recursion build from the first configured seed.  All variants
    run over the check window without stopping at a crossing, since the
    crossing index is exactly what the diagnostic is for.
    """
    mode = ser.default_mode(s)
    if config.b1 is not None:
        return eng.build_recursive(s, s.start, config.b1, config.window,
                                   eval_mode=mode, stop_at_nonpositive=False)
    enclosure = _tail_certificate(s, config.window)
    if enclosure is not None:
        return eng.construct_from_sum(s, enclosure.upper, s.start, config.window,
                                      eval_mode=mode)
    return eng.build_recursive(s, s.start, config.seeds[0], config.window,
                               eval_mode=mode, stop_at_nonpositive=False)


def _format_seed(seed) -> str:
    # From-sum seeds are exact dyadics with enormous denominators; show those
    # as decimals and keep small fractions verbatim.
    rational = seed.is_exact and seed.q.denominator < 10**12
    return numeric.format_value(seed, rational=rational)


def _kummer_section(s: ser.Series, config: AnalysisConfig) -> Optional[dict]:
    """Diagnostic sequence summary for the report: seed, positivity, preview."""
    seq = diagnostic_sequence(s, config)
    preview = [numeric.format_value(v, rational=v.is_exact and v.q.denominator < 10**12)
               for v in seq.values[:8]]
    return {
        "N": seq.start,
        "seed": _format_seed(seq.seed),
        "first_nonpositive": seq.first_nonpositive,
        "values_preview": preview,
    }


def full_analysis(s: ser.Series, config: Optional[AnalysisConfig] = None) -> AnalysisReport:
    """Run the selected tests in canonical order and fuse their verdicts.

    Sets the working precision from the config for the duration of the call.
    Tests always run in the fixed order root, ratio, raabe, gauss, bertrand,
    kummer (restricted to the configured selection), so reports are
    deterministic for a given configuration.
    """
    if config is None:
        config = AnalysisConfig()
    old_precision = numeric.get_precision()
    numeric.set_precision(config.precision)
    try:
        verdicts = []
        for test_id in TEST_ORDER:
            if test_id not in config.tests:
                continue
            verdicts.append(_TEST_FUNCS[test_id](s, config))
        outcome, confidence, source = _fuse(verdicts)
        kummer = _kummer_section(s, config)
        return AnalysisReport(
            expression=s.text, start=s.start, verdicts=verdicts,
            fused_outcome=outcome, fused_confidence=confidence,
            fused_source=source, kummer=kummer)
    finally:
        numeric.set_precision(old_precision)
